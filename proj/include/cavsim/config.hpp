#pragma once

// Configuration document: INI-style sections (cavity, pump, ensemble, dynamics,
// scenario) with unit-suffixed keys. Missing keys take the defaults below; unknown
// keys are rejected.

#include <cstdint>
#include <string>
#include <vector>

#include "cavsim/adiabatic.hpp"
#include "cavsim/model.hpp"
#include "cavsim/particles.hpp"

namespace cavsim {

struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error(Status::parse, w) {}
};
struct UnknownKeyError : Error {
  explicit UnknownKeyError(const std::string& w) : Error(Status::unknown_key, w) {}
};

/// Ensemble settings as written in the document; atom numbers follow from un0 and U.
struct EnsembleConfig {
  double un0 = 2.38;
  double gamma_lin = 0.6024;  // 1/s, calibrated: jump at 35 ms for chi0- = 0.49, UN0 = 2.38
  double beta_n0 = 6.024;     // 1/s, same calibration (ratio 10 to gamma_lin)
  double eta_ax = 0.5;
  double eta_rad = 0.3;
  double t0_kelvin = 90e-6;
  double mot_fraction = 0.05;  // chi-(0) / chi0- for asymmetric pumping

  EnsembleParams params(const CavityParams& cav) const;
};

struct PumpDoc {
  double chi0_plus = 0.51;
  double chi0_minus = 0.49;
  double xi = 1.0;  // power scale inside [xi_start, xi_end)
  double xi_start = 0.0;  // s
  double xi_end = 0.0;    // s

  PumpConfig params() const;
};

struct ScenarioConfig {
  double t_end = 0.1;         // s
  double output_dt = 10e-6;   // s
  double rtol = 1e-8;
  double atol = 1e-10;
  std::uint64_t seed = 1;
  double settle = 1e-3;  // s, ignored by the jump detector
  std::string preset;    // named parameter set for sweeps
  std::vector<double> chi0_minus_list{0.49, 0.46, 0.43, 0.36};
  std::vector<double> un0_list;  // empty: preset or interpolation
  std::vector<double> xi_list{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  double window_start = 10e-3;  // s
  double window_end = 12e-3;    // s
  std::vector<double> depth_factors{0.25, 0.5, 1.0, 2.0};
  double target_t_jump = 35e-3;  // s
  double analysis_start = 0.0;   // s, spectral analysis ignores earlier samples
};

struct Config {
  CavityParams cavity;
  PumpDoc pump;
  EnsembleConfig ensemble;
  DynamicsParams dynamics;
  ScenarioConfig scenario;

  void validate() const;
  EnsembleParams ensemble_params() const { return ensemble.params(cavity); }
};

/// Parses a document; defaults fill missing keys; the result is validated.
Config parse_config(const std::string& text);

/// Applies one `section.key=value` override without validating.
void set_config_value(Config& cfg, const std::string& path, const std::string& value);

/// Current value of `section.key` as text (round-trip precision).
std::string get_config_value(const Config& cfg, const std::string& path);

/// Full document with every key, parseable by parse_config.
std::string serialize_config(const Config& cfg);

/// All recognized `section.key` names in document order.
std::vector<std::string> config_keys();

/// When exactly one of pump.chi0_plus / pump.chi0_minus was given explicitly, sets the
/// other to its complement. Called by parse_config; exposed for callers that apply
/// overrides after parsing.
void complete_pump_fractions(Config& cfg, bool plus_given, bool minus_given);

}  // namespace cavsim
