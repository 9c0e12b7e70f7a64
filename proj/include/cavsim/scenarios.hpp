#pragma once

// Experimental protocols as reproducible runs driven by a Config: asymmetry sweeps,
// the power step, squeezing oscillations, the frequency-depth law, loss calibration
// and the adiabatic-versus-particle comparison.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cavsim/adiabatic.hpp"
#include "cavsim/config.hpp"
#include "cavsim/particles.hpp"
#include "cavsim/spectral.hpp"

namespace cavsim {

/// Initial coupling for a pump asymmetry. "paper-fig4" holds the simulated couplings
/// (49/46/43/36 % -> 2.38/2.23/2.15/1.75); "measured" holds the measured couplings of
/// the eight-trace family. Other asymmetries are interpolated linearly in chi0- from the
/// measured couplings divided by 1.89. Throws InputError for an unknown preset.
double preset_un0(const std::string& preset, double chi0_minus);
std::vector<double> preset_chi0_minus(const std::string& preset);

/// Adiabatic run for the document: initial amplitude from the loading-phase level.
AdiabaticRun make_adiabatic_run(const Config& cfg);
/// Particle run for the document, sharing the initial amplitude rule.
ParticleRun make_particle_run(const Config& cfg);

JumpOptions jump_options(const Config& cfg);

struct AsymmetryRow {
  double chi0_minus = 0;
  double un0 = 0;
  std::string error;  // empty when the run succeeded
  Status status = Status::ok;
  double plateau = 0;  // lowest chi- before the jump (after the settle span)
  bool jump = false;
  JumpInfo info;
  FieldTrace trace;
};

std::vector<AsymmetryRow> run_asymmetry_family(const Config& cfg);

struct PowerStepRow {
  double xi = 0;
  std::string error;
  Status status = Status::ok;
  double chi_scaled = 0;  // chi- / xi at window end minus 0.1 ms
  FieldTrace trace;
};

struct PowerStepResult {
  double plateau_reference = 0;  // unperturbed chi- at the sampling time
  std::vector<PowerStepRow> rows;
};

/// Throws ConstraintError when the unperturbed run jumps before the window ends.
PowerStepResult run_power_step(const Config& cfg);

struct SqueezingResult {
  std::string error;  // "no oscillation detected" etc.
  Status status = Status::ok;
  double f_peak = 0;
  double drift = 0;  // Hz/ms
  double f_first_half = 0;
  double f_second_half = 0;
  double phase = 0;  // lag of sigma_prho behind sigma_rho, rad in [0, 2 pi)
  ParticleTrace trace;
};

/// Search band for the breathing peak: [0.5, 2.5] x 2 nu_rad sqrt(depth_factor).
std::pair<double, double> squeezing_band(const DynamicsParams& dyn);

SqueezingResult run_squeezing(const Config& cfg);
/// Spectral analysis of an existing trace (samples before analysis_start are dropped).
SqueezingResult analyze_squeezing(const ParticleTrace& trace, const DynamicsParams& dyn,
                                  double analysis_start);

struct DepthRow {
  double depth = 0;
  SqueezingResult result;
};

struct FreqDepthResult {
  std::vector<DepthRow> rows;
  std::optional<PowerLawFit> fit;
  std::string fit_error;
};

FreqDepthResult run_freq_vs_depth(const Config& cfg);

struct Calibration {
  double gamma_lin = 0;  // 1/s
  double beta_n0 = 0;    // 1/s
  double t_jump = 0;     // s, re-run value
  int iterations = 0;
};

/// Scales gamma_lin and beta N0 by a common factor (their ratio fixed) until the jump
/// lands on scenario.target_t_jump_ms within 1 %. Throws CalibrationError when the target
/// lies outside gamma_lin <= 100 /s, beta N0 <= 500 /s.
Calibration calibrate_losses(const Config& cfg);

struct Comparison {
  double rms_full = 0;
  double rms_excluded = 0;  // NaN when every sample lies in an oscillation window
  double eta_rad_used = 0;
  double f_window = 0;  // Hz, centre frequency of the window search
  std::vector<std::pair<double, double>> windows;
  FieldTrace adiabatic;
  ParticleTrace particles;
};

/// RMS of chi- between the engines on the common grid. The adiabatic run uses the radial
/// truncation parameter implied by the sampled temperature. Oscillation windows are
/// centred on the breathing peak of sigma_rho when one is detected, else on 2 nu_rad.
Comparison compare_adiabatic_full(const Config& cfg);

/// RMS over aligned samples; throws InputError when the grids differ.
std::pair<double, double> aligned_rms(const FieldTrace& a, const ParticleTrace& p,
                                      const std::vector<std::pair<double, double>>& windows);

}  // namespace cavsim
