#pragma once

// Mean-field equation for the unlocked mode under adiabatic atomic motion:
//
//   da/dtau = i UN/sqrt(chi0+) L(a) |a| a - a + sqrt(xi chi0-) - i UN sqrt(xi chi0+) L(a) a/|a|
//
// with tau = gamma_c t, a scaled so that |a|^2 = I-/I0, and L the thermal
// localization factor referenced to |a(0)|.

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "cavsim/errors.hpp"
#include "cavsim/model.hpp"
#include "cavsim/ode.hpp"

namespace cavsim {

using cplx = std::complex<double>;

/// Everything eq1_rhs needs at one instant.
struct FieldEquation {
  double un = 0.0;
  double chi0_plus = 0.51;
  double chi0_minus = 0.49;
  double a0_abs = 1.0;
  double eta_ax = 0.5;
  double eta_rad = 0.3;
  double xi = 1.0;
};

/// Below this modulus both 1/|a| terms are numerically meaningless.
inline constexpr double kUnderflowGuard = 1e-9;

/// Right-hand side of the field equation. Throws Error(underflow) when |a| < kUnderflowGuard.
cplx eq1_rhs(cplx a, const FieldEquation& eq);

struct AdiabaticRun {
  CavityParams cav;
  PumpConfig pump;
  EnsembleParams ens;
  cplx a_init{0.7, 0.0};
  double t_start = 0.0;  // s
  double t_end = 0.1;    // s
  double output_dt = 10e-6;  // s
  ode::Tolerances tol;
  /// When set, UN is held at this value instead of following the atom-number decay.
  std::optional<double> frozen_un;

  void validate() const;
};

struct FieldSample {
  double t = 0;    // s
  double tau = 0;  // gamma_c t
  cplx a;
  double chi_minus = 0;
  double phi = 0;  // unwrapped phase of a
  double n_atoms = 0;
  double loc = 0;  // L(|a|)
};

struct FieldTrace {
  std::vector<FieldSample> samples;
};

/// Integration failure carrying the trace computed up to the failure.
class IntegrationError : public Error {
 public:
  IntegrationError(Status s, const std::string& what, FieldTrace partial)
      : Error(s, what), partial_(std::move(partial)) {}
  const FieldTrace& partial() const { return partial_; }

 private:
  FieldTrace partial_;
};

FieldTrace integrate(const AdiabaticRun& run);

struct FixedPoint {
  cplx a;
  bool stable = false;
  std::array<cplx, 2> eigenvalues{};
  double residual = 0;
};

struct FixedPointSet {
  std::vector<FixedPoint> points;  // sorted by |a|
  std::string diagnostic;
};

/// Real 2x2 Jacobian of (Re rhs, Im rhs) w.r.t. (Re a, Im a) by central differences.
std::array<std::array<double, 2>, 2> eq1_jacobian(cplx a, const FieldEquation& eq,
                                                  double step = 1e-7);

/// Multi-start damped Newton search over a 32x32 polar grid |a| in (0, 1.2], phi in [0, 2pi).
FixedPointSet fixed_points(const FieldEquation& eq);

/// Initial amplitude of a run: modulus from the loading-phase level, phase from the
/// stable fixed point at UN0 whose modulus is closest to it.
///
/// The loading-phase level is chi-(0) = mot_fraction * chi0- for chi0- < chi0+, and
/// chi0- otherwise (symmetric pumping stays at its exact fixed point).
cplx initial_amplitude(double un0, double chi0_plus, double chi0_minus, double eta_ax,
                       double eta_rad, double mot_fraction);

struct JumpOptions {
  double slope_ratio = 5.0;   // max slope must exceed this multiple of the median |slope|
  double settle = 0.0;        // s, leading span ignored (initial relaxation)
  double max_rise_fraction = 0.05;  // rise time must be below this fraction of N/|dN/dt|
  double min_amplitude = 1e-3;      // jumps smaller than this in chi- are ignored
};

struct JumpInfo {
  double t_jump = 0;     // s
  double rise_time = 0;  // s, 10%-90%
  double delta_phi = 0;  // rad, unwrapped phase change across the jump
  double chi_before = 0;
  double chi_after = 0;
};

/// Locates the steepest rise of chi-. Throws InputError for traces shorter than 3 samples.
std::optional<JumpInfo> detect_jump(const FieldTrace& trace, const JumpOptions& opt = {});

/// Lattice displacement for a phase change: dx = dphi * lambda / (4 pi).
double lattice_shift(double delta_phi, double lambda);

}  // namespace cavsim
