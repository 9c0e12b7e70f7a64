#pragma once

// Physical parameters of the ring cavity, the pump, and the trapped ensemble,
// plus the two closed-form laws both solvers share: the thermal localization
// factor and the atom-number decay.

#include <numbers>
#include <vector>

namespace cavsim {

struct CavityParams {
  double gamma_c = std::numbers::pi * 17.3e3;  // 1/s, field decay rate
  double delta0 = 0.091;                       // 1/s, light shift per photon
  double lambda = 780.941e-9;                  // m, 0.7 nm red of the Rb D2 line
  double waist = 120e-6;                       // m
  double finesse = 1.8e5;
  double mode_volume = 2.6e-9;  // m^3

  double U() const { return delta0 / gamma_c; }
  void validate() const;
};

/// A time window during which the total incoupled power is scaled by `xi`.
struct PowerWindow {
  double t_start = 0.0;  // s
  double t_end = 0.0;    // s
  double xi = 1.0;
};

struct PumpConfig {
  double chi0_plus = 0.51;
  double chi0_minus = 0.49;
  std::vector<PowerWindow> schedule;  // empty: xi == 1 throughout

  double xi_at(double t) const;
  /// Times at which xi changes; integrators must not step across these.
  std::vector<double> breakpoints() const;
  void validate() const;
};

struct EnsembleParams {
  double n0 = 2.38 / (0.091 / (std::numbers::pi * 17.3e3));  // atoms
  double gamma_lin = 0.6024;                                 // 1/s
  double beta = 6.024 / (2.38 / (0.091 / (std::numbers::pi * 17.3e3)));  // 1/(atom s)
  double eta_ax = 0.5;
  double eta_rad = 0.3;
  double t0_kelvin = 90e-6;  // metadata

  void validate() const;
};

/// exp(-eta_ax sqrt(a0/a)) / (1 + eta_rad (sqrt(chi0+) + a0) / (sqrt(chi0+) + a)).
/// Throws DomainError when a_abs <= 0, a0_abs <= 0 or chi0_plus outside (0, 1].
double localization_factor(double a_abs, double a0_abs, double chi0_plus, double eta_ax,
                           double eta_rad);

/// Closed-form solution of dN/dt = -gamma_lin N - beta N^2, N(0) = n0.
double atom_number(double t, const EnsembleParams& ens);

/// U * N(t).
double coupling_strength(double t, const CavityParams& cav, const EnsembleParams& ens);

// Physical constants used to translate between SI and the dimensionless units.
inline constexpr double kHbar = 1.054571817e-34;     // J s
inline constexpr double kBoltzmann = 1.380649e-23;   // J/K
inline constexpr double kRb85Mass = 1.40999320e-25;  // kg

/// Single-photon recoil angular frequency hbar k^2 / (2 m) for Rb-85 at `lambda`.
double recoil_angular_frequency(double lambda);

}  // namespace cavsim
