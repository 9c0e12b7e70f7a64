#pragma once

// Coupled field-particle model. Each simulated particle carries an axial lattice
// phase theta = 2 k x and a radial offset rho (in waist units, 1 or 2 components);
// the unlocked-mode amplitude a is shared. The locked mode is held by an ideal servo.
//
// Potential (units hbar gamma_c):
//   V = -eps f(rho) [xi chi0+ + |a|^2 + 2 sqrt(xi chi0+) Re(a e^{-i theta})],  f = exp(-2 rho^2)
// Field:
//   da/dtau = i U Re(conj(S) a)/sqrt(chi0+) a - a - i U S sqrt(xi chi0+) + sqrt(xi chi0-)
// with the bunching sum S = w sum_j f(rho_j) e^{i theta_j}.

#include <cstdint>
#include <string>
#include <vector>

#include "cavsim/adiabatic.hpp"
#include "cavsim/model.hpp"

namespace cavsim {

struct DynamicsParams {
  double nu_ax = 5e3;    // Hz, axial vibrational frequency at t = 0
  double nu_rad = 500.0;  // Hz, radial vibrational frequency at t = 0
  int radial_dims = 1;
  double depth_factor = 1.0;  // scales the well depth at fixed masses
  double escape_radius = 5.0;  // waists
  int n_sim = 100;
  double dt = 2e-6;          // s
  double output_dt = 10e-6;  // s, must be a multiple of dt
  std::uint64_t seed = 1;

  void validate() const;
};

/// Depth, masses and temperature in the scaled units, fixed at t = 0.
struct LatticeScales {
  double eps = 0;      // potential depth parameter
  double m_theta = 0;  // axial mass
  double m_rho = 0;    // radial mass
  double kT = 0;       // thermal energy
  double chi0_plus = 0;
  double a_ref = 0;  // |a(0)|
};

/// Masses follow from the recoil frequency (axial) and from nu_rad (radial) so that the
/// small-oscillation frequencies at |a| = a_ref equal nu_ax and nu_rad; depth_factor then
/// scales eps and kT together.
LatticeScales lattice_scales(const DynamicsParams& dyn, const CavityParams& cav,
                             double chi0_plus, double a_ref, double eta_ax);

struct ParticleSystem {
  int dims = 1;
  std::vector<double> theta, p_theta;
  std::vector<double> rho, p_rho;  // size n * dims, particle-major
  cplx a;
  double weight = 1.0;  // atoms per simulated particle

  std::size_t size() const { return theta.size(); }
  void validate() const;
};

double potential(double theta, const double* rho, int dims, cplx a, double chi0_plus, double eps,
                 double xi = 1.0);
inline double potential(double theta, double rho, cplx a, double chi0_plus, double eps) {
  return potential(theta, &rho, 1, a, chi0_plus, eps);
}

struct Forces {
  std::vector<double> theta;  // -dV/dtheta_j
  std::vector<double> rho;    // -dV/drho_j, size n * dims
};

Forces forces(const ParticleSystem& sys, const LatticeScales& sc, double xi = 1.0);

/// S = weight * sum f(rho_j) e^{i theta_j}.
cplx bunching_sum(const ParticleSystem& sys);

cplx field_rhs(const ParticleSystem& sys, double U, double chi0_plus, double chi0_minus,
               double xi = 1.0);

/// Kinetic plus potential energy of particle j.
double particle_energy(const ParticleSystem& sys, std::size_t j, const LatticeScales& sc,
                       double xi = 1.0);

/// Boltzmann sample exp(-H/kT) in the t = 0 potential, restricted to particles bound below
/// the axial saddle. Deterministic for a fixed seed. Throws ConstraintError when the
/// acceptance rate drops below 1e-3.
ParticleSystem sample_thermal(int n_sim, const LatticeScales& sc, cplx a_init, int dims,
                              std::uint64_t seed);

/// Fraction of envelope proposals accepted in the most recent sample_thermal call on
/// this thread.
double last_acceptance_rate();

struct ParticleSample {
  FieldSample field;  // loc holds the measured bunching |S| / (w N_active)
  double sigma_theta = 0;
  double sigma_rho = 0;
  double sigma_prho = 0;
  double mean_energy = 0;
  int n_active = 0;
};

struct Escape {
  double t = 0;
  std::size_t index = 0;  // index in the initial sample
};

struct ParticleTrace {
  std::vector<ParticleSample> samples;
  std::vector<Escape> escapes;
  LatticeScales scales;
  std::string note;  // e.g. weight renormalization after escapes
};

struct ParticleRun {
  CavityParams cav;
  PumpConfig pump;
  EnsembleParams ens;
  DynamicsParams dyn;
  cplx a_init{0.7, 0.0};
  double t_start = 0.0;
  double t_end = 0.05;
  bool freeze_field = false;
  bool losses = true;  // when false N stays at N0

  void validate() const;
};

/// Fixed-step RK4 on (a, theta, p_theta, rho, p_rho) starting from `sys`.
ParticleTrace evolve(const ParticleRun& run, ParticleSystem sys);

/// sample_thermal + evolve with the run's seed and scales.
ParticleTrace simulate(const ParticleRun& run);

}  // namespace cavsim
