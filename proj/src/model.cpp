#include "cavsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cavsim/errors.hpp"

namespace cavsim {

namespace {

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConstraintError(std::string(key) + ": " + what);
}

}  // namespace

void CavityParams::validate() const {
  require(std::isfinite(gamma_c) && gamma_c > 0, "cavity.gamma_c_per_s", "must be > 0");
  require(std::isfinite(delta0) && delta0 > 0, "cavity.delta0_per_s", "must be > 0");
  require(std::isfinite(lambda) && lambda > 0, "cavity.lambda_m", "must be > 0");
  require(std::isfinite(waist) && waist > 0, "cavity.waist_m", "must be > 0");
  require(finesse > 0, "cavity.finesse", "must be > 0");
  require(mode_volume > 0, "cavity.mode_volume_m3", "must be > 0");
}

double PumpConfig::xi_at(double t) const {
  for (const auto& w : schedule)
    if (t >= w.t_start && t < w.t_end) return w.xi;
  return 1.0;
}

std::vector<double> PumpConfig::breakpoints() const {
  std::vector<double> out;
  for (const auto& w : schedule) {
    out.push_back(w.t_start);
    out.push_back(w.t_end);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void PumpConfig::validate() const {
  require(chi0_plus >= 0 && chi0_plus <= 1, "pump.chi0_plus", "must lie in [0, 1]");
  require(chi0_minus >= 0 && chi0_minus <= 1, "pump.chi0_minus", "must lie in [0, 1]");
  require(std::abs(chi0_plus + chi0_minus - 1.0) < 1e-9, "pump.chi0_minus",
          "chi0_plus + chi0_minus must equal 1");
  require(chi0_plus > 0, "pump.chi0_plus", "locked mode must be pumped (> 0)");
  for (const auto& w : schedule) {
    require(w.xi > 0 && std::isfinite(w.xi), "pump.xi", "power scale must be > 0");
    require(w.t_end > w.t_start, "pump.xi_window_end_ms", "window must have positive length");
  }
}

void EnsembleParams::validate() const {
  require(std::isfinite(n0) && n0 >= 0, "ensemble.un0", "atom number must be >= 0");
  require(gamma_lin >= 0, "ensemble.gamma_lin_per_s", "must be >= 0");
  require(beta >= 0, "ensemble.beta_n0_per_s", "must be >= 0");
  require(eta_ax > 0 && eta_ax < 1, "ensemble.eta_ax", "must lie in (0, 1)");
  require(eta_rad > 0 && eta_rad < 1, "ensemble.eta_rad", "must lie in (0, 1)");
  require(t0_kelvin >= 0, "ensemble.t0_k", "must be >= 0");
}

double localization_factor(double a_abs, double a0_abs, double chi0_plus, double eta_ax,
                           double eta_rad) {
  if (!(a_abs > 0)) throw DomainError("localization_factor: |a| must be > 0");
  if (!(a0_abs > 0)) throw DomainError("localization_factor: |a0| must be > 0");
  if (!(chi0_plus > 0 && chi0_plus <= 1))
    throw DomainError("localization_factor: chi0_plus must lie in (0, 1]");
  const double sp = std::sqrt(chi0_plus);
  const double axial = std::exp(-eta_ax * std::sqrt(a0_abs / a_abs));
  const double radial = 1.0 / (1.0 + eta_rad * (sp + a0_abs) / (sp + a_abs));
  return axial * radial;
}

double atom_number(double t, const EnsembleParams& ens) {
  // N(t) = N0 e^{-g t} / (1 + beta N0 (1 - e^{-g t}) / g); the last ratio tends to t as g -> 0.
  const double g = ens.gamma_lin;
  const double growth = g > 0 ? -std::expm1(-g * t) / g : t;
  return ens.n0 * std::exp(-g * t) / (1.0 + ens.beta * ens.n0 * growth);
}

double coupling_strength(double t, const CavityParams& cav, const EnsembleParams& ens) {
  return cav.U() * atom_number(t, ens);
}

double recoil_angular_frequency(double lambda) {
  const double k = 2.0 * std::numbers::pi / lambda;
  return kHbar * k * k / (2.0 * kRb85Mass);
}

}  // namespace cavsim
