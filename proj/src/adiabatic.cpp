#include "cavsim/adiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cavsim {

namespace {

constexpr cplx kI{0.0, 1.0};

double wrap_pi(double x) { return std::remainder(x, 2.0 * std::numbers::pi); }

using Mat2 = std::array<std::array<double, 2>, 2>;

std::array<cplx, 2> eigenvalues(const Mat2& j) {
  const double tr = j[0][0] + j[1][1];
  const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
  const cplx disc = std::sqrt(cplx(0.25 * tr * tr - det, 0.0));
  return {0.5 * tr + disc, 0.5 * tr - disc};
}

double linear_at(const std::vector<FieldSample>& s, double t, double FieldSample::*field) {
  if (t <= s.front().t) return s.front().*field;
  if (t >= s.back().t) return s.back().*field;
  const auto it = std::lower_bound(s.begin(), s.end(), t,
                                   [](const FieldSample& x, double v) { return x.t < v; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (t - lo.t) / (hi.t - lo.t);
  return lo.*field + w * (hi.*field - lo.*field);
}

}  // namespace

cplx eq1_rhs(cplx a, const FieldEquation& eq) {
  const double r = std::abs(a);
  if (!(r >= kUnderflowGuard))
    throw Error(Status::underflow, "|a| fell below " + std::to_string(kUnderflowGuard));
  const double loc = localization_factor(r, eq.a0_abs, eq.chi0_plus, eq.eta_ax, eq.eta_rad);
  const double sp = std::sqrt(eq.chi0_plus);
  // The servo-detuning term and the backscattering term share i UN L a; combining them
  // keeps the symmetric-pumping cancellation exact in floating point.
  const double coupling = eq.un * loc * (r / sp - std::sqrt(eq.xi) * sp / r);
  return kI * coupling * a - a + std::sqrt(eq.xi * eq.chi0_minus);
}

void AdiabaticRun::validate() const {
  cav.validate();
  pump.validate();
  ens.validate();
  if (!(t_end > t_start)) throw InputError("t_span must be ordered (t_end > t_start)");
  if (!(output_dt > 0)) throw InputError("output_dt must be > 0");
  if (!(tol.rtol > 0 && tol.atol > 0)) throw InputError("tolerances must be > 0");
  if (!(std::abs(a_init) > 0)) throw InputError("a_init must have nonzero modulus");
  if (frozen_un && *frozen_un < 0) throw InputError("frozen UN must be >= 0");
}

FieldTrace integrate(const AdiabaticRun& run) {
  run.validate();
  const double gc = run.cav.gamma_c;
  const double a0_abs = std::abs(run.a_init);
  const double U = run.cav.U();

  FieldEquation eq;
  eq.chi0_plus = run.pump.chi0_plus;
  eq.chi0_minus = run.pump.chi0_minus;
  eq.a0_abs = a0_abs;
  eq.eta_ax = run.ens.eta_ax;
  eq.eta_rad = run.ens.eta_rad;

  const auto un_at = [&](double t) {
    return run.frozen_un ? *run.frozen_un : coupling_strength(t, run.cav, run.ens);
  };

  FieldTrace trace;
  const auto n_out =
      static_cast<std::size_t>(std::floor((run.t_end - run.t_start) / run.output_dt + 1e-9)) + 1;
  trace.samples.reserve(n_out);

  const auto record = [&](double t, cplx a) {
    FieldSample s;
    s.t = t;
    s.tau = gc * t;
    s.a = a;
    s.chi_minus = std::norm(a);
    const double arg = std::arg(a);
    s.phi = trace.samples.empty() ? arg
                                  : trace.samples.back().phi + wrap_pi(arg - std::arg(trace.samples.back().a));
    s.n_atoms = run.frozen_un ? *run.frozen_un / U : atom_number(t, run.ens);
    s.loc = std::abs(a) > 0 ? localization_factor(std::abs(a), a0_abs, eq.chi0_plus, eq.eta_ax,
                                                  eq.eta_rad)
                            : 0.0;
    trace.samples.push_back(s);
  };

  const auto breaks = run.pump.breakpoints();
  cplx a = run.a_init;
  double h = 0.01;  // in tau
  record(run.t_start, a);
  try {
    for (std::size_t k = 1; k < n_out; ++k) {
      const double t0 = run.t_start + static_cast<double>(k - 1) * run.output_dt;
      const double t1 = run.t_start + static_cast<double>(k) * run.output_dt;
      // Split the interval at power-schedule edges so xi is constant within each piece.
      std::vector<double> stops{t0};
      for (double b : breaks)
        if (b > t0 && b < t1) stops.push_back(b);
      stops.push_back(t1);
      for (std::size_t s = 0; s + 1 < stops.size(); ++s) {
        const double xi = run.pump.xi_at(0.5 * (stops[s] + stops[s + 1]));
        const auto rhs = [&](double tau, cplx y) {
          FieldEquation e = eq;
          e.un = un_at(tau / gc);
          e.xi = xi;
          return eq1_rhs(y, e);
        };
        a = ode::integrate_to(rhs, gc * stops[s], gc * stops[s + 1], a, h, run.tol);
      }
      if (std::norm(a) > 1.1)
        throw Error(Status::domain, "instability: chi- exceeded 1.1 at t=" + std::to_string(t1));
      record(t1, a);
    }
  } catch (const Error& e) {
    throw IntegrationError(e.status(), e.what(), std::move(trace));
  }
  return trace;
}

Mat2 eq1_jacobian(cplx a, const FieldEquation& eq, double step) {
  const cplx dx = (eq1_rhs(a + step, eq) - eq1_rhs(a - step, eq)) / (2 * step);
  const cplx dy = (eq1_rhs(a + kI * step, eq) - eq1_rhs(a - kI * step, eq)) / (2 * step);
  return {{{dx.real(), dy.real()}, {dx.imag(), dy.imag()}}};
}

namespace {

std::optional<cplx> damped_newton(cplx a, const FieldEquation& eq) {
  try {
    cplx f = eq1_rhs(a, eq);
    for (int it = 0; it < 200; ++it) {
      const double fn = std::abs(f);
      if (fn < 1e-14) return a;
      const auto j = eq1_jacobian(a, eq);
      const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
      if (std::abs(det) < 1e-300) return std::nullopt;
      const double dx = (-f.real() * j[1][1] + f.imag() * j[0][1]) / det;
      const double dy = (-f.imag() * j[0][0] + f.real() * j[1][0]) / det;
      double lambda = 1.0;
      bool accepted = false;
      while (lambda > 1e-6) {
        const cplx trial = a + lambda * cplx(dx, dy);
        if (std::abs(trial) > 10 * kUnderflowGuard) {
          const cplx ft = eq1_rhs(trial, eq);
          if (std::abs(ft) < (1.0 - 1e-4 * lambda) * fn) {
            a = trial;
            f = ft;
            accepted = true;
            break;
          }
        }
        lambda *= 0.5;
      }
      if (!accepted) return std::abs(f) < 1e-11 ? std::optional<cplx>(a) : std::nullopt;
      if (std::abs(a) > 5.0) return std::nullopt;
    }
    return std::abs(f) < 1e-11 ? std::optional<cplx>(a) : std::nullopt;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

FixedPointSet fixed_points(const FieldEquation& eq) {
  if (eq.un < 0) throw InputError("fixed_points: UN must be >= 0");
  constexpr int kGrid = 32;
  FixedPointSet set;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      const double r = 1.2 * (i + 1) / kGrid;
      const double phi = 2.0 * std::numbers::pi * j / kGrid;
      const auto root = damped_newton(std::polar(r, phi), eq);
      if (!root) continue;
      const double res = std::abs(eq1_rhs(*root, eq));
      if (!(res < 1e-10)) continue;
      const bool dup = std::any_of(set.points.begin(), set.points.end(), [&](const FixedPoint& p) {
        return std::abs(p.a - *root) < 1e-6;
      });
      if (dup) continue;
      FixedPoint p;
      p.a = *root;
      p.residual = res;
      p.eigenvalues = eigenvalues(eq1_jacobian(*root, eq));
      p.stable = p.eigenvalues[0].real() < 0 && p.eigenvalues[1].real() < 0;
      set.points.push_back(p);
    }
  }
  std::sort(set.points.begin(), set.points.end(),
            [](const FixedPoint& x, const FixedPoint& y) { return std::abs(x.a) < std::abs(y.a); });
  if (set.points.empty()) set.diagnostic = "no roots found from 1024 starts";
  return set;
}

cplx initial_amplitude(double un0, double chi0_plus, double chi0_minus, double eta_ax,
                       double eta_rad, double mot_fraction) {
  if (!(mot_fraction > 0 && mot_fraction <= 1))
    throw ConstraintError("ensemble.chi_minus_init_fraction: must lie in (0, 1]");
  const double level = chi0_minus < chi0_plus ? mot_fraction * chi0_minus : chi0_minus;
  const double modulus = std::sqrt(level);
  if (!(modulus > 0)) throw DomainError("initial amplitude: chi0_minus must be > 0");
  FieldEquation eq{un0, chi0_plus, chi0_minus, modulus, eta_ax, eta_rad, 1.0};
  const auto set = fixed_points(eq);
  const FixedPoint* best = nullptr;
  for (const auto& p : set.points) {
    if (!p.stable) continue;
    if (!best || std::abs(std::abs(p.a) - modulus) < std::abs(std::abs(best->a) - modulus))
      best = &p;
  }
  return std::polar(modulus, best ? std::arg(best->a) : 0.0);
}

std::optional<JumpInfo> detect_jump(const FieldTrace& trace, const JumpOptions& opt) {
  const auto& s = trace.samples;
  const std::size_t n = s.size();
  if (n < 3) throw InputError("detect_jump: trace needs at least 3 samples");

  std::vector<double> slope(n);
  slope[0] = (s[1].chi_minus - s[0].chi_minus) / (s[1].t - s[0].t);
  slope[n - 1] = (s[n - 1].chi_minus - s[n - 2].chi_minus) / (s[n - 1].t - s[n - 2].t);
  for (std::size_t k = 1; k + 1 < n; ++k)
    slope[k] = (s[k + 1].chi_minus - s[k - 1].chi_minus) / (s[k + 1].t - s[k - 1].t);

  std::size_t start = 0;
  while (start + 1 < n && s[start].t < s.front().t + opt.settle) ++start;
  if (n - start < 3) return std::nullopt;

  std::size_t kmax = start;
  for (std::size_t k = start; k < n; ++k)
    if (slope[k] > slope[kmax]) kmax = k;
  const double smax = slope[kmax];
  if (!(smax > 0)) return std::nullopt;

  std::vector<double> mags;
  mags.reserve(n - start);
  for (std::size_t k = start; k < n; ++k) mags.push_back(std::abs(slope[k]));
  std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
  const double median = mags[mags.size() / 2];
  if (smax < opt.slope_ratio * median) return std::nullopt;

  // The rising segment: contiguous samples around the peak with at least 10% of its slope.
  std::size_t lo = kmax, hi = kmax;
  while (lo > start && slope[lo - 1] > 0.1 * smax) --lo;
  while (hi + 1 < n && slope[hi + 1] > 0.1 * smax) ++hi;
  // Still rising when the trace ends: the jump is incomplete.
  if (hi + 1 == n) return std::nullopt;
  const double chi_lo = s[lo].chi_minus;
  const double chi_hi = s[hi].chi_minus;
  const double amp = chi_hi - chi_lo;
  if (amp < opt.min_amplitude) return std::nullopt;

  const auto crossing = [&](double level) {
    for (std::size_t k = lo + 1; k <= hi; ++k) {
      if (s[k].chi_minus >= level) {
        const double c0 = s[k - 1].chi_minus, c1 = s[k].chi_minus;
        const double w = c1 > c0 ? (level - c0) / (c1 - c0) : 1.0;
        return s[k - 1].t + w * (s[k].t - s[k - 1].t);
      }
    }
    return s[hi].t;
  };
  JumpInfo info;
  info.t_jump = s[kmax].t;
  info.rise_time = crossing(chi_lo + 0.9 * amp) - crossing(chi_lo + 0.1 * amp);
  info.chi_before = chi_lo;
  info.chi_after = chi_hi;

  // A washed-out rise that merely tracks the atom loss is not a jump.
  if (kmax > 0 && kmax + 1 < n) {
    const double dn = (s[kmax + 1].n_atoms - s[kmax - 1].n_atoms) / (s[kmax + 1].t - s[kmax - 1].t);
    if (dn != 0.0) {
      const double loss_time = s[kmax].n_atoms / std::abs(dn);
      if (info.rise_time > opt.max_rise_fraction * loss_time) return std::nullopt;
    }
  }

  const double w = 2.0 * info.rise_time;
  info.delta_phi = linear_at(s, info.t_jump + w, &FieldSample::phi) -
                   linear_at(s, info.t_jump - w, &FieldSample::phi);
  return info;
}

double lattice_shift(double delta_phi, double lambda) {
  return delta_phi * lambda / (4.0 * std::numbers::pi);
}

}  // namespace cavsim
