#include "cavsim/scenarios.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace cavsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct UnPoint {
  double chi0_minus;
  double un0;
};

// Measured initial couplings of the eight-trace asymmetry family (the 50 % trace has none).
constexpr std::array<UnPoint, 7> kMeasured{{{0.18, 2.48},
                                            {0.26, 2.95},
                                            {0.33, 3.30},
                                            {0.36, 3.54},
                                            {0.43, 4.01},
                                            {0.46, 4.25},
                                            {0.49, 4.48}}};
constexpr std::array<UnPoint, 4> kSimulated{{{0.36, 1.75}, {0.43, 2.15}, {0.46, 2.23}, {0.49, 2.38}}};
constexpr double kMeasuredScale = 1.89;

double interpolate_measured(double chi, double scale) {
  if (chi <= kMeasured.front().chi0_minus) return kMeasured.front().un0 / scale;
  if (chi >= kMeasured.back().chi0_minus) return kMeasured.back().un0 / scale;
  for (std::size_t k = 1; k < kMeasured.size(); ++k) {
    const auto& lo = kMeasured[k - 1];
    const auto& hi = kMeasured[k];
    if (chi <= hi.chi0_minus) {
      const double w = (chi - lo.chi0_minus) / (hi.chi0_minus - lo.chi0_minus);
      return (lo.un0 + w * (hi.un0 - lo.un0)) / scale;
    }
  }
  return kMeasured.back().un0 / scale;
}

double value_at(const FieldTrace& tr, double t) {
  const auto& s = tr.samples;
  if (s.empty()) throw InputError("empty trace");
  if (t <= s.front().t) return s.front().chi_minus;
  if (t >= s.back().t) return s.back().chi_minus;
  const auto it = std::lower_bound(s.begin(), s.end(), t,
                                   [](const FieldSample& x, double v) { return x.t < v; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (t - lo.t) / (hi.t - lo.t);
  return lo.chi_minus + w * (hi.chi_minus - lo.chi_minus);
}

// Jump time of the run; 0 when the field already sits on the upper branch without a
// detectable jump after the settle span, +inf when it never jumps.
double jump_time(const Config& cfg) {
  const auto tr = integrate(make_adiabatic_run(cfg));
  if (const auto j = detect_jump(tr, jump_options(cfg))) return j->t_jump;
  return tr.samples.back().chi_minus > 0.5 * cfg.pump.chi0_minus ? 0.0 : HUGE_VAL;
}

}  // namespace

double preset_un0(const std::string& preset, double chi0_minus) {
  if (preset == "paper-fig4" || preset.empty()) {
    for (const auto& p : kSimulated)
      if (std::abs(p.chi0_minus - chi0_minus) < 1e-9) return p.un0;
    return interpolate_measured(chi0_minus, kMeasuredScale);
  }
  if (preset == "measured") return interpolate_measured(chi0_minus, 1.0);
  throw InputError("scenario.preset: unknown preset '" + preset + "'");
}

std::vector<double> preset_chi0_minus(const std::string& preset) {
  if (preset == "paper-fig4") return {0.36, 0.43, 0.46, 0.49};
  if (preset == "measured") return {0.18, 0.26, 0.33, 0.36, 0.43, 0.46, 0.49};
  throw InputError("scenario.preset: unknown preset '" + preset + "'");
}

AdiabaticRun make_adiabatic_run(const Config& cfg) {
  cfg.validate();
  AdiabaticRun run;
  run.cav = cfg.cavity;
  run.pump = cfg.pump.params();
  run.ens = cfg.ensemble_params();
  run.a_init = initial_amplitude(cfg.ensemble.un0, cfg.pump.chi0_plus, cfg.pump.chi0_minus,
                                 cfg.ensemble.eta_ax, cfg.ensemble.eta_rad, cfg.ensemble.mot_fraction);
  run.t_start = 0.0;
  run.t_end = cfg.scenario.t_end;
  run.output_dt = cfg.scenario.output_dt;
  run.tol = {cfg.scenario.rtol, cfg.scenario.atol};
  return run;
}

ParticleRun make_particle_run(const Config& cfg) {
  cfg.validate();
  ParticleRun run;
  run.cav = cfg.cavity;
  run.pump = cfg.pump.params();
  run.ens = cfg.ensemble_params();
  run.dyn = cfg.dynamics;
  run.dyn.seed = cfg.scenario.seed;
  run.a_init = initial_amplitude(cfg.ensemble.un0, cfg.pump.chi0_plus, cfg.pump.chi0_minus,
                                 cfg.ensemble.eta_ax, cfg.ensemble.eta_rad, cfg.ensemble.mot_fraction);
  run.t_start = 0.0;
  run.t_end = cfg.scenario.t_end;
  return run;
}

JumpOptions jump_options(const Config& cfg) {
  JumpOptions opt;
  opt.settle = cfg.scenario.settle;
  return opt;
}

std::vector<AsymmetryRow> run_asymmetry_family(const Config& cfg) {
  std::vector<double> chis = cfg.scenario.preset.empty() ? cfg.scenario.chi0_minus_list
                                                         : preset_chi0_minus(cfg.scenario.preset);
  std::vector<double> uns = cfg.scenario.un0_list;
  if (!uns.empty() && uns.size() != chis.size())
    throw ConstraintError("scenario.un0_list: must match scenario.chi0_minus_list in length");
  std::vector<std::size_t> order(chis.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return chis[x] < chis[y]; });

  std::vector<AsymmetryRow> rows;
  for (std::size_t k : order) {
    AsymmetryRow row;
    row.chi0_minus = chis[k];
    row.un0 = uns.empty() ? preset_un0(cfg.scenario.preset, chis[k]) : uns[k];
    try {
      Config c = cfg;
      c.pump.chi0_minus = row.chi0_minus;
      c.pump.chi0_plus = 1.0 - row.chi0_minus;
      c.ensemble.un0 = row.un0;
      row.trace = integrate(make_adiabatic_run(c));
      const auto jump = detect_jump(row.trace, jump_options(c));
      row.jump = jump.has_value();
      if (jump) row.info = *jump;
      double plateau = std::numeric_limits<double>::infinity();
      for (const auto& s : row.trace.samples) {
        if (s.t < c.scenario.settle) continue;
        if (jump && s.t >= jump->t_jump) break;
        plateau = std::min(plateau, s.chi_minus);
      }
      row.plateau = std::isfinite(plateau) ? plateau : kNaN;
    } catch (const Error& e) {
      row.error = e.what();
      row.status = e.status();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

PowerStepResult run_power_step(const Config& cfg) {
  const double ws = cfg.scenario.window_start;
  const double we = cfg.scenario.window_end;
  const double t_sample = we - 1e-4;
  if (t_sample <= ws) throw ConstraintError("scenario.window_end_ms: window shorter than 0.1 ms");

  Config base = cfg;
  base.pump.xi = 1.0;
  base.pump.xi_start = base.pump.xi_end = 0.0;
  base.scenario.t_end = we + 3e-3;
  const FieldTrace ref = integrate(make_adiabatic_run(base));
  if (const auto j = detect_jump(ref, jump_options(base)); j && j->t_jump <= we)
    throw ConstraintError("scenario.window_end_ms: power window overlaps the jump at t=" +
                          std::to_string(j->t_jump * 1e3) + " ms");

  PowerStepResult result;
  result.plateau_reference = value_at(ref, t_sample);
  std::vector<double> xis = cfg.scenario.xi_list;
  std::sort(xis.begin(), xis.end());
  for (double xi : xis) {
    PowerStepRow row;
    row.xi = xi;
    try {
      Config c = base;
      c.pump.xi = xi;
      c.pump.xi_start = ws;
      c.pump.xi_end = we;
      row.trace = integrate(make_adiabatic_run(c));
      row.chi_scaled = value_at(row.trace, t_sample) / xi;
    } catch (const Error& e) {
      row.error = e.what();
      row.status = e.status();
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::pair<double, double> squeezing_band(const DynamicsParams& dyn) {
  const double f0 = 2.0 * dyn.nu_rad * std::sqrt(dyn.depth_factor);
  return {0.5 * f0, 2.5 * f0};
}

SqueezingResult analyze_squeezing(const ParticleTrace& trace, const DynamicsParams& dyn,
                                  double analysis_start) {
  SqueezingResult out;
  std::vector<double> t, sr, sp;
  for (const auto& s : trace.samples) {
    if (s.field.t < analysis_start) continue;
    t.push_back(s.field.t);
    sr.push_back(s.sigma_rho);
    sp.push_back(s.sigma_prho);
  }
  try {
    const auto band = squeezing_band(dyn);
    const auto sf = squeezing_frequency(t, sr, band.first, band.second);
    out.f_peak = sf.f_peak;
    out.drift = sf.drift;
    out.f_first_half = sf.f_first_half;
    out.f_second_half = sf.f_second_half;
    out.phase = lag_phase(t, sr, sp, sf.f_peak);
  } catch (const Error& e) {
    out.error = e.what();
    out.status = e.status();
  }
  return out;
}

SqueezingResult run_squeezing(const Config& cfg) {
  ParticleTrace trace = simulate(make_particle_run(cfg));
  SqueezingResult out = analyze_squeezing(trace, cfg.dynamics, cfg.scenario.analysis_start);
  out.trace = std::move(trace);
  return out;
}

FreqDepthResult run_freq_vs_depth(const Config& cfg) {
  std::vector<double> depths = cfg.scenario.depth_factors;
  std::sort(depths.begin(), depths.end());
  if (depths.size() < 4 || depths.back() < 4.0 * depths.front() * (1 - 1e-12))
    throw InputError("scenario.depth_factors: need at least 4 factors spanning at least 4x");
  FreqDepthResult result;
  std::vector<double> xs, ys;
  for (double d : depths) {
    Config c = cfg;
    c.dynamics.depth_factor = d;
    DepthRow row;
    row.depth = d;
    try {
      row.result = run_squeezing(c);
    } catch (const Error& e) {
      row.result.error = e.what();
      row.result.status = e.status();
    }
    if (row.result.error.empty()) {
      xs.push_back(d);
      ys.push_back(row.result.f_peak);
    }
    result.rows.push_back(std::move(row));
  }
  if (xs.size() < 3) {
    result.fit_error = "fit requires at least 3 rows with a detected oscillation";
    return result;
  }
  try {
    result.fit = fit_power_law(xs, ys);
  } catch (const Error& e) {
    result.fit_error = e.what();
  }
  return result;
}

Calibration calibrate_losses(const Config& cfg) {
  const double target = cfg.scenario.target_t_jump;
  if (!(target > 0)) throw CalibrationError("scenario.target_t_jump_ms: the jump cannot be instantaneous");
  const double g0 = cfg.ensemble.gamma_lin;
  const double b0 = cfg.ensemble.beta_n0;
  if (!(g0 > 0 || b0 > 0)) throw CalibrationError("calibration: both loss rates are zero");
  const double k_max = std::min(g0 > 0 ? 100.0 / g0 : HUGE_VAL, b0 > 0 ? 500.0 / b0 : HUGE_VAL);

  Calibration cal;
  const auto trial = [&](double k) {
    Config c = cfg;
    c.ensemble.gamma_lin = k * g0;
    c.ensemble.beta_n0 = k * b0;
    c.scenario.t_end = std::max(cfg.scenario.t_end, 2.0 * target);
    ++cal.iterations;
    return jump_time(c);
  };

  double k_hi = k_max;
  const double t_fast = trial(k_hi);
  if (!(t_fast <= target))
    throw CalibrationError("calibration: target " + std::to_string(target * 1e3) +
                           " ms is below the fastest achievable jump (" +
                           (std::isfinite(t_fast) ? std::to_string(t_fast * 1e3) + " ms" : "none") +
                           " at gamma_lin=" + std::to_string(k_hi * g0) +
                           " /s, beta_n0=" + std::to_string(k_hi * b0) + " /s)");
  double k_lo = k_hi;
  double t_lo = t_fast;
  for (int i = 0; i < 40 && t_lo <= target; ++i) {
    k_lo /= 4.0;
    t_lo = trial(k_lo);
  }
  if (t_lo <= target)
    throw CalibrationError("calibration: no loss scale delays the jump beyond the target");

  double k = k_hi, t = t_fast;
  for (int i = 0; i < 60; ++i) {
    if (std::abs(t - target) <= 0.01 * target) break;
    k = std::sqrt(k_lo * k_hi);
    t = trial(k);
    if (t > target)
      k_lo = k;
    else
      k_hi = k;
  }
  if (!(std::abs(t - target) <= 0.05 * target))
    throw CalibrationError("calibration: bisection did not reach the target within 5%");
  cal.gamma_lin = k * g0;
  cal.beta_n0 = k * b0;
  cal.t_jump = t;
  return cal;
}

std::pair<double, double> aligned_rms(const FieldTrace& a, const ParticleTrace& p,
                                      const std::vector<std::pair<double, double>>& windows) {
  if (a.samples.size() != p.samples.size()) throw InputError("compare: output grids differ in length");
  double full = 0, excl = 0;
  std::size_t n_excl = 0;
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    const double ta = a.samples[k].t, tp = p.samples[k].field.t;
    if (std::abs(ta - tp) > 1e-9 * std::max(1e-6, std::abs(ta)))
      throw InputError("compare: output grids differ at sample " + std::to_string(k));
    const double d = a.samples[k].chi_minus - p.samples[k].field.chi_minus;
    full += d * d;
    const bool inside = std::any_of(windows.begin(), windows.end(), [&](const auto& w) {
      return ta >= w.first && ta <= w.second;
    });
    if (!inside) {
      excl += d * d;
      ++n_excl;
    }
  }
  const auto n = static_cast<double>(a.samples.size());
  return {std::sqrt(full / n), n_excl ? std::sqrt(excl / static_cast<double>(n_excl)) : kNaN};
}

Comparison compare_adiabatic_full(const Config& cfg) {
  Comparison cmp;
  const ParticleRun prun = make_particle_run(cfg);
  cmp.particles = simulate(prun);

  const auto& sc = cmp.particles.scales;
  const double sp = std::sqrt(sc.chi0_plus);
  cmp.eta_rad_used = sc.kT / (sc.eps * (sp + sc.a_ref) * (sp + sc.a_ref));

  Config c = cfg;
  c.ensemble.eta_rad = std::min(cmp.eta_rad_used, 0.999);
  AdiabaticRun arun = make_adiabatic_run(c);
  arun.a_init = prun.a_init;
  arun.output_dt = cfg.dynamics.output_dt;
  cmp.adiabatic = integrate(arun);

  std::vector<double> t, sr;
  for (const auto& s : cmp.particles.samples) {
    t.push_back(s.field.t);
    sr.push_back(s.sigma_rho);
  }
  const SqueezingResult sq = analyze_squeezing(cmp.particles, cfg.dynamics, cfg.scenario.analysis_start);
  cmp.f_window = sq.error.empty() ? sq.f_peak
                                  : 2.0 * cfg.dynamics.nu_rad * std::sqrt(cfg.dynamics.depth_factor);
  cmp.windows = oscillation_windows(t, sr, cmp.f_window);
  const auto [full, excl] = aligned_rms(cmp.adiabatic, cmp.particles, cmp.windows);
  cmp.rms_full = full;
  cmp.rms_excluded = excl;
  return cmp;
}

}  // namespace cavsim
