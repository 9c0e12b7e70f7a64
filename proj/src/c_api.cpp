#include "cavsim/cavsim.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cavsim/config.hpp"
#include "cavsim/scenarios.hpp"
#include "cavsim/trace_io.hpp"

using namespace cavsim;

struct cavsim_config {
  Config cfg;
};

struct cavsim_result {
  std::vector<std::pair<std::string, std::string>> summary;
  std::string message;
  std::optional<FieldTrace> field;
  std::optional<ParticleTrace> particles;
  std::optional<SummaryTable> table;
  std::vector<FieldTrace> row_traces;
};

namespace {

thread_local std::string g_last_error;

const char* const kStatusNames[] = {"ok",         "invalid_argument", "parse",    "unknown_key",
                                    "constraint", "domain",           "underflow", "stiffness",
                                    "input",      "calibration",      "fit",      "no_oscillation",
                                    "io",         "internal"};

const char* status_name(Status s) {
  const auto k = static_cast<std::size_t>(s);
  return k < std::size(kStatusNames) ? kStatusNames[k] : "internal";
}

cavsim_status fail(cavsim_status s, const std::string& what) {
  g_last_error = what;
  return s;
}

template <class F>
cavsim_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const Error& e) {
    return fail(static_cast<cavsim_status>(e.status()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CAVSIM_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CAVSIM_E_INTERNAL, e.what());
  }
}

cavsim_status copy_out(const std::string& s, char* buf, size_t len, size_t* needed) {
  if (needed) *needed = s.size();
  if (buf && len > 0) {
    const size_t n = std::min(len - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
  return CAVSIM_OK;
}

std::string num(double v) { return format_number(v); }

// Result under construction.
class Builder {
 public:
  Builder() : res_(new cavsim_result) {}
  void put(const std::string& k, const std::string& v) { res_->summary.emplace_back(k, v); }
  void put(const std::string& k, double v) { put(k, num(v)); }
  void put_int(const std::string& k, long long v) { put(k, std::to_string(v)); }
  cavsim_result& get() { return *res_; }
  cavsim_result* release() { return res_.release(); }

 private:
  std::unique_ptr<cavsim_result> res_;
};

const char* flag(bool b) { return b ? "1" : "0"; }

// Lowest chi- after the settle span and before the jump.
double plateau_of(const FieldTrace& tr, double settle, const std::optional<JumpInfo>& jump) {
  double m = HUGE_VAL;
  for (const auto& s : tr.samples) {
    if (s.t < settle) continue;
    if (jump && s.t >= jump->t_jump) break;
    m = std::min(m, s.chi_minus);
  }
  return std::isfinite(m) ? m : std::nan("");
}

void put_jump(Builder& b, const std::optional<JumpInfo>& j, double lambda) {
  b.put("jump", flag(j.has_value()));
  const double nan = std::nan("");
  b.put("t_jump_ms", j ? j->t_jump * 1e3 : nan);
  b.put("rise_time_us", j ? j->rise_time * 1e6 : nan);
  b.put("delta_phi_rad", j ? j->delta_phi : nan);
  b.put("lattice_shift_nm", j ? lattice_shift(j->delta_phi, lambda) * 1e9 : nan);
  b.put("chi_after", j ? j->chi_after : nan);
}

cavsim_result* op_adiabatic(const Config& cfg) {
  Builder b;
  FieldTrace tr;
  try {
    tr = integrate(make_adiabatic_run(cfg));
  } catch (const IntegrationError& e) {
    // Keep the partial trace so the caller can inspect where the run failed.
    b.get().field = e.partial();
    b.get().message = e.what();
    b.put("status", status_name(e.status()));
    b.put_int("samples", static_cast<long long>(e.partial().samples.size()));
    return b.release();
  }
  const auto jump = detect_jump(tr, jump_options(cfg));
  b.put("status", "ok");
  b.put_int("samples", static_cast<long long>(tr.samples.size()));
  b.put("chi_initial", tr.samples.front().chi_minus);
  b.put("chi_final", tr.samples.back().chi_minus);
  b.put("phi_final_rad", tr.samples.back().phi);
  b.put("plateau", plateau_of(tr, cfg.scenario.settle, jump));
  put_jump(b, jump, cfg.cavity.lambda);
  b.get().field = std::move(tr);
  return b.release();
}

cavsim_result* op_particles(const Config& cfg) {
  Builder b;
  ParticleTrace tr = simulate(make_particle_run(cfg));
  const auto& last = tr.samples.back();
  double sr = 0;
  for (const auto& s : tr.samples) sr += s.sigma_rho;
  sr /= static_cast<double>(tr.samples.size());
  b.put("status", "ok");
  b.put_int("samples", static_cast<long long>(tr.samples.size()));
  b.put("acceptance", last_acceptance_rate());
  b.put_int("escapes", static_cast<long long>(tr.escapes.size()));
  b.put_int("n_active_final", last.n_active);
  b.put("chi_final", last.field.chi_minus);
  b.put("phi_final_rad", last.field.phi);
  b.put("bunching_final", last.field.loc);
  b.put("sigma_rho_mean", sr);
  b.put("mean_energy_final", last.mean_energy);
  if (!tr.note.empty()) b.get().message = tr.note;
  b.get().particles = std::move(tr);
  return b.release();
}

cavsim_result* op_fixed_points(const Config& cfg) {
  cfg.validate();
  FieldEquation eq;
  eq.un = cfg.ensemble.un0;
  eq.chi0_plus = cfg.pump.chi0_plus;
  eq.chi0_minus = cfg.pump.chi0_minus;
  eq.eta_ax = cfg.ensemble.eta_ax;
  eq.eta_rad = cfg.ensemble.eta_rad;
  eq.a0_abs = std::abs(initial_amplitude(eq.un, eq.chi0_plus, eq.chi0_minus, eq.eta_ax,
                                         eq.eta_rad, cfg.ensemble.mot_fraction));
  const FixedPointSet set = fixed_points(eq);

  Builder b;
  SummaryTable t;
  t.description = "steady states of the field equation at UN=" + num(eq.un) +
                  ", chi0-=" + num(eq.chi0_minus) + ", sorted by |a|";
  t.columns = {"re_a", "im_a", "chi_minus", "phi_rad", "stable", "eig1_re", "eig1_im",
               "eig2_re", "eig2_im", "residual"};
  std::string stable_chi, unstable_chi;
  int n_stable = 0;
  for (const auto& p : set.points) {
    t.rows.push_back({num(p.a.real()), num(p.a.imag()), num(std::norm(p.a)), num(std::arg(p.a)),
                      flag(p.stable), num(p.eigenvalues[0].real()), num(p.eigenvalues[0].imag()),
                      num(p.eigenvalues[1].real()), num(p.eigenvalues[1].imag()),
                      num(p.residual)});
    std::string& list = p.stable ? stable_chi : unstable_chi;
    if (!list.empty()) list += ',';
    list += num(std::norm(p.a));
    n_stable += p.stable;
  }
  b.put("status", "ok");
  b.put_int("n_points", static_cast<long long>(set.points.size()));
  b.put_int("n_stable", n_stable);
  b.put("stable_chi", stable_chi.empty() ? "none" : stable_chi);
  b.put("unstable_chi", unstable_chi.empty() ? "none" : unstable_chi);
  b.put("a0_abs", eq.a0_abs);
  if (!set.diagnostic.empty()) b.get().message = set.diagnostic;
  b.get().table = std::move(t);
  return b.release();
}

cavsim_result* op_sweep_asymmetry(const Config& cfg) {
  cfg.validate();
  auto rows = run_asymmetry_family(cfg);
  Builder b;
  SummaryTable t;
  t.description = "asymmetry family, one adiabatic run per chi0-, rows sorted by chi0-";
  t.columns = {"chi0_minus", "un0", "jump", "t_jump_ms", "rise_time_us", "delta_phi_rad",
               "plateau", "chi_after", "status"};
  int jumps = 0, failed = 0;
  bool monotone = true;
  double prev_t = HUGE_VAL;
  for (auto& r : rows) {
    const double nan = std::nan("");
    t.rows.push_back({num(r.chi0_minus), num(r.un0), flag(r.jump),
                      num(r.jump ? r.info.t_jump * 1e3 : nan),
                      num(r.jump ? r.info.rise_time * 1e6 : nan),
                      num(r.jump ? r.info.delta_phi : nan), num(r.plateau),
                      num(r.jump ? r.info.chi_after : nan), status_name(r.status)});
    if (!r.error.empty()) {
      ++failed;
      if (!b.get().message.empty()) b.get().message += "; ";
      b.get().message += "chi0-=" + num(r.chi0_minus) + ": " + r.error;
    }
    if (r.jump) {
      ++jumps;
      // Rows ascend in chi0-, so the jump must come earlier from row to row.
      if (!(r.info.t_jump < prev_t)) monotone = false;
      prev_t = r.info.t_jump;
    }
    b.get().row_traces.push_back(std::move(r.trace));
  }
  b.put("status", failed ? "domain" : "ok");
  b.put_int("rows", static_cast<long long>(rows.size()));
  b.put_int("jumps", jumps);
  b.put_int("failed", failed);
  b.put("t_jump_monotone", flag(monotone));
  b.get().table = std::move(t);
  return b.release();
}

cavsim_result* op_power_step(const Config& cfg) {
  cfg.validate();
  auto res = run_power_step(cfg);
  Builder b;
  SummaryTable t;
  t.description = "power step: xi applied on [" + num(cfg.scenario.window_start * 1e3) + ", " +
                  num(cfg.scenario.window_end * 1e3) +
                  "] ms, chi-/xi sampled 0.1 ms before the window ends";
  t.columns = {"xi", "chi_over_xi", "status"};
  int failed = 0;
  bool monotone = true;
  double prev = HUGE_VAL;
  for (auto& r : res.rows) {
    t.rows.push_back({num(r.xi), num(r.error.empty() ? r.chi_scaled : std::nan("")),
                      status_name(r.status)});
    if (!r.error.empty()) {
      ++failed;
      monotone = false;
      if (!b.get().message.empty()) b.get().message += "; ";
      b.get().message += "xi=" + num(r.xi) + ": " + r.error;
    } else {
      if (!(r.chi_scaled < prev)) monotone = false;
      prev = r.chi_scaled;
    }
    b.get().row_traces.push_back(std::move(r.trace));
  }
  b.put("status", failed ? "domain" : "ok");
  b.put_int("rows", static_cast<long long>(res.rows.size()));
  b.put("plateau_reference", res.plateau_reference);
  b.put("monotone_decreasing", flag(monotone));
  b.get().table = std::move(t);
  return b.release();
}

void put_squeezing(Builder& b, const SqueezingResult& r, const DynamicsParams& dyn) {
  b.put("status", status_name(r.status));
  b.put("two_nu_rad_hz", 2.0 * dyn.nu_rad * std::sqrt(dyn.depth_factor));
  const double nan = std::nan("");
  const bool ok = r.error.empty();
  b.put("f_peak_hz", ok ? r.f_peak : nan);
  b.put("drift_hz_per_ms", ok ? r.drift : nan);
  b.put("f_first_half_hz", ok ? r.f_first_half : nan);
  b.put("f_second_half_hz", ok ? r.f_second_half : nan);
  b.put("phase_rad", ok ? r.phase : nan);
  if (!ok) b.get().message = r.error;
}

cavsim_result* op_squeezing(const Config& cfg) {
  SqueezingResult r = run_squeezing(cfg);
  Builder b;
  put_squeezing(b, r, cfg.dynamics);
  b.put_int("escapes", static_cast<long long>(r.trace.escapes.size()));
  b.get().particles = std::move(r.trace);
  return b.release();
}

cavsim_result* op_freq_vs_depth(const Config& cfg) {
  cfg.validate();
  auto res = run_freq_vs_depth(cfg);
  Builder b;
  SummaryTable t;
  t.description = "breathing frequency of sigma_rho versus well-depth factor";
  t.columns = {"depth_factor", "f_peak_hz", "drift_hz_per_ms", "phase_rad", "status"};
  int valid = 0;
  for (auto& r : res.rows) {
    const bool ok = r.result.error.empty();
    const double nan = std::nan("");
    t.rows.push_back({num(r.depth), num(ok ? r.result.f_peak : nan),
                      num(ok ? r.result.drift : nan), num(ok ? r.result.phase : nan),
                      status_name(r.result.status)});
    valid += ok;
    if (!ok) {
      if (!b.get().message.empty()) b.get().message += "; ";
      b.get().message += "depth=" + num(r.depth) + ": " + r.result.error;
    }
    b.get().row_traces.push_back([&] {
      FieldTrace ft;
      for (const auto& s : r.result.trace.samples) ft.samples.push_back(s.field);
      return ft;
    }());
  }
  b.put("status", res.fit ? "ok" : "fit");
  b.put_int("rows", static_cast<long long>(res.rows.size()));
  b.put_int("valid_rows", valid);
  b.put("exponent", res.fit ? res.fit->exponent : std::nan(""));
  b.put("exponent_stderr", res.fit ? res.fit->exponent_stderr : std::nan(""));
  if (!res.fit) {
    if (!b.get().message.empty()) b.get().message += "; ";
    b.get().message += res.fit_error;
  }
  b.get().table = std::move(t);
  return b.release();
}

cavsim_result* op_calibrate(const Config& cfg) {
  cfg.validate();
  const Calibration cal = calibrate_losses(cfg);
  Builder b;
  b.put("status", "ok");
  b.put("gamma_lin_per_s", cal.gamma_lin);
  b.put("beta_n0_per_s", cal.beta_n0);
  b.put("t_jump_ms", cal.t_jump * 1e3);
  b.put("target_ms", cfg.scenario.target_t_jump * 1e3);
  b.put_int("iterations", cal.iterations);
  SummaryTable t;
  t.description = "loss rates placing the jump on the target time (ratio beta_n0/gamma_lin fixed)";
  t.columns = {"gamma_lin_per_s", "beta_n0_per_s", "t_jump_ms", "target_ms", "iterations"};
  t.rows.push_back({num(cal.gamma_lin), num(cal.beta_n0), num(cal.t_jump * 1e3),
                    num(cfg.scenario.target_t_jump * 1e3), std::to_string(cal.iterations)});
  b.get().table = std::move(t);
  return b.release();
}

cavsim_result* op_compare(const Config& cfg) {
  Comparison cmp = compare_adiabatic_full(cfg);
  Builder b;
  b.put("status", "ok");
  b.put("rms_full", cmp.rms_full);
  b.put("rms_excluded", cmp.rms_excluded);
  b.put("eta_rad_used", cmp.eta_rad_used);
  b.put("f_window_hz", cmp.f_window);
  b.put_int("windows", static_cast<long long>(cmp.windows.size()));
  double covered = 0;
  for (const auto& w : cmp.windows) covered += w.second - w.first;
  b.put("window_time_ms", covered * 1e3);
  SummaryTable t;
  t.description = "chi- of the adiabatic and the particle engine on the common grid";
  t.columns = {"t_s", "chi_adiabatic", "chi_particles", "sigma_rho", "in_window"};
  for (std::size_t k = 0; k < cmp.adiabatic.samples.size(); ++k) {
    const double tt = cmp.adiabatic.samples[k].t;
    const bool inside = std::any_of(cmp.windows.begin(), cmp.windows.end(),
                                    [&](const auto& w) { return tt >= w.first && tt <= w.second; });
    t.rows.push_back({num(tt), num(cmp.adiabatic.samples[k].chi_minus),
                      num(cmp.particles.samples[k].field.chi_minus),
                      num(cmp.particles.samples[k].sigma_rho), flag(inside)});
  }
  b.get().table = std::move(t);
  b.get().particles = std::move(cmp.particles);
  b.get().row_traces.push_back(std::move(cmp.adiabatic));
  return b.release();
}

using Op = cavsim_result* (*)(const Config&);

const std::pair<const char*, Op> kOps[] = {
    {"adiabatic", op_adiabatic},         {"particles", op_particles},
    {"fixed-points", op_fixed_points},   {"sweep-asymmetry", op_sweep_asymmetry},
    {"power-step", op_power_step},       {"squeezing", op_squeezing},
    {"freq-vs-depth", op_freq_vs_depth}, {"calibrate-losses", op_calibrate},
    {"compare", op_compare},
};

std::vector<std::string> trace_columns(const cavsim_result& r) {
  std::vector<std::string> c{"t_s",       "tau",    "re_a",    "im_a",
                             "chi_minus", "phi_rad", "n_atoms", "loc_factor"};
  if (r.particles) {
    for (const char* x : {"sigma_theta", "sigma_rho", "sigma_prho", "mean_energy"}) c.push_back(x);
  }
  return c;
}

double field_column(const FieldSample& s, std::size_t k) {
  switch (k) {
    case 0: return s.t;
    case 1: return s.tau;
    case 2: return s.a.real();
    case 3: return s.a.imag();
    case 4: return s.chi_minus;
    case 5: return s.phi;
    case 6: return s.n_atoms;
    default: return s.loc;
  }
}

}  // namespace

extern "C" {

const char* cavsim_version(void) { return "0.1.0"; }

const char* cavsim_status_name(cavsim_status status) {
  return status_name(static_cast<Status>(status));
}

const char* cavsim_last_error(void) { return g_last_error.c_str(); }

cavsim_status cavsim_config_new(cavsim_config** out) {
  if (!out) return fail(CAVSIM_E_INVALID_ARGUMENT, "out is null");
  return guarded([&] {
    *out = new cavsim_config;
    return CAVSIM_OK;
  });
}

cavsim_status cavsim_config_parse(const char* text, cavsim_config** out) {
  if (!text || !out) return fail(CAVSIM_E_INVALID_ARGUMENT, "text or out is null");
  return guarded([&] {
    auto c = std::make_unique<cavsim_config>();
    c->cfg = parse_config(text);
    *out = c.release();
    return CAVSIM_OK;
  });
}

cavsim_status cavsim_config_load(const char* path, cavsim_config** out) {
  if (!path || !out) return fail(CAVSIM_E_INVALID_ARGUMENT, "path or out is null");
  std::ifstream in(path, std::ios::binary);
  if (!in) return fail(CAVSIM_E_IO, std::string("cannot read config file '") + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const cavsim_status s = cavsim_config_parse(text.c_str(), out);
  if (s != CAVSIM_OK) g_last_error = std::string(path) + ": " + g_last_error;
  return s;
}

cavsim_status cavsim_config_clone(const cavsim_config* cfg, cavsim_config** out) {
  if (!cfg || !out) return fail(CAVSIM_E_INVALID_ARGUMENT, "cfg or out is null");
  return guarded([&] {
    *out = new cavsim_config(*cfg);
    return CAVSIM_OK;
  });
}

cavsim_status cavsim_config_set(cavsim_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(CAVSIM_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    set_config_value(cfg->cfg, key, value);
    return CAVSIM_OK;
  });
}

cavsim_status cavsim_config_get(const cavsim_config* cfg, const char* key, char* buf, size_t len,
                                size_t* needed) {
  if (!cfg || !key) return fail(CAVSIM_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] { return copy_out(get_config_value(cfg->cfg, key), buf, len, needed); });
}

cavsim_status cavsim_config_validate(const cavsim_config* cfg) {
  if (!cfg) return fail(CAVSIM_E_INVALID_ARGUMENT, "cfg is null");
  return guarded([&] {
    cfg->cfg.validate();
    return CAVSIM_OK;
  });
}

cavsim_status cavsim_config_serialize(const cavsim_config* cfg, char* buf, size_t len,
                                      size_t* needed) {
  if (!cfg) return fail(CAVSIM_E_INVALID_ARGUMENT, "cfg is null");
  return guarded([&] { return copy_out(serialize_config(cfg->cfg), buf, len, needed); });
}

size_t cavsim_config_key_count(void) { return config_keys().size(); }

const char* cavsim_config_key(size_t index) {
  static const std::vector<std::string> keys = config_keys();
  return index < keys.size() ? keys[index].c_str() : nullptr;
}

void cavsim_config_free(cavsim_config* cfg) { delete cfg; }

size_t cavsim_operation_count(void) { return std::size(kOps); }

const char* cavsim_operation_name(size_t index) {
  return index < std::size(kOps) ? kOps[index].first : nullptr;
}

cavsim_status cavsim_run(const cavsim_config* cfg, const char* operation, cavsim_result** out) {
  if (!cfg || !operation || !out) return fail(CAVSIM_E_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  for (const auto& [name, op] : kOps) {
    if (std::strcmp(name, operation) == 0) {
      return guarded([&, op = op] {
        *out = op(cfg->cfg);
        return CAVSIM_OK;
      });
    }
  }
  return fail(CAVSIM_E_INVALID_ARGUMENT, std::string("unknown operation '") + operation + "'");
}

cavsim_status cavsim_result_summary(const cavsim_result* res, char* buf, size_t len,
                                    size_t* needed) {
  if (!res) return fail(CAVSIM_E_INVALID_ARGUMENT, "res is null");
  std::string line;
  for (const auto& [k, v] : res->summary) {
    if (!line.empty()) line += ' ';
    line += k + '=' + v;
  }
  return copy_out(line, buf, len, needed);
}

cavsim_status cavsim_result_get_string(const cavsim_result* res, const char* key, char* buf,
                                       size_t len, size_t* needed) {
  if (!res || !key) return fail(CAVSIM_E_INVALID_ARGUMENT, "null argument");
  if (std::strcmp(key, "message") == 0) return copy_out(res->message, buf, len, needed);
  for (const auto& [k, v] : res->summary)
    if (k == key) return copy_out(v, buf, len, needed);
  return fail(CAVSIM_E_UNKNOWN_KEY, std::string("no summary field '") + key + "'");
}

cavsim_status cavsim_result_get_number(const cavsim_result* res, const char* key, double* value) {
  if (!res || !key || !value) return fail(CAVSIM_E_INVALID_ARGUMENT, "null argument");
  for (const auto& [k, v] : res->summary) {
    if (k != key) continue;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
      return fail(CAVSIM_E_PARSE, std::string("summary field '") + key + "' is not numeric");
    *value = x;
    return CAVSIM_OK;
  }
  return fail(CAVSIM_E_UNKNOWN_KEY, std::string("no summary field '") + key + "'");
}

int cavsim_result_has_trace(const cavsim_result* res) {
  return res && (res->field || res->particles) ? 1 : 0;
}

size_t cavsim_result_trace_length(const cavsim_result* res) {
  if (!res) return 0;
  if (res->particles) return res->particles->samples.size();
  if (res->field) return res->field->samples.size();
  return 0;
}

cavsim_status cavsim_result_trace_column(const cavsim_result* res, const char* column,
                                         double* values, size_t capacity) {
  if (!res || !column || (!values && capacity)) return fail(CAVSIM_E_INVALID_ARGUMENT, "null argument");
  if (!cavsim_result_has_trace(res)) return fail(CAVSIM_E_INPUT, "result has no trace");
  const auto cols = trace_columns(*res);
  const auto it = std::find(cols.begin(), cols.end(), column);
  if (it == cols.end()) return fail(CAVSIM_E_UNKNOWN_KEY, std::string("no trace column '") + column + "'");
  const auto k = static_cast<std::size_t>(it - cols.begin());
  const size_t n = cavsim_result_trace_length(res);
  if (capacity < n) return fail(CAVSIM_E_INVALID_ARGUMENT, "capacity below trace length");
  for (size_t i = 0; i < n; ++i) {
    if (res->particles) {
      const auto& s = res->particles->samples[i];
      switch (k) {
        case 8: values[i] = s.sigma_theta; break;
        case 9: values[i] = s.sigma_rho; break;
        case 10: values[i] = s.sigma_prho; break;
        case 11: values[i] = s.mean_energy; break;
        default: values[i] = field_column(s.field, k);
      }
    } else {
      values[i] = field_column(res->field->samples[i], k);
    }
  }
  return CAVSIM_OK;
}

cavsim_status cavsim_result_write_trace(const cavsim_result* res, const char* path) {
  if (!res || !path) return fail(CAVSIM_E_INVALID_ARGUMENT, "null argument");
  if (!cavsim_result_has_trace(res)) return fail(CAVSIM_E_INPUT, "result has no trace");
  return guarded([&] {
    write_file_atomic(path, res->particles ? particle_trace_csv(*res->particles)
                                           : field_trace_csv(*res->field));
    return CAVSIM_OK;
  });
}

int cavsim_result_has_table(const cavsim_result* res) { return res && res->table ? 1 : 0; }

size_t cavsim_result_table_rows(const cavsim_result* res) {
  return res && res->table ? res->table->rows.size() : 0;
}

cavsim_status cavsim_result_write_table(const cavsim_result* res, const char* path) {
  if (!res || !path) return fail(CAVSIM_E_INVALID_ARGUMENT, "null argument");
  if (!res->table) return fail(CAVSIM_E_INPUT, "result has no summary table");
  return guarded([&] {
    write_file_atomic(path, summary_csv(*res->table));
    return CAVSIM_OK;
  });
}

size_t cavsim_result_row_trace_count(const cavsim_result* res) {
  return res ? res->row_traces.size() : 0;
}

cavsim_status cavsim_result_write_row_trace(const cavsim_result* res, size_t row, const char* path) {
  if (!res || !path) return fail(CAVSIM_E_INVALID_ARGUMENT, "null argument");
  if (row >= res->row_traces.size()) return fail(CAVSIM_E_INVALID_ARGUMENT, "row out of range");
  return guarded([&] {
    write_file_atomic(path, field_trace_csv(res->row_traces[row]));
    return CAVSIM_OK;
  });
}

void cavsim_result_free(cavsim_result* res) { delete res; }

}  // extern "C"
