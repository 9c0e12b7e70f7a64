#include "cavsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

namespace cavsim {

EnsembleParams EnsembleConfig::params(const CavityParams& cav) const {
  EnsembleParams p;
  p.n0 = un0 / cav.U();
  p.gamma_lin = gamma_lin;
  p.beta = p.n0 > 0 ? beta_n0 / p.n0 : 0.0;
  p.eta_ax = eta_ax;
  p.eta_rad = eta_rad;
  p.t0_kelvin = t0_kelvin;
  return p;
}

PumpConfig PumpDoc::params() const {
  PumpConfig p;
  p.chi0_plus = chi0_plus;
  p.chi0_minus = chi0_minus;
  if (xi != 1.0 || xi_end > xi_start) p.schedule.push_back({xi_start, xi_end, xi});
  return p;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Shortest text that reads back to the same double.
std::string fmt(double v) {
  char buf[40];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  double v = 0;
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ParseError(key + ": expected a finite number, got '" + s + "'");
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(key + ": expected a non-negative integer, got '" + s + "'");
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(key + ": expected an integer, got '" + s + "'");
  return v;
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  const std::string s = trim(text);
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  return out;
}

std::string from_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + fmt(v[k]);
  return out;
}

struct Key {
  std::string path;
  std::function<void(Config&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

// Decimal text t with t * 10^shift == x exactly: the shortest digits of x with the point moved.
std::string fmt_shifted(double x, int shift) {
  if (shift == 0 || x == 0.0) return fmt(x);
  char buf[40];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific);
  const std::string sci(buf, end);
  const auto e = sci.find('e');
  std::string mant = sci.substr(0, e);
  const bool neg = mant[0] == '-';
  if (neg) mant.erase(0, 1);
  std::string digits;
  for (char ch : mant)
    if (ch != '.') digits += ch;
  // t = digits * 10^exp
  const int exp = std::stoi(sci.substr(e + 1)) - static_cast<int>(digits.size() - 1) - shift;
  const int point = static_cast<int>(digits.size()) + exp;  // digits before the decimal point
  std::string out;
  if (exp >= 0 && point <= 17) {
    out = digits + std::string(static_cast<std::size_t>(exp), '0');
  } else if (exp < 0 && point > 0) {
    out = digits.substr(0, static_cast<std::size_t>(point)) + "." + digits.substr(static_cast<std::size_t>(point));
  } else if (exp < 0 && point > -5) {
    out = "0." + std::string(static_cast<std::size_t>(-point), '0') + digits;
  } else {
    out = digits.substr(0, 1) + (digits.size() > 1 ? "." + digits.substr(1) : "") + "e" +
          std::to_string(point - 1);
  }
  return neg ? "-" + out : out;
}

// Parses text * 10^shift by moving the decimal exponent, so no rounding is added.
double to_double_shifted(const std::string& key, const std::string& text, int shift) {
  if (shift == 0) return to_double(key, text);
  const std::string s = trim(text);
  const auto e = s.find_first_of("eE");
  int exp = 0;
  if (e != std::string::npos) {
    const std::string tail = s.substr(e + 1);
    const char* first = tail.data();
    if (!tail.empty() && tail[0] == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, tail.data() + tail.size(), exp);
    if (tail.empty() || ec != std::errc() || ptr != tail.data() + tail.size())
      throw ParseError(key + ": expected a finite number, got '" + s + "'");
  }
  const std::string mant = s.substr(0, e);
  if (mant.empty() || mant.find_first_of("0123456789") == std::string::npos)
    throw ParseError(key + ": expected a finite number, got '" + s + "'");
  return to_double(key, mant + "e" + std::to_string(exp + shift));
}

// Stored in SI, written in the unit named by the key: value_si = text * 10^shift.
template <class Get>
Key dbl(std::string path, Get member, int shift = 0) {
  return Key{path,
             [=](Config& c, const std::string& v) { member(c) = to_double_shifted(path, v, shift); },
             [=](const Config& c) { return fmt_shifted(member(const_cast<Config&>(c)), shift); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(dbl("cavity.gamma_c_per_s", [](Config& c) -> double& { return c.cavity.gamma_c; }));
    k.push_back(dbl("cavity.delta0_per_s", [](Config& c) -> double& { return c.cavity.delta0; }));
    k.push_back(dbl("cavity.lambda_m", [](Config& c) -> double& { return c.cavity.lambda; }));
    k.push_back(dbl("cavity.waist_m", [](Config& c) -> double& { return c.cavity.waist; }));
    k.push_back(dbl("cavity.finesse", [](Config& c) -> double& { return c.cavity.finesse; }));
    k.push_back(dbl("cavity.mode_volume_m3", [](Config& c) -> double& { return c.cavity.mode_volume; }));

    k.push_back(dbl("pump.chi0_plus", [](Config& c) -> double& { return c.pump.chi0_plus; }));
    k.push_back(dbl("pump.chi0_minus", [](Config& c) -> double& { return c.pump.chi0_minus; }));
    k.push_back(dbl("pump.xi", [](Config& c) -> double& { return c.pump.xi; }));
    k.push_back(dbl("pump.xi_window_start_ms", [](Config& c) -> double& { return c.pump.xi_start; }, -3));
    k.push_back(dbl("pump.xi_window_end_ms", [](Config& c) -> double& { return c.pump.xi_end; }, -3));

    k.push_back(dbl("ensemble.un0", [](Config& c) -> double& { return c.ensemble.un0; }));
    k.push_back(dbl("ensemble.gamma_lin_per_s", [](Config& c) -> double& { return c.ensemble.gamma_lin; }));
    k.push_back(dbl("ensemble.beta_n0_per_s", [](Config& c) -> double& { return c.ensemble.beta_n0; }));
    k.push_back(dbl("ensemble.eta_ax", [](Config& c) -> double& { return c.ensemble.eta_ax; }));
    k.push_back(dbl("ensemble.eta_rad", [](Config& c) -> double& { return c.ensemble.eta_rad; }));
    k.push_back(dbl("ensemble.t0_k", [](Config& c) -> double& { return c.ensemble.t0_kelvin; }));
    k.push_back(dbl("ensemble.chi_minus_init_fraction",
                    [](Config& c) -> double& { return c.ensemble.mot_fraction; }));

    k.push_back(dbl("dynamics.nu_ax_hz", [](Config& c) -> double& { return c.dynamics.nu_ax; }));
    k.push_back(dbl("dynamics.nu_rad_hz", [](Config& c) -> double& { return c.dynamics.nu_rad; }));
    k.push_back({"dynamics.radial_dims",
                 [](Config& c, const std::string& v) { c.dynamics.radial_dims = to_int("dynamics.radial_dims", v); },
                 [](const Config& c) { return std::to_string(c.dynamics.radial_dims); }});
    k.push_back(dbl("dynamics.depth_factor", [](Config& c) -> double& { return c.dynamics.depth_factor; }));
    k.push_back(dbl("dynamics.escape_radius_waists",
                    [](Config& c) -> double& { return c.dynamics.escape_radius; }));
    k.push_back({"dynamics.n_sim",
                 [](Config& c, const std::string& v) { c.dynamics.n_sim = to_int("dynamics.n_sim", v); },
                 [](const Config& c) { return std::to_string(c.dynamics.n_sim); }});
    k.push_back(dbl("dynamics.dt_us", [](Config& c) -> double& { return c.dynamics.dt; }, -6));
    k.push_back(dbl("dynamics.output_dt_us", [](Config& c) -> double& { return c.dynamics.output_dt; }, -6));

    k.push_back(dbl("scenario.t_end_ms", [](Config& c) -> double& { return c.scenario.t_end; }, -3));
    k.push_back(dbl("scenario.output_dt_us", [](Config& c) -> double& { return c.scenario.output_dt; }, -6));
    k.push_back(dbl("scenario.rtol", [](Config& c) -> double& { return c.scenario.rtol; }));
    k.push_back(dbl("scenario.atol", [](Config& c) -> double& { return c.scenario.atol; }));
    k.push_back({"scenario.seed",
                 [](Config& c, const std::string& v) { c.scenario.seed = to_uint("scenario.seed", v); },
                 [](const Config& c) { return std::to_string(c.scenario.seed); }});
    k.push_back(dbl("scenario.settle_ms", [](Config& c) -> double& { return c.scenario.settle; }, -3));
    k.push_back({"scenario.preset", [](Config& c, const std::string& v) { c.scenario.preset = trim(v); },
                 [](const Config& c) { return c.scenario.preset; }});
    k.push_back({"scenario.chi0_minus_list",
                 [](Config& c, const std::string& v) {
                   c.scenario.chi0_minus_list = to_list("scenario.chi0_minus_list", v);
                 },
                 [](const Config& c) { return from_list(c.scenario.chi0_minus_list); }});
    k.push_back({"scenario.un0_list",
                 [](Config& c, const std::string& v) { c.scenario.un0_list = to_list("scenario.un0_list", v); },
                 [](const Config& c) { return from_list(c.scenario.un0_list); }});
    k.push_back({"scenario.xi_list",
                 [](Config& c, const std::string& v) { c.scenario.xi_list = to_list("scenario.xi_list", v); },
                 [](const Config& c) { return from_list(c.scenario.xi_list); }});
    k.push_back(dbl("scenario.window_start_ms", [](Config& c) -> double& { return c.scenario.window_start; }, -3));
    k.push_back(dbl("scenario.window_end_ms", [](Config& c) -> double& { return c.scenario.window_end; }, -3));
    k.push_back({"scenario.depth_factors",
                 [](Config& c, const std::string& v) {
                   c.scenario.depth_factors = to_list("scenario.depth_factors", v);
                 },
                 [](const Config& c) { return from_list(c.scenario.depth_factors); }});
    k.push_back(dbl("scenario.target_t_jump_ms", [](Config& c) -> double& { return c.scenario.target_t_jump; }, -3));
    k.push_back(dbl("scenario.analysis_start_ms",
                    [](Config& c) -> double& { return c.scenario.analysis_start; }, -3));
    return k;
  }();
  return table;
}

const Key& find_key(const std::string& path) {
  for (const auto& k : keys())
    if (k.path == path) return k;
  throw UnknownKeyError("unknown key '" + path + "'");
}

void require(bool ok, const std::string& key, const char* what) {
  if (!ok) throw ConstraintError(key + ": " + what);
}

}  // namespace

void Config::validate() const {
  cavity.validate();
  pump.params().validate();
  require(pump.xi > 0, "pump.xi", "must be > 0");
  require(pump.xi_end >= pump.xi_start, "pump.xi_window_end_ms", "must not precede the window start");
  require(ensemble.un0 >= 0, "ensemble.un0", "must be >= 0");
  require(ensemble.mot_fraction > 0 && ensemble.mot_fraction <= 1, "ensemble.chi_minus_init_fraction",
          "must lie in (0, 1]");
  ensemble_params().validate();
  dynamics.validate();
  require(scenario.t_end > 0, "scenario.t_end_ms", "must be > 0");
  require(scenario.output_dt > 0 && scenario.output_dt < scenario.t_end, "scenario.output_dt_us",
          "must be > 0 and shorter than the run");
  require(scenario.rtol > 0, "scenario.rtol", "must be > 0");
  require(scenario.atol > 0, "scenario.atol", "must be > 0");
  require(scenario.settle >= 0, "scenario.settle_ms", "must be >= 0");
  require(scenario.window_end > scenario.window_start && scenario.window_start >= 0,
          "scenario.window_end_ms", "window must have positive length");
  for (double x : scenario.xi_list) require(x > 0 && x <= 1, "scenario.xi_list", "entries must lie in (0, 1]");
  for (double x : scenario.chi0_minus_list)
    require(x > 0 && x <= 0.5, "scenario.chi0_minus_list", "entries must lie in (0, 0.5]");
  for (double x : scenario.depth_factors) require(x > 0, "scenario.depth_factors", "entries must be > 0");
  for (double x : scenario.un0_list) require(x >= 0, "scenario.un0_list", "entries must be >= 0");
  require(scenario.analysis_start >= 0, "scenario.analysis_start_ms", "must be >= 0");
}

void complete_pump_fractions(Config& cfg, bool plus_given, bool minus_given) {
  if (plus_given && !minus_given) cfg.pump.chi0_minus = 1.0 - cfg.pump.chi0_plus;
  if (minus_given && !plus_given) cfg.pump.chi0_plus = 1.0 - cfg.pump.chi0_minus;
}

Config parse_config(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  bool plus_given = false, minus_given = false;
  std::vector<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"cavity", "pump", "ensemble", "dynamics", "scenario"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known))
        throw UnknownKeyError(where + "unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(where + "expected key = value");
    if (section.empty()) throw ParseError(where + "key outside of a section");
    const std::string path = section + "." + trim(line.substr(0, eq));
    if (std::find(seen.begin(), seen.end(), path) != seen.end())
      throw ParseError(where + "duplicate key '" + path + "'");
    seen.push_back(path);
    find_key(path).set(cfg, line.substr(eq + 1));
    plus_given |= path == "pump.chi0_plus";
    minus_given |= path == "pump.chi0_minus";
  }
  complete_pump_fractions(cfg, plus_given, minus_given);
  cfg.validate();
  return cfg;
}

void set_config_value(Config& cfg, const std::string& path, const std::string& value) {
  find_key(path).set(cfg, value);
  complete_pump_fractions(cfg, path == "pump.chi0_plus", path == "pump.chi0_minus");
}

std::string get_config_value(const Config& cfg, const std::string& path) {
  return find_key(path).get(cfg);
}

std::string serialize_config(const Config& cfg) {
  std::string out, section;
  for (const auto& k : keys()) {
    const auto dot = k.path.find('.');
    const std::string sec = k.path.substr(0, dot);
    if (sec != section) {
      out += (section.empty() ? "[" : "\n[") + sec + "]\n";
      section = sec;
    }
    out += k.path.substr(dot + 1) + " = " + k.get(cfg) + "\n";
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : keys()) out.push_back(k.path);
  return out;
}

}  // namespace cavsim
