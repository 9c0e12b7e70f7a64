// Command-line front end. Talks to the library through the C interface only.
//
//   cavsim <subcommand> [--config FILE] [--set section.key=value]... [--seed N] [--out PATH]
//
// Exit codes: 0 success, 1 domain error (the run failed or reported a non-ok status),
// 2 usage error (bad arguments, unreadable or invalid configuration).

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cavsim/cavsim.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<unsigned long long> seed;
  std::string out;
  std::string trace;
  std::string row_traces;
  std::string save_config;
  // Subcommand shortcuts.
  std::optional<double> un;
  std::optional<double> chi0m;
  std::string preset;
  std::optional<double> target_ms;
};

std::string last_error() { return cavsim_last_error(); }

std::string summary_of(const cavsim_result* res) {
  size_t n = 0;
  cavsim_result_summary(res, nullptr, 0, &n);
  std::string s(n + 1, '\0');
  cavsim_result_summary(res, s.data(), s.size(), &n);
  s.resize(n);
  return s;
}

std::string result_string(const cavsim_result* res, const char* key) {
  size_t n = 0;
  if (cavsim_result_get_string(res, key, nullptr, 0, &n) != CAVSIM_OK) return {};
  std::string s(n + 1, '\0');
  cavsim_result_get_string(res, key, s.data(), s.size(), &n);
  s.resize(n);
  return s;
}

bool set_key(cavsim_config* cfg, const std::string& key, const std::string& value) {
  if (cavsim_config_set(cfg, key.c_str(), value.c_str()) == CAVSIM_OK) return true;
  std::fprintf(stderr, "cavsim: --set %s=%s: %s\n", key.c_str(), value.c_str(), last_error().c_str());
  return false;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Builds the effective configuration: file, then CAVSIM_SEED, then --set and the
// subcommand shortcuts, then --seed.
cavsim_config* build_config(const Options& o) {
  cavsim_config* cfg = nullptr;
  const cavsim_status s = o.config_path.empty() ? cavsim_config_new(&cfg)
                                                : cavsim_config_load(o.config_path.c_str(), &cfg);
  if (s != CAVSIM_OK) {
    std::fprintf(stderr, "cavsim: %s\n", last_error().c_str());
    return nullptr;
  }
  bool ok = true;
  if (const char* env = std::getenv("CAVSIM_SEED"); env && *env) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || errno != 0 || env[0] == '-') {
      std::fprintf(stderr, "cavsim: CAVSIM_SEED='%s' is not a non-negative integer\n", env);
      ok = false;
    } else {
      ok = set_key(cfg, "scenario.seed", std::to_string(v));
    }
  }
  for (const auto& kv : o.sets) {
    if (!ok) break;
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "cavsim: --set expects section.key=value, got '%s'\n", kv.c_str());
      ok = false;
      break;
    }
    ok = set_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (ok && o.un) ok = set_key(cfg, "ensemble.un0", fmt(*o.un));
  if (ok && o.chi0m) ok = set_key(cfg, "pump.chi0_minus", fmt(*o.chi0m));
  if (ok && !o.preset.empty()) ok = set_key(cfg, "scenario.preset", o.preset);
  if (ok && o.target_ms) ok = set_key(cfg, "scenario.target_t_jump_ms", fmt(*o.target_ms));
  if (ok && o.seed) ok = set_key(cfg, "scenario.seed", std::to_string(*o.seed));
  if (ok && cavsim_config_validate(cfg) != CAVSIM_OK) {
    std::fprintf(stderr, "cavsim: invalid configuration: %s\n", last_error().c_str());
    ok = false;
  }
  if (!ok) {
    cavsim_config_free(cfg);
    return nullptr;
  }
  return cfg;
}

bool save_config(const cavsim_config* cfg, const std::string& path) {
  size_t n = 0;
  cavsim_config_serialize(cfg, nullptr, 0, &n);
  std::string text(n + 1, '\0');
  cavsim_config_serialize(cfg, text.data(), text.size(), &n);
  text.resize(n);
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f || std::fwrite(text.data(), 1, text.size(), f) != text.size()) {
    if (f) std::fclose(f);
    std::fprintf(stderr, "cavsim: cannot write %s\n", path.c_str());
    return false;
  }
  return std::fclose(f) == 0;
}

// Traces are the primary output of the time-domain runs; tables of everything else.
bool primary_is_trace(const std::string& op) {
  return op == "adiabatic" || op == "particles" || op == "squeezing";
}

bool write_outputs(const cavsim_result* res, const std::string& op, const Options& o) {
  bool ok = true;
  auto check = [&](cavsim_status s, const std::string& what) {
    if (s != CAVSIM_OK) {
      std::fprintf(stderr, "cavsim: writing %s: %s\n", what.c_str(), last_error().c_str());
      ok = false;
    }
  };
  if (!o.out.empty()) {
    if (primary_is_trace(op))
      check(cavsim_result_write_trace(res, o.out.c_str()), o.out);
    else
      check(cavsim_result_write_table(res, o.out.c_str()), o.out);
  }
  if (!o.trace.empty()) {
    if (cavsim_result_has_trace(res))
      check(cavsim_result_write_trace(res, o.trace.c_str()), o.trace);
    else
      std::fprintf(stderr, "cavsim: %s produces no trace; --trace ignored\n", op.c_str());
  }
  if (!o.row_traces.empty()) {
    const size_t n = cavsim_result_row_trace_count(res);
    for (size_t k = 0; k < n; ++k) {
      const std::string path = o.row_traces + std::to_string(k) + ".csv";
      check(cavsim_result_write_row_trace(res, k, path.c_str()), path);
    }
  }
  return ok;
}

int run(const std::string& op, const Options& o) {
  cavsim_config* cfg = build_config(o);
  if (!cfg) return kExitUsage;
  if (!o.save_config.empty() && !save_config(cfg, o.save_config)) {
    cavsim_config_free(cfg);
    return kExitDomain;
  }
  cavsim_result* res = nullptr;
  const cavsim_status s = cavsim_run(cfg, op.c_str(), &res);
  cavsim_config_free(cfg);
  if (s != CAVSIM_OK) {
    std::fprintf(stderr, "cavsim: %s failed (%s): %s\n", op.c_str(), cavsim_status_name(s),
                 last_error().c_str());
    std::printf("status=%s\n", cavsim_status_name(s));
    return kExitDomain;
  }
  const bool written = write_outputs(res, op, o);
  const std::string status = result_string(res, "status");
  const std::string message = result_string(res, "message");
  if (!message.empty()) std::fprintf(stderr, "cavsim: %s\n", message.c_str());
  std::printf("%s\n", summary_of(res).c_str());
  cavsim_result_free(res);
  if (!written) return kExitDomain;
  return status == "ok" ? kExitOk : kExitDomain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ring-cavity optical lattice simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cavsim_version());

  Options o;
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"adiabatic", "integrate the adiabatic field equation"},
      {"particles", "integrate the coupled field-particle equations"},
      {"fixed-points", "steady states of the field equation and their stability"},
      {"sweep-asymmetry", "adiabatic runs over a family of pump asymmetries"},
      {"power-step", "scaled intracavity intensity after a step in total pump power"},
      {"squeezing", "particle run with spectral analysis of the radial breathing"},
      {"freq-vs-depth", "breathing frequency versus well depth with a power-law fit"},
      {"calibrate-losses", "loss rates that place the jump on a target time"},
      {"compare", "adiabatic versus particle engine on the same configuration"},
  };
  for (const auto& sub : subs) {
    CLI::App* s = app.add_subcommand(sub.name, sub.help);
    s->add_option("--config", o.config_path, "configuration document")->check(CLI::ExistingFile);
    s->add_option("--set", o.sets, "override, section.key=value (repeatable)")->take_all();
    s->add_option("--seed", o.seed, "random seed (overrides CAVSIM_SEED and the config)");
    s->add_option("--out", o.out, "output CSV: trace or summary table");
    s->add_option("--save-config", o.save_config, "write the effective configuration");
    const std::string name = sub.name;
    if (name == "compare")
      s->add_option("--trace", o.trace, "particle trace CSV");
    if (name == "sweep-asymmetry" || name == "power-step" || name == "freq-vs-depth" ||
        name == "compare")
      s->add_option("--row-traces", o.row_traces, "per-row trace CSVs, written as PREFIX<k>.csv");
    if (name == "fixed-points") {
      s->add_option("--un", o.un, "coupling UN (sets ensemble.un0)");
      s->add_option("--chi0m", o.chi0m, "pump fraction chi0- (sets pump.chi0_minus)");
    }
    if (name == "sweep-asymmetry")
      s->add_option("--preset", o.preset, "named parameter set: paper-fig4 or measured");
    if (name == "calibrate-losses")
      s->add_option("--target-ms", o.target_ms, "target jump time in ms");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  const std::string op = app.get_subcommands().front()->get_name();
  return run(op, o);
}
