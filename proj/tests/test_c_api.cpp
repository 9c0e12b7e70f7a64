// Exercises the library through the C interface only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "cavsim/cavsim.h"
#include "doctest.h"

namespace {

struct Config {
  cavsim_config* p = nullptr;
  Config() { REQUIRE(cavsim_config_new(&p) == CAVSIM_OK); }
  explicit Config(const char* text) { REQUIRE(cavsim_config_parse(text, &p) == CAVSIM_OK); }
  ~Config() { cavsim_config_free(p); }
  Config(const Config&) = delete;
  Config& operator=(const Config&) = delete;
  void set(const char* key, const char* value) const {
    REQUIRE(cavsim_config_set(p, key, value) == CAVSIM_OK);
  }
  std::string get(const char* key) const {
    size_t n = 0;
    REQUIRE(cavsim_config_get(p, key, nullptr, 0, &n) == CAVSIM_OK);
    std::string s(n + 1, '\0');
    REQUIRE(cavsim_config_get(p, key, s.data(), s.size(), &n) == CAVSIM_OK);
    s.resize(n);
    return s;
  }
  std::string serialize() const {
    size_t n = 0;
    REQUIRE(cavsim_config_serialize(p, nullptr, 0, &n) == CAVSIM_OK);
    std::string s(n + 1, '\0');
    REQUIRE(cavsim_config_serialize(p, s.data(), s.size(), &n) == CAVSIM_OK);
    s.resize(n);
    return s;
  }
};

struct Result {
  cavsim_result* p = nullptr;
  Result(const Config& cfg, const char* op) { REQUIRE(cavsim_run(cfg.p, op, &p) == CAVSIM_OK); }
  ~Result() { cavsim_result_free(p); }
  Result(const Result&) = delete;
  Result& operator=(const Result&) = delete;
  double number(const char* key) const {
    double v = 0;
    REQUIRE(cavsim_result_get_number(p, key, &v) == CAVSIM_OK);
    return v;
  }
  std::string string(const char* key) const {
    size_t n = 0;
    REQUIRE(cavsim_result_get_string(p, key, nullptr, 0, &n) == CAVSIM_OK);
    std::string s(n + 1, '\0');
    REQUIRE(cavsim_result_get_string(p, key, s.data(), s.size(), &n) == CAVSIM_OK);
    s.resize(n);
    return s;
  }
  std::vector<double> column(const char* name) const {
    std::vector<double> v(cavsim_result_trace_length(p));
    REQUIRE(cavsim_result_trace_column(p, name, v.data(), v.size()) == CAVSIM_OK);
    return v;
  }
};

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "cavsim_c_api_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string first_line(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST_SUITE("c_api") {
  TEST_CASE("version and status names") {
    CHECK(std::string(cavsim_version()).size() > 0);
    CHECK(std::string(cavsim_status_name(CAVSIM_OK)) == "ok");
    CHECK(std::string(cavsim_status_name(CAVSIM_E_UNKNOWN_KEY)) == "unknown_key");
    CHECK(std::string(cavsim_status_name(CAVSIM_E_NO_OSCILLATION)) == "no_oscillation");
    CHECK(std::string(cavsim_status_name(static_cast<cavsim_status>(999))) == "internal");
  }

  TEST_CASE("operations are listed") {
    const std::set<std::string> expected{"adiabatic",       "particles",     "fixed-points",
                                         "sweep-asymmetry", "power-step",    "squeezing",
                                         "freq-vs-depth",   "calibrate-losses", "compare"};
    std::set<std::string> listed;
    for (size_t k = 0; k < cavsim_operation_count(); ++k) listed.insert(cavsim_operation_name(k));
    CHECK(listed == expected);
    CHECK(cavsim_operation_name(cavsim_operation_count()) == nullptr);
  }

  TEST_CASE("null arguments are rejected") {
    cavsim_config* c = nullptr;
    cavsim_result* r = nullptr;
    CHECK(cavsim_config_new(nullptr) == CAVSIM_E_INVALID_ARGUMENT);
    CHECK(cavsim_config_parse(nullptr, &c) == CAVSIM_E_INVALID_ARGUMENT);
    CHECK(cavsim_config_set(nullptr, "pump.xi", "1") == CAVSIM_E_INVALID_ARGUMENT);
    CHECK(cavsim_run(nullptr, "adiabatic", &r) == CAVSIM_E_INVALID_ARGUMENT);
    CHECK(std::string(cavsim_last_error()).size() > 0);
    cavsim_config_free(nullptr);
    cavsim_result_free(nullptr);
  }

  TEST_CASE("set and get use document values") {
    Config c;
    CHECK(c.get("pump.chi0_minus") == "0.49");
    c.set("scenario.t_end_ms", "25");
    CHECK(c.get("scenario.t_end_ms") == "25");
    c.set("scenario.seed", "42");
    CHECK(c.get("scenario.seed") == "42");
  }

  TEST_CASE("unknown keys and bad values report the key") {
    Config c;
    CHECK(cavsim_config_set(c.p, "pump.nonsense", "1") == CAVSIM_E_UNKNOWN_KEY);
    CHECK(std::string(cavsim_last_error()).find("pump.nonsense") != std::string::npos);
    CHECK(cavsim_config_set(c.p, "pump.chi0_minus", "abc") == CAVSIM_E_PARSE);
    CHECK(std::string(cavsim_last_error()).find("pump.chi0_minus") != std::string::npos);
    size_t n = 0;
    CHECK(cavsim_config_get(c.p, "nope.key", nullptr, 0, &n) == CAVSIM_E_UNKNOWN_KEY);
  }

  TEST_CASE("pump fractions complete each other and must sum to one") {
    Config c;
    c.set("pump.chi0_minus", "0.6");
    CHECK(c.get("pump.chi0_plus") == "0.4");
    cavsim_config* both = nullptr;
    CHECK(cavsim_config_parse("[pump]\nchi0_minus = 0.6\nchi0_plus = 0.6\n", &both) ==
          CAVSIM_E_CONSTRAINT);
    CHECK(std::string(cavsim_last_error()).find("must equal 1") != std::string::npos);
    c.set("pump.xi", "-1");
    CHECK(cavsim_config_validate(c.p) == CAVSIM_E_CONSTRAINT);
    cavsim_result* r = nullptr;
    CHECK(cavsim_run(c.p, "adiabatic", &r) == CAVSIM_E_CONSTRAINT);
    CHECK(r == nullptr);
  }

  TEST_CASE("strings are truncated and terminated") {
    Config c;
    char buf[3] = {'x', 'x', 'x'};
    size_t n = 0;
    REQUIRE(cavsim_config_get(c.p, "pump.chi0_minus", buf, sizeof buf, &n) == CAVSIM_OK);
    CHECK(n == 4);
    CHECK(std::string(buf) == "0.");
  }

  TEST_CASE("serialization round trips") {
    Config a;
    a.set("ensemble.un0", "1.7");
    a.set("dynamics.dt_us", "0.5");
    const std::string text = a.serialize();
    Config b(text.c_str());
    CHECK(b.serialize() == text);
    cavsim_config* copy = nullptr;
    REQUIRE(cavsim_config_clone(a.p, &copy) == CAVSIM_OK);
    size_t n = 0;
    cavsim_config_serialize(copy, nullptr, 0, &n);
    CHECK(n == text.size());
    cavsim_config_free(copy);
  }

  TEST_CASE("every listed key can be read and written back") {
    Config c;
    REQUIRE(cavsim_config_key_count() > 0);
    for (size_t k = 0; k < cavsim_config_key_count(); ++k) {
      const char* key = cavsim_config_key(k);
      const std::string v = c.get(key);
      CHECK(cavsim_config_set(c.p, key, v.c_str()) == CAVSIM_OK);
      CHECK(c.get(key) == v);
    }
    CHECK(cavsim_config_key(cavsim_config_key_count()) == nullptr);
  }

  TEST_CASE("missing config file is an io error") {
    cavsim_config* c = nullptr;
    CHECK(cavsim_config_load("/nonexistent/cavsim.cfg", &c) == CAVSIM_E_IO);
  }

  TEST_CASE("unknown operation") {
    Config c;
    cavsim_result* r = nullptr;
    CHECK(cavsim_run(c.p, "teleport", &r) == CAVSIM_E_INVALID_ARGUMENT);
    CHECK(std::string(cavsim_last_error()).find("teleport") != std::string::npos);
  }

  TEST_CASE("symmetric adiabatic run holds chi at one half") {
    Config c;
    c.set("pump.chi0_minus", "0.5");
    c.set("pump.chi0_plus", "0.5");
    Result r(c, "adiabatic");
    CHECK(r.string("status") == "ok");
    CHECK(r.string("jump") == "0");
    REQUIRE(cavsim_result_has_trace(r.p) == 1);
    CHECK(cavsim_result_has_table(r.p) == 0);
    const auto chi = r.column("chi_minus");
    REQUIRE(chi.size() > 1000);
    for (double x : chi) CHECK(std::abs(x - 0.5) < 1e-9);
    const auto t = r.column("t_s");
    CHECK(std::abs(t.back() - 0.1) < 1e-12);
  }

  TEST_CASE("summary lookups") {
    Config c;
    c.set("scenario.t_end_ms", "5");
    Result r(c, "adiabatic");
    double v = 0;
    CHECK(cavsim_result_get_number(r.p, "status", &v) == CAVSIM_E_PARSE);
    CHECK(cavsim_result_get_number(r.p, "missing", &v) == CAVSIM_E_UNKNOWN_KEY);
    CHECK(r.number("samples") > 0);
    size_t n = 0;
    REQUIRE(cavsim_result_summary(r.p, nullptr, 0, &n) == CAVSIM_OK);
    std::string line(n + 1, '\0');
    cavsim_result_summary(r.p, line.data(), line.size(), &n);
    line.resize(n);
    CHECK(line.rfind("status=ok ", 0) == 0);
    CHECK(line.find('\n') == std::string::npos);
  }

  TEST_CASE("trace column checks") {
    Config c;
    c.set("scenario.t_end_ms", "1");
    Result r(c, "adiabatic");
    std::vector<double> small(2);
    CHECK(cavsim_result_trace_column(r.p, "chi_minus", small.data(), small.size()) ==
          CAVSIM_E_INVALID_ARGUMENT);
    std::vector<double> v(cavsim_result_trace_length(r.p));
    CHECK(cavsim_result_trace_column(r.p, "sigma_rho", v.data(), v.size()) == CAVSIM_E_UNKNOWN_KEY);
  }

  TEST_CASE("fixed points at the bistable coupling") {
    Config c;
    c.set("ensemble.un0", "2.0");
    Result r(c, "fixed-points");
    CHECK(r.number("n_stable") >= 2);
    CHECK(cavsim_result_has_table(r.p) == 1);
    CHECK(cavsim_result_has_trace(r.p) == 0);
  }

  TEST_CASE("files are written through the interface") {
    Config c;
    c.set("scenario.t_end_ms", "2");
    Result r(c, "adiabatic");
    const auto trace = scratch("trace.csv");
    REQUIRE(cavsim_result_write_trace(r.p, trace.string().c_str()) == CAVSIM_OK);
    CHECK(first_line(trace) == "t_s,tau,re_a,im_a,chi_minus,phi_rad,n_atoms,loc_factor");
    CHECK(cavsim_result_write_table(r.p, scratch("table.csv").string().c_str()) == CAVSIM_E_INPUT);
    CHECK(cavsim_result_write_trace(r.p, "/nonexistent/dir/trace.csv") == CAVSIM_E_IO);

    Config s;
    s.set("scenario.preset", "paper-fig4");
    s.set("scenario.t_end_ms", "10");
    Result sweep(s, "sweep-asymmetry");
    const auto table = scratch("sweep.csv");
    REQUIRE(cavsim_result_write_table(sweep.p, table.string().c_str()) == CAVSIM_OK);
    CHECK(first_line(table).rfind("# ", 0) == 0);
    CHECK(cavsim_result_row_trace_count(sweep.p) == cavsim_result_table_rows(sweep.p));
    CHECK(cavsim_result_write_row_trace(sweep.p, 99, table.string().c_str()) ==
          CAVSIM_E_INVALID_ARGUMENT);
  }

  TEST_CASE("the last error is kept per thread") {
    Config c;
    CHECK(cavsim_config_set(c.p, "pump.nonsense", "1") == CAVSIM_E_UNKNOWN_KEY);
    const std::string mine = cavsim_last_error();
    std::string theirs;
    std::thread worker([&] {
      cavsim_config* d = nullptr;
      cavsim_config_load("/nonexistent/other.cfg", &d);
      theirs = cavsim_last_error();
    });
    worker.join();
    CHECK(theirs.find("other.cfg") != std::string::npos);
    CHECK(std::string(cavsim_last_error()) == mine);
  }
}
