#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "cavsim/config.hpp"
#include "approx.hpp"
#include "doctest.h"

using namespace cavsim;

namespace {

Config random_config(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto r = [&](double lo, double hi) { return lo + (hi - lo) * u(gen); };
  Config c;
  c.cavity.gamma_c = r(1e4, 1e6);
  c.cavity.delta0 = r(0.01, 1.0);
  c.cavity.lambda = r(500e-9, 1100e-9);
  c.cavity.waist = r(10e-6, 500e-6);
  c.pump.chi0_minus = r(0.0, 0.99);
  c.pump.chi0_plus = 1.0 - c.pump.chi0_minus;
  c.pump.xi = r(0.1, 1.0);
  c.pump.xi_start = r(0.0, 0.02);
  c.pump.xi_end = c.pump.xi_start + r(1e-4, 0.01);
  c.ensemble.un0 = r(0.0, 6.0);
  c.ensemble.gamma_lin = r(0.0, 20.0);
  c.ensemble.beta_n0 = r(0.0, 200.0);
  c.ensemble.eta_ax = r(0.01, 0.99);
  c.ensemble.eta_rad = r(0.01, 0.99);
  c.ensemble.mot_fraction = r(0.01, 1.0);
  c.dynamics.nu_rad = r(100.0, 1000.0);
  c.dynamics.nu_ax = r(2000.0, 8000.0);
  c.dynamics.radial_dims = u(gen) < 0.5 ? 1 : 2;
  c.dynamics.depth_factor = r(0.1, 4.0);
  c.dynamics.n_sim = 1 + static_cast<int>(r(0, 500));
  c.dynamics.dt = r(0.5e-6, 3e-6);
  c.dynamics.output_dt = c.dynamics.dt * (1 + static_cast<int>(r(0, 10)));
  c.scenario.t_end = r(1e-3, 0.2);
  c.scenario.output_dt = r(1e-6, 1e-4);
  c.scenario.rtol = r(1e-12, 1e-6);
  c.scenario.atol = r(1e-14, 1e-8);
  c.scenario.seed = gen();
  c.scenario.settle = r(0.0, 5e-3);
  c.scenario.chi0_minus_list = {r(0.01, 0.5), r(0.01, 0.5), r(0.01, 0.5)};
  c.scenario.xi_list = {r(0.01, 1.0), r(0.01, 1.0)};
  c.scenario.depth_factors = {r(0.1, 1.0), r(1.0, 8.0)};
  c.scenario.window_start = r(0.0, 0.01);
  c.scenario.window_end = c.scenario.window_start + r(1e-3, 5e-3);
  c.scenario.target_t_jump = r(1e-3, 0.1);
  c.scenario.analysis_start = r(0.0, 0.01);
  return c;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("empty document yields the defaults") {
    const Config c = parse_config("");
    CHECK(c.cavity.gamma_c == rel(std::numbers::pi * 17.3e3, 1e-15));
    CHECK(c.cavity.delta0 == 0.091);
    CHECK(c.cavity.U() == c.cavity.delta0 / c.cavity.gamma_c);
    CHECK(c.ensemble.eta_ax == 0.5);
    CHECK(c.ensemble.eta_rad == 0.3);
    CHECK(c.pump.chi0_minus == 0.49);
    CHECK(c.ensemble.un0 == 2.38);
    CHECK(c.dynamics.n_sim == 100);
    CHECK(c.dynamics.nu_rad == 500.0);
  }

  TEST_CASE("pump fractions must sum to one") {
    CHECK_THROWS_WITH_AS(parse_config("[pump]\nchi0_minus = 0.7\nchi0_plus = 0.5\n"),
                         doctest::Contains("must equal 1"), ConstraintError);
  }

  TEST_CASE("a single pump fraction implies the other") {
    const Config c = parse_config("[pump]\nchi0_minus = 0.43\n");
    CHECK(c.pump.chi0_plus == rel(0.57, 1e-15));
    Config d;
    set_config_value(d, "pump.chi0_plus", "0.6");
    CHECK(d.pump.chi0_minus == rel(0.4, 1e-15));
  }

  TEST_CASE("negative cavity decay rate names the key") {
    CHECK_THROWS_WITH_AS(parse_config("[cavity]\ngamma_c_per_s = -1\n"),
                         doctest::Contains("cavity.gamma_c_per_s"), ConstraintError);
  }

  TEST_CASE("unknown keys and sections are rejected") {
    CHECK_THROWS_WITH_AS(parse_config("[cavity]\ngama_c_per_s = 1\n"),
                         doctest::Contains("cavity.gama_c_per_s"), UnknownKeyError);
    CHECK_THROWS_AS(parse_config("[cavities]\n"), UnknownKeyError);
    Config c;
    CHECK_THROWS_AS(set_config_value(c, "pump.chi", "0.1"), UnknownKeyError);
  }

  TEST_CASE("malformed documents") {
    CHECK_THROWS_AS(parse_config("[pump\n"), ParseError);
    CHECK_THROWS_AS(parse_config("chi0_minus = 0.4\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[pump]\nchi0_minus\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[pump]\nchi0_minus = abc\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[pump]\nchi0_minus = 0.4\nchi0_minus = 0.4\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[dynamics]\nn_sim = 1.5\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[scenario]\nseed = -3\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[ensemble]\nun0 = nan\n"), ParseError);
  }

  TEST_CASE("comments, blank lines and unit scaling") {
    const Config c = parse_config(
        "# header\n\n[scenario]\nt_end_ms = 25 ; trailing\n  output_dt_us=20\n[dynamics]\ndt_us = 1\n");
    CHECK(c.scenario.t_end == rel(0.025, 1e-15));
    CHECK(c.scenario.output_dt == rel(20e-6, 1e-15));
    CHECK(c.dynamics.dt == rel(1e-6, 1e-15));
  }

  TEST_CASE("constraint errors name the key") {
    const std::pair<const char*, const char*> cases[] = {
        {"[ensemble]\neta_ax = 1.2\n", "ensemble.eta_ax"},
        {"[ensemble]\nun0 = -1\n", "ensemble.un0"},
        {"[dynamics]\nnu_rad_hz = 6000\n", "dynamics.nu_ax_hz"},
        {"[dynamics]\nradial_dims = 3\n", "dynamics.radial_dims"},
        {"[scenario]\nxi_list = 0.5, 1.5\n", "scenario.xi_list"},
        {"[scenario]\nchi0_minus_list = 0.6\n", "scenario.chi0_minus_list"},
        {"[scenario]\nt_end_ms = 0\n", "scenario.t_end_ms"},
    };
    for (const auto& [doc, key] : cases) CHECK_THROWS_WITH_AS(parse_config(doc), doctest::Contains(key), ConstraintError);
  }

  TEST_CASE("get and set by key") {
    Config c;
    set_config_value(c, "scenario.seed", "42");
    CHECK(c.scenario.seed == 42u);
    CHECK(get_config_value(c, "scenario.seed") == "42");
    set_config_value(c, "scenario.depth_factors", "0.25, 0.5,1,2");
    CHECK(c.scenario.depth_factors == std::vector<double>{0.25, 0.5, 1.0, 2.0});
    CHECK(get_config_value(c, "ensemble.un0") == "2.38");
    CHECK(get_config_value(c, "scenario.t_end_ms") == "100");
  }

  TEST_CASE("key list covers every section in document order") {
    const auto keys = config_keys();
    CHECK(keys.front() == "cavity.gamma_c_per_s");
    for (const auto& k : keys) {
      Config c;
      CHECK_NOTHROW(get_config_value(c, k));
    }
    const std::string doc = serialize_config(Config{});
    for (const char* s : {"[cavity]", "[pump]", "[ensemble]", "[dynamics]", "[scenario]"})
      CHECK(doc.find(s) != std::string::npos);
  }

  TEST_CASE("property: serialize then parse is the identity") {
    std::mt19937_64 gen(29);
    for (int k = 0; k < 300; ++k) {
      const Config c = random_config(gen);
      REQUIRE_NOTHROW(c.validate());
      const std::string doc = serialize_config(c);
      const Config d = parse_config(doc);
      CHECK(serialize_config(d) == doc);
      CHECK(d.cavity.gamma_c == c.cavity.gamma_c);
      CHECK(d.pump.chi0_minus == c.pump.chi0_minus);
      CHECK(d.pump.xi_start == c.pump.xi_start);
      CHECK(d.dynamics.dt == c.dynamics.dt);
      CHECK(d.dynamics.output_dt == c.dynamics.output_dt);
      CHECK(d.scenario.t_end == c.scenario.t_end);
      CHECK(d.scenario.output_dt == c.scenario.output_dt);
      CHECK(d.scenario.seed == c.scenario.seed);
      CHECK(d.scenario.window_end == c.scenario.window_end);
      CHECK(d.scenario.chi0_minus_list == c.scenario.chi0_minus_list);
      CHECK(d.ensemble.beta_n0 == c.ensemble.beta_n0);
    }
  }

  TEST_CASE("ensemble parameters follow from the coupling") {
    Config c;
    const auto e = c.ensemble_params();
    CHECK(c.cavity.U() * e.n0 == rel(2.38, 1e-14));
    CHECK(e.beta * e.n0 == rel(c.ensemble.beta_n0, 1e-14));
    CHECK(e.gamma_lin == c.ensemble.gamma_lin);
  }

  TEST_CASE("power window becomes a schedule") {
    Config c;
    CHECK(c.pump.params().schedule.empty());
    set_config_value(c, "pump.xi", "0.5");
    set_config_value(c, "pump.xi_window_start_ms", "10");
    set_config_value(c, "pump.xi_window_end_ms", "12");
    const auto p = c.pump.params();
    REQUIRE(p.schedule.size() == 1);
    CHECK(p.xi_at(0.011) == 0.5);
    CHECK(p.xi_at(0.013) == 1.0);
  }
}
