#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "cavsim/config.hpp"
#include "cavsim/particles.hpp"
#include "cavsim/scenarios.hpp"
#include "approx.hpp"
#include "oracles.hpp"
#include "doctest.h"

using namespace cavsim;

namespace {

constexpr double kPi = std::numbers::pi;

double mean_over(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x;
  return m / static_cast<double>(v.size());
}

}  // namespace

TEST_SUITE("particles") {
  TEST_CASE("potential without the unlocked mode has no axial lattice") {
    for (double th : {-2.0, 0.0, 0.7, 3.0}) {
      const double v = potential(th, 0.3, cplx(0.0, 0.0), 0.51, 2.0);
      CHECK(v == rel(-2.0 * std::exp(-2 * 0.09) * 0.51, 1e-15));
    }
  }

  TEST_CASE("potential minimum on axis at the field phase") {
    const cplx a = std::polar(0.4, 0.9);
    const double sp = std::sqrt(0.51);
    const double vmin = potential(0.9, 0.0, a, 0.51, 1.5);
    CHECK(vmin == rel(-1.5 * (sp + 0.4) * (sp + 0.4), 1e-14));
    for (double d : {-0.1, 0.05, 1.0, 3.1})
      for (double r : {0.0, 0.1, 0.5}) CHECK(potential(0.9 + d, r, a, 0.51, 1.5) >= vmin);
  }

  TEST_CASE("potential spot value against extended precision") {
    const long double f = std::exp(-2.0L * 0.2L * 0.2L);
    const std::complex<long double> a(0.5L, 0.1L);
    const long double sp = std::sqrt(0.5L);
    const long double ref =
        -f * (0.5L + std::norm(a) + 2.0L * sp * (a * std::polar(1.0L, -0.3L)).real());
    const double got = potential(0.3, 0.2, cplx(0.5, 0.1), 0.5, 1.0);
    CHECK(std::abs(static_cast<long double>(got) - ref) < 1e-12L * std::abs(ref));
  }

  TEST_CASE("forces vanish at the potential minimum") {
    const auto sc = oracle::scales();
    ParticleSystem s;
    s.a = std::polar(0.3, -1.1);
    s.theta = {-1.1};
    s.p_theta = {0.0};
    s.rho = {0.0};
    s.p_rho = {0.0};
    const auto f = forces(s, sc);
    CHECK(std::abs(f.theta[0]) < 1e-12 * sc.eps);
    CHECK(f.rho[0] == 0.0);
  }

  TEST_CASE("radial forces vanish on axis") {
    std::mt19937_64 gen(2);
    for (int dims : {1, 2}) {
      auto s = oracle::random_system(gen, 50, dims);
      std::fill(s.rho.begin(), s.rho.end(), 0.0);
      const auto f = forces(s, oracle::scales());
      for (double x : f.rho) CHECK(x == 0.0);
    }
  }

  TEST_CASE("property: forces match finite-difference gradients on 100 random states") {
    CHECK(oracle::force_gradient_error(100, 17) < 1e-6);
  }

  TEST_CASE("perfect bunching reproduces the adiabatic field equation without truncation") {
    CHECK(oracle::bunched_limit_error(200, 23) < 1e-12);
  }

  TEST_CASE("unbunched atoms decouple from the field") {
    const CavityParams cav;
    const int n = 1000;
    ParticleSystem s;
    s.a = cplx(0.3, -0.2);
    for (int j = 0; j < n; ++j) s.theta.push_back(2 * kPi * j / n);
    s.p_theta.assign(n, 0.0);
    s.rho.assign(n, 0.0);
    s.p_rho.assign(n, 0.0);
    s.weight = 2.38 / cav.U() / n;
    CHECK(std::abs(bunching_sum(s)) < 1e-9 * s.weight * n);
    const cplx rhs = field_rhs(s, cav.U(), 0.51, 0.49);
    CHECK(std::abs(rhs - (-s.a + std::sqrt(0.49))) < 1e-8);
  }

  TEST_CASE("small-oscillation frequencies match the configured ones") {
    const DynamicsParams dyn;
    const CavityParams cav;
    const cplx a = std::polar(0.156, 0.4);
    const auto sc = lattice_scales(dyn, cav, 0.51, std::abs(a), 0.5);
    const double h = 1e-4;
    const auto V = [&](double th, double r) { return potential(th, &r, 1, a, 0.51, sc.eps); };
    const double th0 = std::arg(a);
    const double k_th = (V(th0 + h, 0) - 2 * V(th0, 0) + V(th0 - h, 0)) / (h * h);
    const double k_r = (V(th0, h) - 2 * V(th0, 0) + V(th0, -h)) / (h * h);
    const auto hz = [&](double k, double m) { return std::sqrt(k / m) * cav.gamma_c / (2 * kPi); };
    CHECK(hz(k_th, sc.m_theta) == rel(dyn.nu_ax, 1e-3));
    CHECK(hz(k_r, sc.m_rho) == rel(dyn.nu_rad, 1e-3));
  }

  TEST_CASE("thermal sample is deterministic per seed") {
    const auto sc = oracle::scales();
    const cplx a(0.16, 0.05);
    const auto s1 = sample_thermal(200, sc, a, 2, 99);
    const auto s2 = sample_thermal(200, sc, a, 2, 99);
    const auto s3 = sample_thermal(200, sc, a, 2, 100);
    CHECK(s1.theta == s2.theta);
    CHECK(s1.p_theta == s2.p_theta);
    CHECK(s1.rho == s2.rho);
    CHECK(s1.p_rho == s2.p_rho);
    CHECK(s1.theta != s3.theta);
  }

  TEST_CASE("thermal sample: every particle is bound below the axial saddle") {
    const cplx a(0.16, 0.05);
    const auto sc = oracle::scales(0.5, a);
    const auto s = sample_thermal(2000, sc, a, 1, 4);
    const double sp = std::sqrt(sc.chi0_plus), r = std::abs(a);
    const double e_cut = -sc.eps * (sp - r) * (sp - r);
    for (std::size_t j = 0; j < s.size(); ++j) CHECK(particle_energy(s, j, sc) < e_cut);
    CHECK(last_acceptance_rate() > 1e-3);
  }

  TEST_CASE("thermal sample: zero-temperature limit") {
    const cplx a = std::polar(0.16, 0.7);
    const auto cold = oracle::scales(1e-7, a);
    const auto warm = oracle::scales(0.5, a);
    const auto s = sample_thermal(500, cold, a, 1, 8);
    const auto w = sample_thermal(500, warm, a, 1, 8);
    double pt = 0, pw = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      CHECK(std::abs(std::remainder(s.theta[j] - 0.7, 2 * kPi)) < 1e-2);
      CHECK(std::abs(s.rho[j]) < 1e-2);
      pt += s.p_theta[j] * s.p_theta[j];
      pw += w.p_theta[j] * w.p_theta[j];
    }
    CHECK(std::sqrt(pt / pw) < 1e-2);
  }

  TEST_CASE("thermal sample: axial and radial spreads agree with Boltzmann quadrature") {
    const cplx a = std::polar(0.156, 0.0);
    const auto sc = oracle::scales(0.5, a);
    const auto s = sample_thermal(100000, sc, a, 1, 21);

    // Marginal weight over (theta, rho): exp(-V/kT) times the probability that the two
    // quadratic momentum degrees of freedom keep the energy below the saddle.
    const double sp = std::sqrt(sc.chi0_plus), r = std::abs(a);
    const double e_cut = -sc.eps * (sp - r) * (sp - r);
    const int nt = 1200, nr = 1200;
    const double rmax = 1.5;
    long double z = 0, m_th2 = 0, m_r2 = 0;
    for (int i = 0; i < nt; ++i) {
      const double th = -kPi + (i + 0.5) * 2 * kPi / nt;
      for (int k = 0; k < nr; ++k) {
        const double rho = -rmax + (k + 0.5) * 2 * rmax / nr;
        const double v = potential(th, rho, a, sc.chi0_plus, sc.eps);
        if (v >= e_cut) continue;
        const long double w = std::exp(-(v - e_cut) / sc.kT) * -std::expm1(-(e_cut - v) / sc.kT);
        z += w;
        m_th2 += w * th * th;
        m_r2 += w * rho * rho;
      }
    }
    const double var_th = static_cast<double>(m_th2 / z), var_r = static_cast<double>(m_r2 / z);

    std::vector<double> th2, r2;
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double d = std::remainder(s.theta[j], 2 * kPi);
      th2.push_back(d * d);
      r2.push_back(s.rho[j] * s.rho[j]);
    }
    CHECK(mean_over(th2) == rel(var_th, 0.05));
    CHECK(mean_over(r2) == rel(var_r, 0.05));
  }

  TEST_CASE("thermal sample rejects degenerate inputs") {
    const auto sc = oracle::scales();
    CHECK_THROWS_AS(sample_thermal(0, sc, cplx(0.1, 0), 1, 1), InputError);
    CHECK_THROWS_AS(sample_thermal(10, sc, cplx(0.1, 0), 3, 1), InputError);
    CHECK_THROWS_AS(sample_thermal(10, sc, cplx(0.0, 0), 1, 1), DomainError);
    auto hot = sc;
    hot.kT = 1e3 * sc.eps;
    CHECK_THROWS_AS(sample_thermal(10, hot, cplx(0.1, 0), 1, 1), ConstraintError);
  }

  TEST_CASE("frozen field without losses conserves energy over 10^4 axial periods") {
    for (int dims : {1, 2}) CHECK(oracle::frozen_field_energy_drift(dims) < 1e-6);
  }

  TEST_CASE("halving the step leaves the final observables unchanged") {
    CHECK(oracle::step_halving_change(oracle::stable_particle_run(2e-3)) < 1e-4);
  }

  TEST_CASE("step-halving differences shrink at least as fast as the fourth power") {
    ParticleRun run = oracle::stable_particle_run(1e-3);
    const auto a = oracle::final_observables(simulate(run));
    run.dyn.dt *= 0.5;
    const auto b = oracle::final_observables(simulate(run));
    run.dyn.dt *= 0.5;
    const auto c = oracle::final_observables(simulate(run));
    CHECK(oracle::max_rel_change(b, c) < oracle::max_rel_change(a, b) / 12.0);
  }

  TEST_CASE("escaping particles are removed and noted") {
    Config cfg;
    cfg.scenario.t_end = 2e-3;
    ParticleRun run = make_particle_run(cfg);
    run.dyn.escape_radius = 0.15;
    const auto tr = simulate(run);
    REQUIRE_FALSE(tr.escapes.empty());
    CHECK(tr.samples.back().n_active == run.dyn.n_sim - static_cast<int>(tr.escapes.size()));
    CHECK(tr.note.find("escaped") != std::string::npos);
    for (std::size_t k = 1; k < tr.escapes.size(); ++k) CHECK(tr.escapes[k].t >= tr.escapes[k - 1].t);
  }

  TEST_CASE("step size must resolve the axial oscillation") {
    ParticleRun run;
    run.a_init = 0.15;
    run.dyn.dt = 5e-6;
    run.dyn.output_dt = 10e-6;
    CHECK_THROWS_AS(run.validate(), ConstraintError);
    run.dyn.dt = 2e-6;
    run.dyn.output_dt = 5e-6;
    CHECK_THROWS_AS(run.validate(), ConstraintError);
  }

  TEST_CASE("identical runs give identical traces") {
    Config cfg;
    cfg.scenario.t_end = 3e-3;
    const auto run = make_particle_run(cfg);
    const auto a = simulate(run), b = simulate(run);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
      CHECK(a.samples[k].field.a == b.samples[k].field.a);
      CHECK(a.samples[k].sigma_rho == b.samples[k].sigma_rho);
    }
  }
}

TEST_SUITE("particles_known_gap") {
  TEST_CASE("thermal bunching of a frozen-field sample against the localization factor") {
    const cplx a = std::polar(0.156, 0.0);
    const auto sc = oracle::scales(0.5, a);
    const auto s = sample_thermal(20000, sc, a, 1, 5);
    const double measured = std::abs(bunching_sum(s)) / (s.weight * static_cast<double>(s.size()));
    const double l = localization_factor(std::abs(a), std::abs(a), sc.chi0_plus, 0.5, 0.3);
    MESSAGE("measured bunching " << measured << ", localization factor " << l);
    CHECK(measured == rel(l, 0.15));
  }

  TEST_CASE("halving the step leaves the default-configuration observables unchanged") {
    Config cfg;
    cfg.scenario.t_end = 5e-3;
    CHECK(oracle::step_halving_change(make_particle_run(cfg)) < 1e-4);
  }
}
