#include "cavsim/particles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace cavsim {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

thread_local double g_last_acceptance = 0.0;

double wrap_pi(double x) { return std::remainder(x, 2.0 * kPi); }

double rho_squared(const double* rho, int dims) {
  double s = 0;
  for (int d = 0; d < dims; ++d) s += rho[d] * rho[d];
  return s;
}

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConstraintError(std::string(key) + ": " + what);
}

}  // namespace

void DynamicsParams::validate() const {
  require(nu_rad > 0, "dynamics.nu_rad_hz", "must be > 0");
  require(nu_ax > nu_rad, "dynamics.nu_ax_hz", "must exceed nu_rad_hz");
  require(radial_dims == 1 || radial_dims == 2, "dynamics.radial_dims", "must be 1 or 2");
  require(depth_factor > 0 && std::isfinite(depth_factor), "dynamics.depth_factor", "must be > 0");
  require(escape_radius > 0, "dynamics.escape_radius_waists", "must be > 0");
  require(n_sim >= 1, "dynamics.n_sim", "must be >= 1");
  require(dt > 0, "dynamics.dt_us", "must be > 0");
  require(output_dt >= dt, "dynamics.output_dt_us", "must be >= dt_us");
}

LatticeScales lattice_scales(const DynamicsParams& dyn, const CavityParams& cav,
                             double chi0_plus, double a_ref, double eta_ax) {
  if (!(a_ref > 0)) throw DomainError("lattice_scales: |a(0)| must be > 0");
  if (!(chi0_plus > 0)) throw DomainError("lattice_scales: chi0_plus must be > 0");
  LatticeScales sc;
  sc.chi0_plus = chi0_plus;
  sc.a_ref = a_ref;
  const double sp = std::sqrt(chi0_plus);
  const double w_ax = 2.0 * kPi * dyn.nu_ax / cav.gamma_c;
  const double w_rad = 2.0 * kPi * dyn.nu_rad / cav.gamma_c;
  // theta = 2 k x, so the kinetic energy m v^2/2 reads m_theta theta'^2/2 with m_theta = gamma_c/(8 omega_R).
  sc.m_theta = cav.gamma_c / (8.0 * recoil_angular_frequency(cav.lambda));
  // Curvatures at the well bottom: 2 eps sqrt(chi0+) |a| axially, 4 eps (sqrt(chi0+) + |a|)^2 radially.
  const double eps0 = sc.m_theta * w_ax * w_ax / (2.0 * sp * a_ref);
  sc.m_rho = 4.0 * eps0 * (sp + a_ref) * (sp + a_ref) / (w_rad * w_rad);
  sc.eps = eps0 * dyn.depth_factor;
  sc.kT = eta_ax * 4.0 * sc.eps * sp * a_ref;
  return sc;
}

void ParticleSystem::validate() const {
  const std::size_t n = theta.size();
  if (n == 0) throw InputError("particle system is empty");
  if (dims != 1 && dims != 2) throw InputError("radial dimensionality must be 1 or 2");
  if (p_theta.size() != n || rho.size() != n * dims || p_rho.size() != n * dims)
    throw InputError("particle arrays differ in length");
  if (!(weight > 0)) throw InputError("particle weight must be > 0");
}

double potential(double theta, const double* rho, int dims, cplx a, double chi0_plus, double eps,
                 double xi) {
  const double f = std::exp(-2.0 * rho_squared(rho, dims));
  const double s = std::sqrt(xi * chi0_plus);
  return -eps * f * (xi * chi0_plus + std::norm(a) + 2.0 * s * (a * std::polar(1.0, -theta)).real());
}

Forces forces(const ParticleSystem& sys, const LatticeScales& sc, double xi) {
  const std::size_t n = sys.size();
  const int d = sys.dims;
  const double s = std::sqrt(xi * sc.chi0_plus);
  const double base = xi * sc.chi0_plus + std::norm(sys.a);
  Forces out;
  out.theta.resize(n);
  out.rho.resize(n * d);
  for (std::size_t j = 0; j < n; ++j) {
    const double* r = &sys.rho[j * d];
    const double ef = sc.eps * std::exp(-2.0 * rho_squared(r, d));
    const cplx z = sys.a * std::polar(1.0, -sys.theta[j]);
    out.theta[j] = 2.0 * ef * s * z.imag();
    const double b = base + 2.0 * s * z.real();
    for (int k = 0; k < d; ++k) out.rho[j * d + k] = -4.0 * r[k] * ef * b;
  }
  return out;
}

cplx bunching_sum(const ParticleSystem& sys) {
  cplx s{0.0, 0.0};
  const int d = sys.dims;
  for (std::size_t j = 0; j < sys.size(); ++j)
    s += std::exp(-2.0 * rho_squared(&sys.rho[j * d], d)) * std::polar(1.0, sys.theta[j]);
  return sys.weight * s;
}

cplx field_rhs(const ParticleSystem& sys, double U, double chi0_plus, double chi0_minus,
               double xi) {
  const cplx S = bunching_sum(sys);
  const double sp = std::sqrt(chi0_plus);
  const cplx& a = sys.a;
  return kI * (U * (std::conj(S) * a).real() / sp) * a - a - kI * U * S * std::sqrt(xi) * sp +
         std::sqrt(xi * chi0_minus);
}

double particle_energy(const ParticleSystem& sys, std::size_t j, const LatticeScales& sc,
                       double xi) {
  const int d = sys.dims;
  double kin = sys.p_theta[j] * sys.p_theta[j] / (2.0 * sc.m_theta);
  for (int k = 0; k < d; ++k) kin += sys.p_rho[j * d + k] * sys.p_rho[j * d + k] / (2.0 * sc.m_rho);
  return kin + potential(sys.theta[j], &sys.rho[j * d], d, sys.a, sc.chi0_plus, sc.eps, xi);
}

ParticleSystem sample_thermal(int n_sim, const LatticeScales& sc, cplx a_init, int dims,
                              std::uint64_t seed) {
  if (n_sim < 1) throw InputError("sample_thermal: n_sim must be >= 1");
  if (dims != 1 && dims != 2) throw InputError("sample_thermal: radial_dims must be 1 or 2");
  if (!(sc.kT > 0 && sc.eps > 0)) throw ConstraintError("sample_thermal: temperature must be > 0");
  const double r = std::abs(a_init);
  if (!(r > 0)) throw DomainError("sample_thermal: |a_init| must be > 0");
  const double sp = std::sqrt(sc.chi0_plus);
  const double phi = std::arg(a_init);

  const double e_cut = -sc.eps * (sp - r) * (sp - r);
  const double b_max = (sp + r) * (sp + r);
  // Outside rho_max even the axial minimum lies above the saddle energy.
  constexpr double kRhoCap2 = 25.0;
  const double rho_max2 =
      sp != r ? std::min(0.5 * std::log(b_max / ((sp - r) * (sp - r))), kRhoCap2) : kRhoCap2;

  // Gaussian envelope: f(rho) <= 1 - 2 c rho^2 on the support and 1 - cos(d) >= 2 d^2/pi^2.
  const double c = -std::expm1(-2.0 * rho_max2) / (2.0 * rho_max2);
  const double alpha_rho = 2.0 * c * sc.eps * b_max / sc.kT;
  const double alpha_theta =
      4.0 * sc.eps * std::exp(-2.0 * rho_max2) * sp * r / (kPi * kPi * sc.kT);
  // A nearly flat envelope in theta is replaced by the uniform one (alpha_theta = 0 is a valid bound).
  const bool flat_theta = !(alpha_theta > 1.0 / (2.0 * kPi * kPi));
  const double sd_theta = flat_theta ? 0.0 : 1.0 / std::sqrt(2.0 * alpha_theta);
  const double sd_rho = 1.0 / std::sqrt(2.0 * alpha_rho);
  const double sd_pt = std::sqrt(sc.m_theta * sc.kT);
  const double sd_pr = std::sqrt(sc.m_rho * sc.kT);

  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  ParticleSystem sys;
  sys.dims = dims;
  sys.a = a_init;
  sys.theta.reserve(n_sim);
  sys.p_theta.reserve(n_sim);
  sys.rho.reserve(static_cast<std::size_t>(n_sim) * dims);
  sys.p_rho.reserve(static_cast<std::size_t>(n_sim) * dims);

  std::uint64_t attempts = 0, accepted = 0;
  double rho[2] = {0.0, 0.0}, prho[2] = {0.0, 0.0};
  while (accepted < static_cast<std::uint64_t>(n_sim)) {
    ++attempts;
    if (attempts >= 100000 && static_cast<double>(accepted) < 1e-3 * static_cast<double>(attempts)) {
      g_last_acceptance = static_cast<double>(accepted) / static_cast<double>(attempts);
      throw ConstraintError("sample_thermal: acceptance rate below 1e-3 (ensemble.eta_ax too close to 1)");
    }
    const double delta = flat_theta ? kPi * (2.0 * uniform(gen) - 1.0) : sd_theta * normal(gen);
    for (int k = 0; k < dims; ++k) rho[k] = sd_rho * normal(gen);
    const double pt = sd_pt * normal(gen);
    for (int k = 0; k < dims; ++k) prho[k] = sd_pr * normal(gen);
    const double u = uniform(gen);

    const double r2 = rho_squared(rho, dims);
    if (std::abs(delta) > kPi || r2 > rho_max2) continue;
    const double f = std::exp(-2.0 * r2);
    const double b = sc.chi0_plus + r * r + 2.0 * sp * r * std::cos(delta);
    const double log_ratio =
        sc.eps * (f * b - b_max) / sc.kT + alpha_rho * r2 + (flat_theta ? 0.0 : alpha_theta * delta * delta);
    if (u >= std::exp(std::min(0.0, log_ratio))) continue;

    double energy = -sc.eps * f * b + pt * pt / (2.0 * sc.m_theta);
    for (int k = 0; k < dims; ++k) energy += prho[k] * prho[k] / (2.0 * sc.m_rho);
    if (!(energy < e_cut)) continue;

    ++accepted;
    sys.theta.push_back(phi + delta);
    sys.p_theta.push_back(pt);
    for (int k = 0; k < dims; ++k) {
      sys.rho.push_back(rho[k]);
      sys.p_rho.push_back(prho[k]);
    }
  }
  g_last_acceptance = static_cast<double>(accepted) / static_cast<double>(attempts);
  return sys;
}

double last_acceptance_rate() { return g_last_acceptance; }

void ParticleRun::validate() const {
  cav.validate();
  pump.validate();
  ens.validate();
  dyn.validate();
  if (!(t_end > t_start)) throw InputError("t_span must be ordered (t_end > t_start)");
  if (!(std::abs(a_init) > 0)) throw InputError("a_init must have nonzero modulus");
  const double nu_eff = dyn.nu_ax * std::sqrt(std::max(1.0, dyn.depth_factor));
  if (dyn.dt > 1.0 / (50.0 * nu_eff) * (1 + 1e-12))
    throw ConstraintError("dynamics.dt_us: must not exceed 1/(50 nu_ax)");
  const double ratio = dyn.output_dt / dyn.dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-6 * ratio)
    throw ConstraintError("dynamics.output_dt_us: must be a multiple of dt_us");
}

namespace {

// Flat state layout: [Re a, Im a, theta(n), p_theta(n), rho(n d), p_rho(n d)].
struct Layout {
  std::size_t n;
  int d;
  std::size_t theta() const { return 2; }
  std::size_t p_theta() const { return 2 + n; }
  std::size_t rho() const { return 2 + 2 * n; }
  std::size_t p_rho() const { return 2 + 2 * n + n * d; }
  std::size_t size() const { return 2 + 2 * n + 2 * n * d; }
};

std::vector<double> pack(const ParticleSystem& s) {
  std::vector<double> y{s.a.real(), s.a.imag()};
  y.insert(y.end(), s.theta.begin(), s.theta.end());
  y.insert(y.end(), s.p_theta.begin(), s.p_theta.end());
  y.insert(y.end(), s.rho.begin(), s.rho.end());
  y.insert(y.end(), s.p_rho.begin(), s.p_rho.end());
  return y;
}

void unpack(const std::vector<double>& y, const Layout& L, ParticleSystem& s) {
  s.a = {y[0], y[1]};
  s.theta.assign(y.begin() + L.theta(), y.begin() + L.p_theta());
  s.p_theta.assign(y.begin() + L.p_theta(), y.begin() + L.rho());
  s.rho.assign(y.begin() + L.rho(), y.begin() + L.p_rho());
  s.p_rho.assign(y.begin() + L.p_rho(), y.end());
}

class Stepper {
 public:
  Stepper(const ParticleRun& run, const LatticeScales& sc) : run_(run), sc_(sc) {}

  double atoms(double t) const { return run_.losses ? atom_number(t, run_.ens) : run_.ens.n0; }

  void rhs(double t, const std::vector<double>& y, const Layout& L, std::vector<double>& dy) const {
    const std::size_t n = L.n;
    const int d = L.d;
    const double xi = run_.pump.xi_at(t);
    const double s = std::sqrt(xi * sc_.chi0_plus);
    const cplx a{y[0], y[1]};
    const double base = xi * sc_.chi0_plus + std::norm(a);
    cplx S{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      const double* r = &y[L.rho() + j * d];
      const double f = std::exp(-2.0 * rho_squared(r, d));
      const double th = y[L.theta() + j];
      const cplx e = std::polar(1.0, th);
      S += f * e;
      const cplx z = a * std::conj(e);
      dy[L.theta() + j] = y[L.p_theta() + j] / sc_.m_theta;
      dy[L.p_theta() + j] = 2.0 * sc_.eps * f * s * z.imag();
      const double b = base + 2.0 * s * z.real();
      for (int k = 0; k < d; ++k) {
        dy[L.rho() + j * d + k] = y[L.p_rho() + j * d + k] / sc_.m_rho;
        dy[L.p_rho() + j * d + k] = -4.0 * r[k] * sc_.eps * f * b;
      }
    }
    if (run_.freeze_field) {
      dy[0] = dy[1] = 0.0;
      return;
    }
    const double w = n > 0 ? atoms(t) / static_cast<double>(n) : 0.0;
    S *= w;
    const double U = run_.cav.U();
    const double sp = std::sqrt(sc_.chi0_plus);
    const cplx da = kI * (U * (std::conj(S) * a).real() / sp) * a - a -
                    kI * U * S * std::sqrt(xi) * sp + std::sqrt(xi * run_.pump.chi0_minus);
    dy[0] = da.real();
    dy[1] = da.imag();
  }

 private:
  const ParticleRun& run_;
  const LatticeScales& sc_;
};

}  // namespace

ParticleTrace evolve(const ParticleRun& run, ParticleSystem sys) {
  run.validate();
  sys.validate();
  const double gc = run.cav.gamma_c;
  const LatticeScales sc =
      lattice_scales(run.dyn, run.cav, run.pump.chi0_plus, std::abs(run.a_init), run.ens.eta_ax);
  const Stepper stepper(run, sc);

  ParticleTrace trace;
  trace.scales = sc;
  std::vector<std::size_t> ids(sys.size());
  for (std::size_t j = 0; j < ids.size(); ++j) ids[j] = j;

  const auto n_steps =
      static_cast<std::size_t>(std::llround((run.t_end - run.t_start) / run.dyn.dt));
  const auto every = static_cast<std::size_t>(std::llround(run.dyn.output_dt / run.dyn.dt));
  const double h = gc * run.dyn.dt;

  const auto record = [&](double t) {
    const std::size_t n = sys.size();
    const int d = sys.dims;
    ParticleSample ps;
    FieldSample& s = ps.field;
    s.t = t;
    s.tau = gc * t;
    s.a = sys.a;
    s.chi_minus = std::norm(sys.a);
    const double arg = std::arg(sys.a);
    s.phi = trace.samples.empty()
                ? arg
                : trace.samples.back().field.phi + wrap_pi(arg - std::arg(trace.samples.back().field.a));
    s.n_atoms = stepper.atoms(t);
    ps.n_active = static_cast<int>(n);
    if (n > 0) {
      cplx bunch{0.0, 0.0};
      double m1 = 0, m2 = 0, rr = 0, pp = 0, en = 0;
      const double xi = run.pump.xi_at(t);
      for (std::size_t j = 0; j < n; ++j) {
        const double dev = wrap_pi(sys.theta[j] - arg);
        m1 += dev;
        m2 += dev * dev;
        const double r2 = rho_squared(&sys.rho[j * d], d);
        rr += r2;
        pp += rho_squared(&sys.p_rho[j * d], d);
        bunch += std::exp(-2.0 * r2) * std::polar(1.0, sys.theta[j]);
        en += particle_energy(sys, j, sc, xi);
      }
      const double nn = static_cast<double>(n);
      m1 /= nn;
      ps.sigma_theta = std::sqrt(std::max(0.0, m2 / nn - m1 * m1));
      ps.sigma_rho = std::sqrt(rr / nn);
      ps.sigma_prho = std::sqrt(pp / nn);
      ps.mean_energy = en / nn;
      s.loc = std::abs(bunch) / nn;
    }
    trace.samples.push_back(ps);
  };

  sys.weight = sys.size() > 0 ? stepper.atoms(run.t_start) / static_cast<double>(sys.size()) : 0.0;
  record(run.t_start);

  Layout L{sys.size(), sys.dims};
  std::vector<double> y = pack(sys);
  std::vector<double> k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());
  for (std::size_t step = 1; step <= n_steps; ++step) {
    const double t0 = run.t_start + static_cast<double>(step - 1) * run.dyn.dt;
    const double tm = t0 + 0.5 * run.dyn.dt;
    const double t1 = run.t_start + static_cast<double>(step) * run.dyn.dt;
    const std::size_t m = y.size();
    stepper.rhs(t0, y, L, k1);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    stepper.rhs(tm, tmp, L, k2);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    stepper.rhs(tm, tmp, L, k3);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * k3[i];
    stepper.rhs(t1, tmp, L, k4);
    for (std::size_t i = 0; i < m; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    unpack(y, L, sys);
    if (!std::isfinite(sys.a.real()) || !std::isfinite(sys.a.imag()))
      throw Error(Status::domain, "particle integration diverged at t=" + std::to_string(t1));

    // Remove particles that left the radial trap region.
    bool removed = false;
    const double r_esc2 = run.dyn.escape_radius * run.dyn.escape_radius;
    for (std::size_t j = sys.size(); j-- > 0;) {
      if (rho_squared(&sys.rho[j * sys.dims], sys.dims) <= r_esc2) continue;
      trace.escapes.push_back({t1, ids[j]});
      ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(j));
      sys.theta.erase(sys.theta.begin() + static_cast<std::ptrdiff_t>(j));
      sys.p_theta.erase(sys.p_theta.begin() + static_cast<std::ptrdiff_t>(j));
      const auto off = static_cast<std::ptrdiff_t>(j * sys.dims);
      sys.rho.erase(sys.rho.begin() + off, sys.rho.begin() + off + sys.dims);
      sys.p_rho.erase(sys.p_rho.begin() + off, sys.p_rho.begin() + off + sys.dims);
      removed = true;
    }
    if (removed) {
      L.n = sys.size();
      y = pack(sys);
      k1.resize(y.size());
      k2.resize(y.size());
      k3.resize(y.size());
      k4.resize(y.size());
      tmp.resize(y.size());
    }
    sys.weight = sys.size() > 0 ? stepper.atoms(t1) / static_cast<double>(sys.size()) : 0.0;
    if (step % every == 0) record(t1);
  }
  if (!trace.escapes.empty())
    trace.note = std::to_string(trace.escapes.size()) +
                 " particle(s) escaped; weight renormalized to N(t)/N_active";
  return trace;
}

ParticleTrace simulate(const ParticleRun& run) {
  run.validate();
  const LatticeScales sc =
      lattice_scales(run.dyn, run.cav, run.pump.chi0_plus, std::abs(run.a_init), run.ens.eta_ax);
  ParticleSystem sys = sample_thermal(run.dyn.n_sim, sc, run.a_init, run.dyn.radial_dims, run.dyn.seed);
  return evolve(run, std::move(sys));
}

}  // namespace cavsim
