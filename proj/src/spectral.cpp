#include "cavsim/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace cavsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double uniform_step(const std::vector<double>& t) {
  if (t.size() < 2) throw InputError("time grid needs at least two samples");
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (!(dt > 0)) throw InputError("time grid must be strictly increasing");
  for (std::size_t k = 1; k < t.size(); ++k)
    if (std::abs(t[k] - t[k - 1] - dt) > 1e-6 * dt) throw InputError("time grid is not uniform");
  return dt;
}

/// Residuals of a least-squares line through (k, x_k).
std::vector<double> detrend(const std::vector<double>& x) {
  const auto n = static_cast<double>(x.size());
  double sk = 0, sx = 0, skk = 0, skx = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const auto kk = static_cast<double>(k);
    sk += kk;
    sx += x[k];
    skk += kk * kk;
    skx += kk * x[k];
  }
  const double slope = (n * skx - sk * sx) / (n * skk - sk * sk);
  const double icpt = (sx - slope * sk) / n;
  std::vector<double> r(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) r[k] = x[k] - icpt - slope * static_cast<double>(k);
  return r;
}

double median_of(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

std::vector<double> periodogram(const std::vector<double>& x, std::size_t nfft) {
  const std::size_t n = x.size();
  std::vector<double> in(nfft, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    in[k] = x[k] * 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(k) / static_cast<double>(n - 1)));
  std::vector<std::complex<double>> out(nfft / 2 + 1);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in.data(),
                                        reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  std::vector<double> p(out.size());
  for (std::size_t k = 0; k < out.size(); ++k) p[k] = std::norm(out[k]);
  return p;
}

}  // namespace

Peak dominant_peak(const std::vector<double>& t, const std::vector<double>& x, double f_min,
                   double f_max) {
  if (t.size() != x.size()) throw InputError("dominant_peak: t and x differ in length");
  if (x.size() < 8) throw InputError("dominant_peak: need at least 8 samples");
  const double dt = uniform_step(t);

  const auto r = detrend(x);
  double mean = 0, ss = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mean += x[k];
    ss += r[k] * r[k];
  }
  mean /= static_cast<double>(x.size());
  const double rms = std::sqrt(ss / static_cast<double>(x.size()));
  if (rms <= 1e-12 * std::max(std::abs(mean), 1e-300))
    throw NoOscillation("no oscillation detected: signal is constant");

  std::size_t nfft = 1;
  while (nfft < 8 * x.size()) nfft <<= 1;
  const auto p = periodogram(r, nfft);
  const double df = 1.0 / (static_cast<double>(nfft) * dt);

  const std::size_t lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(f_min / df)));
  const std::size_t hi =
      std::min(p.size() - 1, std::isfinite(f_max) ? static_cast<std::size_t>(f_max / df) : p.size() - 1);
  if (hi < lo + 2) throw InputError("dominant_peak: frequency band holds fewer than 3 bins");

  std::size_t kmax = lo;
  for (std::size_t k = lo; k <= hi; ++k)
    if (p[k] > p[kmax]) kmax = k;
  Peak peak;
  peak.power = p[kmax];
  peak.median = median_of(std::vector<double>(p.begin() + static_cast<std::ptrdiff_t>(lo),
                                              p.begin() + static_cast<std::ptrdiff_t>(hi) + 1));
  if (!(peak.power > 3.0 * peak.median))
    throw NoOscillation("no oscillation detected: no peak 3x above the spectral median");
  // A resolved peak falls below half its power on both sides within the band; otherwise
  // the maximum is the flank of out-of-band power.
  const double half = 0.5 * p[kmax];
  const bool left = std::any_of(p.begin() + static_cast<std::ptrdiff_t>(lo),
                                p.begin() + static_cast<std::ptrdiff_t>(kmax),
                                [&](double v) { return v < half; });
  const bool right = std::any_of(p.begin() + static_cast<std::ptrdiff_t>(kmax) + 1,
                                 p.begin() + static_cast<std::ptrdiff_t>(hi) + 1,
                                 [&](double v) { return v < half; });
  if (!left || !right)
    throw NoOscillation("no oscillation detected: spectrum peaks on the flank of the band edge");

  double shift = 0.0;
  if (kmax > 1 && kmax + 1 < p.size() && p[kmax - 1] > 0 && p[kmax + 1] > 0) {
    const double a = std::log(p[kmax - 1]), b = std::log(p[kmax]), c = std::log(p[kmax + 1]);
    const double den = a - 2.0 * b + c;
    if (den < 0) shift = 0.5 * (a - c) / den;
  }
  peak.f_peak = (static_cast<double>(kmax) + shift) * df;
  return peak;
}

SqueezingFrequency squeezing_frequency(const std::vector<double>& t, const std::vector<double>& x,
                                       double f_min, double f_max) {
  SqueezingFrequency out;
  out.f_peak = dominant_peak(t, x, f_min, f_max).f_peak;
  const double span = t.back() - t.front();
  if (span * out.f_peak < 10.0)
    throw InputError("squeezing_frequency: trace covers fewer than 10 oscillation periods");
  const std::size_t half = t.size() / 2;
  const std::vector<double> t1(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(half));
  const std::vector<double> x1(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(half));
  const std::vector<double> t2(t.begin() + static_cast<std::ptrdiff_t>(half), t.end());
  const std::vector<double> x2(x.begin() + static_cast<std::ptrdiff_t>(half), x.end());
  out.f_first_half = dominant_peak(t1, x1, f_min, f_max).f_peak;
  out.f_second_half = dominant_peak(t2, x2, f_min, f_max).f_peak;
  const double c1 = 0.5 * (t1.front() + t1.back());
  const double c2 = 0.5 * (t2.front() + t2.back());
  out.drift = (out.f_second_half - out.f_first_half) / ((c2 - c1) * 1e3);
  return out;
}

double lag_phase(const std::vector<double>& t, const std::vector<double>& x,
                 const std::vector<double>& y, double f) {
  if (t.size() != x.size() || t.size() != y.size())
    throw InputError("lag_phase: series differ in length");
  if (!(f > 0)) throw InputError("lag_phase: frequency must be > 0");
  const double dt = uniform_step(t);
  const auto xr = detrend(x);
  const auto yr = detrend(y);
  const auto period = static_cast<std::ptrdiff_t>(std::ceil(1.0 / (f * dt)));
  const auto n = static_cast<std::ptrdiff_t>(t.size());
  if (period + 2 >= n) throw InputError("lag_phase: trace shorter than one period");

  const auto corr = [&](std::ptrdiff_t lag) {
    double s = 0;
    for (std::ptrdiff_t k = 0; k + lag < n; ++k) s += xr[k] * yr[k + lag];
    return s / static_cast<double>(n - lag);
  };
  std::vector<double> c(static_cast<std::size_t>(period) + 2);
  for (std::ptrdiff_t l = 0; l < period + 2; ++l) c[l] = corr(l);
  std::ptrdiff_t best = 0;
  for (std::ptrdiff_t l = 0; l <= period; ++l)
    if (c[l] > c[best]) best = l;
  double lag = static_cast<double>(best);
  if (best > 0) {
    const double den = c[best - 1] - 2.0 * c[best] + c[best + 1];
    if (den < 0) lag += 0.5 * (c[best - 1] - c[best + 1]) / den;
  }
  double phase = std::fmod(kTwoPi * f * lag * dt, kTwoPi);
  if (phase < 0) phase += kTwoPi;
  return phase;
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw FitError("fit_power_law: x and y differ in length");
  if (x.size() < 2) throw FitError("fit_power_law: need at least two points");
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0 && y[k] > 0)) throw FitError("fit_power_law: values must be > 0");
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[k]) - my);
  }
  if (sxx < 1e-24) throw FitError("fit_power_law: degenerate abscissa");
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  if (x.size() > 2) {
    double ssr = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double e = std::log(y[k]) - (my + fit.exponent * (std::log(x[k]) - mx));
      ssr += e * e;
    }
    fit.exponent_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
  } else {
    fit.exponent_stderr = std::numeric_limits<double>::quiet_NaN();
  }
  return fit;
}

std::vector<std::pair<double, double>> oscillation_windows(const std::vector<double>& t,
                                                           const std::vector<double>& x,
                                                           double f_center, double factor) {
  if (t.size() != x.size()) throw InputError("oscillation_windows: t and x differ in length");
  if (!(f_center > 0)) throw InputError("oscillation_windows: centre frequency must be > 0");
  const double dt = uniform_step(t);
  const auto w = std::max<std::size_t>(8, static_cast<std::size_t>(std::llround(4.0 / (f_center * dt))));
  if (x.size() < w + 1) return {};
  const std::size_t count = x.size() - w + 1;

  constexpr int kFreqs = 11;
  std::vector<double> power(count, 0.0);
  for (std::size_t s = 0; s < count; ++s) {
    double mean = 0;
    for (std::size_t k = 0; k < w; ++k) mean += x[s + k];
    mean /= static_cast<double>(w);
    for (int q = 0; q < kFreqs; ++q) {
      const double f = f_center * (0.75 + 0.5 * q / (kFreqs - 1));
      std::complex<double> acc{0.0, 0.0};
      for (std::size_t k = 0; k < w; ++k)
        acc += (x[s + k] - mean) * std::polar(1.0, -kTwoPi * f * static_cast<double>(k) * dt);
      power[s] = std::max(power[s], std::norm(acc) / static_cast<double>(w * w));
    }
  }
  const double threshold = factor * median_of(power);

  std::vector<std::pair<double, double>> spans;
  for (std::size_t s = 0; s < count; ++s) {
    if (!(power[s] > threshold)) continue;
    const double a = t[s], b = t[s + w - 1];
    if (!spans.empty() && a <= spans.back().second)
      spans.back().second = std::max(spans.back().second, b);
    else
      spans.emplace_back(a, b);
  }
  return spans;
}

}  // namespace cavsim
