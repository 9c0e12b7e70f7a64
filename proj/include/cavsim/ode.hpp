#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta pair with standard PI-free step
// control, for small states with vector-space operations.

#include <algorithm>
#include <cmath>
#include <complex>

#include "cavsim/errors.hpp"

namespace cavsim::ode {

struct Tolerances {
  double rtol = 1e-8;
  double atol = 1e-10;
};

/// Scaled error norm for a complex scalar state (real and imaginary parts weighted separately).
inline double error_norm(std::complex<double> err, std::complex<double> y0, std::complex<double> y1,
                         const Tolerances& tol) {
  const auto comp = [&](double e, double a, double b) {
    return e / (tol.atol + tol.rtol * std::max(std::abs(a), std::abs(b)));
  };
  const double er = comp(err.real(), y0.real(), y1.real());
  const double ei = comp(err.imag(), y0.imag(), y1.imag());
  return std::sqrt(0.5 * (er * er + ei * ei));
}

struct StepResult {
  std::complex<double> y;
  std::complex<double> err;
};

/// One Dormand-Prince step from (x, y) with size h.
template <class Rhs>
StepResult dopri_step(const Rhs& f, double x, std::complex<double> y, double h) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  const auto k1 = f(x, y);
  const auto k2 = f(x + c2 * h, y + h * (a21 * k1));
  const auto k3 = f(x + c3 * h, y + h * (a31 * k1 + a32 * k2));
  const auto k4 = f(x + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const auto k5 = f(x + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const auto k6 = f(x + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  const auto y1 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const auto k7 = f(x + h, y1);
  const auto err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  return {y1, err};
}

/// Adaptive integration of y' = f(x, y) from x0 to x1 (x1 > x0). `h` carries the
/// step-size guess in and the last accepted step size out. Throws Error(stiffness)
/// when the controller drives h below `h_min`.
template <class Rhs>
std::complex<double> integrate_to(const Rhs& f, double x0, double x1, std::complex<double> y,
                                  double& h, const Tolerances& tol, double h_min = 1e-12) {
  double x = x0;
  while (x < x1) {
    const double remaining = x1 - x;
    const bool last = h >= remaining;
    const double step = last ? remaining : h;
    const auto res = dopri_step(f, x, y, step);
    const double en = error_norm(res.err, y, res.y, tol);
    if (en <= 1.0) {
      x = last ? x1 : x + step;
      y = res.y;
      const double grow = en > 0 ? 0.9 * std::pow(en, -0.2) : 5.0;
      // A short final step to hit x1 says nothing about the natural step size.
      if (!last || step >= h) h = step * std::clamp(grow, 0.2, 5.0);
    } else {
      h = step * std::max(0.2, 0.9 * std::pow(en, -0.2));
      if (h < h_min)
        throw Error(Status::stiffness, "step size collapsed below " + std::to_string(h_min));
    }
  }
  return y;
}

}  // namespace cavsim::ode
