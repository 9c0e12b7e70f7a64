#pragma once

// Time-series analysis for the squeezing oscillations: periodogram peak, frequency
// drift, phase relation between two signals, power-law fits and oscillation windows.
// All inputs are sampled on a uniform grid; times in seconds.

#include <limits>
#include <utility>
#include <vector>

#include "cavsim/errors.hpp"

namespace cavsim {

struct Peak {
  double f_peak = 0;  // Hz, quadratic interpolation around the maximal bin
  double power = 0;
  double median = 0;  // median power over the positive-frequency bins
};

/// Dominant peak of the periodogram after linear detrend and Hann windowing, searched
/// in [f_min, f_max]. Throws NoOscillation when no bin in the band exceeds 3x the median
/// over the band or when the maximum does not fall to half power on both sides within the
/// band, and InputError for fewer than 8 samples or a non-uniform grid.
Peak dominant_peak(const std::vector<double>& t, const std::vector<double>& x, double f_min = 0.0,
                   double f_max = std::numeric_limits<double>::infinity());

struct SqueezingFrequency {
  double f_peak = 0;         // Hz
  double drift = 0;          // Hz/ms, from the two half-windows
  double f_first_half = 0;   // Hz
  double f_second_half = 0;  // Hz
};

/// Requires the trace to cover at least 10 periods of the detected peak.
SqueezingFrequency squeezing_frequency(const std::vector<double>& t, const std::vector<double>& x,
                                       double f_min = 0.0,
                                       double f_max = std::numeric_limits<double>::infinity());

/// Phase by which y lags x at frequency f, from the cross-correlation maximum within
/// one period. Result in [0, 2 pi).
double lag_phase(const std::vector<double>& t, const std::vector<double>& x,
                 const std::vector<double>& y, double f);

struct PowerLawFit {
  double exponent = 0;
  double exponent_stderr = 0;  // NaN with only two points
  double prefactor = 0;
};

/// Least-squares fit of log y = log c + p log x. Throws FitError for fewer than two
/// points, non-positive values or a degenerate abscissa.
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

/// Spans where the band power of x around f_center (+-25%), measured in a sliding window of
/// four periods, exceeds `factor` times its median.
std::vector<std::pair<double, double>> oscillation_windows(const std::vector<double>& t,
                                                           const std::vector<double>& x,
                                                           double f_center, double factor = 3.0);

}  // namespace cavsim
