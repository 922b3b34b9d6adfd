#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "stablesde/rng.hpp"

namespace stablesde {

struct SampleSummary {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_error = 0.0;
  std::size_t count = 0;
};

SampleSummary summarize(std::span<const double> sample);

// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

// Rejection threshold at the given significance level (asymptotic form):
// c(level) * sqrt((n + m) / (n * m)) with c = sqrt(-ln(level/2) / 2).
double ks_critical_value(double level, std::size_t n, std::size_t m);

// 1-Wasserstein distance between empirical laws (quantile coupling). The
// quantile breakpoints are walked with integer arithmetic, so unequal
// sample sizes are handled exactly.
double wasserstein1(std::span<const double> a, std::span<const double> b);

struct EcfEstimate {
  std::complex<double> value;
  double re_std_error = 0.0;
  double im_std_error = 0.0;
};

// Empirical characteristic function (1/n) sum exp(i xi x_k) with
// per-component standard errors.
EcfEstimate empirical_char_function(std::span<const double> sample, double xi);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_error = 0.0;
  double residual_rms = 0.0;
};

LinearFit least_squares_line(std::span<const double> x, std::span<const double> y);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const noexcept { return lo <= v && v <= hi; }
};

// Percentile bootstrap interval for the regression slope, resampling
// (x, y) pairs. Degenerate resamples (all x equal) are redrawn.
ConfidenceInterval bootstrap_slope_ci(std::span<const double> x, std::span<const double> y,
                                      std::size_t replicates, double coverage,
                                      const RngStreamKey& key);

}  // namespace stablesde
