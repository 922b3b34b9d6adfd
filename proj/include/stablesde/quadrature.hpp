#pragma once

#include <cstddef>
#include <functional>

namespace stablesde {

struct QuadratureResult {
  double value = 0.0;
  double error_bound = 0.0;
  std::size_t evaluations = 0;
};

struct QuadratureControl {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  std::size_t max_intervals = 4000;
  // Throw AccuracyError when the tolerance cannot be met; otherwise the
  // best estimate is returned with its (failed) error bound.
  bool throw_on_failure = true;
};

// Adaptive Gauss-Kronrod 7/15 on a finite interval [a, b], a < b.
// The error bound is the usual Kronrod estimate summed over accepted
// subintervals; it is an estimate, not a hard bound.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureControl& control = {});

// Single non-adaptive G7K15 panel, exposed for the adaptive driver's tests.
QuadratureResult gauss_kronrod_panel(const std::function<double(double)>& f, double a, double b);

}  // namespace stablesde
