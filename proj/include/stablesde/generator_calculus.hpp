#pragma once

#include <cstddef>
#include <span>

#include "stablesde/levy_measure.hpp"
#include "stablesde/rng.hpp"
#include "stablesde/sde_solver.hpp"
#include "stablesde/test_functions.hpp"

namespace stablesde {

// One evaluation of both generators at (f, x), with the nonlocal
// operator's integral split (cut at delta_split and at 1) reported term
// by term so the vanishing-rate bookkeeping is observable directly.
//
// gap == alpha_value - limit_value exactly. convergence_bound is
// |inner - small_jump_reference| + |small_jump_reference - trace_term|
// + |total jump difference| + |gradient_band_term|: the triangle bound
// on |gap| whose four pieces each vanish linearly in (2 - alpha).
struct GeneratorEvalReport {
  double alpha_value = 0.0;
  double limit_value = 0.0;
  double gap = 0.0;
  double quadrature_error_bound = 0.0;
  double delta_split = 0.0;

  double drift_term = 0.0;            // b(x) . grad f(x), common to both
  double inner_remainder = 0.0;       // |z| <= delta, Taylor remainder
  double band_remainder = 0.0;        // delta < |z| <= 1, Taylor remainder
  double outer_difference = 0.0;      // |z| > 1, plain difference
  double gradient_band_term = 0.0;    // sum_i sigma_i.grad f times band mean
  double small_jump_reference = 0.0;  // (1/2) sum_i sigma_i^T H sigma_i M2(delta)
  double trace_term = 0.0;            // Tr(sigma sigma^T H f)(x)
  double convergence_bound = 0.0;
};

// b(x) . grad f(x) + Tr(sigma sigma^T H(f))(x); the trace coefficient is
// 1, not 1/2, because the limit equation carries sqrt(2) on its noise.
double apply_limit_generator(const CoefficientField& coeffs, const TestFunction& f,
                             std::span<const double> x);

// Nonlocal generator: b . grad f + sum_i integrals of the second-order
// remainder over |z| <= 1 (split at delta_split) and of the plain
// difference over |z| > 1, against component i's measure. Remainders use
// the Taylor form z^2 int_0^1 (1-s) sigma_i^T H(f)(x + s sigma_i z) sigma_i ds
// so there is no cancellation near z = 0.
double apply_alpha_generator(const CoefficientField& coeffs, const CylindricalNoiseSpec& noise,
                             const TestFunction& f, std::span<const double> x,
                             double delta_split = 0.5, double tol = 1e-9);

GeneratorEvalReport generator_gap(const CoefficientField& coeffs,
                                  const CylindricalNoiseSpec& noise, const TestFunction& f,
                                  std::span<const double> x, double delta_split = 0.5,
                                  double tol = 1e-9);

// Second-order Taylor remainder f(x + v z) - f(x) - z v . grad f(x) for
// one scalar jump z along direction v, in the cancellation-free form.
// Exposed for the remainder-form agreement tests.
double taylor_remainder(const TestFunction& f, std::span<const double> x,
                        std::span<const double> v, double z);

struct KolmogorovResidual {
  double residual = 0.0;
  double std_error = 0.0;
  // Standard error exceeds the scale of the residual's ingredients: the
  // estimate cannot distinguish the residual from zero or from noise.
  bool inconclusive = false;
};

// Feynman-Kac check of (d_t + L) u = 0 for u(t,x) = E[f(X_T) | X_t = x]:
// u is estimated by Monte Carlo over the Brownian-limit scheme with
// common random numbers across the whole finite-difference stencil, d_t u
// by a central difference with step fd_step, and L u through
// apply_limit_generator on the stencil surrogate. Standard error comes
// from batch means over 20 path blocks.
KolmogorovResidual kolmogorov_residual(const CoefficientField& coeffs, const TestFunction& f,
                                       double t, std::span<const double> x, const TimeGrid& grid,
                                       std::size_t n_paths, const RngStreamKey& key,
                                       double fd_step = 0.05);

}  // namespace stablesde
