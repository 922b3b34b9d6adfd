#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "stablesde/quadrature.hpp"

namespace stablesde {

// Stability index, restricted to [1 + 1e-6, 2 - 1e-9]. The lower gap keeps
// the 1/(alpha-1) factors bounded, the upper gap keeps the measure
// non-degenerate while allowing the diffusive regime to be probed.
class StabilityIndex {
 public:
  static constexpr double kMin = 1.0 + 1e-6;
  static constexpr double kMax = 2.0 - 1e-9;

  explicit StabilityIndex(double value);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

// Jump-sign asymmetry in [-1, 1]; +1 means positive jumps only.
class Skewness {
 public:
  explicit Skewness(double value);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

// One-dimensional stable Levy measure with density
//   c_plus  * z^(-1-alpha)    on z > 0,
//   c_minus * |z|^(-1-alpha)  on z < 0,
// where c_plus + c_minus equals the normalising constant that makes the
// unit-scale law standard and c_plus - c_minus carries the skewness.
class LevyMeasureSpec {
 public:
  static LevyMeasureSpec make(double alpha, double beta);

  double alpha() const noexcept { return alpha_.value(); }
  double beta() const noexcept { return beta_.value(); }
  double normalising_constant() const noexcept { return kappa_; }
  double c_plus() const noexcept { return c_plus_; }
  double c_minus() const noexcept { return c_minus_; }
  // Density of the measure at z != 0.
  double density(double z) const;

 private:
  LevyMeasureSpec(StabilityIndex alpha, Skewness beta);

  StabilityIndex alpha_;
  Skewness beta_;
  double kappa_;
  double c_plus_;
  double c_minus_;
};

// Independent stable components sharing one index, one per coordinate.
class CylindricalNoiseSpec {
 public:
  static CylindricalNoiseSpec make(double alpha, const std::vector<double>& betas);

  std::size_t dimension() const noexcept { return components_.size(); }
  double alpha() const noexcept { return components_.front().alpha(); }
  const LevyMeasureSpec& component(std::size_t i) const { return components_.at(i); }
  const std::vector<LevyMeasureSpec>& components() const noexcept { return components_; }

 private:
  explicit CylindricalNoiseSpec(std::vector<LevyMeasureSpec> components);

  std::vector<LevyMeasureSpec> components_;
};

LevyMeasureSpec make_measure(double alpha, double beta);

// integral of z^2 over |z| <= delta:  kappa * delta^(2-alpha) / (2-alpha).
double truncated_second_moment(const LevyMeasureSpec& spec, double delta);

// integral of |z|^vartheta over |z| > delta, vartheta in [0, alpha):
// kappa * delta^(vartheta-alpha) / (alpha-vartheta).
double tail_moment(const LevyMeasureSpec& spec, double delta, double vartheta);

// integral of z (signed) over |z| > delta: kappa * beta * delta^(1-alpha) / (alpha-1).
double tail_mean(const LevyMeasureSpec& spec, double delta);

enum class MomentRegion { inner, outer };

// Numerical counterpart of the closed forms above: integrates
// |z|^power (signed_weight == false) or sign(z)*|z|^power (true) against
// the measure over |z| <= delta (inner) or |z| > delta (outer) by adaptive
// quadrature after the substitution z = ±e^u. The unbounded ends are cut
// where the analytic remainder of the pure power integrand drops below
// 1e-2 * abs_tol and that remainder is added back in closed form.
QuadratureResult quadrature_moment(const LevyMeasureSpec& spec, double delta, double power,
                                   MomentRegion region, bool signed_weight,
                                   const QuadratureControl& control = {1e-12, 1e-10, 4000, true});

// Characteristic exponent psi with the small-jump part compensated on
// |z| <= 1: E exp(i xi L_t) = exp(t psi(xi)).
std::complex<double> characteristic_exponent(const LevyMeasureSpec& spec, double xi);

}  // namespace stablesde
