#include "stablesde/levy_measure.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "stablesde/errors.hpp"
#include "stablesde/special_functions.hpp"

namespace stablesde {

StabilityIndex::StabilityIndex(double value) : value_(value) {
  if (!(value >= kMin && value <= kMax))
    throw ParameterDomainError(
        "alpha", "alpha = " + std::to_string(value) + " outside [1+1e-6, 2-1e-9]");
}

Skewness::Skewness(double value) : value_(value) {
  if (!(value >= -1.0 && value <= 1.0))
    throw ParameterDomainError("beta", "beta = " + std::to_string(value) + " outside [-1, 1]");
}

LevyMeasureSpec::LevyMeasureSpec(StabilityIndex alpha, Skewness beta)
    : alpha_(alpha), beta_(beta) {
  kappa_ = stable_normalising_constant(alpha_.value());
  c_plus_ = 0.5 * kappa_ * (1.0 + beta_.value());
  c_minus_ = 0.5 * kappa_ * (1.0 - beta_.value());
}

LevyMeasureSpec LevyMeasureSpec::make(double alpha, double beta) {
  return LevyMeasureSpec(StabilityIndex(alpha), Skewness(beta));
}

double LevyMeasureSpec::density(double z) const {
  if (z == 0.0) throw ParameterDomainError("z", "density: undefined at z = 0");
  const double c = z > 0.0 ? c_plus_ : c_minus_;
  return c * std::pow(std::fabs(z), -1.0 - alpha());
}

CylindricalNoiseSpec::CylindricalNoiseSpec(std::vector<LevyMeasureSpec> components)
    : components_(std::move(components)) {}

CylindricalNoiseSpec CylindricalNoiseSpec::make(double alpha, const std::vector<double>& betas) {
  if (betas.empty())
    throw ParameterDomainError("betas", "CylindricalNoiseSpec: needs at least one component");
  std::vector<LevyMeasureSpec> comps;
  comps.reserve(betas.size());
  for (double b : betas) comps.push_back(LevyMeasureSpec::make(alpha, b));
  return CylindricalNoiseSpec(std::move(comps));
}

LevyMeasureSpec make_measure(double alpha, double beta) {
  return LevyMeasureSpec::make(alpha, beta);
}

namespace {

void require_positive_delta(double delta, const char* op) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ParameterDomainError("delta", std::string(op) + ": delta must be positive");
}

}  // namespace

double truncated_second_moment(const LevyMeasureSpec& spec, double delta) {
  require_positive_delta(delta, "truncated_second_moment");
  const double a = spec.alpha();
  return spec.normalising_constant() * std::pow(delta, 2.0 - a) / (2.0 - a);
}

double tail_moment(const LevyMeasureSpec& spec, double delta, double vartheta) {
  require_positive_delta(delta, "tail_moment");
  const double a = spec.alpha();
  if (vartheta < 0.0)
    throw ParameterDomainError("vartheta", "tail_moment: requires vartheta >= 0, got " +
                                               std::to_string(vartheta));
  if (vartheta >= a)
    throw DivergentIntegralError("tail_moment: diverges for vartheta >= alpha, got vartheta = " +
                                 std::to_string(vartheta));
  return spec.normalising_constant() * std::pow(delta, vartheta - a) / (a - vartheta);
}

double tail_mean(const LevyMeasureSpec& spec, double delta) {
  require_positive_delta(delta, "tail_mean");
  const double a = spec.alpha();
  return spec.normalising_constant() * spec.beta() * std::pow(delta, 1.0 - a) / (a - 1.0);
}

QuadratureResult quadrature_moment(const LevyMeasureSpec& spec, double delta, double power,
                                   MomentRegion region, bool signed_weight,
                                   const QuadratureControl& control) {
  require_positive_delta(delta, "quadrature_moment");
  const double a = spec.alpha();
  if (region == MomentRegion::inner && !(power > a))
    throw DivergentIntegralError(
        "quadrature_moment: inner integral needs power > alpha, got power = " +
        std::to_string(power));
  if (region == MomentRegion::outer && !(power >= 0.0 && power < a))
    throw DivergentIntegralError(
        "quadrature_moment: outer integral needs 0 <= power < alpha, got power = " +
        std::to_string(power));

  // One-sided branch in u = log|z| coordinates; the integrand becomes
  // c * exp((power - alpha) * u), smooth and exponentially decaying
  // toward the unbounded end.
  const double rate = power - a;  // > 0 inner, < 0 outer
  const double log_delta = std::log(delta);
  const double tail_cut = std::max(1e-2 * control.abs_tol, 1e-300);

  auto branch = [&](double c) -> QuadratureResult {
    if (c == 0.0) return {0.0, 0.0, 0};
    auto g = [&](double u) { return c * std::exp(rate * u); };
    double lo, hi, remainder;
    if (region == MomentRegion::inner) {
      // cut at u_min where c * e^(rate*u) / rate < tail_cut
      hi = log_delta;
      lo = std::min(log_delta - 1.0, std::log(tail_cut * rate / c) / rate);
      remainder = c * std::exp(rate * lo) / rate;
    } else {
      lo = log_delta;
      if (rate == 0.0)
        throw DivergentIntegralError("quadrature_moment: power == alpha diverges");
      hi = std::max(log_delta + 1.0, std::log(tail_cut * (-rate) / c) / rate);
      remainder = c * std::exp(rate * hi) / (-rate);
    }
    QuadratureResult r = integrate(g, lo, hi, control);
    r.value += remainder;
    return r;
  };

  const QuadratureResult pos = branch(spec.c_plus());
  const QuadratureResult neg = branch(spec.c_minus());
  const double sign = signed_weight ? -1.0 : 1.0;
  return {pos.value + sign * neg.value, pos.error_bound + neg.error_bound,
          pos.evaluations + neg.evaluations};
}

std::complex<double> characteristic_exponent(const LevyMeasureSpec& spec, double xi) {
  if (xi == 0.0) return {0.0, 0.0};
  const double a = spec.alpha();
  const double sgn = xi > 0.0 ? 1.0 : -1.0;
  const double mod = std::pow(std::fabs(xi), a);
  const std::complex<double> stable_part =
      -mod * std::complex<double>(1.0, -spec.beta() * sgn * tan_half_pi_alpha(a));
  const double drift = tail_mean(spec, 1.0);
  return stable_part + std::complex<double>(0.0, xi * drift);
}

}  // namespace stablesde
