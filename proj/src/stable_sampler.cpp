#include "stablesde/stable_sampler.hpp"

#include <cmath>
#include <string>

#include "stablesde/errors.hpp"
#include "stablesde/special_functions.hpp"

namespace stablesde {

CmsCoefficients CmsCoefficients::make(double alpha, double beta) {
  StabilityIndex a(alpha);
  Skewness b(beta);
  CmsCoefficients c;
  c.alpha = alpha;
  c.inv_alpha = 1.0 / alpha;
  const double t = tan_half_pi_alpha(alpha);
  c.skew_angle = std::atan(beta * t) / alpha;
  c.scale = std::pow(1.0 + beta * beta * t * t, 0.5 / alpha);
  c.tail_exponent = (1.0 - alpha) / alpha;
  return c;
}

double cms_transform(const CmsCoefficients& c, double v, double w) {
  const double av = c.alpha * (v + c.skew_angle);
  return c.scale * std::sin(av) / std::pow(std::cos(v), c.inv_alpha) *
         std::pow(std::cos(v - av) / w, c.tail_exponent);
}

double cms_gaussian_limit(double v, double w) { return 2.0 * std::sin(v) * std::sqrt(w); }

DecompositionPieces decomposition_pieces(const LevyMeasureSpec& spec, double dt, double delta) {
  if (!(dt > 0.0)) throw ParameterDomainError("dt", "decomposition_pieces: dt must be positive");
  if (!(delta > 0.0 && delta <= 1.0))
    throw ParameterDomainError("delta",
                               "decomposition_pieces: cutoff must lie in (0, 1], got " +
                                   std::to_string(delta));
  DecompositionPieces p;
  p.delta = delta;
  p.gauss_std = std::sqrt(dt * truncated_second_moment(spec, delta));
  p.jump_rate = dt * tail_moment(spec, delta, 0.0);
  p.prob_positive = spec.c_plus() / spec.normalising_constant();
  p.drift = dt * (tail_mean(spec, 1.0) - tail_mean(spec, delta));
  return p;
}

ScalarIncrementSampler::ScalarIncrementSampler(const LevyMeasureSpec& spec, double dt,
                                               const IncrementSamplerMode& mode)
    : method_(mode.method), dt_(dt), inv_alpha_(1.0 / spec.alpha()) {
  if (!(dt > 0.0)) throw ParameterDomainError("dt", "ScalarIncrementSampler: dt must be positive");
  if (method_ == SamplerMethod::exact_transform) {
    cms_ = CmsCoefficients::make(spec.alpha(), spec.beta());
    root_dt_ = std::pow(dt, inv_alpha_);
    shift_ = dt * tail_mean(spec, 1.0);
    pieces_ = DecompositionPieces{};
  } else {
    const double delta = mode.delta > 0.0 ? mode.delta : std::min(1.0, std::pow(dt, inv_alpha_));
    pieces_ = decomposition_pieces(spec, dt, delta);
    root_dt_ = 0.0;
    shift_ = 0.0;
  }
}

double ScalarIncrementSampler::increment_from_polar(double v, double w) const {
  return root_dt_ * cms_transform(cms_, v, w) + shift_;
}

double ScalarIncrementSampler::draw(CounterRng& rng) const {
  if (method_ == SamplerMethod::exact_transform) {
    const double v = rng.next_uniform(-0.5 * kPi, 0.5 * kPi);
    const double w = rng.next_exponential();
    return increment_from_polar(v, w);
  }
  double x = pieces_.gauss_std * rng.next_normal() + pieces_.drift;
  const std::uint64_t n_jumps = rng.next_poisson(pieces_.jump_rate);
  for (std::uint64_t j = 0; j < n_jumps; ++j) {
    const double sign = rng.next_open01() < pieces_.prob_positive ? 1.0 : -1.0;
    const double magnitude = pieces_.delta * std::pow(rng.next_open01(), -inv_alpha_);
    x += sign * magnitude;
  }
  return x;
}

double sample_standard_stable(double alpha, double beta, const RngStreamKey& key) {
  const CmsCoefficients c = CmsCoefficients::make(alpha, beta);
  CounterRng rng(key);
  const double v = rng.next_uniform(-0.5 * kPi, 0.5 * kPi);
  const double w = rng.next_exponential();
  return cms_transform(c, v, w);
}

StableIncrement sample_increment(const LevyMeasureSpec& spec, double dt, const RngStreamKey& key) {
  ScalarIncrementSampler sampler(spec, dt, IncrementSamplerMode::exact());
  CounterRng rng(key);
  return {sampler.draw(rng), dt};
}

StableIncrement sample_decomposed_increment(const LevyMeasureSpec& spec, double dt,
                                            const IncrementSamplerMode& mode,
                                            const RngStreamKey& key) {
  if (mode.method != SamplerMethod::decomposition)
    throw ParameterDomainError("mode", "sample_decomposed_increment: mode must be decomposition");
  ScalarIncrementSampler sampler(spec, dt, mode);
  CounterRng rng(key);
  return {sampler.draw(rng), dt};
}

std::vector<double> sample_cylindrical_increment(const CylindricalNoiseSpec& noise, double dt,
                                                 const IncrementSamplerMode& mode,
                                                 const RngStreamKey& key) {
  std::vector<double> out(noise.dimension());
  for (std::size_t i = 0; i < noise.dimension(); ++i) {
    ScalarIncrementSampler sampler(noise.component(i), dt, mode);
    CounterRng rng(derive_stream(key, i));
    out[i] = sampler.draw(rng);
  }
  return out;
}

}  // namespace stablesde
