#pragma once

#include <cstddef>
#include <vector>

#include "stablesde/levy_measure.hpp"
#include "stablesde/rng.hpp"

namespace stablesde {

enum class SamplerMethod { exact_transform, decomposition };

struct IncrementSamplerMode {
  SamplerMethod method = SamplerMethod::exact_transform;
  // Small-jump cutoff for decomposition mode; non-positive means the
  // variance-matching default min(1, dt^(1/alpha)).
  double delta = 0.0;

  static IncrementSamplerMode exact() { return {SamplerMethod::exact_transform, 0.0}; }
  static IncrementSamplerMode decomposed(double delta = 0.0) {
    return {SamplerMethod::decomposition, delta};
  }
};

struct StableIncrement {
  double value = 0.0;
  double dt = 0.0;
};

// Angle/scale constants of the polar transform for one (alpha, beta).
// skew_angle is arctan(beta * tan(pi*alpha/2)) / alpha.
struct CmsCoefficients {
  double alpha = 0.0;
  double inv_alpha = 0.0;
  double skew_angle = 0.0;
  double scale = 1.0;
  double tail_exponent = 0.0;  // (1 - alpha) / alpha

  static CmsCoefficients make(double alpha, double beta);
};

// Polar transform core: v uniform on (-pi/2, pi/2), w unit exponential.
// Output follows the zero-mean stable law with characteristic exponent
// -|xi|^alpha (1 - i beta sign(xi) tan(pi alpha / 2)).
double cms_transform(const CmsCoefficients& c, double v, double w);

// alpha -> 2 limit of the same transform: 2 sin(v) sqrt(w) ~ Normal(0, 2).
// Feeding both this and cms_transform the same (v, w) couples a stable
// draw to its Gaussian limit, which is what the paired weak-error
// estimator exploits.
double cms_gaussian_limit(double v, double w);

// Fixed ingredients of the small-jump Gaussian surrogate + compound
// Poisson tail at cutoff delta over a step of length dt.
struct DecompositionPieces {
  double delta = 0.0;
  double gauss_std = 0.0;       // sqrt(dt * truncated_second_moment(spec, delta))
  double jump_rate = 0.0;       // dt * tail_moment(spec, delta, 0)
  double prob_positive = 0.0;   // c_plus / kappa
  double drift = 0.0;           // dt * (tail_mean(spec, 1) - tail_mean(spec, delta))
};

DecompositionPieces decomposition_pieces(const LevyMeasureSpec& spec, double dt, double delta);

double sample_standard_stable(double alpha, double beta, const RngStreamKey& key);

// dt^(1/alpha) * S + dt * tail_mean(spec, 1): the |z| <= 1 compensation
// window leaves the large-jump mean in the drift, so the increment of the
// process is the self-similar rescaling plus that linear-in-dt shift.
StableIncrement sample_increment(const LevyMeasureSpec& spec, double dt, const RngStreamKey& key);

StableIncrement sample_decomposed_increment(const LevyMeasureSpec& spec, double dt,
                                            const IncrementSamplerMode& mode,
                                            const RngStreamKey& key);

// Component i uses the substream derived from (key, i).
std::vector<double> sample_cylindrical_increment(const CylindricalNoiseSpec& noise, double dt,
                                                 const IncrementSamplerMode& mode,
                                                 const RngStreamKey& key);

// Hot-loop sampler with all per-(spec, dt, mode) constants precomputed;
// the free functions above are one-shot wrappers around it.
class ScalarIncrementSampler {
 public:
  ScalarIncrementSampler(const LevyMeasureSpec& spec, double dt, const IncrementSamplerMode& mode);

  double draw(CounterRng& rng) const;
  double dt() const noexcept { return dt_; }
  SamplerMethod method() const noexcept { return method_; }
  const CmsCoefficients& cms() const noexcept { return cms_; }
  const DecompositionPieces& pieces() const noexcept { return pieces_; }
  // Exact-transform increment from explicit polar variables.
  double increment_from_polar(double v, double w) const;

 private:
  SamplerMethod method_;
  double dt_;
  double root_dt_;   // dt^(1/alpha)
  double shift_;     // dt * tail_mean(spec, 1)
  CmsCoefficients cms_;
  DecompositionPieces pieces_;
  double inv_alpha_;
};

}  // namespace stablesde
