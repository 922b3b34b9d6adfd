#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "stablesde/levy_measure.hpp"
#include "stablesde/rng.hpp"
#include "stablesde/stable_sampler.hpp"

namespace stablesde {

// Drift b and diffusion sigma with the growth/regularity metadata the
// solver and generator code key off. diffusion fills a d x d row-major
// buffer. growth_exponent_r bounds |b(x)| <= C(1+|x|^r).
struct CoefficientField {
  std::size_t dimension = 0;
  std::function<void(std::span<const double>, std::span<double>)> drift;
  std::function<void(std::span<const double>, std::span<double>)> diffusion;
  double growth_exponent_r = 0.0;
  std::optional<double> lipschitz_sigma;
  bool bounded = false;
};

enum class CoefficientPreset { pure_noise, ou_type, bounded_smooth };

// pure_noise:     b = 0,          sigma = I
// ou_type:        b(x) = -x,      sigma = I
// bounded_smooth: b_i = -sin(x_i), sigma = diag(1 + cos(x_i)/2)
CoefficientField make_coefficient_preset(CoefficientPreset preset, std::size_t dimension);

class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t n_steps);

  double h() const noexcept { return h_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  // Stored as h * n so grid walks and the horizon can never disagree.
  double horizon() const noexcept { return h_ * static_cast<double>(n_steps_); }

 private:
  double h_;
  std::size_t n_steps_;
};

class SamplePath {
 public:
  SamplePath(const TimeGrid& grid, std::size_t dimension, const RngStreamKey& key);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t n_states() const noexcept { return grid_.n_steps() + 1; }
  const RngStreamKey& key() const noexcept { return key_; }

  std::span<const double> state(std::size_t k) const {
    return {states_.data() + k * dimension_, dimension_};
  }
  std::span<double> mutable_state(std::size_t k) {
    return {states_.data() + k * dimension_, dimension_};
  }

 private:
  TimeGrid grid_;
  std::size_t dimension_;
  RngStreamKey key_;
  std::vector<double> states_;
};

// One Euler step target for ensemble runs that never materialise paths.
struct TerminalState {
  std::vector<double> state;
  bool diverged = false;
  std::size_t divergence_step = 0;
};

// Jump-driven scheme: X_{k+1} = X_k + b~(X_k) h + sigma(X_k) dL_k with
// coefficients frozen at the pre-jump state. Step k's increment vector is
// exactly sample_cylindrical_increment under the substream derived from
// (key, k). Throws SimulationDivergence on a non-finite state.
SamplePath euler_maruyama_jump(const CoefficientField& coeffs, const CylindricalNoiseSpec& noise,
                               const TimeGrid& grid, std::span<const double> x0,
                               const IncrementSamplerMode& mode, const RngStreamKey& key,
                               bool taming = false);

// Brownian-limit scheme: X_{k+1} = X_k + b(X_k) h + sqrt(2) sigma(X_k) sqrt(h) xi_k.
// The sqrt(2) factor matches the limit equation's noise scaling.
SamplePath euler_maruyama_diffusion(const CoefficientField& coeffs, const TimeGrid& grid,
                                    std::span<const double> x0, const RngStreamKey& key);

// Monte Carlo mean of (sup_k |X_k|_2)^theta over the collection,
// theta in (0, 1); a reported tightness statistic.
double sup_moment_statistic(std::span<const SamplePath> paths, double theta);

// Reusable stepping engine for ensemble estimators: per-(spec, dt, mode)
// sampler constants are built once, not per path.
class JumpEulerEngine {
 public:
  JumpEulerEngine(const CoefficientField& coeffs, const CylindricalNoiseSpec& noise,
                  const TimeGrid& grid, const IncrementSamplerMode& mode, bool taming);

  // Divergence is reported, not thrown, so ensemble code can count it.
  TerminalState run_terminal(std::span<const double> x0, const RngStreamKey& path_key) const;
  void run_path(SamplePath& path, std::span<const double> x0) const;

  const TimeGrid& grid() const noexcept { return grid_; }

 private:
  bool step(std::span<const double> x, std::span<double> out, std::size_t k,
            const RngStreamKey& path_key) const;

  const CoefficientField* coeffs_;
  TimeGrid grid_;
  bool taming_;
  std::vector<ScalarIncrementSampler> samplers_;
};

class DiffusionEulerEngine {
 public:
  DiffusionEulerEngine(const CoefficientField& coeffs, const TimeGrid& grid);

  TerminalState run_terminal(std::span<const double> x0, const RngStreamKey& path_key) const;
  void run_path(SamplePath& path, std::span<const double> x0) const;

  const TimeGrid& grid() const noexcept { return grid_; }

 private:
  bool step(std::span<const double> x, std::span<double> out, std::size_t k,
            const RngStreamKey& path_key) const;

  const CoefficientField* coeffs_;
  TimeGrid grid_;
  double root_2h_;
};

namespace detail {

// b/(1 + h|b|): caps the drift increment so heavy-tailed excursions under
// superlinear drift cannot overflow in one step.
inline void tame_drift(std::span<double> b, double h) {
  double norm2 = 0.0;
  for (double v : b) norm2 += v * v;
  const double scale = 1.0 / (1.0 + h * std::sqrt(norm2));
  for (double& v : b) v *= scale;
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace detail

}  // namespace stablesde
