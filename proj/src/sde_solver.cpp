#include "stablesde/sde_solver.hpp"

#include <cassert>
#include <cmath>
#include <string>

#include "stablesde/errors.hpp"

namespace stablesde {

CoefficientField make_coefficient_preset(CoefficientPreset preset, std::size_t dimension) {
  if (dimension == 0)
    throw ParameterDomainError("dimension", "make_coefficient_preset: dimension must be positive");
  CoefficientField field;
  field.dimension = dimension;
  const std::size_t d = dimension;
  switch (preset) {
    case CoefficientPreset::pure_noise:
      field.drift = [](std::span<const double>, std::span<double> out) {
        for (double& v : out) v = 0.0;
      };
      field.diffusion = [d](std::span<const double>, std::span<double> out) {
        for (double& v : out) v = 0.0;
        for (std::size_t i = 0; i < d; ++i) out[i * d + i] = 1.0;
      };
      field.growth_exponent_r = 0.0;
      field.lipschitz_sigma = 0.0;
      field.bounded = true;
      break;
    case CoefficientPreset::ou_type:
      field.drift = [](std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = -x[i];
      };
      field.diffusion = [d](std::span<const double>, std::span<double> out) {
        for (double& v : out) v = 0.0;
        for (std::size_t i = 0; i < d; ++i) out[i * d + i] = 1.0;
      };
      field.growth_exponent_r = 1.0;
      field.lipschitz_sigma = 0.0;
      field.bounded = false;
      break;
    case CoefficientPreset::bounded_smooth:
      field.drift = [](std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = -std::sin(x[i]);
      };
      field.diffusion = [d](std::span<const double> x, std::span<double> out) {
        for (double& v : out) v = 0.0;
        for (std::size_t i = 0; i < d; ++i) out[i * d + i] = 1.0 + 0.5 * std::cos(x[i]);
      };
      field.growth_exponent_r = 0.0;
      field.lipschitz_sigma = 0.5;
      field.bounded = true;
      break;
  }
  return field;
}

TimeGrid::TimeGrid(double horizon, std::size_t n_steps) : n_steps_(n_steps) {
  if (!(horizon > 0.0)) throw ParameterDomainError("horizon", "TimeGrid: horizon must be positive");
  if (n_steps == 0) throw ParameterDomainError("n_steps", "TimeGrid: n_steps must be positive");
  h_ = horizon / static_cast<double>(n_steps);
}

SamplePath::SamplePath(const TimeGrid& grid, std::size_t dimension, const RngStreamKey& key)
    : grid_(grid), dimension_(dimension), key_(key), states_((grid.n_steps() + 1) * dimension) {
  if (dimension == 0) throw ParameterDomainError("dimension", "SamplePath: dimension must be positive");
}

namespace {

void check_dimensions(const CoefficientField& coeffs, std::size_t x0_size, const char* op) {
  if (coeffs.dimension == 0 || !coeffs.drift || !coeffs.diffusion)
    throw ParameterDomainError("coeffs", std::string(op) + ": incomplete coefficient field");
  if (coeffs.dimension > 8)
    throw ParameterDomainError("coeffs", std::string(op) + ": dimension capped at 8");
  if (x0_size != coeffs.dimension)
    throw ParameterDomainError("x0", std::string(op) + ": initial condition has dimension " +
                                         std::to_string(x0_size) + ", coefficients expect " +
                                         std::to_string(coeffs.dimension));
}

}  // namespace

JumpEulerEngine::JumpEulerEngine(const CoefficientField& coeffs, const CylindricalNoiseSpec& noise,
                                 const TimeGrid& grid, const IncrementSamplerMode& mode,
                                 bool taming)
    : coeffs_(&coeffs), grid_(grid), taming_(taming) {
  if (noise.dimension() != coeffs.dimension)
    throw ParameterDomainError("noise", "JumpEulerEngine: noise dimension " +
                                            std::to_string(noise.dimension()) +
                                            " != coefficient dimension " +
                                            std::to_string(coeffs.dimension));
  samplers_.reserve(noise.dimension());
  for (std::size_t i = 0; i < noise.dimension(); ++i)
    samplers_.emplace_back(noise.component(i), grid.h(), mode);
}

bool JumpEulerEngine::step(std::span<const double> x, std::span<double> out, std::size_t k,
                           const RngStreamKey& path_key) const {
  const std::size_t d = coeffs_->dimension;
  const double h = grid_.h();
  double drift_buf[8];
  double sigma_buf[64];
  double jump_buf[8];
  assert(d <= 8);

  std::span<double> b(drift_buf, d);
  coeffs_->drift(x, b);
  if (taming_) detail::tame_drift(b, h);

  std::span<double> sigma(sigma_buf, d * d);
  coeffs_->diffusion(x, sigma);

  const RngStreamKey step_key = derive_stream(path_key, k);
  for (std::size_t i = 0; i < d; ++i) {
    CounterRng rng(derive_stream(step_key, i));
    jump_buf[i] = samplers_[i].draw(rng);
  }

  for (std::size_t i = 0; i < d; ++i) {
    double v = x[i] + b[i] * h;
    for (std::size_t j = 0; j < d; ++j) v += sigma[i * d + j] * jump_buf[j];
    out[i] = v;
  }
  return detail::all_finite(out);
}

TerminalState JumpEulerEngine::run_terminal(std::span<const double> x0,
                                            const RngStreamKey& path_key) const {
  check_dimensions(*coeffs_, x0.size(), "euler_maruyama_jump");
  TerminalState result;
  result.state.assign(x0.begin(), x0.end());
  std::vector<double> next(x0.size());
  for (std::size_t k = 0; k < grid_.n_steps(); ++k) {
    if (!step(result.state, next, k, path_key)) {
      result.diverged = true;
      result.divergence_step = k;
      return result;
    }
    result.state.swap(next);
  }
  return result;
}

void JumpEulerEngine::run_path(SamplePath& path, std::span<const double> x0) const {
  check_dimensions(*coeffs_, x0.size(), "euler_maruyama_jump");
  auto first = path.mutable_state(0);
  for (std::size_t i = 0; i < x0.size(); ++i) first[i] = x0[i];
  for (std::size_t k = 0; k < grid_.n_steps(); ++k) {
    if (!step(path.state(k), path.mutable_state(k + 1), k, path.key()))
      throw SimulationDivergence("euler_maruyama_jump: non-finite state at step " +
                                     std::to_string(k),
                                 k);
  }
}

DiffusionEulerEngine::DiffusionEulerEngine(const CoefficientField& coeffs, const TimeGrid& grid)
    : coeffs_(&coeffs), grid_(grid), root_2h_(std::sqrt(2.0 * grid.h())) {}

bool DiffusionEulerEngine::step(std::span<const double> x, std::span<double> out, std::size_t k,
                                const RngStreamKey& path_key) const {
  const std::size_t d = coeffs_->dimension;
  const double h = grid_.h();
  double drift_buf[8];
  double sigma_buf[64];
  double gauss_buf[8];
  assert(d <= 8);

  std::span<double> b(drift_buf, d);
  coeffs_->drift(x, b);

  std::span<double> sigma(sigma_buf, d * d);
  coeffs_->diffusion(x, sigma);

  CounterRng rng(derive_stream(path_key, k));
  for (std::size_t i = 0; i < d; ++i) gauss_buf[i] = rng.next_normal();

  for (std::size_t i = 0; i < d; ++i) {
    double v = x[i] + b[i] * h;
    for (std::size_t j = 0; j < d; ++j) v += root_2h_ * sigma[i * d + j] * gauss_buf[j];
    out[i] = v;
  }
  return detail::all_finite(out);
}

TerminalState DiffusionEulerEngine::run_terminal(std::span<const double> x0,
                                                 const RngStreamKey& path_key) const {
  check_dimensions(*coeffs_, x0.size(), "euler_maruyama_diffusion");
  TerminalState result;
  result.state.assign(x0.begin(), x0.end());
  std::vector<double> next(x0.size());
  for (std::size_t k = 0; k < grid_.n_steps(); ++k) {
    if (!step(result.state, next, k, path_key)) {
      result.diverged = true;
      result.divergence_step = k;
      return result;
    }
    result.state.swap(next);
  }
  return result;
}

void DiffusionEulerEngine::run_path(SamplePath& path, std::span<const double> x0) const {
  check_dimensions(*coeffs_, x0.size(), "euler_maruyama_diffusion");
  auto first = path.mutable_state(0);
  for (std::size_t i = 0; i < x0.size(); ++i) first[i] = x0[i];
  for (std::size_t k = 0; k < grid_.n_steps(); ++k) {
    if (!step(path.state(k), path.mutable_state(k + 1), k, path.key()))
      throw SimulationDivergence("euler_maruyama_diffusion: non-finite state at step " +
                                     std::to_string(k),
                                 k);
  }
}

SamplePath euler_maruyama_jump(const CoefficientField& coeffs, const CylindricalNoiseSpec& noise,
                               const TimeGrid& grid, std::span<const double> x0,
                               const IncrementSamplerMode& mode, const RngStreamKey& key,
                               bool taming) {
  JumpEulerEngine engine(coeffs, noise, grid, mode, taming);
  SamplePath path(grid, coeffs.dimension, key);
  engine.run_path(path, x0);
  return path;
}

SamplePath euler_maruyama_diffusion(const CoefficientField& coeffs, const TimeGrid& grid,
                                    std::span<const double> x0, const RngStreamKey& key) {
  DiffusionEulerEngine engine(coeffs, grid);
  SamplePath path(grid, coeffs.dimension, key);
  engine.run_path(path, x0);
  return path;
}

double sup_moment_statistic(std::span<const SamplePath> paths, double theta) {
  if (paths.empty())
    throw ParameterDomainError("paths", "sup_moment_statistic: empty path collection");
  if (!(theta > 0.0 && theta < 1.0))
    throw ParameterDomainError("theta", "sup_moment_statistic: theta must lie in (0,1)");
  double acc = 0.0;
  for (const SamplePath& path : paths) {
    double sup2 = 0.0;
    for (std::size_t k = 0; k < path.n_states(); ++k) {
      double norm2 = 0.0;
      for (double v : path.state(k)) norm2 += v * v;
      sup2 = std::max(sup2, norm2);
    }
    acc += std::pow(sup2, 0.5 * theta);
  }
  return acc / static_cast<double>(paths.size());
}

}  // namespace stablesde
