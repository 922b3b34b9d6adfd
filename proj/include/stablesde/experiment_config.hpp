#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "stablesde/sde_solver.hpp"

namespace stablesde {

enum class ExperimentKind {
  lemma22_suite,
  sampler_validation,
  generator_rate,
  sde_weak_rate,
  example41,
  kolmogorov_residual,
};

// Seed applied when the config omits one; echoed in the manifest.
inline constexpr std::uint64_t kDefaultSeed = 1729;

// Fully resolved run configuration. Defaults depend on the experiment
// (each experiment's reference sweep), so resolution happens after the
// experiment key is known; every resolved value is echoed in the
// manifest.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::lemma22_suite;
  std::vector<double> alpha_grid;
  // sampler_validation sweeps these as scalar skewness values; the other
  // experiments broadcast a single value (or take one per component).
  std::vector<double> beta{0.0};
  std::size_t dimension = 1;
  CoefficientPreset coefficients = CoefficientPreset::ou_type;
  double horizon = 1.0;
  std::size_t n_steps = 1024;
  std::size_t n_paths = 10000;
  std::uint64_t seed = kDefaultSeed;
  unsigned workers = 1;
  std::string output_dir = ".";
};

const char* experiment_name(ExperimentKind kind);
ExperimentKind parse_experiment_name(const std::string& name);
const char* coefficient_preset_name(CoefficientPreset preset);
CoefficientPreset parse_coefficient_preset(const std::string& name);

// Parses the flat key = value format ('#' comments), applies the
// per-experiment defaults, and range-checks every field. Throws
// ConfigError with line/key context.
ExperimentConfig validate_config(const std::string& raw);

// The same range checks applied to a programmatically built config
// (no line numbers). run_experiment applies this before dispatching.
void check_config(const ExperimentConfig& config);

// The per-component skewness vector an experiment should drive its noise
// with: broadcasts a single beta, or demands exactly one per component.
std::vector<double> component_betas(const ExperimentConfig& config);

}  // namespace stablesde
