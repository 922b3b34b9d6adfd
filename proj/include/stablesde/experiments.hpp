#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stablesde/experiment_config.hpp"

namespace stablesde {

// Outcome of one experiment run. Result files carry data only (no
// timestamps, no worker counts), so workers=1 reruns are byte-identical;
// the manifest records the volatile parts.
struct RunManifest {
  ExperimentConfig config;
  std::string library_version;
  double wall_time_seconds = 0.0;
  std::string timestamp;
  std::uint64_t seed = 0;
  std::vector<std::string> result_files;  // csv then json, absolute or dir-relative paths
  std::string manifest_file;
  // Numerical self-checks that failed; empty means the run passed.
  std::vector<std::string> failures;

  bool passed() const noexcept { return failures.empty(); }
};

// Executes the configured experiment, writes <experiment>-<seed>-<timestamp>
// .csv/.json plus a manifest into config.output_dir, and returns the
// manifest. Throws ConfigError/ParameterDomainError for bad inputs and
// IoError when the output directory is unusable; numerical self-check
// failures are reported through RunManifest::failures, not thrown.
RunManifest run_experiment(const ExperimentConfig& config);

std::vector<std::string> list_experiments();

// The built-in tiny preset behind --smoke: a three-point weak-rate sweep
// that finishes in seconds.
ExperimentConfig smoke_config();

}  // namespace stablesde
