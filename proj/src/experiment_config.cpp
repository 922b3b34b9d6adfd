#include "stablesde/experiment_config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "stablesde/errors.hpp"

namespace stablesde {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_real(const std::string& value, std::size_t line, const std::string& key) {
  const std::string v = trim(value);
  if (v.empty()) throw ConfigError(key + ": empty value", line, key);
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size())
    throw ConfigError(key + ": not a number: '" + v + "'", line, key);
  return x;
}

std::uint64_t parse_unsigned(const std::string& value, std::size_t line, const std::string& key) {
  const std::string v = trim(value);
  if (v.empty() || v[0] == '-')
    throw ConfigError(key + ": not a non-negative integer: '" + v + "'", line, key);
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size())
    throw ConfigError(key + ": not an integer: '" + v + "'", line, key);
  return x;
}

std::vector<double> parse_real_list(const std::string& value, std::size_t line,
                                    const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(item, line, key));
  if (out.empty()) throw ConfigError(key + ": empty list", line, key);
  return out;
}

struct RawEntry {
  std::string value;
  std::size_t line = 0;
};

// Shared by validate_config (line numbers from the parsed text) and
// check_config (no lines); programmatic configs get the same guarantees
// as parsed ones.
template <typename LineOf>
void check_ranges(const ExperimentConfig& config, const LineOf& line_of) {
  if (config.alpha_grid.empty())
    throw ConfigError("alpha_grid: must not be empty", line_of("alpha_grid"), "alpha_grid");
  for (double a : config.alpha_grid)
    if (!(a > 1.0 && a < 2.0))
      throw ConfigError("alpha_grid: every value must lie in the open interval (1, 2)",
                        line_of("alpha_grid"), "alpha_grid");
  if (!std::is_sorted(config.alpha_grid.begin(), config.alpha_grid.end()) ||
      std::adjacent_find(config.alpha_grid.begin(), config.alpha_grid.end()) !=
          config.alpha_grid.end())
    throw ConfigError("alpha_grid: values must be strictly increasing", line_of("alpha_grid"),
                      "alpha_grid");
  if (config.beta.empty())
    throw ConfigError("beta: must not be empty", line_of("beta"), "beta");
  for (double b : config.beta)
    if (!(b >= -1.0 && b <= 1.0))
      throw ConfigError("beta: every value must lie in [-1, 1]", line_of("beta"), "beta");
  if (config.dimension < 1 || config.dimension > 8)
    throw ConfigError("dimension: must lie in [1, 8]", line_of("dimension"), "dimension");
  if (!(config.horizon > 0.0))
    throw ConfigError("T: must be positive", line_of("T"), "T");
  if (config.n_steps < 1)
    throw ConfigError("n_steps: must be at least 1", line_of("n_steps"), "n_steps");
  if (config.n_paths < 2)
    throw ConfigError("n_paths: must be at least 2", line_of("n_paths"), "n_paths");
  if (config.workers < 1)
    throw ConfigError("workers: must be at least 1", line_of("workers"), "workers");
  if (config.experiment != ExperimentKind::sampler_validation && config.beta.size() != 1 &&
      config.beta.size() != config.dimension)
    throw ConfigError("beta: needs one value, or exactly one per component", line_of("beta"),
                      "beta");
}

}  // namespace

const char* experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::lemma22_suite: return "lemma22_suite";
    case ExperimentKind::sampler_validation: return "sampler_validation";
    case ExperimentKind::generator_rate: return "generator_rate";
    case ExperimentKind::sde_weak_rate: return "sde_weak_rate";
    case ExperimentKind::example41: return "example41";
    case ExperimentKind::kolmogorov_residual: return "kolmogorov_residual";
  }
  return "unknown";
}

ExperimentKind parse_experiment_name(const std::string& name) {
  static const std::map<std::string, ExperimentKind> kNames = {
      {"lemma22_suite", ExperimentKind::lemma22_suite},
      {"sampler_validation", ExperimentKind::sampler_validation},
      {"generator_rate", ExperimentKind::generator_rate},
      {"sde_weak_rate", ExperimentKind::sde_weak_rate},
      {"example41", ExperimentKind::example41},
      {"kolmogorov_residual", ExperimentKind::kolmogorov_residual},
  };
  const auto it = kNames.find(name);
  if (it == kNames.end())
    throw ConfigError("unknown experiment '" + name +
                          "' (known: lemma22_suite, sampler_validation, generator_rate, "
                          "sde_weak_rate, example41, kolmogorov_residual)",
                      0, "experiment");
  return it->second;
}

const char* coefficient_preset_name(CoefficientPreset preset) {
  switch (preset) {
    case CoefficientPreset::pure_noise: return "pure_noise";
    case CoefficientPreset::ou_type: return "ou_type";
    case CoefficientPreset::bounded_smooth: return "bounded_smooth";
  }
  return "unknown";
}

CoefficientPreset parse_coefficient_preset(const std::string& name) {
  if (name == "pure_noise") return CoefficientPreset::pure_noise;
  if (name == "ou_type") return CoefficientPreset::ou_type;
  if (name == "bounded_smooth") return CoefficientPreset::bounded_smooth;
  throw ConfigError("unknown coefficient preset '" + name +
                        "' (known: pure_noise, ou_type, bounded_smooth)",
                    0, "coefficients");
}

ExperimentConfig validate_config(const std::string& raw) {
  static const std::set<std::string> kKnownKeys = {
      "experiment", "alpha_grid", "beta",    "dimension", "coefficients", "T",
      "n_steps",    "n_paths",    "seed",    "workers",   "output_dir"};

  std::map<std::string, RawEntry> entries;
  std::stringstream ss(raw);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const std::size_t eq = content.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value", line_no, "");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", line_no, "");
    if (!kKnownKeys.count(key)) throw ConfigError("unknown key '" + key + "'", line_no, key);
    if (entries.count(key))
      throw ConfigError("duplicate key '" + key + "' (first at line " +
                            std::to_string(entries[key].line) + ")",
                        line_no, key);
    if (value.empty()) throw ConfigError(key + ": empty value", line_no, key);
    entries[key] = {value, line_no};
  }

  if (!entries.count("experiment"))
    throw ConfigError("missing required key 'experiment'", 0, "experiment");

  ExperimentConfig config;
  {
    const RawEntry& e = entries.at("experiment");
    try {
      config.experiment = parse_experiment_name(e.value);
    } catch (const ConfigError& err) {
      throw ConfigError(err.what(), e.line, "experiment");
    }
  }

  // Per-experiment reference sweeps, applied when the key is absent.
  switch (config.experiment) {
    case ExperimentKind::lemma22_suite:
      config.alpha_grid = {1.51, 1.6, 1.75, 1.9, 1.99};
      break;
    case ExperimentKind::sampler_validation:
      config.alpha_grid = {1.6, 1.9};
      config.beta = {0.0, 0.5, -0.9};
      config.n_steps = 100;
      break;
    case ExperimentKind::generator_rate:
      config.alpha_grid = {1.9, 1.95, 1.99, 1.995};
      config.coefficients = CoefficientPreset::pure_noise;
      break;
    case ExperimentKind::sde_weak_rate:
      config.alpha_grid = {1.7, 1.8, 1.9, 1.95};
      break;
    case ExperimentKind::example41:
      config.alpha_grid = {1.9, 1.95, 1.99, 1.995, 1.999};
      break;
    case ExperimentKind::kolmogorov_residual:
      config.alpha_grid = {1.9};
      config.coefficients = CoefficientPreset::pure_noise;
      config.n_steps = 64;
      config.n_paths = 100000;
      break;
  }

  for (const auto& [key, entry] : entries) {
    const std::size_t ln = entry.line;
    const std::string& v = entry.value;
    if (key == "experiment") continue;
    if (key == "alpha_grid") {
      config.alpha_grid = parse_real_list(v, ln, key);
    } else if (key == "beta") {
      config.beta = parse_real_list(v, ln, key);
    } else if (key == "dimension") {
      config.dimension = static_cast<std::size_t>(parse_unsigned(v, ln, key));
    } else if (key == "coefficients") {
      try {
        config.coefficients = parse_coefficient_preset(v);
      } catch (const ConfigError& err) {
        throw ConfigError(err.what(), ln, key);
      }
    } else if (key == "T") {
      config.horizon = parse_real(v, ln, key);
    } else if (key == "n_steps") {
      config.n_steps = static_cast<std::size_t>(parse_unsigned(v, ln, key));
    } else if (key == "n_paths") {
      config.n_paths = static_cast<std::size_t>(parse_unsigned(v, ln, key));
    } else if (key == "seed") {
      config.seed = parse_unsigned(v, ln, key);
    } else if (key == "workers") {
      config.workers = static_cast<unsigned>(parse_unsigned(v, ln, key));
    } else if (key == "output_dir") {
      config.output_dir = v;
    }
  }

  auto line_of = [&](const char* key) {
    const auto it = entries.find(key);
    return it == entries.end() ? std::size_t{0} : it->second.line;
  };

  check_ranges(config, line_of);
  return config;
}

void check_config(const ExperimentConfig& config) {
  check_ranges(config, [](const char*) { return std::size_t{0}; });
}

std::vector<double> component_betas(const ExperimentConfig& config) {
  if (config.beta.size() == config.dimension) return config.beta;
  if (config.beta.size() != 1)
    throw ConfigError("beta: needs one value, or exactly one per component", 0, "beta");
  return std::vector<double>(config.dimension, config.beta.front());
}

}  // namespace stablesde
