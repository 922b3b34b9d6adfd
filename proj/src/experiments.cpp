#include "stablesde/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "stablesde/errors.hpp"
#include "stablesde/generator_calculus.hpp"
#include "stablesde/levy_measure.hpp"
#include "stablesde/special_functions.hpp"
#include "stablesde/statistics.hpp"
#include "stablesde/test_functions.hpp"
#include "stablesde/version.hpp"
#include "stablesde/weak_error.hpp"

namespace stablesde {
namespace {

using nlohmann::json;

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_timestamp() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const std::time_t tt = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()) % 1000;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d%02d%02dT%02d%02d%02d%03ldZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<long>(ms.count()));
  return buf;
}

struct ExperimentOutcome {
  std::string csv;
  json report;
  std::vector<std::string> failures;
};

RngStreamKey base_key(const ExperimentConfig& config) { return RngStreamKey{config.seed, 0}; }

TestFunction observable(std::size_t dimension) {
  const std::vector<double> freq(dimension, 1.0);
  return cosine_wave(freq);
}

// ---------------------------------------------------------------------
// lemma22_suite: closed-form moments vs quadrature across the grid.

ExperimentOutcome run_lemma22(const ExperimentConfig& config) {
  constexpr double kRelTol = 1e-8;
  static constexpr double kDeltas[3] = {0.1, 0.5, 1.0};
  const double beta = config.beta.front();

  ExperimentOutcome out;
  std::ostringstream csv;
  csv << "alpha,delta,quantity,theta,closed_form,quadrature,rel_deviation\n";
  double max_rel = 0.0;
  std::size_t rows = 0;

  auto push = [&](double a, double delta, const char* quantity, double theta, double closed,
                  const QuadratureResult& quad) {
    const double rel = std::fabs(quad.value - closed) / std::fabs(closed);
    max_rel = std::max(max_rel, rel);
    ++rows;
    csv << fmt_real(a) << ',' << fmt_real(delta) << ',' << quantity << ',' << fmt_real(theta)
        << ',' << fmt_real(closed) << ',' << fmt_real(quad.value) << ',' << fmt_real(rel)
        << '\n';
  };

  for (double a : config.alpha_grid) {
    const LevyMeasureSpec spec = make_measure(a, beta);
    for (double delta : kDeltas) {
      push(a, delta, "truncated_second_moment", 2.0, truncated_second_moment(spec, delta),
           quadrature_moment(spec, delta, 2.0, MomentRegion::inner, false));
      const double thetas[3] = {0.0, 1.0, a - 0.01};
      for (double theta : thetas)
        push(a, delta, "tail_moment", theta, tail_moment(spec, delta, theta),
             quadrature_moment(spec, delta, theta, MomentRegion::outer, false));
      if (beta != 0.0)
        push(a, delta, "tail_mean", 1.0, tail_mean(spec, delta),
             quadrature_moment(spec, delta, 1.0, MomentRegion::outer, true));
    }
  }

  out.csv = csv.str();
  out.report["rows"] = rows;
  out.report["max_rel_deviation"] = max_rel;
  out.report["rel_tolerance"] = kRelTol;
  if (max_rel > kRelTol)
    out.failures.push_back("closed-form vs quadrature deviation " + fmt_real(max_rel) +
                           " exceeds " + fmt_real(kRelTol));
  return out;
}

// ---------------------------------------------------------------------
// sampler_validation: exact transform vs decomposition (KS) and vs the
// characteristic function (ECF), per (alpha, beta) pair.

ExperimentOutcome run_sampler_validation(const ExperimentConfig& config) {
  constexpr double kLevel = 0.01;
  static constexpr double kXis[3] = {0.5, 1.0, 2.0};
  const double dt = config.horizon / static_cast<double>(config.n_steps);
  const std::size_t n = config.n_paths;
  const std::size_t n_pairs = config.alpha_grid.size() * config.beta.size();
  const double bonferroni = kLevel / static_cast<double>(n_pairs);

  ExperimentOutcome out;
  std::ostringstream csv;
  csv << "alpha,beta,dt,n,ks_statistic,ks_critical,xi,ecf_re_dev,ecf_im_dev,ecf_re_se,"
         "ecf_im_se\n";
  double max_ks_ratio = 0.0;
  double max_ecf_ratio = 0.0;

  std::size_t pair_index = 0;
  for (double a : config.alpha_grid) {
    for (double b : config.beta) {
      const LevyMeasureSpec spec = make_measure(a, b);
      const RngStreamKey pair_key = derive_stream(base_key(config), pair_index);
      ++pair_index;

      const ScalarIncrementSampler exact(spec, dt, IncrementSamplerMode::exact());
      const ScalarIncrementSampler decomposed(spec, dt, IncrementSamplerMode::decomposed());
      CounterRng rng_exact(derive_stream(pair_key, 0));
      CounterRng rng_decomposed(derive_stream(pair_key, 1));
      std::vector<double> sample_exact(n), sample_decomposed(n);
      for (std::size_t i = 0; i < n; ++i) sample_exact[i] = exact.draw(rng_exact);
      for (std::size_t i = 0; i < n; ++i) sample_decomposed[i] = decomposed.draw(rng_decomposed);

      const double ks = ks_statistic(sample_exact, sample_decomposed);
      const double critical = ks_critical_value(bonferroni, n, n);
      max_ks_ratio = std::max(max_ks_ratio, ks / critical);
      if (ks > critical)
        out.failures.push_back("KS " + fmt_real(ks) + " above critical " + fmt_real(critical) +
                               " at alpha=" + fmt_real(a) + " beta=" + fmt_real(b));

      for (double xi : kXis) {
        const EcfEstimate ecf = empirical_char_function(sample_exact, xi);
        const std::complex<double> target =
            std::exp(dt * characteristic_exponent(spec, xi));
        const double re_dev = std::fabs(ecf.value.real() - target.real());
        const double im_dev = std::fabs(ecf.value.imag() - target.imag());
        max_ecf_ratio = std::max({max_ecf_ratio, re_dev / (4.0 * ecf.re_std_error),
                                  im_dev / (4.0 * ecf.im_std_error)});
        if (re_dev > 4.0 * ecf.re_std_error || im_dev > 4.0 * ecf.im_std_error)
          out.failures.push_back("ECF deviation beyond 4 standard errors at alpha=" +
                                 fmt_real(a) + " beta=" + fmt_real(b) + " xi=" + fmt_real(xi));
        csv << fmt_real(a) << ',' << fmt_real(b) << ',' << fmt_real(dt) << ',' << n << ','
            << fmt_real(ks) << ',' << fmt_real(critical) << ',' << fmt_real(xi) << ','
            << fmt_real(re_dev) << ',' << fmt_real(im_dev) << ',' << fmt_real(ecf.re_std_error)
            << ',' << fmt_real(ecf.im_std_error) << '\n';
      }
    }
  }

  out.csv = csv.str();
  out.report["n_pairs"] = n_pairs;
  out.report["level"] = kLevel;
  out.report["bonferroni_level"] = bonferroni;
  out.report["max_ks_over_critical"] = max_ks_ratio;
  out.report["max_ecf_dev_over_4se"] = max_ecf_ratio;
  return out;
}

// ---------------------------------------------------------------------
// generator_rate: term-by-term generator comparison across the grid.

ExperimentOutcome run_generator_rate(const ExperimentConfig& config) {
  const std::size_t d = config.dimension;
  const CoefficientField coeffs = make_coefficient_preset(config.coefficients, d);
  const TestFunction f = observable(d);
  const std::vector<double> betas = component_betas(config);
  const std::vector<double> x(d, 0.0);

  ExperimentOutcome out;
  std::ostringstream csv;
  csv << "alpha,two_minus_alpha,alpha_value,limit_value,gap,convergence_bound,"
         "quadrature_error_bound,drift_term,inner_remainder,band_remainder,outer_difference,"
         "gradient_band_term,small_jump_reference,trace_term\n";

  std::vector<double> log_eps, log_bound, log_eps_gap, log_gap;
  json points = json::array();
  for (double a : config.alpha_grid) {
    const CylindricalNoiseSpec noise = CylindricalNoiseSpec::make(a, betas);
    const GeneratorEvalReport r = generator_gap(coeffs, noise, f, x);
    csv << fmt_real(a) << ',' << fmt_real(2.0 - a) << ',' << fmt_real(r.alpha_value) << ','
        << fmt_real(r.limit_value) << ',' << fmt_real(r.gap) << ','
        << fmt_real(r.convergence_bound) << ',' << fmt_real(r.quadrature_error_bound) << ','
        << fmt_real(r.drift_term) << ',' << fmt_real(r.inner_remainder) << ','
        << fmt_real(r.band_remainder) << ',' << fmt_real(r.outer_difference) << ','
        << fmt_real(r.gradient_band_term) << ',' << fmt_real(r.small_jump_reference) << ','
        << fmt_real(r.trace_term) << '\n';
    points.push_back({{"alpha", a},
                      {"gap", r.gap},
                      {"convergence_bound", r.convergence_bound},
                      {"quadrature_error_bound", r.quadrature_error_bound}});
    log_eps.push_back(std::log(2.0 - a));
    log_bound.push_back(std::log(r.convergence_bound));
    if (std::fabs(r.gap) > 100.0 * r.quadrature_error_bound) {
      log_eps_gap.push_back(std::log(2.0 - a));
      log_gap.push_back(std::log(std::fabs(r.gap)));
    }
    if (r.quadrature_error_bound > 1e-6)
      out.failures.push_back("quadrature error bound " + fmt_real(r.quadrature_error_bound) +
                             " too large at alpha=" + fmt_real(a));
  }

  out.report["points"] = points;
  out.report["gap_slope"] = nullptr;
  out.report["bound_slope"] = nullptr;
  if (log_eps.size() >= 3) {
    const LinearFit fit = least_squares_line(log_eps, log_bound);
    out.report["bound_slope"] = fit.slope;
    out.report["bound_intercept"] = fit.intercept;
    if (config.alpha_grid.front() >= 1.85 && (fit.slope < 0.9 || fit.slope > 1.1))
      out.failures.push_back("convergence-bound slope " + fmt_real(fit.slope) +
                             " outside [0.9, 1.1]");
  }
  if (log_eps_gap.size() >= 3)
    out.report["gap_slope"] = least_squares_line(log_eps_gap, log_gap).slope;
  out.csv = csv.str();
  return out;
}

// ---------------------------------------------------------------------
// sde_weak_rate: paired weak-error sweep plus Wasserstein diagnostics.

ExperimentOutcome run_sde_weak_rate(const ExperimentConfig& config) {
  const std::size_t d = config.dimension;
  const CoefficientField coeffs = make_coefficient_preset(config.coefficients, d);
  const TestFunction f = observable(d);
  const std::vector<double> betas = component_betas(config);
  const TimeGrid grid(config.horizon, config.n_steps);
  const IncrementSamplerMode mode = IncrementSamplerMode::exact();

  ExperimentOutcome out;
  std::vector<WeakErrorPoint> points;
  for (std::size_t i = 0; i < config.alpha_grid.size(); ++i) {
    const double a = config.alpha_grid[i];
    const CylindricalNoiseSpec noise = CylindricalNoiseSpec::make(a, betas);
    const WeakErrorPoint p = estimate_weak_error(
        coeffs, noise, f, grid, config.n_paths, mode, derive_stream(base_key(config), i),
        EnsembleCoupling::paired_transform, config.workers);
    if (!p.valid())
      out.failures.push_back("divergence fraction " + fmt_real(p.divergence_fraction) +
                             " above 0.001 at alpha=" + fmt_real(a));
    points.push_back(p);
  }

  std::ostringstream csv;
  csv << "alpha,estimate,std_error,n_paths,h,divergence_fraction\n";
  for (const WeakErrorPoint& p : points)
    csv << fmt_real(p.alpha_value) << ',' << fmt_real(p.estimate) << ','
        << fmt_real(p.std_error) << ',' << p.n_paths << ',' << fmt_real(p.h) << ','
        << fmt_real(p.divergence_fraction) << '\n';
  out.csv = csv.str();

  json jpoints = json::array();
  for (const WeakErrorPoint& p : points)
    jpoints.push_back({{"alpha", p.alpha_value},
                       {"estimate", p.estimate},
                       {"std_error", p.std_error},
                       {"n_paths", p.n_paths},
                       {"h", p.h},
                       {"divergence_fraction", p.divergence_fraction}});
  out.report["points"] = jpoints;
  out.report["slope"] = nullptr;

  const bool all_resolved =
      std::all_of(points.begin(), points.end(), [](const WeakErrorPoint& p) {
        return p.valid() && std::fabs(p.estimate) > 3.0 * p.std_error;
      });
  if (all_resolved && points.size() >= 2) {
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
      decreasing = decreasing && std::fabs(points[i].estimate) > std::fabs(points[i + 1].estimate);
    out.report["estimates_decreasing"] = decreasing;
    if (!decreasing)
      out.failures.push_back("|estimate| not decreasing along the alpha grid");
  }
  if (config.alpha_grid.size() >= 3) {
    try {
      const WeakErrorReport rate = rate_regression(points);
      out.report["slope"] = rate.slope;
      out.report["intercept"] = rate.intercept;
      out.report["slope_ci"] = {{"lo", rate.slope_ci.lo}, {"hi", rate.slope_ci.hi}};
      if (rate.slope < 0.7 || rate.slope > 1.3)
        out.failures.push_back("weak-rate slope " + fmt_real(rate.slope) +
                               " outside [0.7, 1.3]");
    } catch (const InsufficientDataError& e) {
      out.failures.push_back(e.what());
    }
  }

  const std::size_t n_w1 = std::min<std::size_t>(config.n_paths, 10000);
  const RngStreamKey w1_key = derive_stream(base_key(config), 1000);
  const std::vector<double> reference =
      diffusion_terminal_sample(coeffs, grid, n_w1, w1_key, config.workers);
  json w1 = json::array();
  for (double a : config.alpha_grid) {
    const CylindricalNoiseSpec noise = CylindricalNoiseSpec::make(a, betas);
    const std::vector<double> sample =
        jump_terminal_sample(coeffs, noise, grid, n_w1, mode, w1_key, config.workers);
    w1.push_back({{"alpha", a},
                  {"distance", distributional_distance(sample, reference,
                                                       DistanceMetric::wasserstein1)},
                  {"n_paths", n_w1}});
  }
  out.report["wasserstein1"] = w1;
  return out;
}

// ---------------------------------------------------------------------
// example41: deterministic optimality witness, no Monte Carlo.

ExperimentOutcome run_example41(const ExperimentConfig& config) {
  const double limit_constant = example41_constant();
  const double gaussian_moment = 2.0 / std::sqrt(kPi);

  ExperimentOutcome out;
  std::ostringstream csv;
  csv << "alpha,exact_error,ratio_to_2_minus_alpha\n";
  std::vector<double> log_eps, log_err;
  double final_ratio = 0.0;
  for (double a : config.alpha_grid) {
    const double err = std::fabs(exact_abs_moment_stable(a, 1.0) - gaussian_moment);
    final_ratio = err / (2.0 - a);
    csv << fmt_real(a) << ',' << fmt_real(err) << ',' << fmt_real(final_ratio) << '\n';
    log_eps.push_back(std::log(2.0 - a));
    log_err.push_back(std::log(err));
  }

  out.report["limit_constant"] = limit_constant;
  out.report["final_ratio"] = final_ratio;
  out.report["slope"] = nullptr;
  double slope = 0.0;
  if (config.alpha_grid.size() >= 2) {
    slope = least_squares_line(log_eps, log_err).slope;
    out.report["slope"] = slope;
  }
  csv << "# summary,final_ratio=" << fmt_real(final_ratio)
      << ",limit_constant=" << fmt_real(limit_constant) << ",slope=" << fmt_real(slope) << '\n';
  out.csv = csv.str();

  if (config.alpha_grid.back() >= 1.9985 &&
      std::fabs(final_ratio / limit_constant - 1.0) > 0.01)
    out.failures.push_back("final ratio " + fmt_real(final_ratio) +
                           " not within 1% of the limit constant");
  if (config.alpha_grid.size() >= 3 && config.alpha_grid.front() >= 1.9 &&
      (slope < 0.97 || slope > 1.03))
    out.failures.push_back("error slope " + fmt_real(slope) + " outside [0.97, 1.03]");
  return out;
}

// ---------------------------------------------------------------------
// kolmogorov_residual: Feynman-Kac check of the limit equation.

ExperimentOutcome run_kolmogorov(const ExperimentConfig& config) {
  const std::size_t d = config.dimension;
  const CoefficientField coeffs = make_coefficient_preset(config.coefficients, d);
  const TestFunction f = observable(d);
  const TimeGrid grid(config.horizon, config.n_steps);
  const double t = 0.5 * config.horizon;
  const std::vector<double> x(d, 0.3);

  const KolmogorovResidual res =
      kolmogorov_residual(coeffs, f, t, x, grid, config.n_paths, base_key(config));

  ExperimentOutcome out;
  std::ostringstream csv;
  csv << "t,x,residual,std_error,inconclusive,n_paths,n_steps\n";
  csv << fmt_real(t) << ',' << fmt_real(x[0]) << ',' << fmt_real(res.residual) << ','
      << fmt_real(res.std_error) << ',' << (res.inconclusive ? 1 : 0) << ',' << config.n_paths
      << ',' << config.n_steps << '\n';
  out.csv = csv.str();

  out.report["t"] = t;
  out.report["x"] = x;
  out.report["residual"] = res.residual;
  out.report["std_error"] = res.std_error;
  out.report["inconclusive"] = res.inconclusive;
  out.report["within_3se"] = std::fabs(res.residual) <= 3.0 * res.std_error;

  if (res.inconclusive)
    out.failures.push_back("residual inconclusive: standard error dominates both terms");
  else if (std::fabs(res.residual) > 3.0 * res.std_error)
    out.failures.push_back("residual " + fmt_real(res.residual) + " exceeds 3 standard errors (" +
                           fmt_real(res.std_error) + ")");
  return out;
}

ExperimentOutcome dispatch(const ExperimentConfig& config) {
  switch (config.experiment) {
    case ExperimentKind::lemma22_suite: return run_lemma22(config);
    case ExperimentKind::sampler_validation: return run_sampler_validation(config);
    case ExperimentKind::generator_rate: return run_generator_rate(config);
    case ExperimentKind::sde_weak_rate: return run_sde_weak_rate(config);
    case ExperimentKind::example41: return run_example41(config);
    case ExperimentKind::kolmogorov_residual: return run_kolmogorov(config);
  }
  throw ConfigError("unknown experiment", 0, "experiment");
}

json config_echo(const ExperimentConfig& config) {
  json echo;
  echo["experiment"] = experiment_name(config.experiment);
  echo["alpha_grid"] = config.alpha_grid;
  echo["beta"] = config.beta;
  echo["dimension"] = config.dimension;
  echo["coefficients"] = coefficient_preset_name(config.coefficients);
  echo["T"] = config.horizon;
  echo["n_steps"] = config.n_steps;
  echo["n_paths"] = config.n_paths;
  echo["seed"] = config.seed;
  echo["workers"] = config.workers;
  echo["output_dir"] = config.output_dir;
  return echo;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream stream(path, std::ios::binary);
  if (!stream) throw IoError("cannot open for writing", path.string());
  stream << body;
  stream.flush();
  if (!stream.good()) throw IoError("write failed", path.string());
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  check_config(config);
  const auto start = std::chrono::steady_clock::now();

  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + ec.message(), config.output_dir);

  const ExperimentOutcome outcome = dispatch(config);

  const std::string timestamp = utc_timestamp();
  const std::string stem = std::string(experiment_name(config.experiment)) + "-" +
                           std::to_string(config.seed) + "-" + timestamp;
  const fs::path csv_path = dir / (stem + ".csv");
  const fs::path json_path = dir / (stem + ".json");
  const fs::path manifest_path = dir / (stem + ".manifest.json");

  write_file(csv_path, outcome.csv);
  write_file(json_path, outcome.report.dump(2) + "\n");

  RunManifest manifest;
  manifest.config = config;
  manifest.library_version = kLibraryVersion;
  manifest.timestamp = timestamp;
  manifest.seed = config.seed;
  manifest.result_files = {csv_path.string(), json_path.string()};
  manifest.manifest_file = manifest_path.string();
  manifest.failures = outcome.failures;
  manifest.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json m;
  m["config"] = config_echo(config);
  m["library_version"] = manifest.library_version;
  m["seed"] = manifest.seed;
  m["timestamp"] = manifest.timestamp;
  m["wall_time_seconds"] = manifest.wall_time_seconds;
  m["result_files"] = manifest.result_files;
  m["failures"] = manifest.failures;
  m["passed"] = manifest.passed();
  write_file(manifest_path, m.dump(2) + "\n");
  return manifest;
}

std::vector<std::string> list_experiments() {
  return {"lemma22_suite", "sampler_validation", "generator_rate",
          "sde_weak_rate", "example41",          "kolmogorov_residual"};
}

ExperimentConfig smoke_config() {
  ExperimentConfig config;
  config.experiment = ExperimentKind::sde_weak_rate;
  config.alpha_grid = {1.7, 1.8, 1.9};
  config.beta = {0.0};
  config.dimension = 1;
  config.coefficients = CoefficientPreset::ou_type;
  config.horizon = 1.0;
  config.n_steps = 64;
  config.n_paths = 4000;
  config.seed = kDefaultSeed;
  config.workers = 1;
  config.output_dir = ".";
  return config;
}

}  // namespace stablesde
