#include "stablesde/weak_error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "stablesde/errors.hpp"
#include "stablesde/parallel.hpp"
#include "stablesde/special_functions.hpp"

namespace stablesde {
namespace {

constexpr std::size_t kShardSize = 1024;

// Lanes under the caller's key; path p of an ensemble uses
// derive_stream(ensemble key, p) with p global, so shard boundaries and
// worker counts can never shift a stream.
constexpr std::uint64_t kJumpLane = 0;
constexpr std::uint64_t kDiffusionLane = 1;

struct MomentAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;
  std::size_t n_diverged = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  void merge(const MomentAccumulator& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    n += o.n;
    n_diverged += o.n_diverged;
  }
  double mean() const { return sum / static_cast<double>(n); }
  double variance() const {
    if (n < 2) return 0.0;
    const double m = mean();
    return std::max(0.0, (sum_sq - static_cast<double>(n) * m * m) / (static_cast<double>(n) - 1.0));
  }
};

std::size_t shard_count(std::size_t n_paths) { return (n_paths + kShardSize - 1) / kShardSize; }

void check_ensemble_args(const CoefficientField& coeffs, const TimeGrid& grid,
                         std::size_t n_paths, std::span<const double> x0) {
  if (coeffs.dimension == 0 || !coeffs.drift || !coeffs.diffusion)
    throw ParameterDomainError("coeffs", "weak error: incomplete coefficient field");
  if (grid.n_steps() == 0)
    throw ParameterDomainError("grid", "weak error: empty time grid");
  if (n_paths < 2) throw ParameterDomainError("n_paths", "weak error: needs at least 2 paths");
  if (!x0.empty() && x0.size() != coeffs.dimension)
    throw ParameterDomainError("x0", "weak error: start point has wrong dimension");
}

std::vector<double> resolve_start(const CoefficientField& coeffs, std::span<const double> x0) {
  if (x0.empty()) return std::vector<double>(coeffs.dimension, 0.0);
  return {x0.begin(), x0.end()};
}

// Walks the jump chain and its Brownian-limit partner on the same polar
// draws: per (step, component), one (v, w) feeds both the exact stable
// transform and its alpha -> 2 limit. Marginals match the two standalone
// engines' schemes; only the joint law is coupled.
class PairedEulerWalker {
 public:
  PairedEulerWalker(const CoefficientField& coeffs, const CylindricalNoiseSpec& noise,
                    const TimeGrid& grid, const IncrementSamplerMode& mode)
      : coeffs_(&coeffs), grid_(grid) {
    if (mode.method != SamplerMethod::exact_transform)
      throw ParameterDomainError(
          "coupling", "paired_transform coupling requires the exact_transform sampler");
    const std::size_t d = noise.dimension();
    if (d != coeffs.dimension)
      throw ParameterDomainError("noise", "weak error: noise dimension mismatch");
    samplers_.reserve(d);
    for (std::size_t i = 0; i < d; ++i)
      samplers_.emplace_back(noise.component(i), grid.h(), mode);
  }

  // Returns f(X^alpha_T) - f(X_T) through `difference`; false if either
  // chain leaves the finite range.
  bool run(std::span<const double> x0, const RngStreamKey& path_key, const TestFunction& f,
           double& difference) const {
    const std::size_t d = coeffs_->dimension;
    const double h = grid_.h();
    const double root_h = std::sqrt(h);
    std::vector<double> xj(x0.begin(), x0.end()), xd(x0.begin(), x0.end());
    std::vector<double> bj(d), bd(d), sj(d * d), sd(d * d), dl(d), xi(d), nj(d), nd(d);
    for (std::size_t k = 0; k < grid_.n_steps(); ++k) {
      const RngStreamKey step_key = derive_stream(path_key, k);
      for (std::size_t i = 0; i < d; ++i) {
        CounterRng rng(derive_stream(step_key, i));
        const double v = rng.next_uniform(-0.5 * kPi, 0.5 * kPi);
        const double w = rng.next_exponential();
        dl[i] = samplers_[i].increment_from_polar(v, w);
        xi[i] = root_h * cms_gaussian_limit(v, w);
      }
      coeffs_->drift(xj, bj);
      coeffs_->diffusion(xj, sj);
      coeffs_->drift(xd, bd);
      coeffs_->diffusion(xd, sd);
      for (std::size_t r = 0; r < d; ++r) {
        double gj = 0.0, gd = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          gj += sj[r * d + c] * dl[c];
          gd += sd[r * d + c] * xi[c];
        }
        xj[r] += bj[r] * h + gj;
        xd[r] += bd[r] * h + gd;
      }
      if (!detail::all_finite(xj) || !detail::all_finite(xd)) return false;
    }
    difference = f.eval(xj) - f.eval(xd);
    return true;
  }

 private:
  const CoefficientField* coeffs_;
  TimeGrid grid_;
  std::vector<ScalarIncrementSampler> samplers_;
};

}  // namespace

WeakErrorPoint estimate_weak_error(const CoefficientField& coeffs,
                                   const CylindricalNoiseSpec& noise, const TestFunction& f,
                                   const TimeGrid& grid, std::size_t n_paths,
                                   const IncrementSamplerMode& mode, const RngStreamKey& key,
                                   EnsembleCoupling coupling, unsigned workers,
                                   std::span<const double> x0) {
  check_ensemble_args(coeffs, grid, n_paths, x0);
  if (!f.eval || f.dimension != coeffs.dimension)
    throw ParameterDomainError("f", "weak error: test function incomplete or wrong dimension");
  const std::vector<double> start = resolve_start(coeffs, x0);
  const std::size_t n_shards = shard_count(n_paths);

  WeakErrorPoint point;
  point.alpha_value = noise.component(0).alpha();
  point.h = grid.h();

  if (coupling == EnsembleCoupling::paired_transform) {
    const PairedEulerWalker walker(coeffs, noise, grid, mode);
    const RngStreamKey ensemble_key = derive_stream(key, kJumpLane);
    std::vector<MomentAccumulator> partial(n_shards);
    run_sharded(n_shards, workers, [&](std::size_t s) {
      MomentAccumulator acc;
      const std::size_t lo = s * kShardSize;
      const std::size_t hi = std::min(n_paths, lo + kShardSize);
      for (std::size_t p = lo; p < hi; ++p) {
        double diff = 0.0;
        if (walker.run(start, derive_stream(ensemble_key, p), f, diff))
          acc.add(diff);
        else
          ++acc.n_diverged;
      }
      partial[s] = acc;
    });
    MomentAccumulator total;
    for (const MomentAccumulator& acc : partial) total.merge(acc);
    if (total.n < 2) throw InsufficientDataError("weak error: too few surviving paired paths");
    point.estimate = total.mean();
    point.std_error = std::sqrt(total.variance() / static_cast<double>(total.n));
    point.n_paths = total.n;
    point.divergence_fraction =
        static_cast<double>(total.n_diverged) / static_cast<double>(n_paths);
    return point;
  }

  const JumpEulerEngine jump_engine(coeffs, noise, grid, mode, false);
  const DiffusionEulerEngine diff_engine(coeffs, grid);
  const RngStreamKey jump_key = derive_stream(key, kJumpLane);
  const RngStreamKey diff_key = derive_stream(key, kDiffusionLane);
  std::vector<MomentAccumulator> partial_jump(n_shards), partial_diff(n_shards);
  run_sharded(n_shards, workers, [&](std::size_t s) {
    MomentAccumulator ja, da;
    const std::size_t lo = s * kShardSize;
    const std::size_t hi = std::min(n_paths, lo + kShardSize);
    for (std::size_t p = lo; p < hi; ++p) {
      const TerminalState tj = jump_engine.run_terminal(start, derive_stream(jump_key, p));
      if (tj.diverged)
        ++ja.n_diverged;
      else
        ja.add(f.eval(tj.state));
      const TerminalState td = diff_engine.run_terminal(start, derive_stream(diff_key, p));
      if (td.diverged)
        ++da.n_diverged;
      else
        da.add(f.eval(td.state));
    }
    partial_jump[s] = ja;
    partial_diff[s] = da;
  });
  MomentAccumulator jump_total, diff_total;
  for (std::size_t s = 0; s < n_shards; ++s) {
    jump_total.merge(partial_jump[s]);
    diff_total.merge(partial_diff[s]);
  }
  if (jump_total.n < 2 || diff_total.n < 2)
    throw InsufficientDataError("weak error: too few surviving paths");
  point.estimate = jump_total.mean() - diff_total.mean();
  point.std_error = std::sqrt(jump_total.variance() / static_cast<double>(jump_total.n) +
                              diff_total.variance() / static_cast<double>(diff_total.n));
  point.n_paths = jump_total.n;
  point.divergence_fraction =
      static_cast<double>(jump_total.n_diverged + diff_total.n_diverged) /
      static_cast<double>(2 * n_paths);
  return point;
}

WeakErrorReport rate_regression(std::span<const WeakErrorPoint> points,
                                std::size_t bootstrap_replicates) {
  WeakErrorReport report;
  std::vector<double> xs, ys;
  for (const WeakErrorPoint& p : points) {
    report.points.push_back(p);
    if (!p.valid()) continue;
    const double mag = std::fabs(p.estimate);
    if (!(p.alpha_value > 1.0 && p.alpha_value < 2.0)) continue;
    if (mag <= 3.0 * p.std_error || mag == 0.0) continue;
    xs.push_back(std::log(2.0 - p.alpha_value));
    ys.push_back(std::log(mag));
  }
  if (xs.size() < 3)
    throw InsufficientDataError("rate_regression: fewer than 3 resolvable points");
  const LinearFit fit = least_squares_line(xs, ys);
  report.slope = fit.slope;
  report.intercept = fit.intercept;
  report.slope_ci =
      bootstrap_slope_ci(xs, ys, bootstrap_replicates, 0.95, RngStreamKey{0x5eedb007u, 41});
  return report;
}

double exact_abs_moment_stable(double alpha, double t) {
  if (!(alpha > 1.0 && alpha <= 2.0))
    throw ParameterDomainError("alpha", "exact_abs_moment_stable: needs alpha in (1, 2]");
  if (!(t > 0.0)) throw ParameterDomainError("t", "exact_abs_moment_stable: needs t > 0");
  return (2.0 / kPi) * gamma_fn(1.0 - 1.0 / alpha) * std::sqrt(t);
}

double example41_constant() {
  return (kEulerMascheroni + 2.0 * std::log(2.0)) / (2.0 * std::sqrt(kPi));
}

double distributional_distance(std::span<const double> sample_a,
                               std::span<const double> sample_b, DistanceMetric metric) {
  if (sample_a.empty() || sample_b.empty())
    throw InsufficientDataError("distributional_distance: empty sample");
  return metric == DistanceMetric::ks ? ks_statistic(sample_a, sample_b)
                                      : wasserstein1(sample_a, sample_b);
}

namespace {

template <typename RunOne>
std::vector<double> terminal_sample_impl(std::size_t n_paths, unsigned workers,
                                         const RngStreamKey& ensemble_key, RunOne&& run_one,
                                         std::size_t* n_diverged) {
  const std::size_t n_shards = shard_count(n_paths);
  std::vector<double> slots(n_paths, std::numeric_limits<double>::quiet_NaN());
  run_sharded(n_shards, workers, [&](std::size_t s) {
    const std::size_t lo = s * kShardSize;
    const std::size_t hi = std::min(n_paths, lo + kShardSize);
    for (std::size_t p = lo; p < hi; ++p) run_one(derive_stream(ensemble_key, p), slots[p]);
  });
  std::vector<double> out;
  out.reserve(n_paths);
  std::size_t dropped = 0;
  for (double v : slots) {
    if (std::isnan(v))
      ++dropped;
    else
      out.push_back(v);
  }
  if (n_diverged) *n_diverged = dropped;
  if (out.empty()) throw InsufficientDataError("terminal sample: every path diverged");
  return out;
}

}  // namespace

std::vector<double> jump_terminal_sample(const CoefficientField& coeffs,
                                         const CylindricalNoiseSpec& noise, const TimeGrid& grid,
                                         std::size_t n_paths, const IncrementSamplerMode& mode,
                                         const RngStreamKey& key, unsigned workers,
                                         std::span<const double> x0, std::size_t* n_diverged) {
  check_ensemble_args(coeffs, grid, n_paths, x0);
  const std::vector<double> start = resolve_start(coeffs, x0);
  const JumpEulerEngine engine(coeffs, noise, grid, mode, false);
  return terminal_sample_impl(
      n_paths, workers, derive_stream(key, kJumpLane),
      [&](const RngStreamKey& path_key, double& slot) {
        const TerminalState ts = engine.run_terminal(start, path_key);
        if (!ts.diverged) slot = ts.state[0];
      },
      n_diverged);
}

std::vector<double> diffusion_terminal_sample(const CoefficientField& coeffs,
                                              const TimeGrid& grid, std::size_t n_paths,
                                              const RngStreamKey& key, unsigned workers,
                                              std::span<const double> x0,
                                              std::size_t* n_diverged) {
  check_ensemble_args(coeffs, grid, n_paths, x0);
  const std::vector<double> start = resolve_start(coeffs, x0);
  const DiffusionEulerEngine engine(coeffs, grid);
  return terminal_sample_impl(
      n_paths, workers, derive_stream(key, kDiffusionLane),
      [&](const RngStreamKey& path_key, double& slot) {
        const TerminalState ts = engine.run_terminal(start, path_key);
        if (!ts.diverged) slot = ts.state[0];
      },
      n_diverged);
}

}  // namespace stablesde
