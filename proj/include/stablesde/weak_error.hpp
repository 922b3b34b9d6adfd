#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stablesde/sde_solver.hpp"
#include "stablesde/statistics.hpp"
#include "stablesde/test_functions.hpp"

namespace stablesde {

struct WeakErrorPoint {
  double alpha_value = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  double h = 0.0;
  double divergence_fraction = 0.0;

  bool valid() const noexcept { return divergence_fraction <= 0.001; }
};

struct WeakErrorReport {
  std::vector<WeakErrorPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  ConfidenceInterval slope_ci;
};

// independent: two ensembles with unrelated streams; the standard error
//   combines both sample variances.
// paired_transform: the jump path and its Brownian-limit partner consume
//   the same polar variables per (step, component) — the stable draw and
//   the Gaussian are coupled through the alpha -> 2 limit of the same
//   transform — so the per-path difference carries far less variance
//   while both marginal laws stay exact. Requires exact_transform mode.
enum class EnsembleCoupling { independent, paired_transform };

// Monte Carlo estimate of E f(X^alpha_T) - E f(X_T) on a common grid.
// x0 empty means the origin. Divergent paths are excluded and counted
// into divergence_fraction (> 0.001 flags the point invalid).
WeakErrorPoint estimate_weak_error(const CoefficientField& coeffs,
                                   const CylindricalNoiseSpec& noise, const TestFunction& f,
                                   const TimeGrid& grid, std::size_t n_paths,
                                   const IncrementSamplerMode& mode, const RngStreamKey& key,
                                   EnsembleCoupling coupling = EnsembleCoupling::independent,
                                   unsigned workers = 1, std::span<const double> x0 = {});

// Least-squares fit of log|estimate| against log(2 - alpha) over the
// valid points with |estimate| > 3 std_error (log of noise-dominated
// values corrupts the slope), plus a percentile-bootstrap slope CI.
WeakErrorReport rate_regression(std::span<const WeakErrorPoint> points,
                                std::size_t bootstrap_replicates = 1000);

// (2/pi) Gamma(1 - 1/alpha) sqrt(t): closed form of E|L_t| for the
// symmetric unit-scale stable law, using int_0^inf u^-2 sin^2 u du = pi/2.
double exact_abs_moment_stable(double alpha, double t);

// (gamma_EM + 2 ln 2) / (2 sqrt(pi)) ~ 0.553896: the limit of
// |exact_abs_moment_stable(alpha, 1) - 2/sqrt(pi)| / (2 - alpha), i.e. the
// sharp first-order constant showing the rate cannot beat 2 - alpha.
double example41_constant();

enum class DistanceMetric { ks, wasserstein1 };

double distributional_distance(std::span<const double> sample_a,
                               std::span<const double> sample_b, DistanceMetric metric);

// Terminal first-coordinate ensembles for distributional comparisons;
// divergent paths are dropped (count returned via n_diverged).
std::vector<double> jump_terminal_sample(const CoefficientField& coeffs,
                                         const CylindricalNoiseSpec& noise, const TimeGrid& grid,
                                         std::size_t n_paths, const IncrementSamplerMode& mode,
                                         const RngStreamKey& key, unsigned workers = 1,
                                         std::span<const double> x0 = {},
                                         std::size_t* n_diverged = nullptr);

std::vector<double> diffusion_terminal_sample(const CoefficientField& coeffs,
                                              const TimeGrid& grid, std::size_t n_paths,
                                              const RngStreamKey& key, unsigned workers = 1,
                                              std::span<const double> x0 = {},
                                              std::size_t* n_diverged = nullptr);

}  // namespace stablesde
