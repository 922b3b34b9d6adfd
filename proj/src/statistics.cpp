#include "stablesde/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "stablesde/errors.hpp"

namespace stablesde {

SampleSummary summarize(std::span<const double> sample) {
  if (sample.size() < 2)
    throw InsufficientDataError("summarize: need at least 2 observations");
  const auto n = static_cast<double>(sample.size());
  double mean = 0.0;
  for (double v : sample) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : sample) ss += (v - mean) * (v - mean);
  const double variance = ss / (n - 1.0);
  return {mean, variance, std::sqrt(variance / n), sample.size()};
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InsufficientDataError("ks_statistic: empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const std::size_t n = sa.size(), m = sb.size();
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  while (i < n && j < m) {
    const double v = std::min(sa[i], sb[j]);
    while (i < n && sa[i] <= v) ++i;
    while (j < m && sb[j] <= v) ++j;
    sup = std::max(sup, std::fabs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return sup;
}

double ks_critical_value(double level, std::size_t n, std::size_t m) {
  if (!(level > 0.0 && level < 1.0))
    throw ParameterDomainError("level", "ks_critical_value: level must lie in (0,1)");
  if (n == 0 || m == 0) throw InsufficientDataError("ks_critical_value: empty sample");
  const double c = std::sqrt(-0.5 * std::log(0.5 * level));
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

double wasserstein1(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InsufficientDataError("wasserstein1: empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const std::uint64_t n = sa.size(), m = sb.size();
  // breakpoints measured in units of 1/(n*m) so the walk stays integral
  std::uint64_t i = 0, j = 0, cur = 0;
  double acc = 0.0;
  while (i < n && j < m) {
    const std::uint64_t level_a = (i + 1) * m;
    const std::uint64_t level_b = (j + 1) * n;
    const std::uint64_t next = std::min(level_a, level_b);
    acc += static_cast<double>(next - cur) * std::fabs(sa[i] - sb[j]);
    cur = next;
    if (level_a == next) ++i;
    if (level_b == next) ++j;
  }
  return acc / (static_cast<double>(n) * static_cast<double>(m));
}

EcfEstimate empirical_char_function(std::span<const double> sample, double xi) {
  if (sample.size() < 2)
    throw InsufficientDataError("empirical_char_function: need at least 2 observations");
  const auto n = static_cast<double>(sample.size());
  double sum_c = 0.0, sum_s = 0.0, sum_c2 = 0.0, sum_s2 = 0.0;
  for (double v : sample) {
    const double c = std::cos(xi * v);
    const double s = std::sin(xi * v);
    sum_c += c;
    sum_s += s;
    sum_c2 += c * c;
    sum_s2 += s * s;
  }
  const double mc = sum_c / n, ms = sum_s / n;
  const double var_c = std::max(0.0, (sum_c2 - n * mc * mc) / (n - 1.0));
  const double var_s = std::max(0.0, (sum_s2 - n * ms * ms) / (n - 1.0));
  return {{mc, ms}, std::sqrt(var_c / n), std::sqrt(var_s / n)};
}

LinearFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw ParameterDomainError("y", "least_squares_line: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw InsufficientDataError("least_squares_line: need at least 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0)
    throw ParameterDomainError("x", "least_squares_line: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = y[k] - (fit.intercept + fit.slope * x[k]);
    rss += r * r;
  }
  fit.residual_rms = std::sqrt(rss / static_cast<double>(n));
  fit.slope_std_error =
      n > 2 ? std::sqrt(rss / (static_cast<double>(n) - 2.0) / sxx) : 0.0;
  return fit;
}

ConfidenceInterval bootstrap_slope_ci(std::span<const double> x, std::span<const double> y,
                                      std::size_t replicates, double coverage,
                                      const RngStreamKey& key) {
  if (!(coverage > 0.0 && coverage < 1.0))
    throw ParameterDomainError("coverage", "bootstrap_slope_ci: coverage must lie in (0,1)");
  if (replicates < 10)
    throw ParameterDomainError("replicates", "bootstrap_slope_ci: too few replicates");
  const std::size_t n = x.size();
  if (n != y.size() || n < 3)
    throw InsufficientDataError("bootstrap_slope_ci: need at least 3 paired points");

  CounterRng rng(key);
  std::vector<double> slopes;
  slopes.reserve(replicates);
  std::vector<double> bx(n), by(n);
  while (slopes.size() < replicates) {
    bool degenerate = true;
    for (std::size_t k = 0; k < n; ++k) {
      const auto pick = static_cast<std::size_t>(rng.next_u64() % n);
      bx[k] = x[pick];
      by[k] = y[pick];
      if (k > 0 && bx[k] != bx[0]) degenerate = false;
    }
    if (degenerate) continue;
    slopes.push_back(least_squares_line(bx, by).slope);
  }
  std::sort(slopes.begin(), slopes.end());
  const double tail = 0.5 * (1.0 - coverage);
  auto pick_quantile = [&](double q) {
    const double pos = q * static_cast<double>(slopes.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, slopes.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return slopes[lo] * (1.0 - frac) + slopes[hi] * frac;
  };
  return {pick_quantile(tail), pick_quantile(1.0 - tail)};
}

}  // namespace stablesde
