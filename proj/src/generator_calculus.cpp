#include "stablesde/generator_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "stablesde/errors.hpp"
#include "stablesde/quadrature.hpp"
#include "stablesde/special_functions.hpp"

namespace stablesde {
namespace {

// 8-point Gauss-Legendre on [0,1]
constexpr double kGlNodes[8] = {
    0.01985507175123188416, 0.10166676129318663020, 0.23723379504183550709,
    0.40828267875217509753, 0.59171732124782490247, 0.76276620495816449291,
    0.89833323870681336980, 0.98014492824876811584};
constexpr double kGlWeights[8] = {
    0.05061426814518812958, 0.11119051722668723527, 0.15685332293894364367,
    0.18134189168918099148, 0.18134189168918099148, 0.15685332293894364367,
    0.11119051722668723527, 0.05061426814518812958};

// int_0^1 (1-s) v^T H(f)(x + s z v) v ds: the remainder with the z^2
// factor stripped, so callers can keep that factor in closed form and
// never underflow it for very small |z|.
double remainder_profile(const TestFunction& f, std::span<const double> x,
                         std::span<const double> v, double z, std::vector<double>& y,
                         std::vector<double>& hess) {
  const std::size_t d = x.size();
  double acc = 0.0;
  for (int q = 0; q < 8; ++q) {
    const double s = kGlNodes[q];
    for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + s * z * v[i];
    f.hessian(y, hess);
    double quad = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < d; ++j) row += hess[i * d + j] * v[j];
      quad += v[i] * row;
    }
    acc += kGlWeights[q] * (1.0 - s) * quad;
  }
  return acc;
}

struct Breakdown {
  double drift_term = 0.0;
  double inner = 0.0;
  double band = 0.0;
  double outer = 0.0;
  double gradient_band = 0.0;
  double small_ref = 0.0;
  double trace = 0.0;
  double error_bound = 0.0;
};

void check_generator_args(const CoefficientField& coeffs, const TestFunction& f,
                          std::span<const double> x, const char* op) {
  if (coeffs.dimension == 0 || !coeffs.drift || !coeffs.diffusion)
    throw ParameterDomainError("coeffs", std::string(op) + ": incomplete coefficient field");
  if (f.dimension != coeffs.dimension || !f.eval || !f.gradient || !f.hessian)
    throw ParameterDomainError("f", std::string(op) + ": test function incomplete or wrong dimension");
  if (x.size() != coeffs.dimension)
    throw ParameterDomainError("x", std::string(op) + ": point has wrong dimension");
}

Breakdown evaluate_breakdown(const CoefficientField& coeffs, const CylindricalNoiseSpec& noise,
                             const TestFunction& f, std::span<const double> x, double delta,
                             double tol) {
  check_generator_args(coeffs, f, x, "apply_alpha_generator");
  if (noise.dimension() != coeffs.dimension)
    throw ParameterDomainError("noise", "apply_alpha_generator: noise dimension mismatch");
  if (!(delta > 0.0 && delta <= 1.0))
    throw ParameterDomainError("delta_split",
                               "apply_alpha_generator: delta_split must lie in (0, 1]");
  if (!(tol > 0.0)) throw ParameterDomainError("tol", "apply_alpha_generator: tol must be positive");
  if (!f.bounded || !(f.sup_bound > 0.0))
    throw ParameterDomainError(
        "f", "apply_alpha_generator: needs a bounded test function with sup_bound set");

  const std::size_t d = coeffs.dimension;
  std::vector<double> drift(d), grad(d), sigma(d * d), hess0(d * d);
  coeffs.drift(x, drift);
  coeffs.diffusion(x, sigma);
  f.gradient(x, grad);
  f.hessian(x, hess0);

  Breakdown bd;
  for (std::size_t i = 0; i < d; ++i) bd.drift_term += drift[i] * grad[i];

  const double f0 = f.eval(x);
  const double trunc_tol = 0.01 * tol;
  std::vector<double> v(d), y(d), hz(d * d), y2(d);

  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t r = 0; r < d; ++r) v[r] = sigma[r * d + i];
    const LevyMeasureSpec& spec = noise.component(i);
    const double a = spec.alpha();
    const double kappa = spec.normalising_constant();
    const double c_plus = spec.c_plus();
    const double c_minus = spec.c_minus();

    double grad_dot = 0.0;
    for (std::size_t r = 0; r < d; ++r) grad_dot += v[r] * grad[r];
    double hess_quad = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
      double row = 0.0;
      for (std::size_t c = 0; c < d; ++c) row += hess0[r * d + c] * v[c];
      hess_quad += v[r] * row;
    }

    bd.trace += hess_quad;
    bd.small_ref += 0.5 * hess_quad * truncated_second_moment(spec, delta);
    if (delta < 1.0)
      bd.gradient_band += grad_dot * (tail_mean(spec, delta) - tail_mean(spec, 1.0));

    // Remainder integrals in u = log|z| coordinates. The z^2 of the
    // remainder is folded into the exponential so small z never underflows
    // the z^2 factor.
    auto remainder_integrand = [&](double u) {
      const double z = std::exp(u);
      const double profile = c_plus * remainder_profile(f, x, v, z, y, hz) +
                             c_minus * remainder_profile(f, x, v, -z, y, hz);
      return std::exp((2.0 - a) * u) * profile;
    };

    // Below z_tail the profile is flat to O(z_tail^2), so the rest of the
    // integral has the elementary antiderivative e^{(2-a)u}/(2-a) down to
    // u = -inf. It must not be chased numerically: exhausting e^{(2-a)u}
    // takes an interval of length ~1/(2-a), against which the region where
    // the profile varies shrinks into the gap past the outermost Kronrod
    // node, and the panel estimator accepts a value that misses it.
    const double rate = 2.0 - a;
    const double u_tail = std::log(delta) - 20.0;
    const double z_tail = std::exp(u_tail);
    const double profile_zero = kappa * remainder_profile(f, x, v, 0.0, y, hz);
    const double profile_tail = c_plus * remainder_profile(f, x, v, z_tail, y, hz) +
                                c_minus * remainder_profile(f, x, v, -z_tail, y, hz);
    const double tail_weight = std::exp(rate * u_tail) / rate;
    bd.inner += profile_zero * tail_weight;
    bd.error_bound += 2.0 * std::fabs(profile_tail - profile_zero) * tail_weight;

    QuadratureControl smooth_ctrl{tol, 0.0, 20000, true};
    const QuadratureResult r_inner =
        integrate(remainder_integrand, u_tail, std::log(delta), smooth_ctrl);
    bd.inner += r_inner.value;
    bd.error_bound += r_inner.error_bound;

    if (delta < 1.0) {
      const QuadratureResult r_band = integrate(remainder_integrand, std::log(delta), 0.0, smooth_ctrl);
      bd.band += r_band.value;
      bd.error_bound += r_band.error_bound;
    }

    auto difference_integrand = [&](double u) {
      const double z = std::exp(u);
      double plus, minus;
      for (std::size_t r = 0; r < d; ++r) y2[r] = x[r] + z * v[r];
      plus = f.eval(y2) - f0;
      for (std::size_t r = 0; r < d; ++r) y2[r] = x[r] - z * v[r];
      minus = f.eval(y2) - f0;
      return std::exp(-a * u) * (c_plus * plus + c_minus * minus);
    };

    const double f_bound = std::max(f.sup_bound, std::fabs(f0));
    const double u_max =
        std::max(1.0, std::log(2.0 * f_bound * kappa / (a * trunc_tol)) / a);
    QuadratureControl outer_ctrl{tol, 0.0, 400000, true};
    const QuadratureResult r_outer = integrate(difference_integrand, 0.0, u_max, outer_ctrl);
    bd.outer += r_outer.value;
    bd.error_bound += r_outer.error_bound + trunc_tol;
  }
  return bd;
}

}  // namespace

double taylor_remainder(const TestFunction& f, std::span<const double> x,
                        std::span<const double> v, double z) {
  if (x.size() != f.dimension || v.size() != f.dimension)
    throw ParameterDomainError("x", "taylor_remainder: dimension mismatch");
  std::vector<double> y(x.size()), hess(x.size() * x.size());
  return z * z * remainder_profile(f, x, v, z, y, hess);
}

double apply_limit_generator(const CoefficientField& coeffs, const TestFunction& f,
                             std::span<const double> x) {
  check_generator_args(coeffs, f, x, "apply_limit_generator");
  const std::size_t d = coeffs.dimension;
  std::vector<double> drift(d), grad(d), sigma(d * d), hess(d * d);
  coeffs.drift(x, drift);
  coeffs.diffusion(x, sigma);
  f.gradient(x, grad);
  f.hessian(x, hess);

  double value = 0.0;
  for (std::size_t i = 0; i < d; ++i) value += drift[i] * grad[i];
  // Tr(sigma sigma^T H) = sum_i sigma_i^T H sigma_i over columns sigma_i.
  for (std::size_t i = 0; i < d; ++i) {
    double quad = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
      double row = 0.0;
      for (std::size_t c = 0; c < d; ++c) row += hess[r * d + c] * sigma[c * d + i];
      quad += sigma[r * d + i] * row;
    }
    value += quad;
  }
  return value;
}

double apply_alpha_generator(const CoefficientField& coeffs, const CylindricalNoiseSpec& noise,
                             const TestFunction& f, std::span<const double> x, double delta_split,
                             double tol) {
  const Breakdown bd = evaluate_breakdown(coeffs, noise, f, x, delta_split, tol);
  return bd.drift_term + bd.inner + bd.band + bd.outer;
}

GeneratorEvalReport generator_gap(const CoefficientField& coeffs,
                                  const CylindricalNoiseSpec& noise, const TestFunction& f,
                                  std::span<const double> x, double delta_split, double tol) {
  const Breakdown bd = evaluate_breakdown(coeffs, noise, f, x, delta_split, tol);

  GeneratorEvalReport report;
  report.delta_split = delta_split;
  report.drift_term = bd.drift_term;
  report.inner_remainder = bd.inner;
  report.band_remainder = bd.band;
  report.outer_difference = bd.outer;
  report.gradient_band_term = bd.gradient_band;
  report.small_jump_reference = bd.small_ref;
  report.trace_term = bd.trace;
  report.quadrature_error_bound = bd.error_bound;

  report.alpha_value = bd.drift_term + bd.inner + bd.band + bd.outer;
  report.limit_value = bd.drift_term + bd.trace;
  report.gap = report.alpha_value - report.limit_value;

  // Triangle bound on |gap| from the proof-style regrouping: the jump
  // difference over |z| > delta is band + outer + gradient-band.
  const double jump_difference = bd.band + bd.gradient_band + bd.outer;
  report.convergence_bound = std::fabs(bd.inner - bd.small_ref) +
                             std::fabs(bd.small_ref - bd.trace) + std::fabs(jump_difference) +
                             std::fabs(bd.gradient_band);
  return report;
}

KolmogorovResidual kolmogorov_residual(const CoefficientField& coeffs, const TestFunction& f,
                                       double t, std::span<const double> x, const TimeGrid& grid,
                                       std::size_t n_paths, const RngStreamKey& key,
                                       double fd_step) {
  check_generator_args(coeffs, f, x, "kolmogorov_residual");
  const double T = grid.horizon();
  if (!(t >= 0.0 && t < T))
    throw ParameterDomainError("t", "kolmogorov_residual: needs 0 <= t < horizon");
  if (!(fd_step > 0.0) || t + fd_step >= T)
    throw ParameterDomainError("fd_step",
                               "kolmogorov_residual: needs 0 < fd_step < horizon - t");
  if (!f.bounded)
    throw ParameterDomainError("f", "kolmogorov_residual: needs a bounded test function");
  constexpr std::size_t kBatches = 20;
  if (n_paths < 2 * kBatches)
    throw InsufficientDataError("kolmogorov_residual: needs at least 40 paths");

  const std::size_t d = coeffs.dimension;
  const std::size_t per_batch = n_paths / kBatches;

  double x_norm = 0.0;
  for (double v : x) x_norm += v * v;
  const double dx = fd_step * (1.0 + std::sqrt(x_norm));
  const bool central_t = t - fd_step >= 0.0;

  // Mean of f at the terminal state started from y with time-to-horizon
  // T - t_eval, over one path block. The Gaussian draws depend only on
  // (path key, step), not on the horizon, so every stencil point sees
  // the same noise: common random numbers by construction.
  auto block_mean = [&](double t_eval, std::span<const double> y, std::size_t lo,
                        std::size_t hi) {
    const TimeGrid local(T - t_eval, grid.n_steps());
    const DiffusionEulerEngine engine(coeffs, local);
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t p = lo; p < hi; ++p) {
      const TerminalState ts = engine.run_terminal(y, derive_stream(key, p));
      if (ts.diverged) continue;
      acc += f.eval(ts.state);
      ++used;
    }
    if (used == 0)
      throw InsufficientDataError("kolmogorov_residual: every path in a block diverged");
    return acc / static_cast<double>(used);
  };

  std::vector<double> batch_dt(kBatches), batch_lu(kBatches);
  std::vector<double> yp(d), ym(d), ypp(d);
  for (std::size_t b = 0; b < kBatches; ++b) {
    const std::size_t lo = b * per_batch;
    const std::size_t hi = lo + per_batch;

    const double u0 = block_mean(t, x, lo, hi);
    const double u_tp = block_mean(t + fd_step, x, lo, hi);
    const double dt_u = central_t
                            ? (u_tp - block_mean(t - fd_step, x, lo, hi)) / (2.0 * fd_step)
                            : (u_tp - u0) / fd_step;

    std::vector<double> u_xp(d), u_xm(d);
    for (std::size_t i = 0; i < d; ++i) {
      yp.assign(x.begin(), x.end());
      ym.assign(x.begin(), x.end());
      yp[i] += dx;
      ym[i] -= dx;
      u_xp[i] = block_mean(t, yp, lo, hi);
      u_xm[i] = block_mean(t, ym, lo, hi);
    }
    std::vector<double> u_cross(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) {
        double quad = 0.0;
        for (int si = -1; si <= 1; si += 2)
          for (int sj = -1; sj <= 1; sj += 2) {
            ypp.assign(x.begin(), x.end());
            ypp[i] += si * dx;
            ypp[j] += sj * dx;
            quad += si * sj * block_mean(t, ypp, lo, hi);
          }
        u_cross[i * d + j] = quad / (4.0 * dx * dx);
      }

    TestFunction surrogate;
    surrogate.dimension = d;
    surrogate.eval = [u0](std::span<const double>) { return u0; };
    surrogate.gradient = [&, u_xp, u_xm](std::span<const double>, std::span<double> out) {
      for (std::size_t i = 0; i < d; ++i) out[i] = (u_xp[i] - u_xm[i]) / (2.0 * dx);
    };
    surrogate.hessian = [&, u_xp, u_xm, u0, u_cross](std::span<const double>,
                                                     std::span<double> out) {
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
          if (i == j)
            out[i * d + i] = (u_xp[i] - 2.0 * u0 + u_xm[i]) / (dx * dx);
          else
            out[i * d + j] = i < j ? u_cross[i * d + j] : u_cross[j * d + i];
        }
    };
    surrogate.bounded = true;
    surrogate.sup_bound = std::max(1.0, std::fabs(u0));

    batch_dt[b] = dt_u;
    batch_lu[b] = apply_limit_generator(coeffs, surrogate, x);
  }

  double mean_dt = 0.0, mean_lu = 0.0;
  for (std::size_t b = 0; b < kBatches; ++b) {
    mean_dt += batch_dt[b];
    mean_lu += batch_lu[b];
  }
  mean_dt /= kBatches;
  mean_lu /= kBatches;

  double ss = 0.0;
  for (std::size_t b = 0; b < kBatches; ++b) {
    const double r = batch_dt[b] + batch_lu[b];
    const double c = mean_dt + mean_lu;
    ss += (r - c) * (r - c);
  }

  KolmogorovResidual out;
  out.residual = mean_dt + mean_lu;
  out.std_error = std::sqrt(ss / (kBatches - 1.0) / kBatches);
  const double scale = std::max(std::fabs(mean_dt), std::fabs(mean_lu));
  out.inconclusive = out.std_error > scale;
  return out;
}

}  // namespace stablesde
