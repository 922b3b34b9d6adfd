#include "stablesde/special_functions.hpp"

#include <cmath>
#include <string>

#include "stablesde/errors.hpp"

namespace stablesde {
namespace {

// Lanczos approximation, g = 607/128, 15 terms. Relative error below
// 1e-14 on the positive half line after the recurrence below.
constexpr double kLanczosG = 4.7421875;
constexpr double kLanczos[15] = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4,
    0.15808870322491248884e-3,  -0.21026444172410488319e-3,
    0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4,
    0.36899182659531622704e-5};

double lanczos_gamma_positive(double x) {
  // valid for x >= 0.5
  double series = kLanczos[0];
  for (int k = 1; k < 15; ++k) series += kLanczos[k] / (x - 1.0 + k);
  const double t = x - 0.5 + kLanczosG;
  return std::sqrt(2.0 * kPi) * std::pow(t, x - 0.5) * std::exp(-t) * series;
}

}  // namespace

double gamma_fn(double x) {
  if (!std::isfinite(x)) throw ParameterDomainError("x", "gamma_fn: non-finite argument");
  if (x <= 0.0 && x == std::floor(x))
    throw ParameterDomainError("x", "gamma_fn: pole at non-positive integer " + std::to_string(x));
  if (x >= 0.5) return lanczos_gamma_positive(x);
  if (x > 0.0) return lanczos_gamma_positive(x + 1.0) / x;
  // Reflection; sin(pi*x) degrades near the poles but those are excluded.
  return kPi / (std::sin(kPi * x) * gamma_fn(1.0 - x));
}

double cos_half_pi_alpha(double alpha) { return -std::sin(0.5 * kPi * (alpha - 1.0)); }

double sin_half_pi_alpha(double alpha) { return std::cos(0.5 * kPi * (alpha - 1.0)); }

double tan_half_pi_alpha(double alpha) {
  const double h = 0.5 * kPi * (alpha - 1.0);
  return -std::cos(h) / std::sin(h);
}

double stable_normalising_constant(double alpha) {
  if (!(alpha > 1.0 && alpha < 2.0))
    throw ParameterDomainError("alpha", "stable_normalising_constant: alpha must lie in (1,2)");
  const double two_minus = 2.0 - alpha;  // exact for alpha in [1,2]
  return alpha * (alpha - 1.0) / (gamma_fn(two_minus) * std::sin(0.5 * kPi * (alpha - 1.0)));
}

}  // namespace stablesde
