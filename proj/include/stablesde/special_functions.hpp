#pragma once

namespace stablesde {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kEulerMascheroni = 0.57721566490153286060651209008240243;

// Gamma function for non-integer real x (poles at 0, -1, -2, ... rejected).
double gamma_fn(double x);

// cos(pi*alpha/2) evaluated as -sin(pi*(alpha-1)/2). Near alpha = 2 the
// direct form loses all significant digits; this one keeps full precision
// because alpha-1 is exact in floating point for alpha in (1, 2].
double cos_half_pi_alpha(double alpha);

// sin(pi*alpha/2) = cos(pi*(alpha-1)/2), same reformulation.
double sin_half_pi_alpha(double alpha);

// tan(pi*alpha/2), negative and exploding like -2/(pi*(2-alpha)) as alpha -> 2.
double tan_half_pi_alpha(double alpha);

// Normalising constant of the stable Levy measure:
// alpha*(alpha-1) / (Gamma(2-alpha) * sin(pi*(alpha-1)/2)).
// Positive on alpha in (1,2); behaves like 2*(2-alpha) as alpha -> 2.
double stable_normalising_constant(double alpha);

}  // namespace stablesde
