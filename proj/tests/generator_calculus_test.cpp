#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "doctest.h"
#include "stablesde/errors.hpp"
#include "stablesde/generator_calculus.hpp"
#include "stablesde/levy_measure.hpp"
#include "stablesde/sde_solver.hpp"
#include "stablesde/statistics.hpp"
#include "stablesde/test_functions.hpp"

using namespace stablesde;

namespace {

CoefficientField scaled_noise_field(double s) {
  CoefficientField c;
  c.dimension = 1;
  c.drift = [](std::span<const double>, std::span<double> out) { out[0] = 0.0; };
  c.diffusion = [s](std::span<const double>, std::span<double> out) { out[0] = s; };
  c.growth_exponent_r = 0.0;
  c.lipschitz_sigma = 0.0;
  c.bounded = true;
  return c;
}

}  // namespace

TEST_CASE("limit generator evaluates b.grad + trace(sigma sigma^T hessian)") {
  const std::vector<double> freq{1.0};

  // pure noise, f = cos: A f = -cos(x), trace coefficient 1 (the limit
  // equation carries sqrt(2) on its noise).
  const CoefficientField pn = make_coefficient_preset(CoefficientPreset::pure_noise, 1);
  const TestFunction fcos = cosine_wave(freq);
  const std::vector<double> x{0.7};
  CHECK(apply_limit_generator(pn, fcos, x) == doctest::Approx(-std::cos(0.7)).epsilon(1e-14));

  // ou drift adds -x f'(x) = x sin(x).
  const CoefficientField ou = make_coefficient_preset(CoefficientPreset::ou_type, 1);
  CHECK(apply_limit_generator(ou, fcos, x) ==
        doctest::Approx(0.7 * std::sin(0.7) - std::cos(0.7)).epsilon(1e-14));

  // gaussian bump at its center: gradient 0, hessian -1/w^2 per axis.
  const std::vector<double> center{0.0};
  const TestFunction bump = gaussian_bump(center, 1.0 / std::sqrt(2.0));
  const std::vector<double> origin{0.0};
  CHECK(apply_limit_generator(pn, bump, origin) == doctest::Approx(-2.0).epsilon(1e-14));

  const TestFunction c = constant_fn(1, 3.0);
  CHECK(apply_limit_generator(ou, c, x) == 0.0);

  // scaled noise multiplies the trace by s^2.
  CHECK(apply_limit_generator(scaled_noise_field(0.5), fcos, x) ==
        doctest::Approx(-0.25 * std::cos(0.7)).epsilon(1e-14));
}

TEST_CASE("nonlocal generator reproduces the characteristic exponent on cosines") {
  // For b = 0, sigma = s: A cos(xi x) = Re psi(s xi) cos(xi x)
  // - Im psi(s xi) sin(xi x), by substituting z -> s z in the jump
  // integrals. Quadrature-level agreement, measured deviations ~1e-11.
  const CoefficientField field = scaled_noise_field(0.8);
  const CylindricalNoiseSpec noise = CylindricalNoiseSpec::make(1.7, {0.5});
  const LevyMeasureSpec spec = LevyMeasureSpec::make(1.7, 0.5);
  for (const auto& [xi, xv] : {std::pair{1.0, 0.7}, std::pair{2.0, -0.4}, std::pair{0.5, 1.3}}) {
    const std::vector<double> freq{xi}, x{xv};
    const TestFunction f = cosine_wave(freq);
    const GeneratorEvalReport r = generator_gap(field, noise, f, x);
    const std::complex<double> psi = characteristic_exponent(spec, 0.8 * xi);
    const double expected = psi.real() * std::cos(xi * xv) - psi.imag() * std::sin(xi * xv);
    CHECK(std::fabs(r.alpha_value - expected) <= 1e-6 + r.quadrature_error_bound);
  }
}

TEST_CASE("nonlocal generator of cos at the origin is minus one across alpha") {
  // Re psi(1) = -1 for every (alpha, beta): the normalisation pins the
  // symbol at xi = 1.
  const CoefficientField pn = make_coefficient_preset(CoefficientPreset::pure_noise, 1);
  const std::vector<double> freq{1.0}, x{0.0};
  const TestFunction fcos = cosine_wave(freq);
  for (const double alpha : {1.9, 1.99}) {
    const CylindricalNoiseSpec noise = CylindricalNoiseSpec::make(alpha, {0.0});
    const GeneratorEvalReport r = generator_gap(pn, noise, fcos, x);
    CHECK(std::fabs(r.alpha_value + 1.0) <= 1e-7);
  }
}

TEST_CASE("report fields satisfy their exact identities") {
  const CoefficientField pn = make_coefficient_preset(CoefficientPreset::pure_noise, 1);
  const CylindricalNoiseSpec noise = CylindricalNoiseSpec::make(1.8, {0.4});
  const std::vector<double> freq{1.0}, x{0.6};
  const TestFunction fcos = cosine_wave(freq);
  const GeneratorEvalReport r = generator_gap(pn, noise, fcos, x);

  CHECK(r.gap == r.alpha_value - r.limit_value);
  CHECK(r.delta_split == 0.5);
  CHECK(r.alpha_value ==
        doctest::Approx(r.drift_term + r.inner_remainder + r.band_remainder + r.outer_difference)
            .epsilon(1e-12));
  CHECK(r.limit_value == doctest::Approx(apply_limit_generator(pn, fcos, x)).epsilon(1e-14));
  CHECK(apply_alpha_generator(pn, noise, fcos, x) == doctest::Approx(r.alpha_value).epsilon(1e-13));
  CHECK(r.convergence_bound > 0.0);
  CHECK(r.quadrature_error_bound > 0.0);
  CHECK(r.quadrature_error_bound < 1e-6);
}

TEST_CASE("the triangle bound dominates the gap wherever it is asserted") {
  const CoefficientField pn = make_coefficient_preset(CoefficientPreset::pure_noise, 1);
  const std::vector<double> x0{0.0}, x1{0.1};
  const std::vector<double> f1{1.0}, f2{2.0}, center{0.4};
  const TestFunction c1 = cosine_wave(f1);
  const TestFunction c2 = cosine_wave(f2);
  const TestFunction bump = gaussian_bump(center, 1.0);
  for (const double alpha : {1.9, 1.95, 1.99, 1.995}) {
    const CylindricalNoiseSpec n0 = CylindricalNoiseSpec::make(alpha, {0.0});
    const CylindricalNoiseSpec nb = CylindricalNoiseSpec::make(alpha, {0.2});
    for (const GeneratorEvalReport& r :
         {generator_gap(pn, n0, c1, x0), generator_gap(pn, n0, c2, x0),
          generator_gap(pn, nb, bump, x1)}) {
      CHECK(std::fabs(r.gap) <= r.convergence_bound + r.quadrature_error_bound + 1e-12);
    }
  }
}

TEST_CASE("generator gap at frequency two matches four minus two to the alpha") {
  // With f = cos(2x) at x = 0, beta = 0: gap = Re psi(2) + 4 = 4 - 2^alpha,
  // an exact closed form for the vanishing rate. Measured agreement ~6e-12.
  const CoefficientField pn = make_coefficient_preset(CoefficientPreset::pure_noise, 1);
  const std::vector<double> f2{2.0}, x0{0.0};
  const TestFunction c2 = cosine_wave(f2);
  std::vector<double> lx, ly;
  double prev = 1e9;
  for (const double alpha : {1.9, 1.95, 1.99, 1.995}) {
    const CylindricalNoiseSpec noise = CylindricalNoiseSpec::make(alpha, {0.0});
    const GeneratorEvalReport r = generator_gap(pn, noise, c2, x0);
    CHECK(r.gap == doctest::Approx(4.0 - std::pow(2.0, alpha)).epsilon(1e-7));
    CHECK(r.gap > 0.0);
    CHECK(r.gap < prev);
    prev = r.gap;
    lx.push_back(std::log(2.0 - alpha));
    ly.push_back(std::log(r.gap));
  }
  // log-log slope of an O(2 - alpha) quantity; 0.9896 for this grid.
  const LinearFit fit = least_squares_line(lx, ly);
  CHECK(fit.slope > 0.95);
  CHECK(fit.slope < 1.05);
}

TEST_CASE("the first-order constant of the frequency-two gap is four log two") {
  const CoefficientField pn = make_coefficient_preset(CoefficientPreset::pure_noise, 1);
  const std::vector<double> f2{2.0}, x0{0.0};
  const TestFunction c2 = cosine_wave(f2);
  const double four_ln_two = 4.0 * std::log(2.0);
  for (const double alpha : {1.995, 1.999}) {
    const CylindricalNoiseSpec noise = CylindricalNoiseSpec::make(alpha, {0.0});
    const GeneratorEvalReport r = generator_gap(pn, noise, c2, x0);
    CHECK(r.gap / (four_ln_two * (2.0 - alpha)) == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("gaussian bump gaps vanish monotonically as alpha approaches two") {
  // Measured 0.0241 / 0.0122 / 0.0025 / 0.0012 over this grid.
  const CoefficientField pn = make_coefficient_preset(CoefficientPreset::pure_noise, 1);
  const std::vector<double> center{0.4}, x{0.1};
  const TestFunction bump = gaussian_bump(center, 1.0);
  double prev = 1e9;
  for (const double alpha : {1.9, 1.95, 1.99, 1.995}) {
    const CylindricalNoiseSpec noise = CylindricalNoiseSpec::make(alpha, {0.2});
    const GeneratorEvalReport r = generator_gap(pn, noise, bump, x);
    CHECK(std::fabs(r.gap) < prev);
    prev = std::fabs(r.gap);
  }
  CHECK(prev < 0.002);
}

TEST_CASE("generator evaluation survives the top of the stability range") {
  // The closed-form deep tail keeps the inner integral well-posed even at
  // kMax, where the e^{(2-alpha)u} scale is 1e9.
  const CoefficientField pn = make_coefficient_preset(CoefficientPreset::pure_noise, 1);
  const std::vector<double> f2{2.0}, x0{0.0};
  const TestFunction c2 = cosine_wave(f2);
  const CylindricalNoiseSpec noise = CylindricalNoiseSpec::make(StabilityIndex::kMax, {0.3});
  const GeneratorEvalReport r = generator_gap(pn, noise, c2, x0);
  CHECK(r.alpha_value == doctest::Approx(-4.0).epsilon(1e-7));
  CHECK(std::fabs(r.gap) <= 1e-7);
}

TEST_CASE("skewness shifts the generator by the imaginary part of the symbol") {
  // At x = 0.7, f = cos, b = 0, sigma = 1:
  // A_beta f - A_0 f = -Im psi_beta(1) sin(0.7) exactly; this resolves a
  // beta effect of size ~(2 - alpha) that Monte Carlo cannot see.
  const CoefficientField pn = make_coefficient_preset(CoefficientPreset::pure_noise, 1);
  const std::vector<double> f1{1.0}, x{0.7};
  const TestFunction fcos = cosine_wave(f1);
  std::vector<double> diffs;
  for (const double alpha : {1.9, 1.95}) {
    const CylindricalNoiseSpec n0 = CylindricalNoiseSpec::make(alpha, {0.0});
    const CylindricalNoiseSpec n9 = CylindricalNoiseSpec::make(alpha, {0.9});
    const double diff =
        generator_gap(pn, n9, fcos, x).alpha_value - generator_gap(pn, n0, fcos, x).alpha_value;
    const std::complex<double> psi = characteristic_exponent(LevyMeasureSpec::make(alpha, 0.9), 1.0);
    CHECK(diff == doctest::Approx(-psi.imag() * std::sin(0.7)).epsilon(1e-6));
    diffs.push_back(diff);
  }
  CHECK(std::fabs(diffs[1]) >= 0.005);
  // The effect itself vanishes like 2 - alpha: halving (2 - alpha) halves it.
  CHECK(diffs[0] / diffs[1] == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("taylor remainder matches its small-z and direct evaluations") {
  const std::vector<double> f1{1.0}, x{0.4}, v{1.0};
  const TestFunction fcos = cosine_wave(f1);

  // z -> 0: remainder -> z^2 f''(x) / 2 without cancellation.
  const double z_small = 1e-8;
  CHECK(taylor_remainder(fcos, x, v, z_small) ==
        doctest::Approx(z_small * z_small * (-std::cos(0.4)) / 2.0).epsilon(1e-6));

  // Moderate z: agree with the direct f(x+z) - f(x) - z f'(x) form.
  for (const double z : {1e-3, 0.1, 1.0, 5.0}) {
    const double direct = std::cos(0.4 + z) - std::cos(0.4) + z * std::sin(0.4);
    CHECK(taylor_remainder(fcos, x, v, z) == doctest::Approx(direct).epsilon(1e-9));
  }

  // Multi-dimensional direction.
  const std::vector<double> f2{1.0, -0.5}, x2{0.3, 0.8}, v2{0.6, 1.1};
  const TestFunction g = cosine_wave(f2);
  const double z = 0.7;
  const double phase = 0.3 - 0.4;
  const double step = z * (0.6 - 0.5 * 1.1);
  // remainder = f(x + vz) - f(x) - z v.grad f, and v.grad f = -sin(phase)
  // times the phase step per unit z.
  const double direct2 = std::cos(phase + step) - std::cos(phase) + step * std::sin(phase);
  CHECK(taylor_remainder(g, x2, v2, z) == doctest::Approx(direct2).epsilon(1e-9));

  const std::vector<double> bad{0.1};
  CHECK_THROWS_AS(taylor_remainder(g, bad, v2, 0.5), ParameterDomainError);
}

TEST_CASE("the integral split point does not move the generator value") {
  const CoefficientField pn = make_coefficient_preset(CoefficientPreset::pure_noise, 1);
  const CylindricalNoiseSpec noise = CylindricalNoiseSpec::make(1.9, {0.3});
  const std::vector<double> f1{1.0}, x{0.7};
  const TestFunction fcos = cosine_wave(f1);
  const GeneratorEvalReport r25 = generator_gap(pn, noise, fcos, x, 0.25);
  const GeneratorEvalReport r50 = generator_gap(pn, noise, fcos, x, 0.5);
  const GeneratorEvalReport r90 = generator_gap(pn, noise, fcos, x, 0.9);
  CHECK(std::fabs(r25.alpha_value - r50.alpha_value) <=
        r25.quadrature_error_bound + r50.quadrature_error_bound);
  CHECK(std::fabs(r90.alpha_value - r50.alpha_value) <=
        r90.quadrature_error_bound + r50.quadrature_error_bound);
  // delta_split = 1 removes the band entirely.
  const GeneratorEvalReport r100 = generator_gap(pn, noise, fcos, x, 1.0);
  CHECK(r100.band_remainder == 0.0);
  CHECK(r100.gradient_band_term == 0.0);
  CHECK(std::fabs(r100.alpha_value - r50.alpha_value) <=
        r100.quadrature_error_bound + r50.quadrature_error_bound);
}

TEST_CASE("generator evaluation validates its inputs") {
  const CoefficientField pn = make_coefficient_preset(CoefficientPreset::pure_noise, 1);
  const CylindricalNoiseSpec noise = CylindricalNoiseSpec::make(1.8, {0.0});
  const CylindricalNoiseSpec noise2 = CylindricalNoiseSpec::make(1.8, {0.0, 0.0});
  const std::vector<double> f1{1.0}, x{0.0};
  const TestFunction fcos = cosine_wave(f1);

  CHECK_THROWS_AS(apply_alpha_generator(pn, noise2, fcos, x), ParameterDomainError);
  CHECK_THROWS_AS(apply_alpha_generator(pn, noise, fcos, x, 0.0), ParameterDomainError);
  CHECK_THROWS_AS(apply_alpha_generator(pn, noise, fcos, x, 1.5), ParameterDomainError);
  CHECK_THROWS_AS(apply_alpha_generator(pn, noise, fcos, x, 0.5, 0.0), ParameterDomainError);

  const std::vector<double> wrong{0.0, 0.0};
  CHECK_THROWS_AS(apply_alpha_generator(pn, noise, fcos, wrong), ParameterDomainError);

  // Unbounded test functions have no truncation point for the tail.
  TestFunction unbounded = cosine_wave(f1);
  unbounded.bounded = false;
  unbounded.sup_bound = 0.0;
  CHECK_THROWS_AS(apply_alpha_generator(pn, noise, unbounded, x), ParameterDomainError);

  TestFunction incomplete;
  incomplete.dimension = 1;
  CHECK_THROWS_AS(apply_limit_generator(pn, incomplete, x), ParameterDomainError);
}

TEST_CASE("kolmogorov residual accepts the heat semigroup") {
  // u(t, x) = E cos(x + sqrt(2) W_{T-t}) solves the limit equation for
  // pure noise; the residual must vanish within its standard error.
  // Measured -8.8e-5 with se 0.021 for this key.
  const CoefficientField pn = make_coefficient_preset(CoefficientPreset::pure_noise, 1);
  const std::vector<double> f1{1.0}, x{0.3};
  const TestFunction fcos = cosine_wave(f1);
  const TimeGrid grid(1.0, 64);
  const KolmogorovResidual r = kolmogorov_residual(pn, fcos, 0.5, x, grid, 2000, {171, 0});
  CHECK(std::fabs(r.residual) <= 3.0 * r.std_error);
  CHECK(r.std_error <= 0.05);
  CHECK_FALSE(r.inconclusive);
}

TEST_CASE("kolmogorov residual accepts the ou semigroup at tighter error") {
  // Mean-reverting drift; 1e4 paths push the standard error below 0.01.
  // Measured residual 0.0069 with se 0.0047 for this key.
  const CoefficientField ou = make_coefficient_preset(CoefficientPreset::ou_type, 1);
  const std::vector<double> f1{1.0}, x{0.3};
  const TestFunction fcos = cosine_wave(f1);
  const TimeGrid grid(1.0, 256);
  const KolmogorovResidual r = kolmogorov_residual(ou, fcos, 0.5, x, grid, 10000, {42, 7});
  CHECK(std::fabs(r.residual) <= 3.0 * r.std_error);
  CHECK(r.std_error <= 0.01);
  CHECK_FALSE(r.inconclusive);
}

TEST_CASE("kolmogorov residual validates its inputs") {
  const CoefficientField pn = make_coefficient_preset(CoefficientPreset::pure_noise, 1);
  const std::vector<double> f1{1.0}, x{0.3};
  const TestFunction fcos = cosine_wave(f1);
  const TimeGrid grid(1.0, 16);

  CHECK_THROWS_AS(kolmogorov_residual(pn, fcos, 1.0, x, grid, 100, {1, 1}), ParameterDomainError);
  CHECK_THROWS_AS(kolmogorov_residual(pn, fcos, -0.1, x, grid, 100, {1, 1}), ParameterDomainError);
  CHECK_THROWS_AS(kolmogorov_residual(pn, fcos, 0.5, x, grid, 100, {1, 1}, 0.0),
                  ParameterDomainError);
  CHECK_THROWS_AS(kolmogorov_residual(pn, fcos, 0.5, x, grid, 39, {1, 1}), InsufficientDataError);

  TestFunction unbounded = cosine_wave(f1);
  unbounded.bounded = false;
  CHECK_THROWS_AS(kolmogorov_residual(pn, unbounded, 0.5, x, grid, 100, {1, 1}),
                  ParameterDomainError);
}
