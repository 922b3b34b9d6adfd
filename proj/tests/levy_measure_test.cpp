#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "stablesde/errors.hpp"
#include "stablesde/levy_measure.hpp"
#include "stablesde/special_functions.hpp"

using namespace stablesde;

TEST_CASE("measure construction splits the normalising constant by skewness") {
  auto m = make_measure(1.5, 0.0);
  CHECK(m.normalising_constant() == doctest::Approx(0.5984134206021490169).epsilon(1e-12));
  CHECK(m.c_plus() == doctest::Approx(m.normalising_constant() / 2.0).epsilon(1e-15));
  CHECK(m.c_minus() == doctest::Approx(m.c_plus()).epsilon(1e-15));

  auto onesided = make_measure(1.5, 1.0);
  CHECK(onesided.c_minus() == 0.0);
  CHECK(onesided.c_plus() == doctest::Approx(onesided.normalising_constant()).epsilon(1e-15));

  auto skew = make_measure(1.7, -0.4);
  CHECK(skew.c_plus() + skew.c_minus() ==
        doctest::Approx(skew.normalising_constant()).epsilon(1e-15));
  CHECK(skew.c_plus() - skew.c_minus() ==
        doctest::Approx(-0.4 * skew.normalising_constant()).epsilon(1e-13));
}

TEST_CASE("measure construction rejects out-of-range parameters naming the field") {
  for (double a : {1.0, 2.0, 0.9, 2.1}) {
    try {
      make_measure(a, 0.0);
      FAIL("expected rejection of alpha = ", a);
    } catch (const ParameterDomainError& e) {
      CHECK(e.field() == "alpha");
    }
  }
  try {
    make_measure(1.5, 1.5);
    FAIL("expected rejection of beta");
  } catch (const ParameterDomainError& e) {
    CHECK(e.field() == "beta");
  }
}

TEST_CASE("density follows the two-sided power law") {
  auto m = make_measure(1.6, 0.3);
  CHECK(m.density(0.7) ==
        doctest::Approx(m.c_plus() * std::pow(0.7, -2.6)).epsilon(1e-14));
  CHECK(m.density(-0.7) ==
        doctest::Approx(m.c_minus() * std::pow(0.7, -2.6)).epsilon(1e-14));
  CHECK_THROWS_AS(m.density(0.0), ParameterDomainError);
}

TEST_CASE("closed-form moments match independent high-precision integration") {
  // References computed by 40-digit quadrature of the density itself.
  auto m = make_measure(1.6, 0.3);
  CHECK(truncated_second_moment(m, 0.5) ==
        doctest::Approx(1.013558496872899884).epsilon(1e-12));
  CHECK(tail_moment(m, 0.5, 0.0) == doctest::Approx(1.013558496872899886).epsilon(1e-12));
  CHECK(tail_moment(m, 0.5, 1.3) == doctest::Approx(2.195374181152540984).epsilon(1e-12));
  CHECK(tail_mean(m, 0.7) == doctest::Approx(0.3313080502762924164).epsilon(1e-12));
}

TEST_CASE("moment values at the reference points") {
  auto m = make_measure(1.5, 0.0);
  CHECK(truncated_second_moment(m, 1.0) == doctest::Approx(1.196826).epsilon(1e-6));
  CHECK(tail_moment(m, 1.0, 1.0) == doctest::Approx(1.196826).epsilon(1e-6));
  CHECK(tail_moment(m, 2.0, 0.0) == doctest::Approx(0.141047).epsilon(1e-5));

  auto one = make_measure(1.5, 1.0);
  CHECK(tail_mean(one, 1.0) == doctest::Approx(1.196826).epsilon(1e-6));
  auto neg = make_measure(1.5, -0.5);
  CHECK(tail_mean(neg, 1.0) == doctest::Approx(-0.598413).epsilon(1e-6));
  CHECK(tail_mean(make_measure(1.5, 0.0), 0.3) == 0.0);
}

TEST_CASE("moment domain errors") {
  auto m = make_measure(1.5, 0.0);
  CHECK_THROWS_AS(truncated_second_moment(m, 0.0), ParameterDomainError);
  CHECK_THROWS_AS(truncated_second_moment(m, -1.0), ParameterDomainError);
  CHECK_THROWS_AS(tail_moment(m, 1.0, 1.5), DivergentIntegralError);
  CHECK_THROWS_AS(tail_moment(m, 1.0, 1.7), DivergentIntegralError);
  CHECK_THROWS_AS(tail_moment(m, 1.0, -0.1), ParameterDomainError);
  CHECK_THROWS_AS(tail_mean(m, 0.0), ParameterDomainError);
}

TEST_CASE("moments are beta-independent, tail mean is odd in beta") {
  auto p = make_measure(1.7, 0.7);
  auto n = make_measure(1.7, -0.7);
  CHECK(truncated_second_moment(p, 0.4) == truncated_second_moment(n, 0.4));
  CHECK(tail_moment(p, 0.4, 1.2) == tail_moment(n, 0.4, 1.2));
  CHECK(tail_mean(p, 0.4) == doctest::Approx(-tail_mean(n, 0.4)).epsilon(1e-15));
}

TEST_CASE("truncated second moment scales exactly in delta") {
  auto m = make_measure(1.6, 0.2);
  const double ref = truncated_second_moment(m, 1.0);
  for (double d : {0.1, 0.5, 2.0}) {
    CHECK(truncated_second_moment(m, d) * std::pow(d, 1.6 - 2.0) ==
          doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("limit constants at the diffusive end") {
  CHECK(std::fabs(truncated_second_moment(make_measure(1.99, 0.0), 1.0) - 2.0) <= 0.05);
  CHECK(std::fabs(truncated_second_moment(make_measure(1.999, 0.0), 1.0) - 2.0) <= 0.005);
  CHECK(std::fabs(truncated_second_moment(make_measure(1.99, 0.7), 1.0) - 2.0) <= 0.03);
  CHECK(tail_moment(make_measure(1.99, 0.0), 1.0, 1.0) <= 0.05);
}

TEST_CASE("combined deviation at delta = 1 vanishes linearly in 2 - alpha") {
  double prev_gap = 1e9;
  for (double a : {1.5, 1.9, 1.99, 1.995}) {
    auto m = make_measure(a, 0.0);
    const double dev =
        std::fabs(truncated_second_moment(m, 1.0) - 2.0) + tail_moment(m, 1.0, 1.0);
    const double ratio = dev / (2.0 - a);
    CHECK(ratio > 1.0);
    CHECK(ratio < 6.0);
    CHECK(dev < prev_gap);
    prev_gap = dev;
  }
}

TEST_CASE("uniform moment bound over a dense grid") {
  for (int k = 0; k <= 40; ++k) {
    const double a = 1.5 + 0.0124 * k;
    auto m = make_measure(a, 0.4);
    CHECK(truncated_second_moment(m, 1.0) + tail_moment(m, 0.5, 1.0) < 10.0);
  }
}

TEST_CASE("quadrature oracle reproduces every closed form") {
  for (double a : {1.51, 1.75, 1.99}) {
    for (double b : {0.0, 0.7}) {
      auto m = make_measure(a, b);
      for (double d : {0.1, 1.0}) {
        auto inner = quadrature_moment(m, d, 2.0, MomentRegion::inner, false);
        CHECK(inner.value ==
              doctest::Approx(truncated_second_moment(m, d)).epsilon(1e-8));
      }
      for (double d : {0.5, 1.0}) {
        for (double p : {0.0, 1.0}) {
          auto outer = quadrature_moment(m, d, p, MomentRegion::outer, false);
          CHECK(outer.value == doctest::Approx(tail_moment(m, d, p)).epsilon(1e-8));
        }
        auto signed_outer = quadrature_moment(m, d, 1.0, MomentRegion::outer, true);
        if (b == 0.0) {
          CHECK(std::fabs(signed_outer.value) <= 1e-10);
        } else {
          CHECK(signed_outer.value == doctest::Approx(tail_mean(m, d)).epsilon(1e-8));
        }
      }
    }
  }
  auto half = quadrature_moment(make_measure(1.5, 0.0), 0.5, 2.0, MomentRegion::inner, false);
  CHECK(half.value == doctest::Approx(0.846284).epsilon(1e-5));
}

TEST_CASE("characteristic exponent closed form and symmetries") {
  auto sym = make_measure(1.5, 0.0);
  auto psi1 = characteristic_exponent(sym, 1.0);
  CHECK(psi1.real() == -1.0);
  CHECK(psi1.imag() == 0.0);
  CHECK(characteristic_exponent(sym, 0.0) == std::complex<double>(0.0, 0.0));
  for (double xi : {0.5, 2.0}) {
    CHECK(characteristic_exponent(sym, xi).imag() == 0.0);
  }

  auto skew = make_measure(1.7, 0.6);
  auto plus = characteristic_exponent(skew, 1.3);
  auto minus = characteristic_exponent(skew, -1.3);
  CHECK(minus.real() == doctest::Approx(plus.real()).epsilon(1e-15));
  CHECK(minus.imag() == doctest::Approx(-plus.imag()).epsilon(1e-15));
}

TEST_CASE("characteristic exponent reference values") {
  auto a = characteristic_exponent(make_measure(1.6, 0.5), 2.0);
  CHECK(a.real() == doctest::Approx(-3.031433133020796165).epsilon(1e-12));
  CHECK(a.imag() == doctest::Approx(-0.2096335762021535397).epsilon(1e-12));
  auto b = characteristic_exponent(make_measure(1.9, -0.9), 0.5);
  CHECK(b.real() == doctest::Approx(-0.2679433656340732911).epsilon(1e-12));
  CHECK(b.imag() == doctest::Approx(-0.05279822847103173552).epsilon(1e-12));
}

TEST_CASE("characteristic exponent approaches the variance-2 Gaussian limit") {
  auto near = make_measure(1.995, 0.5);
  auto psi = characteristic_exponent(near, 2.0);
  CHECK(std::fabs(psi.real() + 4.0) <= 0.02);
  CHECK(std::fabs(psi.imag()) <= 0.01);
}

TEST_CASE("cylindrical spec wires one measure per coordinate") {
  auto noise = CylindricalNoiseSpec::make(1.7, {0.2, -0.2, 0.0});
  CHECK(noise.dimension() == 3);
  CHECK(noise.alpha() == 1.7);
  CHECK(noise.component(0).beta() == 0.2);
  CHECK(noise.component(1).beta() == -0.2);
  CHECK(noise.component(2).beta() == 0.0);
  CHECK_THROWS_AS(CylindricalNoiseSpec::make(1.7, {}), ParameterDomainError);
  CHECK_THROWS_AS(CylindricalNoiseSpec::make(2.0, {0.0}), ParameterDomainError);
}
