#include "oracles.hpp"
#include "waist/modulus.hpp"

#include <doctest.h>

#include <cmath>

using namespace waist;

TEST_CASE("euclidean closed form") {
  const auto d = ModulusCurve::euclidean();
  CHECK(d(0.0) == 0.0);
  CHECK(d(1.0) == doctest::Approx(1.0 - std::sqrt(0.75)));
  CHECK(d(2.0) == doctest::Approx(1.0));
  CHECK(d.source() == ModulusSource::analytic);
}

TEST_CASE("numeric modulus matches the brute-force plane search") {
  for (double p : {2.0, 3.0, 4.0}) {
    const Norm n = Norm::lp(p, 2);
    for (double eps : {0.3, 0.8, 1.5}) {
      CAPTURE(p);
      CAPTURE(eps);
      const double brute = oracle::lp_plane_modulus(p, eps, 400);
      const double numeric = modulus_of_convexity(n, eps, ModulusMethod::numeric, 40000);
      CHECK(numeric == doctest::Approx(brute).epsilon(2e-3));
      // The analytic curve is exact for p >= 2.
      CHECK(modulus_of_convexity(n, eps, ModulusMethod::analytic) == doctest::Approx(brute).epsilon(2e-3));
    }
  }
}

TEST_CASE("numeric modulus is an upper estimate attained by a feasible pair") {
  const Norm n = Norm::lp(4.0, 3);
  const auto w = numeric_modulus_witness(n, 0.7, 20000, 3);
  CHECK(n(w.x) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(n(w.y) == doctest::Approx(1.0).epsilon(1e-12));
  Point diff(3), mid(3);
  for (int c = 0; c < 3; ++c) {
    diff[c] = w.x[c] - w.y[c];
    mid[c] = 0.5 * (w.x[c] + w.y[c]);
  }
  CHECK(n(diff) == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(w.value == doctest::Approx(1.0 - n(mid)).epsilon(1e-12));
  CHECK(w.value >= ModulusCurve::analytic(n)(0.7) - 1e-12);
}

TEST_CASE("quadratic lower estimate for 1 < p < 2 stays below the numeric value") {
  const Norm n = Norm::lp(1.5, 3);
  const auto lower = ModulusCurve::analytic(n);
  CHECK(lower.label().rfind("lp-quadratic-lower", 0) == 0);
  for (double eps : {0.2, 0.6, 1.2, 1.9}) CHECK(lower(eps) <= modulus_of_convexity(n, eps, ModulusMethod::numeric, 20000));
}

TEST_CASE("numeric curves are monotone, start at zero and interpolate") {
  const Norm n = Norm::parse("reg:lp:1.5:2:w=0.05:d=0.01");
  const auto c = ModulusCurve::numeric(n, {0.25, 0.5, 1.0, 1.5, 2.0}, 4000);
  CHECK(c.source() == ModulusSource::numeric_lower_estimate);
  CHECK(c(0.0) == 0.0);
  for (std::size_t i = 1; i < c.values().size(); ++i) CHECK(c.values()[i] >= c.values()[i - 1]);
  CHECK(c(0.75) == doctest::Approx(0.5 * (c(0.5) + c(1.0))));
  CHECK(c(1.0) > 0.0);
  CHECK_THROWS_AS(ModulusCurve::analytic(n), std::invalid_argument);
  CHECK_THROWS_AS(ModulusCurve::numeric(n, {0.5, 0.5}, 100), std::invalid_argument);
}

TEST_CASE("modulus domain checks") {
  CHECK_THROWS(modulus_of_convexity(Norm::euclidean(2), 2.5, ModulusMethod::numeric));
  CHECK_THROWS(modulus_of_convexity(Norm::euclidean(2), -0.1, ModulusMethod::analytic));
  CHECK(modulus_of_convexity(Norm::euclidean(2), 0.0, ModulusMethod::numeric) == doctest::Approx(0.0).epsilon(1e-12));
}
