#include "oracles.hpp"
#include "waist/bounds.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace waist;

TEST_CASE("reference value of w for the round 2-sphere") {
  const auto w = waist_bound_w({2, 1, 0.5});
  CHECK(w.value == doctest::Approx(0.007518).epsilon(1e-4));
  CHECK(w.kind == BoundKind::waist_w);
  CHECK(w.modulus_label == "euclidean");
}

TEST_CASE("psi angles and F, G integrals against the midpoint oracle") {
  for (int k : {1, 2, 3, 5}) {
    for (double eps : {0.05, 0.3, 1.0, 2.0}) {
      const auto psi = psi_angles(k, eps);
      const auto ref = oracle::fg(k, eps, std::numbers::pi, 200000);
      CHECK(psi.psi1 == doctest::Approx(ref.psi1).epsilon(1e-14));
      CHECK(psi.psi2 == doctest::Approx(ref.psi2).epsilon(1e-14));
      const auto fg = fg_integrals(k, eps);
      CHECK(fg.F == doctest::Approx(ref.F).epsilon(1e-8));
      CHECK(fg.G == doctest::Approx(ref.G).epsilon(1e-8));
    }
  }
  // k = 1: F and G are lengths.
  const auto fg = fg_integrals(1, 0.5, FUpper::half_pi);
  const auto psi = psi_angles(1, 0.5);
  CHECK(fg.F == doctest::Approx(std::numbers::pi / 2 - psi.psi2));
  CHECK(fg.G == doctest::Approx(psi.psi1));
}

TEST_CASE("psi angles domain") {
  CHECK_THROWS_AS(psi_angles(1, 3.0), std::domain_error);
  CHECK_THROWS_AS(psi_angles(1, -0.1), std::domain_error);
  CHECK(psi_angles(1, 0.0).psi1 == 0.0);
}

TEST_CASE("w against the oracle on a mixed grid, both F limits") {
  for (int n : {2, 5, 20}) {
    for (int k = 1; k <= std::min(n, 3); ++k) {
      for (double eps : {0.1, 0.7, 1.9}) {
        for (auto fu : {FUpper::pi, FUpper::half_pi}) {
          const double upper = fu == FUpper::pi ? std::numbers::pi : std::numbers::pi / 2;
          const double ref = oracle::waist_w(n, k, eps, upper, 100000);
          CHECK(waist_bound_w({n, k, eps, ModulusCurve::euclidean(), fu}).value == doctest::Approx(ref).epsilon(1e-7));
        }
      }
    }
  }
}

TEST_CASE("w is increasing in eps, lies in [0, 1] and vanishes at 0") {
  for (int n : {2, 4, 9}) {
    double prev = 0.0;
    for (double eps = 0.05; eps <= 2.0; eps += 0.05) {
      const double w = waist_bound_w({n, 1, eps}).value;
      CHECK(w > prev);
      CHECK(w <= 1.0);
      prev = w;
    }
  }
  CHECK(waist_bound_w({3, 1, 0.0}).value == 0.0);
  CHECK_THROWS_AS(waist_bound_w({3, 1, 2.5}), std::domain_error);
  CHECK_THROWS_AS(waist_bound_w({3, 4, 0.5}), std::invalid_argument);
}

TEST_CASE("n = k drops the modulus factor") {
  const auto zero = ModulusCurve::tabulated({0.0, 2.0}, {0.0, 0.0}, "zero");
  CHECK(waist_bound_w({3, 3, 0.4, zero}).value == doctest::Approx(waist_bound_w({3, 3, 0.4}).value));
}

TEST_CASE("tube volume has closed forms") {
  // n = 2, k = 1: band around the equator has measure sin r.
  for (double r : {0.1, 0.5, 1.2}) CHECK(sphere_tube_volume(2, 1, r) == doctest::Approx(std::sin(r)).epsilon(1e-12));
  // n = 2, k = 2: two polar caps, 1 - cos r.
  CHECK(sphere_tube_volume(2, 2, 0.7) == doctest::Approx(1.0 - std::cos(0.7)).epsilon(1e-12));
  CHECK(sphere_tube_volume(6, 2, 0.4) == doctest::Approx(oracle::tube(6, 2, 0.4, 400000)).epsilon(1e-9));
  CHECK(sphere_tube_volume(3, 1, std::numbers::pi / 2) == 1.0);
  CHECK_THROWS_AS(sphere_tube_volume(3, 1, 2.0), std::domain_error);
}

TEST_CASE("w2 projection bound") {
  const double r = 0.5 / 3.0;
  CHECK(projection_bound_w2(2, 1, 0.5).value == doctest::Approx(std::pow(3.0, -3.0) * std::sin(r)).epsilon(1e-12));
  const double chord = 2.0 * std::asin(r / 2.0);
  CHECK(projection_bound_w2(2, 1, 0.5, TubeRadius::chordal).value ==
        doctest::Approx(std::pow(3.0, -3.0) * std::sin(chord)).epsilon(1e-12));
  CHECK(projection_bound_w2(6, 1, 0.5).value < 1e-6);
}

TEST_CASE("Gromov-Milman bound reference values") {
  const auto e = ModulusCurve::euclidean();
  const double theta = 1.0 - std::pow(0.5, 1.0 / 99.0);
  CHECK(theta == doctest::Approx(0.0069776).epsilon(1e-4));
  const double a = gromov_milman_exponent(100, 1.2, e);
  CHECK(a == doctest::Approx(oracle::euclidean_delta(0.15 - theta)).epsilon(1e-12));
  CHECK(a == doctest::Approx(0.00256).epsilon(5e-3));
  CHECK(gromov_milman_bound(100, 1.2, e).value == doctest::Approx(1.0 - std::exp(-100 * a)).epsilon(1e-12));
  CHECK(gromov_milman_bound(100, 1.2, e).value == doctest::Approx(0.226).epsilon(5e-3));
  // Clamped to zero for small eps.
  CHECK(gromov_milman_exponent(3, 0.5, e) == 0.0);
  CHECK_THROWS_AS(gromov_milman_exponent(1, 0.5, e), std::invalid_argument);
}

TEST_CASE("bound table columns and csv header") {
  const auto rows = bound_table(2, 1, {0.25, 0.5}, ModulusCurve::euclidean());
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].w == doctest::Approx(waist_bound_w({2, 1, 0.5}).value));
  CHECK(rows[1].b_exponent == doctest::Approx(2.0 * oracle::euclidean_delta(0.25)));
  const auto csv = bound_table_csv(rows, 2, 1, FUpper::pi);
  CHECK(csv.rfind("eps,w,w2,gm,b_exponent,n,k,f_upper\n", 0) == 0);
  CHECK(csv.find("\n0.5,") != std::string::npos);
  // n = 1 has no isoperimetric comparison.
  CHECK(bound_table(1, 1, {0.5}, ModulusCurve::euclidean())[0].gm == 0.0);
}

TEST_CASE("large n drives w to 1, small radii separate different k") {
  CHECK(waist_bound_w({1000, 1, 0.5}).value > 0.999);
  const auto e = ModulusCurve::euclidean();
  CHECK(waist_ratio_loglog_slope(3, 1, 2, e) == doctest::Approx(-1.0).epsilon(0.1));
  CHECK(waist_ratio_loglog_slope(3, 1, 3, e) == doctest::Approx(-2.0).epsilon(0.05));
}

TEST_CASE("f-upper parsing") {
  CHECK(parse_f_upper("pi") == FUpper::pi);
  CHECK(parse_f_upper("halfpi") == FUpper::half_pi);
  CHECK(to_string(FUpper::half_pi) == "halfpi");
  CHECK_THROWS_AS(parse_f_upper("tau"), std::invalid_argument);
}
