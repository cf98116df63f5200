#include "oracles.hpp"
#include "waist/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace waist;

TEST_CASE("adaptive simpson on smooth and kinked integrands") {
  CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
  CHECK(integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0) == doctest::Approx(0.29).epsilon(1e-12));
  CHECK(integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-10) == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("adaptive simpson handles reversed and empty intervals") {
  CHECK(integrate([](double x) { return x; }, 1.0, 0.0) == doctest::Approx(-0.5));
  CHECK(integrate([](double x) { return x; }, 2.0, 2.0) == 0.0);
}

TEST_CASE("adaptive simpson reports non-convergence") {
  const auto r = adaptive_simpson([](double x) { return std::sin(1.0 / x); }, 1e-9, 1.0, 1e-15, 64);
  CHECK_FALSE(r.converged);
}

TEST_CASE("gauss legendre integrates polynomials exactly") {
  for (int order : {4, 6, 8, 10, 12, 16, 20}) {
    const auto rule = gauss_legendre(order, -1.0, 2.0);
    const int degree = 2 * order - 1;
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], degree);
    const double exact = (std::pow(2.0, degree + 1) - std::pow(-1.0, degree + 1)) / (degree + 1);
    CHECK(sum == doctest::Approx(exact).epsilon(1e-11));
    CHECK(rule.nodes.size() == static_cast<std::size_t>(order));
  }
  CHECK_THROWS_AS(gauss_legendre(5, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("midpoint oracle agrees with adaptive simpson") {
  auto f = [](double x) { return std::pow(std::sin(x), 3); };
  CHECK(oracle::midpoint(f, 0.2, 2.9, 200000) == doctest::Approx(integrate(f, 0.2, 2.9)).epsilon(1e-9));
}
