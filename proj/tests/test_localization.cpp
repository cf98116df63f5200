#include "oracles.hpp"
#include "waist/localization.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace waist;

namespace {

constexpr double pi = std::numbers::pi;

ArcDensity cos_density(int m, std::size_t points, bool tabulate) {
  const Arc arc = Arc::round(-pi / 2 + 0.1, pi / 2 - 0.1);
  const auto grid = uniform_grid(arc.lo(), arc.hi(), points);
  auto f = [m](double t) { return std::pow(std::cos(t), m); };
  if (!tabulate) return ArcDensity::from_function(arc, grid, f, m, ModulusCurve::euclidean());
  std::vector<double> values;
  for (double t : grid) values.push_back(f(t));
  return ArcDensity::tabulated(arc, grid, values, m, ModulusCurve::euclidean());
}

}  // namespace

TEST_CASE("arc geometry") {
  const Arc round = Arc::round(0.0, 2.0);
  CHECK(round.distance(0.0, 1.0) == doctest::Approx(2.0 * std::sin(0.5)));
  CHECK(round.midpoint(0.2, 1.0) == doctest::Approx(0.6));
  CHECK(round.nu_weight(0.3) == 1.0);
  const Arc lp(Norm::lp(4.0, 2), {1.0, 0.0}, {0.0, 1.0}, 0.0, 1.5);
  const auto p = lp.point(0.7);
  CHECK(Norm::lp(4.0, 2)(p) == doctest::Approx(1.0));
  // The projected midpoint lies on the ray through p(a) + p(b).
  const auto a = lp.point(0.1), b = lp.point(1.2), m = lp.point(lp.midpoint(0.1, 1.2));
  CHECK((a[0] + b[0]) * m[1] == doctest::Approx((a[1] + b[1]) * m[0]));
  CHECK_THROWS_AS(Arc::round(0.0, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(Arc(Norm::euclidean(2), {1.0, 0.0}, {2.0, 0.0}, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("densities are normalized by the trapezoid rule") {
  const auto d = cos_density(2, 1001, false);
  CHECK(d.trapezoid_mass() == doctest::Approx(1.0).epsilon(1e-12));
  const auto t = cos_density(2, 1001, true);
  CHECK(t.trapezoid_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.interpolated());
  CHECK_FALSE(d.interpolated());
  CHECK_THROWS_AS(cos_density(0, 10, false), std::invalid_argument);
}

TEST_CASE("cosine density is weakly concave (equality case)") {
  for (bool tab : {false, true}) {
    const auto d = cos_density(1, 1000, tab);
    const auto r = is_weakly_concave(d);
    CHECK(r.weakly_concave);
    CHECK(r.pairs_checked == 1000 * 999 / 2);
    CHECK(std::abs(r.worst_margin) < 1e-5);
  }
  const auto d3 = cos_density(3, 300, false);
  CHECK(is_weakly_concave(d3).weakly_concave);
}

TEST_CASE("constant density on a round arc is not weakly concave") {
  const Arc arc = Arc::round(-1.0, 1.0);
  const auto grid = uniform_grid(-1.0, 1.0, 101);
  const auto d = ArcDensity::tabulated(arc, grid, std::vector<double>(101, 1.0), 2, ModulusCurve::euclidean());
  const auto r = is_weakly_concave(d);
  CHECK_FALSE(r.weakly_concave);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->first < r.witness->second);
  // The largest violation sits at the endpoints.
  CHECK(weak_concavity_margin(d, -1.0, 1.0) == doctest::Approx(r.worst_margin));
  CHECK(weak_concavity_margin(d, 0.3, 0.3) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("weak concavity needs a real grid") {
  const auto d = ArcDensity::tabulated(Arc::round(0.0, 1.0), {0.0, 1.0}, {1.0, 1.0}, 1, ModulusCurve::euclidean());
  CHECK_THROWS_AS(is_weakly_concave(d), std::invalid_argument);
  CHECK_THROWS_AS(ArcDensity::tabulated(Arc::round(0.0, 1.0), {0.0, 0.0, 1.0}, {1, 1, 1}, 1, ModulusCurve::euclidean()),
                  std::invalid_argument);
}

TEST_CASE("maximum structure") {
  const auto c = max_structure_check(cos_density(2, 1001, false));
  CHECK(c.ok());
  CHECK(c.max_index == 500);
  CHECK(c.local_minima == 0);

  const Arc half = Arc::round(0.0, pi);
  const auto grid = uniform_grid(0.0, pi, 181);
  const auto s = max_structure_check(
      ArcDensity::from_function(half, grid, [](double t) { return std::sin(t); }, 1, ModulusCurve::euclidean()));
  CHECK(s.ok());
  CHECK(grid[s.max_index] == doctest::Approx(pi / 2));

  // A valley is reported.
  std::vector<double> w;
  for (double t : grid) w.push_back(1.5 + std::cos(2 * t));
  const auto v = max_structure_check(ArcDensity::tabulated(half, grid, w, 1, ModulusCurve::euclidean()));
  CHECK(v.local_minima == 1);
  CHECK_FALSE(v.unique_max);
}

TEST_CASE("decay bound") {
  const auto d = cos_density(2, 1001, false);
  const auto r = decay_bound_check(d, 500, 0.2);
  CHECK(r.holds);
  CHECK_FALSE(r.vacuous);
  CHECK(r.checked > 0);
  const auto big = decay_bound_check(d, 500, 1.5);
  CHECK(big.vacuous);
  CHECK(big.holds);
  CHECK_THROWS_AS(decay_bound_check(d, 10, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(decay_bound_check(d, 500, 0.0), std::invalid_argument);
}

TEST_CASE("needle ratio and ball mass for a cosine needle") {
  const int n = 3;
  const Arc arc = Arc::round(-pi / 2, pi / 2);
  const auto d = ArcDensity::from_function(arc, uniform_grid(arc.lo(), arc.hi(), 1001),
                                           [](double t) { return std::pow(std::cos(t), 2); }, n - 1,
                                           ModulusCurve::euclidean());
  const double eps = 0.3;
  const auto r = needle_ratio_and_ball(d, eps, n, 1);
  CHECK(r.z == doctest::Approx(0.0).epsilon(1e-9));
  // Closed forms: the eps-ball is |t| < 2 asin(eps/2); cos^2 integrates to (t + sin t cos t)/2.
  auto cdf = [](double t) { return 0.5 * (t + std::sin(t) * std::cos(t)); };
  const double t1 = 2 * std::asin(eps / 2), t2 = 2 * std::asin(eps);
  const double total = cdf(pi / 2) - cdf(-pi / 2);
  const double ball = cdf(t1) - cdf(-t1);
  CHECK(r.ball_mass == doctest::Approx(ball / total).epsilon(1e-10));
  CHECK(r.ratio == doctest::Approx((total - (cdf(t2) - cdf(-t2))) / ball).epsilon(1e-10));
  CHECK(r.ratio_holds());
  CHECK(r.ball_holds());
  CHECK(r.ball_bound == doctest::Approx(waist_bound_w({n, 1, eps}).value));
  // eps beyond the diameter empties the complement.
  CHECK(needle_ratio_and_ball(d, 1.5, n, 1).ratio == 0.0);
  CHECK_THROWS_AS(needle_ratio_and_ball(d, eps, 4, 1), std::invalid_argument);
}

TEST_CASE("random generator produces weakly concave densities") {
  const std::vector<Norm> norms{Norm::euclidean(2), Norm::lp(1.5, 2), Norm::lp(4.0, 2)};
  for (const auto& norm : norms) {
    const auto delta = ModulusCurve::analytic(norm);
    for (std::uint64_t i = 0; i < 40; ++i) {
      const auto d = random_weakly_concave(norm, delta, 1 + static_cast<int>(i % 7), 151, 17, i);
      CAPTURE(i);
      CHECK(is_weakly_concave(d).weakly_concave);
      CHECK(max_structure_check(d).ok());
    }
  }
}

TEST_CASE("needle lemma chain on random densities") {
  NeedleSuiteOptions opt;
  opt.trials = 300;
  opt.seed = 5;
  opt.grid_size = 201;
  opt.concavity_stride = 3;
  opt.norms = {Norm::euclidean(2), Norm::lp(1.5, 2), Norm::lp(4.0, 2)};
  const auto reports = run_needle_suite(opt);
  REQUIRE(reports.size() == 5);
  for (const auto& r : reports) {
    CAPTURE(r.lemma);
    CHECK(r.violations == 0);
    CHECK(r.trials == (r.lemma == "weak-concavity" ? 100u : 300u));
  }
  const auto again = run_needle_suite(opt);
  for (std::size_t i = 0; i < reports.size(); ++i) CHECK(again[i].worst_margin == reports[i].worst_margin);
  const auto j = to_json(reports[3]);
  CHECK(j["lemma"] == "ratio");
  CHECK(j.contains("worst_margin"));
}

TEST_CASE("k = 2 cap needles satisfy the ratio and ball bounds") {
  for (std::uint64_t i = 0; i < 4; ++i) {
    const int m = 1 + static_cast<int>(i % 3);
    const auto needle = random_cap_needle(m, 3, i);
    const auto r = cap_needle_ratio_and_ball(needle, 0.3, m + 2);
    CAPTURE(i);
    CHECK(r.ratio_holds());
    CHECK(r.ball_holds());
    CHECK(r.ball_mass > 0.0);
    CHECK(r.ball_mass < 1.0);
  }
}

TEST_CASE("uniform cap needle: masses are cap area ratios") {
  CapNeedle cap;
  cap.radius = 1.0;
  cap.functionals = {{0.0, 0.0, 1.0}};
  cap.m = 1;
  // Density x_2 on the cap of colatitude < 1 around the pole; max at the pole.
  const double eps = 0.4;
  const auto r = cap_needle_ratio_and_ball(cap, eps, 3);
  auto mass = [](double t) { return 0.5 * std::sin(t) * std::sin(t); };  // integral of cos t sin t
  const double t1 = 2 * std::asin(eps / 2);
  CHECK(r.ball_mass == doctest::Approx(mass(t1) / mass(1.0)).epsilon(1e-8));
}

TEST_CASE("convex cap specs") {
  const Norm e = Norm::euclidean(3);
  CHECK(validate_convexity({e, SphericalCap{{0.0, 0.0, 1.0}, 1.0}}, 500, 1).convex);
  CHECK_FALSE(validate_convexity({e, SphericalCap{{0.0, 0.0, 1.0}, 2.6}}, 500, 1).convex);
  CHECK(validate_convexity({e, LuneSet{0.3}}, 500, 1).convex);
  CHECK(validate_convexity({Norm::lp(4.0, 3), Halfspaces{{{1.0, 0.0, 0.0}, {0.0, 1.0, -1.0}}}}, 500, 1).convex);
  const ConvexCapSpec lune{e, LuneSet{0.2}};
  CHECK(lune.contains(Point{1.0, 0.1, 0.0}));
  CHECK_FALSE(lune.contains(Point{-1.0, 0.0, 0.0}));
}

TEST_CASE("lune family reproduces the sine density") {
  DerivedDensityOptions opt;
  opt.alphas = {0.3, 0.15};
  opt.sample_budget = 2'000'000;
  opt.bins = 20;
  opt.ball_budget = 200'000;
  opt.seed = 4;
  const auto r = derived_density_estimate(Norm::euclidean(3), opt);
  REQUIRE(r.l1_errors.size() == 2);
  CHECK(r.l1_errors[1] < 0.05);
  for (std::size_t b = 0; b < 20; ++b) {
    const double lo = b * pi / 20, hi = (b + 1) * pi / 20;
    CHECK(r.limit_bin_means[b] == doctest::Approx(0.5 * (std::cos(lo) - std::cos(hi)) / (hi - lo)).epsilon(1e-9));
  }
  // Symmetric about the arc midpoint within noise.
  double asym = 0.0;
  for (std::size_t b = 0; b < 10; ++b) asym += std::abs(r.histogram[b] - r.histogram[19 - b]) * pi / 20;
  CHECK(asym < 0.05);
  for (const auto& h : r.homogeneity) CHECK(std::abs(h.exponent - 3.0) < 4.0 * h.exponent_sigma);
  CHECK(r.max_phi <= r.phi_bound);
  CHECK(r.max_phi == doctest::Approx(pi).epsilon(0.05));
  for (const auto& p : r.probes) {
    CHECK(p.mass <= p.ball_mass_bound);
    CHECK(p.mass >= p.bishop_bound);
  }
  REQUIRE(r.estimate.has_value());
  CHECK(r.estimate->trapezoid_mass() == doctest::Approx(1.0));
}

TEST_CASE("limit density of the lune family for l_p") {
  const Norm n = Norm::lp(4.0, 3);
  // rho = 1 on the axis and 2^{1/4} on the diagonal of the (e0, e2) plane.
  CHECK(lune_limit_density(n, pi / 2) == doctest::Approx(1.0));
  CHECK(lune_limit_density(n, pi / 4) == doctest::Approx(std::sin(pi / 4) * std::pow(std::pow(0.5, 2.0) * 2, -0.75)));
}

TEST_CASE("ball masses on polygons") {
  PolygonDensity square;
  square.vertices = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  CHECK(polygon_ball_mass(square, {0.5, 0.5}, 0.1) == doctest::Approx(pi * 0.01).epsilon(1e-12));
  CHECK(polygon_ball_mass(square, {0.0, 0.0}, 0.1) == doctest::Approx(pi * 0.01 / 4).epsilon(1e-10));
  CHECK(polygon_ball_mass(square, {0.5, 0.5}, 5.0) == doctest::Approx(1.0).epsilon(1e-10));

  PolygonDensity tent = square;
  tent.affine = {{1.0, 1.0, 0.0}, {-1.0, 1.0, 1.0}, {1.0, -1.0, 1.0}, {-1.0, -1.0, 2.0}};
  tent.m = 2;
  // Oracle: midpoint rule on a fine Cartesian grid.
  const std::array<double, 2> c{0.3, 0.55};
  const double r = 0.25;
  const int cells = 2000;
  double ref = 0.0;
  const double h = 2 * r / cells;
  for (int i = 0; i < cells; ++i) {
    for (int j = 0; j < cells; ++j) {
      const double x = c[0] - r + (i + 0.5) * h, y = c[1] - r + (j + 0.5) * h;
      if (std::hypot(x - c[0], y - c[1]) < r && tent.contains(x, y)) ref += tent.density(x, y) * h * h;
    }
  }
  CHECK(polygon_ball_mass(tent, c, r) == doctest::Approx(ref).epsilon(2e-3));
  CHECK_THROWS_AS(polygon_ball_mass(tent, {2.0, 2.0}, r), std::invalid_argument);
}

TEST_CASE("ball mass concavity") {
  PolygonDensity square;
  square.vertices = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  const auto uniform = prekopa_concavity_check(square, 0.1, 50, 1);
  CHECK(uniform.violations == 0);

  PolygonDensity tent = square;
  tent.affine = {{1.0, 1.0, 0.0}, {-1.0, 1.0, 1.0}, {1.0, -1.0, 1.0}, {-1.0, -1.0, 2.0}};
  tent.m = 1;
  const auto r = prekopa_concavity_check(tent, 0.1, 200, 2);
  CHECK(r.lemma == "ball-mass-concavity");
  CHECK(r.trials == 200);
  CHECK(r.violations == 0);

  PolygonDensity tri;
  tri.vertices = {{0.0, 0.0}, {2.0, 0.0}, {0.5, 1.5}};
  tri.affine = {{0.0, 1.0, 0.1}, {-0.3, 0.0, 1.0}};
  tri.m = 3;
  CHECK(prekopa_concavity_check(tri, 0.4, 100, 3).violations == 0);

  PolygonDensity bad = square;
  bad.vertices = {{0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {1.0, 0.0}};
  CHECK_THROWS_AS(prekopa_concavity_check(bad, 0.1, 1, 1), std::invalid_argument);
  PolygonDensity negative = square;
  negative.affine = {{1.0, 0.0, -0.5}};
  negative.m = 1;
  CHECK_THROWS_AS(prekopa_concavity_check(negative, 0.1, 1, 1), std::invalid_argument);
}
