#pragma once

#include "waist/bounds.hpp"
#include "waist/conical.hpp"
#include "waist/modulus.hpp"
#include "waist/norm.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace waist {

// ---------------------------------------------------------------------------
// Arcs and densities on them

/// Arc of S(X) inside a 2-plane: p(theta) = c(theta) / ||c(theta)|| with
/// c(theta) = cos(theta) u + sin(theta) v, theta in [lo, hi], hi - lo <= pi.
/// u and v are orthonormalized (Euclidean) on construction.
class Arc {
 public:
  Arc(Norm norm, Point u, Point v, double lo, double hi);
  /// The unit circle of the Euclidean plane.
  static Arc round(double lo, double hi);

  const Norm& norm() const { return norm_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool is_round() const { return round_; }

  Point point(double theta) const;
  /// ||p(a) - p(b)||.
  double distance(double a, double b) const;
  /// Parameter of the radial projection of (p(a) + p(b)) / 2.
  double midpoint(double a, double b) const;
  /// Density of the 1-dimensional conical measure in theta, 1 / ||c(theta)||^2.
  double nu_weight(double theta) const;

 private:
  double radius(double theta) const;  // 1 / ||c(theta)||

  Norm norm_;
  Point u_, v_;
  double lo_, hi_;
  bool round_;
};

std::vector<double> uniform_grid(double lo, double hi, std::size_t points);

/// Density f of a measure on an arc with respect to the conical measure nu.
/// Normalized so that the trapezoid integral of f * nu_weight over the grid is 1.
class ArcDensity {
 public:
  /// Tabulates `f` (any positive multiple) on `grid`; the evaluator is kept
  /// for off-grid values with the same normalization.
  static ArcDensity from_function(Arc arc, std::vector<double> grid, std::function<double(double)> f, int m,
                                  ModulusCurve modulus);
  /// Grid values only; off-grid values interpolate f^{1/m} linearly.
  static ArcDensity tabulated(Arc arc, std::vector<double> grid, std::vector<double> values, int m,
                              ModulusCurve modulus);

  const Arc& arc() const { return arc_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  int m() const { return m_; }
  const ModulusCurve& modulus() const { return modulus_; }
  bool interpolated() const { return !exact_; }

  double operator()(double theta) const;
  /// f^{1/m}(theta).
  double root(double theta) const;
  /// Bound on the error of root() between grid points; 0 with an exact evaluator.
  double root_interpolation_error() const { return root_error_; }
  /// Trapezoid integral of f * nu_weight over the grid.
  double trapezoid_mass() const;

 private:
  ArcDensity(Arc arc, std::vector<double> grid, int m, ModulusCurve modulus);

  Arc arc_;
  std::vector<double> grid_;
  std::vector<double> values_;
  std::vector<double> roots_;
  int m_;
  ModulusCurve modulus_;
  std::function<double(double)> exact_;
  double root_error_ = 0.0;
};

/// Random weakly m-concave density: the restriction to a random arc of
/// (min of 1..4 linear functionals positive on the arc)^m. `norm` is 2-dimensional.
ArcDensity random_weakly_concave(const Norm& norm, const ModulusCurve& modulus, int m, std::size_t grid_size,
                                 std::uint64_t seed, std::uint64_t index);

struct WeakConcavityReport {
  bool weakly_concave = true;
  std::optional<std::pair<std::size_t, std::size_t>> witness;  ///< first violating grid pair
  double worst_margin = std::numeric_limits<double>::infinity();
  std::size_t pairs_checked = 0;
};

/// rhs - lhs of (f^{1/m}(x) + f^{1/m}(y)) / 2 <= (1 - delta(||x - y||)) f^{1/m}(z).
double weak_concavity_margin(const ArcDensity& d, double x, double y);

/// All grid pairs, with tolerance 1e-9 (plus the interpolation error bound
/// for tabulated densities).
WeakConcavityReport is_weakly_concave(const ArcDensity& d);

struct MaxStructureReport {
  bool unique_max = false;
  std::size_t max_index = 0;
  std::size_t max_count = 0;  ///< grid points within 1e-9 of the maximum
  std::size_t local_minima = 0;
  bool ok() const { return unique_max && local_minima == 0; }
};

/// Unique grid maximum (two adjacent tied nodes allowed) and no interior local minimum.
MaxStructureReport max_structure_check(const ArcDensity& d);

struct DecayReport {
  bool holds = true;
  bool vacuous = true;
  std::size_t checked = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::optional<std::size_t> witness;
};

/// f(x) <= (1 - 2 delta(eps))^m min{f on [z, x] within B(z, eps)} + 1e-9 for
/// every grid x with ||x - z|| >= 2 eps. `z_index` must be a grid argmax.
DecayReport decay_bound_check(const ArcDensity& d, std::size_t z_index, double eps);

struct NeedleMasses {
  double z = 0.0;  ///< max point (parameter for arcs)
  double ratio = 0.0;  ///< mu(B(z, 2 eps)^c) / mu(B(z, eps))
  double ratio_bound = 0.0;
  double ball_mass = 0.0;  ///< mu(B(z, eps))
  double ball_bound = 0.0;
  bool ratio_holds() const { return ratio <= ratio_bound + 1e-9; }
  bool ball_holds() const { return ball_mass >= ball_bound - 1e-9; }
};

/// k = 1: masses by adaptive quadrature on the arc around the refined argmax.
NeedleMasses needle_ratio_and_ball(const ArcDensity& d, double eps, int n, int k = 1,
                                   FUpper f_upper = FUpper::pi);

/// k = 2 needle on the round S^2: density (min_i <a_i, x>)^m on a spherical
/// cap of angular radius < pi/2, the a_i positive on the cap.
struct CapNeedle {
  std::array<double, 3> center{0.0, 0.0, 1.0};
  double radius = 1.0;
  std::vector<std::array<double, 3>> functionals;
  int m = 1;
  double density(const std::array<double, 3>& x) const;
  bool contains(const std::array<double, 3>& x) const;
};

CapNeedle random_cap_needle(int m, std::uint64_t seed, std::uint64_t index);

/// k = 2: masses by polar quadrature around the max point (Euclidean delta).
NeedleMasses cap_needle_ratio_and_ball(const CapNeedle& needle, double eps, int n, FUpper f_upper = FUpper::pi);

// ---------------------------------------------------------------------------
// Property-run reports

struct LemmaReport {
  std::string lemma;
  std::uint64_t trials = 0;
  std::uint64_t violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;

  void record(double margin, bool violated);
  void merge(const LemmaReport& other);
};

nlohmann::json to_json(const LemmaReport& r);

struct NeedleSuiteOptions {
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  int n_min = 2;
  int n_max = 8;
  std::vector<double> eps_values{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  std::size_t grid_size = 401;
  /// Check weak concavity of the generated density on every k-th trial (0 = never).
  std::size_t concavity_stride = 1;
  /// Norms the arcs are drawn in (2-dimensional); Euclidean only by default.
  std::vector<Norm> norms{Norm::euclidean(2)};
};

/// Reports for: weak-concavity (generator), unique-max, decay, ratio, ball.
std::vector<LemmaReport> run_needle_suite(const NeedleSuiteOptions& options);

// ---------------------------------------------------------------------------
// Convex subsets of S(X) and convexely derived measures

struct SphericalCap {
  Point center;
  double angle = 0.0;  ///< Euclidean angular radius
};
/// {x : |atan2(x_1, x_0)| < alpha}: a wedge around the half great circle
/// from the last axis through e_0.
struct LuneSet {
  double alpha = 0.0;
};
/// {x : <a_i, x> > 0 for every i}.
struct Halfspaces {
  std::vector<Point> normals;
};

struct ConvexCapSpec {
  Norm norm;
  std::variant<SphericalCap, LuneSet, Halfspaces> generator;

  bool contains(std::span<const double> x) const;
  Indicator indicator() const;
};

struct ConvexityReport {
  bool convex = true;
  std::size_t pairs = 0;
  std::size_t violations = 0;
};

/// Samples pairs inside the set and checks points of the joining arc.
ConvexityReport validate_convexity(const ConvexCapSpec& spec, std::size_t pairs, std::uint64_t seed);

struct DerivedDensityOptions {
  std::vector<double> alphas{0.4, 0.2, 0.1, 0.05};
  std::size_t sample_budget = 10'000'000;
  std::size_t bins = 20;
  std::size_t ball_budget = 1'000'000;
  std::vector<double> scalings{0.5, 0.75};
  std::size_t probes = 20;
  std::uint64_t seed = 0;
};

struct HomogeneityProbe {
  double t = 0.0;
  MeasureEstimate fraction;
  double exponent = 0.0;
  double exponent_sigma = 0.0;
};

struct BallProbe {
  double x = 0.0;  ///< colatitude of the center
  double r = 0.0;
  double mass = 0.0;  ///< empirical mu(B(x, r))
  double ball_mass_bound = 0.0;  ///< 2^{n+2} r / diameter
  double bishop_bound = 0.0;  ///< normalized volume of a geodesic cap of radius phi(r) in S^n
};

struct DerivedDensityReport {
  std::vector<double> alphas;
  std::vector<double> l1_errors;  ///< binned L1 distance to the limit density, per alpha
  std::vector<std::size_t> accepted;
  std::optional<ArcDensity> estimate;  ///< at the smallest alpha
  std::vector<double> histogram;  ///< density in colatitude per bin, smallest alpha
  std::vector<double> limit_bin_means;
  std::vector<HomogeneityProbe> homogeneity;
  double max_phi = 0.0;  ///< sup of d mu / d mu_1 over bins
  double phi_bound = 0.0;  ///< 2^{n+1} / mu_1(S)
  std::vector<BallProbe> probes;
  double ball_tight_constant = 0.0;  ///< max over probes of mass * diameter / r
};

/// Lune family shrinking to the half great circle {x_1 = 0, x_0 >= 0} of a
/// 3-dimensional norm; density estimated in colatitude.
DerivedDensityReport derived_density_estimate(const Norm& norm, const DerivedDensityOptions& options);

/// Limit density of the lune family in colatitude, proportional to sin(theta) rho(theta)^3.
double lune_limit_density(const Norm& norm, double theta);

// ---------------------------------------------------------------------------
// Concavity of ball masses

/// Convex polygon (counter-clockwise vertices) carrying the density
/// (min_j (a_j . x + b_j))^m, nonnegative on the polygon.
struct PolygonDensity {
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<double, 3>> affine;  ///< (a_x, a_y, b)
  int m = 0;

  double density(double x, double y) const;
  bool contains(double x, double y) const;
};

/// mu(B(c, r) intersected with S) by polar quadrature around c (c inside S).
double polygon_ball_mass(const PolygonDensity& s, std::array<double, 2> c, double r);

/// x -> mu(B(x, r) and S)^{1/(m+2)} is concave on S: random triples, tolerance 1e-6.
LemmaReport prekopa_concavity_check(const PolygonDensity& s, double r, std::size_t trials, std::uint64_t seed);

}  // namespace waist
