#include "waist/localization.hpp"

#include "waist/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace waist {

namespace {

constexpr double kTol = 1e-9;

void orthonormalize(Point& u, Point& v) {
  const double lu = euclidean_length(u);
  if (lu == 0.0) throw std::invalid_argument("arc: zero spanning vector");
  for (double& c : u) c /= lu;
  const double proj = dot(u, v);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * u[i];
  const double lv = euclidean_length(v);
  if (lv < 1e-12) throw std::invalid_argument("arc: spanning vectors are parallel");
  for (double& c : v) c /= lv;
}

}  // namespace

Arc::Arc(Norm norm, Point u, Point v, double lo, double hi)
    : norm_(std::move(norm)), u_(std::move(u)), v_(std::move(v)), lo_(lo), hi_(hi) {
  if (u_.size() != static_cast<std::size_t>(norm_.dim()) || v_.size() != u_.size())
    throw std::invalid_argument("arc: dimension mismatch");
  if (!(hi > lo) || hi - lo > std::numbers::pi) throw std::invalid_argument("arc: need 0 < hi - lo <= pi");
  orthonormalize(u_, v_);
  round_ = norm_.kind() == NormKind::euclidean;
}

Arc Arc::round(double lo, double hi) { return Arc(Norm::euclidean(2), {1.0, 0.0}, {0.0, 1.0}, lo, hi); }

double Arc::radius(double theta) const {
  if (round_) return 1.0;
  Point c(u_.size());
  const double ct = std::cos(theta), st = std::sin(theta);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = ct * u_[i] + st * v_[i];
  return 1.0 / norm_(c);
}

Point Arc::point(double theta) const {
  Point c(u_.size());
  const double ct = std::cos(theta), st = std::sin(theta);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = ct * u_[i] + st * v_[i];
  if (!round_) {
    const double r = 1.0 / norm_(c);
    for (double& x : c) x *= r;
  }
  return c;
}

double Arc::distance(double a, double b) const {
  if (round_) return 2.0 * std::abs(std::sin(0.5 * (b - a)));
  const Point pa = point(a), pb = point(b);
  Point diff(pa.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = pa[i] - pb[i];
  return norm_(diff);
}

double Arc::midpoint(double a, double b) const {
  if (round_) return 0.5 * (a + b);
  const double ra = radius(a), rb = radius(b);
  return a + std::atan2(rb * std::sin(b - a), ra + rb * std::cos(b - a));
}

double Arc::nu_weight(double theta) const {
  const double r = radius(theta);
  return r * r;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
  if (points < 2) throw std::invalid_argument("uniform_grid: need at least 2 points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  g.back() = hi;
  return g;
}

// ---------------------------------------------------------------------------

ArcDensity::ArcDensity(Arc arc, std::vector<double> grid, int m, ModulusCurve modulus)
    : arc_(std::move(arc)), grid_(std::move(grid)), m_(m), modulus_(std::move(modulus)) {
  if (m_ < 1) throw std::invalid_argument("arc density: m = n - k must be >= 1");
  if (grid_.empty()) throw std::invalid_argument("arc density: empty grid");
  for (std::size_t i = 1; i < grid_.size(); ++i)
    if (!(grid_[i] > grid_[i - 1])) throw std::invalid_argument("arc density: grid must be strictly increasing");
  if (grid_.front() < arc_.lo() - 1e-12 || grid_.back() > arc_.hi() + 1e-12)
    throw std::invalid_argument("arc density: grid leaves the arc");
}

double ArcDensity::trapezoid_mass() const {
  double s = 0.0;
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    const double a = values_[i - 1] * arc_.nu_weight(grid_[i - 1]);
    const double b = values_[i] * arc_.nu_weight(grid_[i]);
    s += 0.5 * (a + b) * (grid_[i] - grid_[i - 1]);
  }
  return s;
}

ArcDensity ArcDensity::from_function(Arc arc, std::vector<double> grid, std::function<double(double)> f, int m,
                                     ModulusCurve modulus) {
  ArcDensity d(std::move(arc), std::move(grid), m, std::move(modulus));
  d.values_.resize(d.grid_.size());
  for (std::size_t i = 0; i < d.grid_.size(); ++i) {
    d.values_[i] = f(d.grid_[i]);
    if (!(d.values_[i] >= 0.0)) throw std::invalid_argument("arc density: negative value");
  }
  const double mass = d.grid_.size() > 1 ? d.trapezoid_mass() : d.values_[0];
  if (!(mass > 0.0)) throw std::invalid_argument("arc density: zero mass");
  for (double& v : d.values_) v /= mass;
  d.roots_.resize(d.values_.size());
  for (std::size_t i = 0; i < d.values_.size(); ++i) d.roots_[i] = std::pow(d.values_[i], 1.0 / m);
  d.exact_ = [f = std::move(f), mass](double t) { return f(t) / mass; };
  return d;
}

ArcDensity ArcDensity::tabulated(Arc arc, std::vector<double> grid, std::vector<double> values, int m,
                                 ModulusCurve modulus) {
  ArcDensity d(std::move(arc), std::move(grid), m, std::move(modulus));
  if (values.size() != d.grid_.size()) throw std::invalid_argument("arc density: values and grid differ in length");
  for (double v : values)
    if (!(v >= 0.0)) throw std::invalid_argument("arc density: negative value");
  d.values_ = std::move(values);
  const double mass = d.grid_.size() > 1 ? d.trapezoid_mass() : d.values_[0];
  if (!(mass > 0.0)) throw std::invalid_argument("arc density: zero mass");
  for (double& v : d.values_) v /= mass;
  d.roots_.resize(d.values_.size());
  for (std::size_t i = 0; i < d.values_.size(); ++i) d.roots_[i] = std::pow(d.values_[i], 1.0 / m);
  // Linear interpolation error of a C^2 function is at most h^2 max|g''| / 8;
  // the second differences estimate h^2 |g''|, doubled for safety.
  double second = 0.0;
  for (std::size_t i = 1; i + 1 < d.roots_.size(); ++i)
    second = std::max(second, std::abs(d.roots_[i + 1] - 2.0 * d.roots_[i] + d.roots_[i - 1]));
  d.root_error_ = second / 4.0;
  return d;
}

double ArcDensity::root(double theta) const {
  if (exact_) return std::pow(exact_(theta), 1.0 / m_);
  if (theta <= grid_.front()) return roots_.front();
  if (theta >= grid_.back()) return roots_.back();
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), theta);
  const auto i = static_cast<std::size_t>(it - grid_.begin());
  const double s = (theta - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
  return (1.0 - s) * roots_[i - 1] + s * roots_[i];
}

double ArcDensity::operator()(double theta) const {
  if (exact_) return exact_(theta);
  return std::pow(root(theta), m_);
}

// ---------------------------------------------------------------------------

ArcDensity random_weakly_concave(const Norm& norm, const ModulusCurve& modulus, int m, std::size_t grid_size,
                                 std::uint64_t seed, std::uint64_t index) {
  if (norm.dim() != 2) throw std::invalid_argument("random_weakly_concave: norm must be 2-dimensional");
  CounterRng rng(seed, streams::trials, index);
  constexpr double pi = std::numbers::pi;
  const double length = 0.3 + (pi - 0.5) * rng.uniform();
  const double lo = 2.0 * pi * rng.uniform();
  const double hi = lo + length;
  const int count = 1 + static_cast<int>(rng() % 4);
  // A functional a = s (cos phi, sin phi) is positive on c(theta) iff |theta - phi| < pi/2.
  const double phi_lo = hi - pi / 2 + 0.02, phi_hi = lo + pi / 2 - 0.02;
  std::vector<std::array<double, 2>> functionals;
  for (int j = 0; j < count; ++j) {
    const double phi = phi_lo + (phi_hi - phi_lo) * rng.uniform();
    const double s = 0.5 + 1.5 * rng.uniform();
    functionals.push_back({s * std::cos(phi), s * std::sin(phi)});
  }
  Arc arc(norm, {1.0, 0.0}, {0.0, 1.0}, lo, hi);
  auto f = [arc, functionals, m](double theta) {
    const Point p = arc.point(theta);
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& a : functionals) lowest = std::min(lowest, a[0] * p[0] + a[1] * p[1]);
    return std::pow(std::max(lowest, 0.0), m);
  };
  return ArcDensity::from_function(arc, uniform_grid(lo, hi, grid_size), f, m, modulus);
}

double weak_concavity_margin(const ArcDensity& d, double x, double y) {
  const double z = d.arc().midpoint(x, y);
  const double lhs = 0.5 * (d.root(x) + d.root(y));
  const double rhs = (1.0 - d.modulus()(d.arc().distance(x, y))) * d.root(z);
  return rhs - lhs;
}

WeakConcavityReport is_weakly_concave(const ArcDensity& d) {
  const auto& g = d.grid();
  if (g.size() < 3) throw std::invalid_argument("is_weakly_concave: grid needs at least 3 points");
  const double tol = kTol + d.root_interpolation_error();
  WeakConcavityReport report;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const double margin = weak_concavity_margin(d, g[i], g[j]);
      ++report.pairs_checked;
      report.worst_margin = std::min(report.worst_margin, margin);
      if (margin < -tol && !report.witness) {
        report.weakly_concave = false;
        report.witness = {i, j};
      }
    }
  }
  return report;
}

MaxStructureReport max_structure_check(const ArcDensity& d) {
  const auto& v = d.values();
  MaxStructureReport report;
  const auto top = std::max_element(v.begin(), v.end());
  report.max_index = static_cast<std::size_t>(top - v.begin());
  std::size_t first = v.size(), last = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] >= *top - kTol) {
      ++report.max_count;
      first = std::min(first, i);
      last = i;
    }
  }
  // The true maximum may sit between two nodes that tie within tolerance.
  report.unique_max = report.max_count == 1 || (report.max_count == 2 && last == first + 1);
  // Local minima, including flat valleys: a descent followed by an ascent.
  int trend = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double step = v[i] - v[i - 1];
    if (step > kTol) {
      if (trend < 0) ++report.local_minima;
      trend = 1;
    } else if (step < -kTol) {
      trend = -1;
    }
  }
  return report;
}

DecayReport decay_bound_check(const ArcDensity& d, std::size_t z_index, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("decay_bound_check: eps must be positive");
  const auto& g = d.grid();
  const auto& v = d.values();
  if (z_index >= g.size()) throw std::invalid_argument("decay_bound_check: z index out of range");
  if (v[z_index] < *std::max_element(v.begin(), v.end()) - kTol)
    throw std::invalid_argument("decay_bound_check: z is not a maximum of the density");
  const Arc& arc = d.arc();
  const double z = g[z_index];
  const double factor = std::pow(std::max(0.0, 1.0 - 2.0 * d.modulus()(eps)), d.m());

  // min of f over the part of [z, end] inside B(z, eps), for each side.
  auto side_min = [&](int dir) {
    double lowest = v[z_index];
    double inner = z;
    std::size_t i = z_index;
    while (true) {
      if ((dir < 0 && i == 0) || (dir > 0 && i + 1 == g.size())) return lowest;
      i += static_cast<std::size_t>(dir);
      if (arc.distance(z, g[i]) >= eps) break;
      lowest = std::min(lowest, v[i]);
      inner = g[i];
    }
    // Include the exact boundary point of the ball on this side.
    double a = inner, b = g[i];
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid == a || mid == b) break;
      if (arc.distance(z, mid) < eps) a = mid; else b = mid;
    }
    return std::min(lowest, d(a));
  };
  const double left_min = side_min(-1);
  const double right_min = side_min(1);

  DecayReport report;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (arc.distance(z, g[i]) < 2.0 * eps) continue;
    report.vacuous = false;
    ++report.checked;
    const double bound = factor * (i < z_index ? left_min : right_min);
    const double margin = bound - v[i];
    report.worst_margin = std::min(report.worst_margin, margin);
    if (margin < -kTol && !report.witness) {
      report.holds = false;
      report.witness = i;
    }
  }
  return report;
}

}  // namespace waist
