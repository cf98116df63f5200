#include "waist/localization.hpp"

#include "waist/quadrature.hpp"
#include "waist/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace waist {

namespace {

double cross(std::array<double, 2> a, std::array<double, 2> b) { return a[0] * b[1] - a[1] * b[0]; }

void validate(const PolygonDensity& s) {
  const auto& v = s.vertices;
  if (v.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    const auto& c = v[(i + 2) % v.size()];
    if (cross({b[0] - a[0], b[1] - a[1]}, {c[0] - b[0], c[1] - b[1]}) <= 0.0)
      throw std::invalid_argument("polygon must be convex with counter-clockwise vertices");
  }
  if (s.m < 0) throw std::invalid_argument("polygon density: m must be >= 0");
  if (s.m > 0 && s.affine.empty()) throw std::invalid_argument("polygon density: m > 0 needs affine functions");
  for (const auto& p : v) {
    for (const auto& f : s.affine)
      if (f[0] * p[0] + f[1] * p[1] + f[2] < -1e-12)
        throw std::invalid_argument("polygon density: affine function negative on the polygon");
  }
}

}  // namespace

bool PolygonDensity::contains(double x, double y) const {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % vertices.size()];
    if (cross({b[0] - a[0], b[1] - a[1]}, {x - a[0], y - a[1]}) < 0.0) return false;
  }
  return true;
}

double PolygonDensity::density(double x, double y) const {
  if (m == 0) return 1.0;
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& f : affine) lowest = std::min(lowest, f[0] * x + f[1] * y + f[2]);
  return std::pow(std::max(lowest, 0.0), m);
}

double polygon_ball_mass(const PolygonDensity& s, std::array<double, 2> c, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("polygon_ball_mass: r must be positive");
  if (!s.contains(c[0], c[1])) throw std::invalid_argument("polygon_ball_mass: center outside the polygon");
  const auto& v = s.vertices;
  const auto rule = gauss_legendre(10, 0.0, 1.0);
  std::vector<double> cuts;

  auto radial = [&](double phi) {
    const double dx = std::cos(phi), dy = std::sin(phi);
    double reach = r;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto& a = v[i];
      const auto& b = v[(i + 1) % v.size()];
      const double nx = b[1] - a[1], ny = a[0] - b[0];  // outward normal
      const double toward = nx * dx + ny * dy;
      if (toward > 0.0) reach = std::min(reach, -(nx * (c[0] - a[0]) + ny * (c[1] - a[1])) / toward);
    }
    reach = std::max(reach, 0.0);
    // The density is polynomial in t between crossings of the affine pieces.
    cuts.assign({0.0, reach});
    for (std::size_t i = 0; i < s.affine.size(); ++i) {
      for (std::size_t j = i + 1; j < s.affine.size(); ++j) {
        const double gx = s.affine[i][0] - s.affine[j][0], gy = s.affine[i][1] - s.affine[j][1];
        const double slope = gx * dx + gy * dy;
        if (slope == 0.0) continue;
        const double t = -(gx * c[0] + gy * c[1] + s.affine[i][2] - s.affine[j][2]) / slope;
        if (t > 0.0 && t < reach) cuts.push_back(t);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    double sum = 0.0;
    for (std::size_t k = 1; k < cuts.size(); ++k) {
      const double t0 = cuts[k - 1], len = cuts[k] - t0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double t = t0 + len * rule.nodes[q];
        sum += len * rule.weights[q] * s.density(c[0] + t * dx, c[1] + t * dy) * t;
      }
    }
    return sum;
  };
  return adaptive_simpson(radial, 0.0, 2.0 * std::numbers::pi, 1e-13).value;
}

LemmaReport prekopa_concavity_check(const PolygonDensity& s, double r, std::size_t trials, std::uint64_t seed) {
  validate(s);
  if (!(r > 0.0)) throw std::invalid_argument("prekopa_concavity_check: r must be positive");
  double x0 = s.vertices[0][0], x1 = x0, y0 = s.vertices[0][1], y1 = y0;
  for (const auto& p : s.vertices) {
    x0 = std::min(x0, p[0]);
    x1 = std::max(x1, p[0]);
    y0 = std::min(y0, p[1]);
    y1 = std::max(y1, p[1]);
  }
  const double power = 1.0 / (s.m + 2.0);
  LemmaReport total;
  total.lemma = "ball-mass-concavity";
  total.seed = seed;
  const auto count = static_cast<std::int64_t>(trials);
#pragma omp parallel
  {
    LemmaReport local;
#pragma omp for schedule(dynamic, 4)
    for (std::int64_t t = 0; t < count; ++t) {
      CounterRng rng(seed, streams::trials, static_cast<std::uint64_t>(t));
      auto draw = [&] {
        while (true) {
          const std::array<double, 2> p{x0 + (x1 - x0) * rng.uniform(), y0 + (y1 - y0) * rng.uniform()};
          if (s.contains(p[0], p[1])) return p;
        }
      };
      const auto x = draw(), y = draw();
      const double theta = rng.uniform();
      const std::array<double, 2> z{theta * x[0] + (1 - theta) * y[0], theta * x[1] + (1 - theta) * y[1]};
      const double lhs = std::pow(polygon_ball_mass(s, z, r), power);
      const double rhs = theta * std::pow(polygon_ball_mass(s, x, r), power) +
                         (1 - theta) * std::pow(polygon_ball_mass(s, y, r), power);
      const double margin = lhs - rhs;
      local.record(margin, margin < -1e-6);
    }
#pragma omp critical
    total.merge(local);
  }
  return total;
}

}  // namespace waist
