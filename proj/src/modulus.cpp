#include "waist/modulus.hpp"

#include "waist/format.hpp"
#include "waist/rng.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace waist {

namespace {

void check_eps(double eps) {
  if (!(eps >= 0.0) || eps > 2.0 + 1e-12) {
    throw std::invalid_argument("modulus: eps must lie in (0, 2] (got " + format_double(eps) + ")");
  }
}

double euclidean_delta(double eps) {
  const double e = std::clamp(eps, 0.0, 2.0);
  return 1.0 - std::sqrt(1.0 - e * e / 4.0);
}

// A 2-D section through the origin spanned by Euclidean-orthonormal u, v.
struct Section {
  const Norm& norm;
  Point u, v;
  mutable Point scratch;

  Point point(double angle) const {
    Point c(u.size());
    const double ca = std::cos(angle), sa = std::sin(angle);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = ca * u[i] + sa * v[i];
    const double n = norm(c);
    for (double& x : c) x /= n;
    return c;
  }

  double distance(const Point& a, const Point& b) const {
    scratch.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) scratch[i] = a[i] - b[i];
    return norm(scratch);
  }

  double half_sum(const Point& a, const Point& b) const {
    scratch.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) scratch[i] = 0.5 * (a[i] + b[i]);
    return norm(scratch);
  }

  // Partner at norm distance eps counterclockwise from x(angle); distance grows
  // monotonically from 0 to 2 over a half turn.
  double objective(double angle, double eps, Point* xo = nullptr, Point* yo = nullptr) const {
    const Point x = point(angle);
    auto gap = [&](double t) { return distance(x, point(angle + t)) - eps; };
    double t = std::numbers::pi;
    const double flo = -eps, fhi = gap(t);
    if (eps > 0.0 && fhi > 0.0) {
      std::uintmax_t iters = 100;
      auto [a, b] = boost::math::tools::toms748_solve(gap, 0.0, t, flo, fhi,
                                                      boost::math::tools::eps_tolerance<double>(50), iters);
      t = b;
    } else if (eps == 0.0) {
      t = 0.0;
    }
    const Point y = point(angle + t);
    if (xo) *xo = x;
    if (yo) *yo = y;
    return 1.0 - half_sum(x, y);
  }
};

}  // namespace

ModulusCurve ModulusCurve::euclidean() {
  ModulusCurve c;
  c.source_ = ModulusSource::analytic;
  c.label_ = "euclidean";
  c.closed_form_ = euclidean_delta;
  return c;
}

ModulusCurve ModulusCurve::analytic(const Norm& norm) {
  switch (norm.kind()) {
    case NormKind::euclidean: return euclidean();
    case NormKind::lp: {
      const double p = norm.p();
      if (p == 2.0) return euclidean();
      ModulusCurve c;
      c.source_ = ModulusSource::analytic;
      if (p > 2.0) {
        // Clarkson/Hanner: exact for p >= 2, attained in a coordinate plane.
        c.label_ = "lp-clarkson:" + format_double(p);
        c.closed_form_ = [p](double eps) {
          const double e = std::clamp(eps, 0.0, 2.0);
          return 1.0 - std::pow(1.0 - std::pow(e / 2.0, p), 1.0 / p);
        };
      } else {
        // Quadratic lower estimate (p-1) eps^2 / 8 for 1 < p < 2.
        c.label_ = "lp-quadratic-lower:" + format_double(p);
        c.closed_form_ = [p](double eps) {
          const double e = std::clamp(eps, 0.0, 2.0);
          return (p - 1.0) * e * e / 8.0;
        };
      }
      return c;
    }
    case NormKind::regularized: break;
  }
  throw std::invalid_argument("analytic modulus unavailable for '" + norm.to_string() + "'");
}

ModulusCurve ModulusCurve::numeric(const Norm& norm, const std::vector<double>& grid, std::size_t budget_per_point,
                                   std::uint64_t seed) {
  std::vector<double> g{0.0}, raw{0.0};
  for (double e : grid) {
    check_eps(e);
    if (e <= g.back()) throw std::invalid_argument("modulus grid must be strictly increasing and positive");
    g.push_back(e);
    raw.push_back(modulus_of_convexity(norm, e, ModulusMethod::numeric, budget_per_point, seed));
  }
  // delta(e_i) <= delta(e_j) <= raw_j for j >= i, so the suffix minimum is
  // still an upper estimate and is monotone.
  for (std::size_t i = raw.size(); i-- > 1;) {
    if (i + 1 < raw.size()) raw[i] = std::min(raw[i], raw[i + 1]);
  }
  auto c = tabulated(std::move(g), std::move(raw), "numeric:" + norm.to_string());
  c.source_ = ModulusSource::numeric_lower_estimate;
  return c;
}

ModulusCurve ModulusCurve::tabulated(std::vector<double> grid, std::vector<double> values, std::string label) {
  if (grid.size() != values.size() || grid.size() < 2) throw std::invalid_argument("tabulated modulus: bad table");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("tabulated modulus: grid not increasing");
  }
  ModulusCurve c;
  c.source_ = ModulusSource::numeric_lower_estimate;
  c.label_ = std::move(label);
  c.grid_ = std::move(grid);
  c.values_ = std::move(values);
  return c;
}

double ModulusCurve::operator()(double eps) const {
  if (eps <= 0.0) return 0.0;
  if (closed_form_) return closed_form_(eps);
  if (eps >= grid_.back()) return values_.back();
  if (eps <= grid_.front()) return values_.front();
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), eps);
  const std::size_t j = static_cast<std::size_t>(it - grid_.begin());
  const double t = (eps - grid_[j - 1]) / (grid_[j] - grid_[j - 1]);
  return values_[j - 1] + t * (values_[j] - values_[j - 1]);
}

ModulusWitness numeric_modulus_witness(const Norm& norm, double eps, std::size_t budget, std::uint64_t seed) {
  check_eps(eps);
  const int d = norm.dim();
  if (eps == 0.0) {
    Point e1(d, 0.0);
    e1[0] = 1.0;
    e1 = radial_project(norm, e1);
    return {0.0, e1, e1};
  }
  std::vector<std::pair<Point, Point>> planes;
  for (int i = 0; i < d && planes.size() < 45; ++i) {
    for (int j = i + 1; j < d && planes.size() < 45; ++j) {
      Point u(d, 0.0), v(d, 0.0);
      u[i] = 1.0;
      v[j] = 1.0;
      planes.emplace_back(u, v);
    }
  }
  constexpr std::size_t kRandomPlanes = 6;
  for (std::size_t r = 0; r < kRandomPlanes; ++r) {
    CounterRng rng(seed, streams::sections, r);
    std::normal_distribution<double> normal;
    Point u(d), v(d);
    for (double& x : u) x = normal(rng);
    for (double& x : v) x = normal(rng);
    const double lu = euclidean_length(u);
    for (double& x : u) x /= lu;
    const double proj = dot(u, v);
    for (int c = 0; c < d; ++c) v[c] -= proj * u[c];
    const double lv = euclidean_length(v);
    for (double& x : v) x /= lv;
    planes.emplace_back(u, v);
  }

  constexpr int kGolden = 40;
  const std::size_t per_plane = std::max<std::size_t>(budget / planes.size(), kGolden + 16);
  const std::size_t coarse = per_plane - kGolden;

  ModulusWitness best{2.0, {}, {}};
  for (const auto& [u, v] : planes) {
    Section s{norm, u, v, {}};
    const double step = std::numbers::pi / static_cast<double>(coarse);
    std::size_t arg = 0;
    double val = 2.0;
    for (std::size_t i = 0; i < coarse; ++i) {
      const double j = s.objective(i * step, eps);
      if (j < val) {
        val = j;
        arg = i;
      }
    }
    // Golden-section refinement on the bracket around the coarse minimizer.
    double a = (static_cast<double>(arg) - 1.0) * step;
    double b = (static_cast<double>(arg) + 1.0) * step;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a), e = a + invphi * (b - a);
    double fc = s.objective(c, eps), fe = s.objective(e, eps);
    for (int it = 0; it < kGolden; ++it) {
      if (fc < fe) {
        b = e; e = c; fe = fc;
        c = b - invphi * (b - a);
        fc = s.objective(c, eps);
      } else {
        a = c; c = e; fc = fe;
        e = a + invphi * (b - a);
        fe = s.objective(e, eps);
      }
    }
    Point x, y;
    const double at = fc < fe ? c : e;
    double refined = s.objective(at, eps, &x, &y);
    if (refined > val) refined = s.objective(arg * step, eps, &x, &y);
    if (refined < best.value) best = {refined, x, y};
  }
  best.value = std::max(0.0, best.value);
  return best;
}

double modulus_of_convexity(const Norm& norm, double eps, ModulusMethod method, std::size_t budget,
                            std::uint64_t seed) {
  check_eps(eps);
  if (norm.kind() == NormKind::lp && !(norm.p() > 1.0 && std::isfinite(norm.p()))) {
    throw std::invalid_argument("lp norm requires 1 < p < inf");
  }
  if (eps == 0.0) return 0.0;
  if (method == ModulusMethod::analytic) return ModulusCurve::analytic(norm)(eps);
  return numeric_modulus_witness(norm, eps, budget, seed).value;
}

}  // namespace waist
