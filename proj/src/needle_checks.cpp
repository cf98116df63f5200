#include "waist/localization.hpp"

#include "waist/quadrature.hpp"
#include "waist/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace waist {

namespace {

constexpr double kQuadTol = 1e-13;

// Golden-section maximization of a unimodal function on [a, b].
double golden_max(const std::function<double(double)>& f, double a, double b) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Parameter on [z, end] where the distance from z first reaches r (end when it never does).
double ball_edge(const Arc& arc, double z, double end, double r) {
  if (arc.distance(z, end) < r) return end;
  double a = z, b = end;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid == a || mid == b) break;
    if (arc.distance(z, mid) < r) a = mid; else b = mid;
  }
  return 0.5 * (a + b);
}

using Vec3 = std::array<double, 3>;

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 unit(Vec3 a) {
  const double l = std::sqrt(dot3(a, a));
  return {a[0] / l, a[1] / l, a[2] / l};
}

// Orthonormal e1, e2 completing c.
std::pair<Vec3, Vec3> tangent_frame(const Vec3& c) {
  const Vec3 seed = std::abs(c[0]) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
  const double p = dot3(seed, c);
  const Vec3 e1 = unit({seed[0] - p * c[0], seed[1] - p * c[1], seed[2] - p * c[2]});
  const Vec3 e2 = {c[1] * e1[2] - c[2] * e1[1], c[2] * e1[0] - c[0] * e1[2], c[0] * e1[1] - c[1] * e1[0]};
  return {e1, e2};
}

// Exponential map at c: q in the tangent disk to a point of S^2.
Vec3 exp_map(const Vec3& c, const Vec3& e1, const Vec3& e2, double q1, double q2) {
  const double t = std::hypot(q1, q2);
  if (t == 0.0) return c;
  const double s = std::sin(t) / t, ct = std::cos(t);
  Vec3 x;
  for (int i = 0; i < 3; ++i) x[i] = ct * c[i] + s * (q1 * e1[i] + q2 * e2[i]);
  return x;
}

}  // namespace

NeedleMasses needle_ratio_and_ball(const ArcDensity& d, double eps, int n, int k, FUpper f_upper) {
  if (k != 1) throw std::invalid_argument("needle_ratio_and_ball: arcs carry k = 1 needles");
  if (n - k != d.m()) throw std::invalid_argument("needle_ratio_and_ball: n - k differs from the density's m");
  if (!(eps > 0.0)) throw std::invalid_argument("needle_ratio_and_ball: eps must be positive");
  const Arc& arc = d.arc();
  const auto& g = d.grid();
  const auto& v = d.values();
  const auto i = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  double z = g[i];
  if (!d.interpolated() && g.size() > 1) {
    const double a = g[i == 0 ? 0 : i - 1];
    const double b = g[std::min(i + 1, g.size() - 1)];
    const double refined = golden_max([&](double t) { return d(t); }, a, b);
    if (d(refined) > d(z)) z = refined;
  }
  const double lo = arc.lo(), hi = arc.hi();
  auto mass = [&](double a, double b) {
    if (b <= a) return 0.0;
    return adaptive_simpson([&](double t) { return d(t) * arc.nu_weight(t); }, a, b, kQuadTol).value;
  };
  const double l1 = ball_edge(arc, z, lo, eps), r1 = ball_edge(arc, z, hi, eps);
  const double l2 = ball_edge(arc, z, lo, 2.0 * eps), r2 = ball_edge(arc, z, hi, 2.0 * eps);
  const double ball = mass(l1, r1);
  if (!(ball > 0.0)) throw std::runtime_error("needle_ratio_and_ball: B(z, eps) carries no mass");
  const double total = mass(lo, l1) + ball + mass(r1, hi);
  const double outside = (l2 > lo ? mass(lo, l2) : 0.0) + (r2 < hi ? mass(r2, hi) : 0.0);

  NeedleMasses out;
  out.z = z;
  out.ratio = outside / ball;
  out.ball_mass = ball / total;
  out.ratio_bound = needle_ratio_bound(n, k, eps, d.modulus(), f_upper);
  out.ball_bound = waist_bound_w({n, k, eps, d.modulus(), f_upper}).value;
  return out;
}

// ---------------------------------------------------------------------------

double CapNeedle::density(const Vec3& x) const {
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& a : functionals) lowest = std::min(lowest, dot3(a, x));
  return std::pow(std::max(lowest, 0.0), m);
}

bool CapNeedle::contains(const Vec3& x) const { return dot3(x, center) >= std::cos(radius); }

CapNeedle random_cap_needle(int m, std::uint64_t seed, std::uint64_t index) {
  if (m < 1) throw std::invalid_argument("random_cap_needle: m must be >= 1");
  CounterRng rng(seed, streams::trials, index);
  std::normal_distribution<double> normal;
  CapNeedle needle;
  needle.m = m;
  needle.center = unit({normal(rng), normal(rng), normal(rng)});
  needle.radius = 0.3 + (std::numbers::pi / 2 - 0.4) * rng.uniform();
  const auto [e1, e2] = tangent_frame(needle.center);
  const int count = 1 + static_cast<int>(rng() % 4);
  // A unit u is positive on the cap when angle(u, center) + radius < pi/2.
  const double spread = std::numbers::pi / 2 - needle.radius - 0.01;
  for (int j = 0; j < count; ++j) {
    const double beta = spread * rng.uniform();
    const double az = 2.0 * std::numbers::pi * rng.uniform();
    const Vec3 u = exp_map(needle.center, e1, e2, beta * std::cos(az), beta * std::sin(az));
    const double s = 0.5 + 1.5 * rng.uniform();
    needle.functionals.push_back({s * u[0], s * u[1], s * u[2]});
  }
  return needle;
}

NeedleMasses cap_needle_ratio_and_ball(const CapNeedle& needle, double eps, int n, FUpper f_upper) {
  if (n - 2 != needle.m) throw std::invalid_argument("cap_needle_ratio_and_ball: n - 2 differs from m");
  if (!(eps > 0.0)) throw std::invalid_argument("cap_needle_ratio_and_ball: eps must be positive");
  const Vec3 c = needle.center;
  const auto [e1, e2] = tangent_frame(c);
  const double R = needle.radius;

  // Maximize over the tangent disk of radius R: coarse polar grid, then pattern search.
  auto value = [&](double q1, double q2) {
    const double t = std::hypot(q1, q2);
    if (t > R) {
      q1 *= R / t;
      q2 *= R / t;
    }
    return needle.density(exp_map(c, e1, e2, q1, q2));
  };
  double b1 = 0.0, b2 = 0.0, best = value(0.0, 0.0);
  for (int it = 1; it <= 40; ++it) {
    for (int ia = 0; ia < 64; ++ia) {
      const double t = R * it / 40.0, az = 2.0 * std::numbers::pi * ia / 64.0;
      const double fv = value(t * std::cos(az), t * std::sin(az));
      if (fv > best) {
        best = fv;
        b1 = t * std::cos(az);
        b2 = t * std::sin(az);
      }
    }
  }
  for (double h = R / 40.0; h > 1e-13; h *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      const std::array<std::pair<double, double>, 4> moves{{{h, 0.0}, {-h, 0.0}, {0.0, h}, {0.0, -h}}};
      for (const auto& [d1, d2] : moves) {
        double q1 = b1 + d1, q2 = b2 + d2;
        const double t = std::hypot(q1, q2);
        if (t > R) {
          q1 *= R / t;
          q2 *= R / t;
        }
        const double fv = value(q1, q2);
        if (fv > best) {
          best = fv;
          b1 = q1;
          b2 = q2;
          moved = true;
        }
      }
    }
  }
  const Vec3 z = exp_map(c, e1, e2, b1, b2);
  const auto [f1, f2] = tangent_frame(z);

  const double cos_r = std::cos(R);
  auto exit_angle = [&](double phi) {
    const Vec3 w = {std::cos(phi) * f1[0] + std::sin(phi) * f2[0], std::cos(phi) * f1[1] + std::sin(phi) * f2[1],
                    std::cos(phi) * f1[2] + std::sin(phi) * f2[2]};
    const double A = dot3(z, c), B = dot3(w, c);
    const double M = std::hypot(A, B);
    return std::atan2(B, A) + std::acos(std::clamp(cos_r / M, -1.0, 1.0));
  };
  auto radial = [&](double phi, double t0, double t1) {
    if (t1 <= t0) return 0.0;
    const double cp = std::cos(phi), sp = std::sin(phi);
    return adaptive_simpson(
               [&](double t) {
                 const Vec3 x = exp_map(z, f1, f2, t * cp, t * sp);
                 return needle.density(x) * std::sin(t);
               },
               t0, t1, 1e-13)
        .value;
  };
  const double t_eps = 2.0 * std::asin(std::min(1.0, eps / 2.0));
  const double t_2eps = 2.0 * std::asin(std::min(1.0, eps));
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double ball =
      adaptive_simpson([&](double phi) { return radial(phi, 0.0, std::min(t_eps, exit_angle(phi))); }, 0.0, two_pi,
                       1e-11)
          .value;
  if (!(ball > 0.0)) throw std::runtime_error("cap_needle_ratio_and_ball: B(z, eps) carries no mass");
  const double total =
      adaptive_simpson([&](double phi) { return radial(phi, 0.0, exit_angle(phi)); }, 0.0, two_pi, 1e-11).value;
  const double outside =
      adaptive_simpson([&](double phi) { return radial(phi, t_2eps, exit_angle(phi)); }, 0.0, two_pi, 1e-11).value;

  NeedleMasses out;
  out.ratio = outside / ball;
  out.ball_mass = ball / total;
  const auto delta = ModulusCurve::euclidean();
  out.ratio_bound = needle_ratio_bound(n, 2, eps, delta, f_upper);
  out.ball_bound = waist_bound_w({n, 2, eps, delta, f_upper}).value;
  return out;
}

// ---------------------------------------------------------------------------

void LemmaReport::record(double margin, bool violated) {
  ++trials;
  if (violated) ++violations;
  worst_margin = std::min(worst_margin, margin);
}

void LemmaReport::merge(const LemmaReport& other) {
  trials += other.trials;
  violations += other.violations;
  worst_margin = std::min(worst_margin, other.worst_margin);
}

nlohmann::json to_json(const LemmaReport& r) {
  nlohmann::json j = {{"lemma", r.lemma}, {"trials", r.trials}, {"violations", r.violations}, {"seed", r.seed}};
  j["worst_margin"] = std::isfinite(r.worst_margin) ? nlohmann::json(r.worst_margin) : nlohmann::json(nullptr);
  return j;
}

std::vector<LemmaReport> run_needle_suite(const NeedleSuiteOptions& options) {
  if (options.n_min < 2 || options.n_max < options.n_min)
    throw std::invalid_argument("needle suite: need 2 <= n_min <= n_max");
  if (options.eps_values.empty() || options.norms.empty())
    throw std::invalid_argument("needle suite: empty eps or norm list");
  for (const auto& norm : options.norms)
    if (norm.dim() != 2) throw std::invalid_argument("needle suite: arc norms must be 2-dimensional");
  std::vector<ModulusCurve> moduli;
  for (const auto& norm : options.norms) moduli.push_back(ModulusCurve::analytic(norm));

  const std::vector<std::string> names{"weak-concavity", "unique-max", "decay", "ratio", "ball"};
  std::vector<LemmaReport> totals(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    totals[i].lemma = names[i];
    totals[i].seed = options.seed;
  }
  const auto trials = static_cast<std::int64_t>(options.trials);
#pragma omp parallel
  {
    std::vector<LemmaReport> local(names.size());
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t t = 0; t < trials; ++t) {
      const auto index = static_cast<std::uint64_t>(t);
      CounterRng pick(options.seed, streams::probes, index);
      const int n = options.n_min + static_cast<int>(pick() % static_cast<std::uint64_t>(options.n_max - options.n_min + 1));
      const double eps = options.eps_values[pick() % options.eps_values.size()];
      const std::size_t which = pick() % options.norms.size();
      const auto d = random_weakly_concave(options.norms[which], moduli[which], n - 1, options.grid_size, options.seed,
                                           index);
      if (options.concavity_stride != 0 && index % options.concavity_stride == 0) {
        const auto wc = is_weakly_concave(d);
        local[0].record(wc.worst_margin, !wc.weakly_concave);
      }
      const auto ms = max_structure_check(d);
      local[1].record(ms.ok() ? 0.0 : -static_cast<double>(ms.local_minima + (ms.unique_max ? 0 : 1)), !ms.ok());
      const auto decay = decay_bound_check(d, ms.max_index, eps);
      local[2].record(decay.worst_margin, !decay.holds);
      const auto masses = needle_ratio_and_ball(d, eps, n, 1);
      local[3].record(masses.ratio_bound - masses.ratio, !masses.ratio_holds());
      local[4].record(masses.ball_mass - masses.ball_bound, !masses.ball_holds());
    }
#pragma omp critical
    for (std::size_t i = 0; i < names.size(); ++i) totals[i].merge(local[i]);
  }
  return totals;
}

}  // namespace waist
