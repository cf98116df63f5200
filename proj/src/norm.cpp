#include "waist/norm.hpp"

#include "waist/format.hpp"
#include "waist/quadrature.hpp"
#include "waist/rng.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace waist {

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

long long parse_integer(std::string_view text) {
  // Accept scientific shorthands such as 1e6 as long as they are integral.
  const double value = parse_double(text);
  if (value != std::floor(value) || std::abs(value) > 9.0e15) {
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  }
  return static_cast<long long>(value);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double euclidean_length(std::span<const double> x) { return std::sqrt(dot(x, x)); }

namespace {

constexpr double kLevel = 10.0;

double lp_value(std::span<const double> x, double p) {
  if (p == 2.0) return euclidean_length(x);
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  if (p == 4.0) {
    for (double v : x) {
      const double r = v / m;
      const double r2 = r * r;
      s += r2 * r2;
    }
    return m * std::sqrt(std::sqrt(s));
  }
  for (double v : x) s += std::pow(std::abs(v) / m, p);
  return m * std::pow(s, 1.0 / p);
}

void validate_dim(int dim) {
  if (dim < 2) throw std::invalid_argument("norm dimension must be >= 2 (got " + std::to_string(dim) + ")");
}

void validate_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument("lp norm requires 1 < p < inf (got p=" + format_double(p) + ")");
  }
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

int parse_dim(std::string_view text) {
  const auto v = parse_integer(text);
  if (v < 2 || v > 1'000'000) throw std::invalid_argument("norm dimension must be >= 2 (got " + std::string(text) + ")");
  return static_cast<int>(v);
}

// Unit-weight rule on S^{dim-1}: directions stored row-major.
void sphere_rule(int dim, std::vector<double>& dirs, std::vector<double>& weights) {
  constexpr int kAzimuth = 12;
  constexpr int kPolar = 6;
  if (dim == 2) {
    for (int i = 0; i < kAzimuth; ++i) {
      const double a = 2.0 * std::numbers::pi * (i + 0.5) / kAzimuth;
      dirs.push_back(std::cos(a));
      dirs.push_back(std::sin(a));
      weights.push_back(1.0 / kAzimuth);
    }
    return;
  }
  std::vector<double> sub_dirs, sub_weights;
  sphere_rule(dim - 1, sub_dirs, sub_weights);
  const auto polar = gauss_legendre(kPolar, 0.0, std::numbers::pi);
  double total = 0.0;
  for (std::size_t i = 0; i < polar.nodes.size(); ++i) {
    total += polar.weights[i] * std::pow(std::sin(polar.nodes[i]), dim - 2);
  }
  for (std::size_t i = 0; i < polar.nodes.size(); ++i) {
    const double chi = polar.nodes[i];
    const double wchi = polar.weights[i] * std::pow(std::sin(chi), dim - 2) / total;
    for (std::size_t j = 0; j < sub_weights.size(); ++j) {
      dirs.push_back(std::cos(chi));
      for (int c = 0; c < dim - 1; ++c) dirs.push_back(std::sin(chi) * sub_dirs[j * (dim - 1) + c]);
      weights.push_back(wchi * sub_weights[j]);
    }
  }
}

}  // namespace

struct Norm::Smoothing {
  Norm base;
  double width;
  double delta;
  // Quadrature for the uniform probability on the Euclidean ball of radius width.
  std::vector<double> offsets;  // row-major, dim per node
  std::vector<double> weights;

  double mollified(std::span<const double> x, std::vector<double>& scratch) const {
    const int d = base.dim();
    double acc = 0.0;
    for (std::size_t q = 0; q < weights.size(); ++q) {
      for (int c = 0; c < d; ++c) scratch[c] = x[c] - offsets[q * d + c];
      acc += weights[q] * base(scratch);
    }
    return acc;
  }

  // Gauge of the convex level set {f <= kLevel}, rescaled to be comparable to the base norm.
  double gauge(std::span<const double> x) const {
    const double b = base(x);
    if (b == 0.0) return 0.0;
    if (width == 0.0) return b;
    const int d = base.dim();
    std::vector<double> scaled(d), scratch(d);
    auto level_gap = [&](double t) {
      for (int c = 0; c < d; ++c) scaled[c] = t * x[c];
      return mollified(scaled, scratch) - kLevel;
    };
    const double c2 = base.euclidean_upper_constant();
    double lo = std::max(0.0, (kLevel - c2 * width) / b);
    double hi = kLevel / b;
    const double flo = level_gap(lo);
    const double fhi = level_gap(hi);
    if (flo >= 0.0) return kLevel / lo;
    if (fhi <= 0.0) return kLevel / hi;
    std::uintmax_t iters = 100;
    auto tol = boost::math::tools::eps_tolerance<double>(52);
    auto [a, z] = boost::math::tools::toms748_solve(level_gap, lo, hi, flo, fhi, tol, iters);
    return kLevel / (0.5 * (a + z));
  }
};

Norm Norm::euclidean(int dim) {
  validate_dim(dim);
  return Norm(NormKind::euclidean, dim, 2.0);
}

Norm Norm::lp(double p, int dim) {
  validate_dim(dim);
  validate_p(p);
  return Norm(NormKind::lp, dim, p);
}

Norm Norm::parse(std::string_view text) {
  const auto parts = split(text, ':');
  auto fail = [&](const std::string& why) -> Norm {
    throw std::invalid_argument("bad norm string '" + std::string(text) + "': " + why);
  };
  if (parts.empty()) return fail("empty");
  if (parts[0] == "euclidean") {
    if (parts.size() != 2) return fail("expected euclidean:<dim>");
    return euclidean(parse_dim(parts[1]));
  }
  if (parts[0] == "lp") {
    if (parts.size() != 3) return fail("expected lp:<p>:<dim>");
    return lp(parse_double(parts[1]), parse_dim(parts[2]));
  }
  if (parts[0] == "reg") {
    if (parts.size() < 3) return fail("expected reg:<base>:w=<width>:d=<delta>");
    const bool lp_base = parts[1] == "lp";
    const std::size_t base_len = lp_base ? 3 : 2;
    if (parts.size() != 1 + base_len + 2) return fail("expected reg:<base>:w=<width>:d=<delta>");
    std::string base_text;
    for (std::size_t i = 1; i <= base_len; ++i) {
      if (i > 1) base_text += ':';
      base_text += parts[i];
    }
    const Norm base = parse(base_text);
    const auto w = parts[1 + base_len];
    const auto d = parts[2 + base_len];
    if (!w.starts_with("w=") || !d.starts_with("d=")) return fail("expected w=<width>:d=<delta>");
    return smooth_norm(base, parse_double(w.substr(2)), parse_double(d.substr(2)));
  }
  return fail("unknown kind '" + std::string(parts[0]) + "'");
}

const Norm& Norm::base() const { return smoothing_ ? smoothing_->base : *this; }
double Norm::mollifier_width() const { return smoothing_ ? smoothing_->width : 0.0; }
double Norm::delta_reg() const { return smoothing_ ? smoothing_->delta : 0.0; }

std::string Norm::to_string() const {
  switch (kind_) {
    case NormKind::euclidean: return "euclidean:" + std::to_string(dim_);
    case NormKind::lp: return "lp:" + format_double(p_) + ":" + std::to_string(dim_);
    case NormKind::regularized:
      return "reg:" + smoothing_->base.to_string() + ":w=" + format_double(smoothing_->width) +
             ":d=" + format_double(smoothing_->delta);
  }
  return {};
}

double Norm::base_eval(std::span<const double> x) const { return lp_value(x, p_); }

double Norm::operator()(std::span<const double> x) const {
  if (kind_ != NormKind::regularized) return base_eval(x);
  const double g = smoothing_->gauge(x);
  if (smoothing_->delta == 0.0) return g;
  return std::sqrt(g * g + smoothing_->delta * dot(x, x));
}

double Norm::euclidean_lower_constant() const {
  if (kind_ == NormKind::regularized) {
    // Jensen: the mollified function dominates the base norm, so the gauge does too.
    return std::max(smoothing_->base.euclidean_lower_constant(), std::sqrt(smoothing_->delta));
  }
  return euclidean_sandwich(*this).lower;
}

double Norm::euclidean_upper_constant() const {
  if (kind_ == NormKind::regularized) {
    const double c2 = smoothing_->base.euclidean_upper_constant();
    const double g = c2 * kLevel / (kLevel - c2 * smoothing_->width);
    return std::sqrt(g * g + smoothing_->delta);
  }
  return euclidean_sandwich(*this).upper;
}

double norm_eval(const Norm& norm, std::span<const double> x) {
  if (static_cast<int>(x.size()) != norm.dim()) {
    throw std::invalid_argument("dimension mismatch: vector has " + std::to_string(x.size()) +
                                " entries, norm has dim " + std::to_string(norm.dim()));
  }
  return norm(x);
}

Norm smooth_norm(const Norm& norm, double mollifier_width, double delta_reg) {
  if (norm.kind() == NormKind::regularized) {
    throw std::invalid_argument("smooth_norm: base must be euclidean or lp");
  }
  if (norm.dim() > 4) {
    throw std::invalid_argument("smooth_norm: dimension " + std::to_string(norm.dim()) + " too large (max 4)");
  }
  if (!(mollifier_width >= 0.0) || !(delta_reg >= 0.0) || !std::isfinite(mollifier_width) ||
      !std::isfinite(delta_reg)) {
    throw std::invalid_argument("smooth_norm: parameters must be nonnegative");
  }
  if (mollifier_width >= 1.0) {
    throw std::invalid_argument("smooth_norm: mollifier width must be < 1");
  }
  auto s = std::make_shared<Norm::Smoothing>(Norm::Smoothing{norm, mollifier_width, delta_reg, {}, {}});
  if (mollifier_width > 0.0) {
    const int d = norm.dim();
    std::vector<double> dirs, dir_w;
    sphere_rule(d, dirs, dir_w);
    // Radial density of the uniform ball law is proportional to s^{d-1}.
    const auto radial = gauss_legendre(6, 0.0, mollifier_width);
    double rtotal = 0.0;
    for (std::size_t i = 0; i < radial.nodes.size(); ++i) rtotal += radial.weights[i] * std::pow(radial.nodes[i], d - 1);
    for (std::size_t i = 0; i < radial.nodes.size(); ++i) {
      const double r = radial.nodes[i];
      const double wr = radial.weights[i] * std::pow(r, d - 1) / rtotal;
      for (std::size_t j = 0; j < dir_w.size(); ++j) {
        for (int c = 0; c < d; ++c) s->offsets.push_back(r * dirs[j * d + c]);
        s->weights.push_back(wr * dir_w[j]);
      }
    }
  }
  Norm out(NormKind::regularized, norm.dim(), norm.p());
  out.smoothing_ = std::move(s);
  return out;
}

Point radial_project(const Norm& norm, std::span<const double> x) {
  const double n = norm_eval(norm, x);
  if (n == 0.0) throw std::invalid_argument("radial_project: zero vector");
  Point out(x.begin(), x.end());
  for (double& v : out) v /= n;
  return out;
}

Sandwich euclidean_sandwich(const Norm& norm) {
  const double d = norm.dim();
  switch (norm.kind()) {
    case NormKind::euclidean: return {1.0, 1.0};
    case NormKind::lp: {
      const double p = norm.p();
      if (p == 2.0) return {1.0, 1.0};
      const double ratio = std::pow(d, 1.0 / p - 0.5);
      // p > 2: the diagonal minimizes ||x||_p / |x|_2; p < 2: it maximizes it.
      return p > 2.0 ? Sandwich{ratio, 1.0} : Sandwich{1.0, ratio};
    }
    case NormKind::regularized: break;
  }
  throw std::invalid_argument("euclidean_sandwich: unsupported norm kind '" + norm.to_string() + "'");
}

double measure_radial_bilipschitz(const Norm& from, const Norm& to, std::size_t pairs, std::uint64_t seed) {
  if (from.dim() != to.dim()) throw std::invalid_argument("measure_radial_bilipschitz: dimension mismatch");
  const int d = from.dim();
  double worst = 1.0;
  Point g(d), h(d), x(d), y(d), px(d), py(d), diff(d);
  for (std::size_t i = 0; i < pairs; ++i) {
    CounterRng rng(seed, streams::probes, i);
    std::normal_distribution<double> normal;
    for (int c = 0; c < d; ++c) g[c] = normal(rng);
    for (int c = 0; c < d; ++c) h[c] = normal(rng);
    // Separations from 1e-4 up to order one.
    const double scale = std::pow(10.0, -4.0 + 4.0 * rng.uniform());
    for (int c = 0; c < d; ++c) h[c] = g[c] + scale * euclidean_length(g) * h[c];
    const double ng = from(g), nh = from(h);
    if (ng == 0.0 || nh == 0.0) continue;
    for (int c = 0; c < d; ++c) {
      x[c] = g[c] / ng;
      y[c] = h[c] / nh;
    }
    const double tx = to(x), ty = to(y);
    for (int c = 0; c < d; ++c) {
      px[c] = x[c] / tx;
      py[c] = y[c] / ty;
    }
    for (int c = 0; c < d; ++c) diff[c] = x[c] - y[c];
    const double a = from(diff);
    for (int c = 0; c < d; ++c) diff[c] = px[c] - py[c];
    const double b = to(diff);
    if (a <= 1e-13 || b <= 1e-13) continue;
    worst = std::max({worst, b / a, a / b});
  }
  return worst;
}

std::vector<double> squared_norm_hessian_eigenvalues(const Norm& norm, std::span<const double> x, double step) {
  const int d = norm.dim();
  if (static_cast<int>(x.size()) != d) throw std::invalid_argument("dimension mismatch");
  auto sq = [&](const Point& v) {
    const double n = norm(v);
    return n * n;
  };
  Point base(x.begin(), x.end());
  const double f0 = sq(base);
  Eigen::MatrixXd hess(d, d);
  for (int i = 0; i < d; ++i) {
    Point a = base, b = base;
    a[i] += step;
    b[i] -= step;
    hess(i, i) = (sq(a) - 2.0 * f0 + sq(b)) / (step * step);
    for (int j = i + 1; j < d; ++j) {
      Point pp = base, pm = base, mp = base, mm = base;
      pp[i] += step; pp[j] += step;
      pm[i] += step; pm[j] -= step;
      mp[i] -= step; mp[j] += step;
      mm[i] -= step; mm[j] -= step;
      hess(i, j) = hess(j, i) = (sq(pp) - sq(pm) - sq(mp) + sq(mm)) / (4.0 * step * step);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hess, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

}  // namespace waist
