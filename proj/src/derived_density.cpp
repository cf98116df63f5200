#include "waist/localization.hpp"

#include "waist/quadrature.hpp"
#include "waist/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace waist {

namespace {

struct Contains {
  std::span<const double> x;

  bool operator()(const SphericalCap& cap) const {
    const double lx = euclidean_length(x), lc = euclidean_length(cap.center);
    return dot(x, cap.center) > std::cos(cap.angle) * lx * lc;
  }
  bool operator()(const LuneSet& lune) const {
    return x.size() == 3 && std::abs(std::atan2(x[1], x[0])) < lune.alpha;
  }
  bool operator()(const Halfspaces& h) const {
    return std::all_of(h.normals.begin(), h.normals.end(), [&](const Point& a) { return dot(a, x) > 0.0; });
  }
};

double colatitude(std::span<const double> x) { return std::atan2(std::hypot(x[0], x[1]), x[2]); }

// Radius 1/||c|| of the direction cos(theta) e_2 + sin(theta) e_0.
double lune_radius(const Norm& norm, double theta) {
  const double c[3] = {std::sin(theta), 0.0, std::cos(theta)};
  return 1.0 / norm(c);
}

}  // namespace

bool ConvexCapSpec::contains(std::span<const double> x) const { return std::visit(Contains{x}, generator); }

Indicator ConvexCapSpec::indicator() const {
  return [spec = *this](std::span<const double> x) { return spec.contains(x); };
}

ConvexityReport validate_convexity(const ConvexCapSpec& spec, std::size_t pairs, std::uint64_t seed) {
  const auto d = static_cast<std::size_t>(spec.norm.dim());
  std::vector<double> inside;
  std::vector<double> x(d);
  const std::size_t want = 2 * pairs;
  for (std::uint64_t i = 0; inside.size() < want * d && i < 1000 * want + 100000; ++i) {
    kernels::draw_conical(spec.norm, ConicalMethod::exact, seed, streams::sections, i, x);
    if (spec.contains(x)) inside.insert(inside.end(), x.begin(), x.end());
  }
  if (inside.size() < 2 * d) throw std::runtime_error("validate_convexity: set is empirically empty");
  ConvexityReport report;
  std::vector<double> w(d);
  for (std::size_t p = 0; 2 * p + 1 < inside.size() / d && p < pairs; ++p) {
    const double* a = inside.data() + 2 * p * d;
    const double* b = a + d;
    ++report.pairs;
    for (int s = 1; s < 10; ++s) {
      const double t = s / 10.0;
      for (std::size_t c = 0; c < d; ++c) w[c] = (1.0 - t) * a[c] + t * b[c];
      if (!spec.contains(w)) {
        ++report.violations;
        break;
      }
    }
  }
  report.convex = report.violations == 0;
  return report;
}

double lune_limit_density(const Norm& norm, double theta) {
  const double r = lune_radius(norm, theta);
  return std::sin(theta) * r * r * r;
}

DerivedDensityReport derived_density_estimate(const Norm& norm, const DerivedDensityOptions& options) {
  constexpr int n = 2;
  constexpr double pi = std::numbers::pi;
  if (norm.dim() != 3) throw std::invalid_argument("derived_density_estimate: needs a 3-dimensional norm");
  if (options.alphas.empty() || options.bins < 2) throw std::invalid_argument("derived_density_estimate: bad options");
  for (double a : options.alphas)
    if (!(a > 0.0 && a < pi / 2)) throw std::invalid_argument("derived_density_estimate: lune angle must be in (0, pi/2)");

  DerivedDensityReport report;
  report.alphas = options.alphas;
  const std::size_t smallest =
      static_cast<std::size_t>(std::min_element(options.alphas.begin(), options.alphas.end()) - options.alphas.begin());
  const std::size_t bins = options.bins;
  const double width = pi / static_cast<double>(bins);
  std::vector<std::vector<std::uint64_t>> counts(options.alphas.size(), std::vector<std::uint64_t>(bins, 0));
  std::vector<double> thetas;  // accepted colatitudes at the smallest angle

  constexpr std::size_t block = 1 << 16;
  std::vector<double> buf(block * 3);
  for (std::size_t first = 0; first < options.sample_budget; first += block) {
    const std::size_t count = std::min(block, options.sample_budget - first);
    kernels::omp::fill_conical(norm, ConicalMethod::exact, options.seed, streams::samples, first, count,
                               std::span<double>(buf.data(), count * 3));
    for (std::size_t i = 0; i < count; ++i) {
      const std::span<const double> x(buf.data() + 3 * i, 3);
      const double wedge = std::abs(std::atan2(x[1], x[0]));
      if (wedge >= *std::max_element(options.alphas.begin(), options.alphas.end())) continue;
      const double theta = colatitude(x);
      const auto bin = std::min(bins - 1, static_cast<std::size_t>(theta / width));
      for (std::size_t a = 0; a < options.alphas.size(); ++a) {
        if (wedge < options.alphas[a]) ++counts[a][bin];
      }
      if (wedge < options.alphas[smallest]) thetas.push_back(theta);
    }
  }

  // Limit density in colatitude, averaged over each bin.
  const double total = integrate([&](double t) { return lune_limit_density(norm, t); }, 0.0, pi, 1e-13);
  report.limit_bin_means.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const double lo = b * width, hi = (b + 1 == bins) ? pi : (b + 1) * width;
    report.limit_bin_means[b] =
        integrate([&](double t) { return lune_limit_density(norm, t); }, lo, hi, 1e-14) / total / (hi - lo);
  }
  for (std::size_t a = 0; a < options.alphas.size(); ++a) {
    std::uint64_t accepted = 0;
    for (auto c : counts[a]) accepted += c;
    report.accepted.push_back(accepted);
    if (accepted == 0) throw std::runtime_error("derived_density_estimate: no samples fell in the lune");
    double l1 = 0.0;
    std::vector<double> h(bins);
    for (std::size_t b = 0; b < bins; ++b) {
      h[b] = static_cast<double>(counts[a][b]) / static_cast<double>(accepted) / width;
      l1 += std::abs(h[b] - report.limit_bin_means[b]) * width;
    }
    report.l1_errors.push_back(l1);
    if (a == smallest) report.histogram = h;
  }

  // The estimate as a density with respect to the conical measure of the arc.
  const Arc arc(norm, {0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}, 0.0, pi);
  const ModulusCurve modulus = norm.kind() == NormKind::regularized
                                   ? ModulusCurve::tabulated({0.0, 2.0}, {0.0, 0.0}, "zero")
                                   : ModulusCurve::analytic(norm);
  std::vector<double> centers(bins), values(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    centers[b] = (b + 0.5) * width;
    values[b] = report.histogram[b] / arc.nu_weight(centers[b]);
  }
  report.estimate = ArcDensity::tabulated(arc, centers, values, n - 1, modulus);

  // Cone measure of t co(S) against co(S).
  const ConvexCapSpec lune{norm, LuneSet{options.alphas[smallest]}};
  for (double t : options.scalings) {
    HomogeneityProbe probe;
    probe.t = t;
    probe.fraction = cone_scaling_fraction(norm, lune.indicator(), t, options.ball_budget, options.seed);
    probe.exponent = std::log(probe.fraction.mean) / std::log(t);
    probe.exponent_sigma = probe.fraction.std_error / (probe.fraction.mean * std::abs(std::log(t)));
    report.homogeneity.push_back(probe);
  }

  // d mu / d mu_1, with mu_1 the conical measure of the full circle in the arc's plane.
  const double circle = integrate([&](double t) { return arc.nu_weight(t); }, 0.0, 2.0 * pi, 1e-13);
  const double support = integrate([&](double t) { return arc.nu_weight(t); }, 0.0, pi, 1e-13) / circle;
  for (std::size_t b = 0; b < bins; ++b)
    report.max_phi = std::max(report.max_phi, report.histogram[b] * circle / arc.nu_weight(centers[b]));
  report.phi_bound = std::pow(2.0, n + 1) / support;

  const double diameter = arc.distance(0.0, pi);
  CounterRng rng(options.seed, streams::probes, 0);
  for (std::size_t p = 0; p < options.probes; ++p) {
    BallProbe probe;
    probe.x = pi * rng.uniform();
    probe.r = 0.02 + 0.98 * rng.uniform();
    std::uint64_t hits = 0;
    for (double theta : thetas)
      if (arc.distance(probe.x, theta) < probe.r) ++hits;
    probe.mass = static_cast<double>(hits) / static_cast<double>(thetas.size());
    probe.ball_mass_bound = std::pow(2.0, n + 2) * probe.r / diameter;
    const double phi = 2.0 * std::asin(probe.r / (4.0 * std::sqrt(n + 1.0)));
    probe.bishop_bound = 0.5 * (1.0 - std::cos(phi));
    report.ball_tight_constant = std::max(report.ball_tight_constant, probe.mass * diameter / probe.r);
    report.probes.push_back(probe);
  }
  return report;
}

}  // namespace waist
