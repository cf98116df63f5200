#include "waist/kernels.hpp"

#include "waist/rng.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace waist::kernels {

namespace {

constexpr int kMaxRejections = 1'000'000;

// Uniform point of the Euclidean ball of radius `radius`.
void euclidean_ball_point(CounterRng& rng, double radius, std::span<double> out) {
  std::normal_distribution<double> normal;
  double len = 0.0;
  do {
    len = 0.0;
    for (double& v : out) {
      v = normal(rng);
      len += v * v;
    }
  } while (len == 0.0);
  const double r = radius * std::pow(rng.uniform_open0(), 1.0 / static_cast<double>(out.size())) / std::sqrt(len);
  for (double& v : out) v *= r;
}

void rejection_ball(const Norm& norm, CounterRng& rng, std::span<double> out) {
  const double radius = 1.0 / norm.euclidean_lower_constant();
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    euclidean_ball_point(rng, radius, out);
    const double n = norm(out);
    if (n <= 1.0 && n > 0.0) return;
  }
  throw std::runtime_error("rejection sampling failed for norm " + norm.to_string());
}

}  // namespace

void draw_conical(const Norm& norm, ConicalMethod method, std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t index, std::span<double> out) {
  CounterRng rng(seed, stream, index);
  if (method == ConicalMethod::exact && norm.kind() == NormKind::euclidean) {
    std::normal_distribution<double> normal;
    double len = 0.0;
    do {
      len = 0.0;
      for (double& v : out) {
        v = normal(rng);
        len += v * v;
      }
    } while (len == 0.0);
    len = std::sqrt(len);
    for (double& v : out) v /= len;
    return;
  }
  if (method == ConicalMethod::exact && norm.kind() == NormKind::lp) {
    // Coordinates with density proportional to exp(-|t|^p): |t| = G^{1/p}, G ~ Gamma(1/p).
    const double p = norm.p();
    std::gamma_distribution<double> gamma(1.0 / p, 1.0);
    double n = 0.0;
    do {
      for (double& v : out) {
        const double mag = std::pow(gamma(rng), 1.0 / p);
        v = (rng() & 1u) ? mag : -mag;
      }
      n = norm(out);
    } while (n == 0.0);
    for (double& v : out) v /= n;
    return;
  }
  rejection_ball(norm, rng, out);
  const double n = norm(out);
  for (double& v : out) v /= n;
}

void draw_ball_uniform(const Norm& norm, std::uint64_t seed, std::uint64_t stream, std::uint64_t index,
                       std::span<double> out) {
  CounterRng rng(seed, stream, index);
  rejection_ball(norm, rng, out);
}

namespace serial {

void fill_conical(const Norm& norm, ConicalMethod method, std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t first, std::size_t count, std::span<double> out) {
  const std::size_t d = static_cast<std::size_t>(norm.dim());
  for (std::size_t i = 0; i < count; ++i) {
    draw_conical(norm, method, seed, stream, first + i, out.subspan(i * d, d));
  }
}

std::uint64_t count_near(const CloudIndex& cloud, std::span<const double> points, double eps, const Indicator* also) {
  const std::size_t d = static_cast<std::size_t>(cloud.dim());
  const std::size_t count = points.size() / d;
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto x = points.subspan(i * d, d);
    if ((also && (*also)(x)) || cloud.any_within(x, eps)) ++hits;
  }
  return hits;
}

std::uint64_t count_conical_if(const Norm& norm, ConicalMethod method, std::uint64_t seed, std::uint64_t stream,
                               std::size_t count, const Indicator& pred) {
  std::vector<double> x(static_cast<std::size_t>(norm.dim()));
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < count; ++i) {
    draw_conical(norm, method, seed, stream, i, x);
    if (pred(x)) ++hits;
  }
  return hits;
}

}  // namespace serial

}  // namespace waist::kernels
