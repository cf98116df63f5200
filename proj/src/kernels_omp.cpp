#include "waist/kernels.hpp"

#include <omp.h>

#include <vector>

namespace waist::kernels::omp {

void fill_conical(const Norm& norm, ConicalMethod method, std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t first, std::size_t count, std::span<double> out) {
  const std::size_t d = static_cast<std::size_t>(norm.dim());
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    draw_conical(norm, method, seed, stream, first + u, out.subspan(u * d, d));
  }
}

std::uint64_t count_near(const CloudIndex& cloud, std::span<const double> points, double eps, const Indicator* also) {
  const std::size_t d = static_cast<std::size_t>(cloud.dim());
  const auto n = static_cast<std::int64_t>(points.size() / d);
  std::uint64_t hits = 0;
#pragma omp parallel for schedule(dynamic, 4096) reduction(+ : hits)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto x = points.subspan(static_cast<std::size_t>(i) * d, d);
    if ((also && (*also)(x)) || cloud.any_within(x, eps)) ++hits;
  }
  return hits;
}

std::uint64_t count_conical_if(const Norm& norm, ConicalMethod method, std::uint64_t seed, std::uint64_t stream,
                               std::size_t count, const Indicator& pred) {
  const std::size_t d = static_cast<std::size_t>(norm.dim());
  const auto n = static_cast<std::int64_t>(count);
  std::uint64_t hits = 0;
#pragma omp parallel reduction(+ : hits)
  {
    std::vector<double> x(d);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      draw_conical(norm, method, seed, stream, static_cast<std::uint64_t>(i), x);
      if (pred(x)) ++hits;
    }
  }
  return hits;
}

}  // namespace waist::kernels::omp
