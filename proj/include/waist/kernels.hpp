#pragma once

#include "waist/cloud_index.hpp"
#include "waist/norm.hpp"

#include <cstdint>
#include <functional>
#include <span>

/// Data-parallel inner loops. `serial` is the reference implementation kept
/// for testing; `omp` must return bit-identical results for any thread count.
namespace waist::kernels {

using Indicator = std::function<bool(std::span<const double>)>;

enum class ConicalMethod {
  exact,      ///< direct generator (normal / generalized-Gaussian coordinates); rejection for other kinds
  rejection,  ///< uniform point in a bounding Euclidean ball, accepted inside B(X), radially projected
};

/// One conical-measure point for sample `index` of (seed, stream).
void draw_conical(const Norm& norm, ConicalMethod method, std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t index, std::span<double> out);

/// One uniform point of the unit ball B(X), by rejection from a Euclidean ball.
void draw_ball_uniform(const Norm& norm, std::uint64_t seed, std::uint64_t stream, std::uint64_t index,
                       std::span<double> out);

namespace serial {
void fill_conical(const Norm& norm, ConicalMethod method, std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t first, std::size_t count, std::span<double> out);
/// Number of rows x of `points` with `also(x)` true or within eps of the cloud.
std::uint64_t count_near(const CloudIndex& cloud, std::span<const double> points, double eps,
                         const Indicator* also = nullptr);
/// Streams `count` conical samples and counts those satisfying `pred`.
std::uint64_t count_conical_if(const Norm& norm, ConicalMethod method, std::uint64_t seed, std::uint64_t stream,
                               std::size_t count, const Indicator& pred);
}  // namespace serial

namespace omp {
void fill_conical(const Norm& norm, ConicalMethod method, std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t first, std::size_t count, std::span<double> out);
std::uint64_t count_near(const CloudIndex& cloud, std::span<const double> points, double eps,
                         const Indicator* also = nullptr);
std::uint64_t count_conical_if(const Norm& norm, ConicalMethod method, std::uint64_t seed, std::uint64_t stream,
                               std::size_t count, const Indicator& pred);
}  // namespace omp

}  // namespace waist::kernels
