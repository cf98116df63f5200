#include "waist/conical.hpp"

#include "waist/cloud_index.hpp"
#include "waist/format.hpp"
#include "waist/rng.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace waist {

MeasureEstimate MeasureEstimate::from_counts(std::uint64_t hits, std::uint64_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("measure estimate over zero samples");
  const double mean = static_cast<double>(hits) / static_cast<double>(count);
  return {mean, std::sqrt(mean * (1.0 - mean) / static_cast<double>(count)), count, seed};
}

nlohmann::json to_json(const MeasureEstimate& e) {
  return {{"mean", e.mean}, {"std_error", e.std_error}, {"count", e.count}, {"seed", e.seed}};
}

SampleBatch::SampleBatch(Norm norm, std::uint64_t seed, std::size_t count, ConicalMethod method,
                         std::vector<double> coords)
    : norm_(std::move(norm)), seed_(seed), count_(count), method_(method), coords_(std::move(coords)) {}

SampleBatch sample_conical(const Norm& norm, std::size_t count, std::uint64_t seed, ConicalMethod method) {
  if (count < 1) throw std::invalid_argument("sample_conical: count must be >= 1");
  std::vector<double> coords(count * static_cast<std::size_t>(norm.dim()));
  kernels::omp::fill_conical(norm, method, seed, streams::samples, 0, count, coords);
  return SampleBatch(norm, seed, count, method, std::move(coords));
}

MeasureEstimate set_measure(const SampleBatch& batch, const Indicator& indicator) {
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < batch.count(); ++i) {
    if (indicator(batch.point(i))) ++hits;
  }
  return MeasureEstimate::from_counts(hits, batch.count(), batch.seed());
}

std::string batch_csv(const SampleBatch& batch) {
  std::ostringstream out;
  for (int c = 0; c < batch.dim(); ++c) out << (c ? "," : "") << 'x' << c;
  out << '\n';
  for (std::size_t i = 0; i < batch.count(); ++i) {
    const auto p = batch.point(i);
    for (std::size_t c = 0; c < p.size(); ++c) out << (c ? "," : "") << format_double(p[c]);
    out << '\n';
  }
  return out.str();
}

FiberCloud fiber_points(const Norm& norm, const Eigen::MatrixXd& f, const Eigen::VectorXd& z, std::size_t count,
                        std::uint64_t seed) {
  const int d = norm.dim();
  const auto k = static_cast<int>(f.rows());
  if (f.cols() != d) throw std::invalid_argument("fiber_points: map has wrong number of columns");
  if (z.size() != k) throw std::invalid_argument("fiber_points: z has wrong length");
  if (k < 1 || k >= d) throw std::invalid_argument("fiber_points: need 1 <= k < dim");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(f, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(k - 1) <= 1e-12 * sv(0)) throw std::invalid_argument("fiber_points: rank-deficient map");
  const Eigen::VectorXd x0 = svd.solve(z);
  const Eigen::MatrixXd kernel = svd.matrixV().rightCols(d - k);
  const double n0 = norm(std::span<const double>(x0.data(), static_cast<std::size_t>(d)));
  if (n0 >= 1.0) throw EmptyFiberError("empty fiber: minimal-norm point has norm " + format_double(n0));

  FiberCloud cloud;
  cloud.dim = d;
  cloud.coords.resize(count * static_cast<std::size_t>(d));
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    CounterRng rng(seed, streams::fiber, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> normal;
    Eigen::VectorXd g(d - k);
    do {
      for (int c = 0; c < d - k; ++c) g(c) = normal(rng);
    } while (g.norm() == 0.0);
    const Eigen::VectorXd v = kernel * (g / g.norm());
    Eigen::VectorXd y(d);
    auto radius = [&](double t) {
      y = x0 + t * v;
      return norm(std::span<const double>(y.data(), static_cast<std::size_t>(d)));
    };
    // t -> ||x0 + t v|| is convex with value < 1 at 0: exactly one positive root.
    double lo = 0.0;
    double hi = (1.0 + n0) / norm(std::span<const double>(v.data(), static_cast<std::size_t>(d)));
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (radius(mid) < 1.0) lo = mid; else hi = mid;
    }
    const double t = (std::abs(radius(lo) - 1.0) < std::abs(radius(hi) - 1.0)) ? lo : hi;
    y = x0 + t * v;
    std::copy(y.data(), y.data() + d, cloud.coords.begin() + i * d);
  }
  return cloud;
}

std::size_t default_fiber_budget(double eps, int k) {
  const double want = 100.0 / std::pow(eps, k);
  return static_cast<std::size_t>(std::ceil(std::max(1e4, std::min(want, 1e7)) - 1e-6));
}

MeasureEstimate tube_measure(const SampleBatch& batch, const Eigen::MatrixXd& f, const Eigen::VectorXd& z, double eps,
                             std::size_t fiber_budget, std::uint64_t seed) {
  if (!(eps > 0.0)) throw std::invalid_argument("tube_measure: eps must be positive");
  const auto cloud = fiber_points(batch.norm(), f, z, fiber_budget, seed);
  // Any two points of S(X) are within norm distance 2.
  if (eps >= 2.0) return MeasureEstimate::from_counts(batch.count(), batch.count(), batch.seed());
  const CloudIndex index(batch.norm(), cloud.coords);
  const auto hits = kernels::omp::count_near(index, batch.coords(), eps);
  return MeasureEstimate::from_counts(hits, batch.count(), batch.seed());
}

MeasureEstimate tube_measure(const Norm& norm, const Eigen::MatrixXd& f, const Eigen::VectorXd& z, double eps,
                             std::size_t sample_budget, std::size_t fiber_budget, std::uint64_t seed) {
  const auto batch = sample_conical(norm, sample_budget, seed);
  return tube_measure(batch, f, z, eps, fiber_budget, seed);
}

BestFiber best_fiber(const Norm& norm, const Eigen::MatrixXd& f, double eps, const std::vector<Eigen::VectorXd>& z_grid,
                     std::size_t sample_budget, std::size_t fiber_budget, std::uint64_t seed) {
  if (z_grid.empty()) throw std::invalid_argument("best_fiber: empty z grid");
  const auto batch = sample_conical(norm, sample_budget, seed);
  BestFiber best;
  bool found = false;
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    try {
      const auto est = tube_measure(batch, f, z_grid[i], eps, fiber_budget, seed);
      best.per_z.emplace_back(est);
      if (!found || est.mean > best.estimate.mean) {
        best.z = z_grid[i];
        best.index = i;
        best.estimate = est;
        found = true;
      }
    } catch (const EmptyFiberError&) {
      best.per_z.emplace_back(std::nullopt);
    }
  }
  if (!found) throw EmptyFiberError("best_fiber: all fibers on the grid are empty");
  return best;
}

MeasureEstimate neighborhood_measure(const Norm& norm, const Indicator& set, double eps, std::size_t sample_budget,
                                     std::size_t cloud_budget, std::uint64_t seed) {
  if (!(eps > 0.0)) throw std::invalid_argument("neighborhood_measure: eps must be positive");
  const auto d = static_cast<std::size_t>(norm.dim());
  std::vector<double> cloud;
  std::vector<double> block(4096 * d);
  const std::size_t max_draws = std::max<std::size_t>(cloud_budget * 200, 1'000'000);
  std::size_t drawn = 0;
  while (cloud.size() < cloud_budget * d && drawn < max_draws) {
    kernels::omp::fill_conical(norm, ConicalMethod::exact, seed, streams::cloud, drawn, 4096, block);
    for (std::size_t i = 0; i < 4096 && cloud.size() < cloud_budget * d; ++i) {
      const std::span<const double> x(block.data() + i * d, d);
      if (set(x)) cloud.insert(cloud.end(), x.begin(), x.end());
    }
    drawn += 4096;
  }
  if (cloud.empty()) throw std::runtime_error("neighborhood_measure: set is empirically empty");
  const CloudIndex index(norm, std::move(cloud));
  const Indicator near = [&](std::span<const double> x) { return set(x) || index.any_within(x, eps); };
  const auto hits = kernels::omp::count_conical_if(norm, ConicalMethod::exact, seed, streams::samples, sample_budget, near);
  return MeasureEstimate::from_counts(hits, sample_budget, seed);
}

MeasureEstimate cone_scaling_fraction(const Norm& norm, const Indicator& set, double t, std::size_t count,
                                      std::uint64_t seed) {
  const auto d = static_cast<std::size_t>(norm.dim());
  std::uint64_t inside = 0, scaled = 0;
  std::vector<double> x(d), dir(d);
  for (std::size_t i = 0; i < count; ++i) {
    kernels::draw_ball_uniform(norm, seed, streams::ball, i, x);
    const double r = norm(x);
    for (std::size_t c = 0; c < d; ++c) dir[c] = x[c] / r;
    if (!set(dir)) continue;
    ++inside;
    if (r <= t) ++scaled;
  }
  return MeasureEstimate::from_counts(scaled, inside, seed);
}

Eigen::MatrixXd last_coordinates_map(int dim, int k) {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(k, dim);
  for (int r = 0; r < k; ++r) f(r, dim - k + r) = 1.0;
  return f;
}

}  // namespace waist
