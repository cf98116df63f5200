#pragma once

#include "waist/kernels.hpp"
#include "waist/norm.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace waist {

using kernels::ConicalMethod;
using kernels::Indicator;

struct EmptyFiberError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Monte Carlo proportion with its binomial standard error.
struct MeasureEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;

  static MeasureEstimate from_counts(std::uint64_t hits, std::uint64_t count, std::uint64_t seed);
};

nlohmann::json to_json(const MeasureEstimate& e);

/// Seeded points of S(X) under the conical measure, row-major.
class SampleBatch {
 public:
  SampleBatch(Norm norm, std::uint64_t seed, std::size_t count, ConicalMethod method, std::vector<double> coords);

  const Norm& norm() const { return norm_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t count() const { return count_; }
  ConicalMethod method() const { return method_; }
  int dim() const { return norm_.dim(); }
  std::span<const double> coords() const { return coords_; }
  std::span<const double> point(std::size_t i) const {
    const auto d = static_cast<std::size_t>(dim());
    return {coords_.data() + i * d, d};
  }

 private:
  Norm norm_;
  std::uint64_t seed_;
  std::size_t count_;
  ConicalMethod method_;
  std::vector<double> coords_;
};

/// Conical probability measure on S(X): for l_p norms g/||g||_p with
/// coordinates of density proportional to exp(-|t|^p); otherwise rejection
/// from a bounding Euclidean ball followed by radial projection.
SampleBatch sample_conical(const Norm& norm, std::size_t count, std::uint64_t seed,
                           ConicalMethod method = ConicalMethod::exact);

/// Fraction of batch points satisfying `indicator`.
MeasureEstimate set_measure(const SampleBatch& batch, const Indicator& indicator);

/// One point per row, header x0,x1,...
std::string batch_csv(const SampleBatch& batch);

/// Points of the fiber {||y|| = 1, f y = z} of a linear map f (k x dim).
struct FiberCloud {
  int dim = 0;
  std::vector<double> coords;
  std::size_t size() const { return dim == 0 ? 0 : coords.size() / static_cast<std::size_t>(dim); }
  std::span<const double> point(std::size_t i) const {
    const auto d = static_cast<std::size_t>(dim);
    return {coords.data() + i * d, d};
  }
};

/// Builds the minimal-Euclidean-norm solution x0 of f x = z, draws directions
/// v in ker f and solves ||x0 + t v|| = 1 for t > 0 by bisection.
/// Throws EmptyFiberError when ||x0|| >= 1 and std::invalid_argument when f is
/// rank deficient.
FiberCloud fiber_points(const Norm& norm, const Eigen::MatrixXd& f, const Eigen::VectorXd& z, std::size_t count,
                        std::uint64_t seed);

/// max(1e4, 100 / eps^k).
std::size_t default_fiber_budget(double eps, int k);

/// mu(f^{-1}(z) + eps) estimated against a fiber point cloud. The cloud
/// distance overestimates the true distance, so the estimate is biased low.
MeasureEstimate tube_measure(const Norm& norm, const Eigen::MatrixXd& f, const Eigen::VectorXd& z, double eps,
                             std::size_t sample_budget, std::size_t fiber_budget, std::uint64_t seed);

/// Same, against an existing sample batch (common random numbers across z).
MeasureEstimate tube_measure(const SampleBatch& batch, const Eigen::MatrixXd& f, const Eigen::VectorXd& z, double eps,
                             std::size_t fiber_budget, std::uint64_t seed);

struct BestFiber {
  Eigen::VectorXd z;
  std::size_t index = 0;
  MeasureEstimate estimate;
  std::vector<std::optional<MeasureEstimate>> per_z;  ///< nullopt where the fiber is empty
};

/// Grid argmax of the tube measure; ties go to the first grid index.
BestFiber best_fiber(const Norm& norm, const Eigen::MatrixXd& f, double eps, const std::vector<Eigen::VectorXd>& z_grid,
                     std::size_t sample_budget, std::size_t fiber_budget, std::uint64_t seed);

/// mu(A + eps): points of A count directly, other samples count when within
/// eps of a cloud of up to `cloud_budget` sample points inside A.
MeasureEstimate neighborhood_measure(const Norm& norm, const Indicator& set, double eps, std::size_t sample_budget,
                                     std::size_t cloud_budget, std::uint64_t seed);

/// Among uniform points of co(A) = {x in B(X): x/||x|| in A}, the fraction with
/// ||x|| <= t. For the conical measure this is t^{dim}.
MeasureEstimate cone_scaling_fraction(const Norm& norm, const Indicator& set, double t, std::size_t count,
                                      std::uint64_t seed);

/// Standard linear map x -> (x_{dim-k}, ..., x_{dim-1}).
Eigen::MatrixXd last_coordinates_map(int dim, int k);

}  // namespace waist
