#pragma once

#include "waist/norm.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace waist {

/// Static kd-tree over a point cloud answering norm-distance range queries.
///
/// Box pruning is exact for Euclidean and l_p norms (both are monotone in
/// the absolute coordinates); other norms fall back to the guaranteed
/// Euclidean lower constant.
class CloudIndex {
 public:
  /// `points` is row-major with `norm.dim()` columns.
  CloudIndex(const Norm& norm, std::vector<double> points);

  std::size_t size() const { return count_; }
  int dim() const { return dim_; }

  /// True iff some cloud point y has ||x - y|| <= eps.
  bool any_within(std::span<const double> x, double eps) const;

  /// min over the cloud of ||x - y||.
  double nearest_distance(std::span<const double> x) const;

  std::span<const double> point(std::size_t i) const { return {points_.data() + i * dim_, static_cast<std::size_t>(dim_)}; }

 private:
  struct Node {
    std::size_t begin, end;  // point range
    int left = -1, right = -1;
    std::vector<double> lo, hi;
  };

  int build(std::vector<std::size_t>& order, std::size_t begin, std::size_t end);
  double box_lower_bound(const Node& node, std::span<const double> x, std::span<double> gap) const;

  Norm norm_;
  int dim_;
  std::size_t count_;
  bool exact_boxes_;
  double lower_constant_;
  std::vector<double> points_;
  std::vector<Node> nodes_;
};

}  // namespace waist
