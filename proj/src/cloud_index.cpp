#include "waist/cloud_index.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace waist {

namespace {
constexpr std::size_t kLeafSize = 12;
}

CloudIndex::CloudIndex(const Norm& norm, std::vector<double> points)
    : norm_(norm),
      dim_(norm.dim()),
      count_(points.size() / static_cast<std::size_t>(norm.dim())),
      exact_boxes_(norm.kind() != NormKind::regularized),
      lower_constant_(norm.euclidean_lower_constant()) {
  if (points.size() % static_cast<std::size_t>(dim_) != 0) throw std::invalid_argument("CloudIndex: ragged points");
  std::vector<std::size_t> order(count_);
  std::iota(order.begin(), order.end(), 0);
  points_.swap(points);
  if (count_ == 0) return;
  nodes_.reserve(2 * count_ / kLeafSize + 2);
  build(order, 0, count_);
  // Store points in tree order for locality.
  std::vector<double> sorted(points_.size());
  for (std::size_t i = 0; i < count_; ++i) {
    std::copy_n(points_.begin() + static_cast<std::ptrdiff_t>(order[i] * dim_), dim_,
                sorted.begin() + static_cast<std::ptrdiff_t>(i * dim_));
  }
  points_.swap(sorted);
}

int CloudIndex::build(std::vector<std::size_t>& order, std::size_t begin, std::size_t end) {
  Node node{begin, end, -1, -1, std::vector<double>(dim_, std::numeric_limits<double>::infinity()),
            std::vector<double>(dim_, -std::numeric_limits<double>::infinity())};
  for (std::size_t i = begin; i < end; ++i) {
    for (int c = 0; c < dim_; ++c) {
      const double v = points_[order[i] * dim_ + c];
      node.lo[c] = std::min(node.lo[c], v);
      node.hi[c] = std::max(node.hi[c], v);
    }
  }
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return id;
  int axis = 0;
  for (int c = 1; c < dim_; ++c) {
    if (node.hi[c] - node.lo[c] > node.hi[axis] - node.lo[axis]) axis = c;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order.begin() + static_cast<std::ptrdiff_t>(begin), order.begin() + static_cast<std::ptrdiff_t>(mid),
                   order.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                     return points_[a * dim_ + axis] < points_[b * dim_ + axis];
                   });
  const int left = build(order, begin, mid);
  const int right = build(order, mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double CloudIndex::box_lower_bound(const Node& node, std::span<const double> x, std::span<double> gap) const {
  for (int c = 0; c < dim_; ++c) {
    gap[c] = std::max({0.0, node.lo[c] - x[c], x[c] - node.hi[c]});
  }
  if (exact_boxes_) return norm_(gap);
  return lower_constant_ * euclidean_length(gap);
}

bool CloudIndex::any_within(std::span<const double> x, double eps) const {
  if (count_ == 0) return false;
  double gap_buf[16];
  std::vector<double> gap_heap;
  std::span<double> gap;
  if (dim_ <= 16) {
    gap = std::span<double>(gap_buf, dim_);
  } else {
    gap_heap.resize(dim_);
    gap = gap_heap;
  }
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (box_lower_bound(node, x, gap) > eps) continue;
    if (node.left < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const double* p = points_.data() + i * dim_;
        for (int c = 0; c < dim_; ++c) gap[c] = x[c] - p[c];
        if (norm_(gap) <= eps) return true;
      }
      continue;
    }
    // Push the farther child first so the nearer one is explored next.
    const Node& l = nodes_[node.left];
    const Node& r = nodes_[node.right];
    double dl = 0.0, dr = 0.0;
    for (int c = 0; c < dim_; ++c) {
      const double cl = 0.5 * (l.lo[c] + l.hi[c]) - x[c];
      const double cr = 0.5 * (r.lo[c] + r.hi[c]) - x[c];
      dl += cl * cl;
      dr += cr * cr;
    }
    if (dl <= dr) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return false;
}

double CloudIndex::nearest_distance(std::span<const double> x) const {
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> gap(dim_);
  std::vector<int> stack{0};
  if (count_ == 0) return best;
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (box_lower_bound(node, x, gap) >= best) continue;
    if (node.left < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const double* p = points_.data() + i * dim_;
        for (int c = 0; c < dim_; ++c) gap[c] = x[c] - p[c];
        best = std::min(best, norm_(gap));
      }
      continue;
    }
    stack.push_back(node.right);
    stack.push_back(node.left);
  }
  return best;
}

}  // namespace waist
