#pragma once

#include <vector>

#include "curio/geometry.hpp"

namespace curio {

/// Static 2-d tree over a point set, built by median splits. Point indices refer to the input
/// order.
class KdTree2 {
 public:
  KdTree2() = default;
  explicit KdTree2(std::vector<Vec2> points);

  std::size_t size() const { return points_.size(); }
  const Vec2& point(int i) const { return points_[static_cast<std::size_t>(i)]; }

  /// Indices of all points with distance <= radius from q, ascending.
  std::vector<int> radius_search(const Vec2& q, double radius) const;

  /// Index of the closest point (lowest index on ties), or -1 for an empty tree.
  int nearest(const Vec2& q) const;

 private:
  void build(int lo, int hi, int depth);
  void radius_search(int lo, int hi, int depth, const Vec2& q, double r2, std::vector<int>& out) const;
  void nearest(int lo, int hi, int depth, const Vec2& q, int& best, double& best_d2) const;

  std::vector<Vec2> points_;
  std::vector<int> order_;  // implicit tree: node of [lo, hi) is order_[(lo + hi) / 2]
};

}  // namespace curio
