#include "curio/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace curio {

KdTree2::KdTree2(std::vector<Vec2> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  build(0, static_cast<int>(order_.size()), 0);
}

void KdTree2::build(int lo, int hi, int depth) {
  if (hi - lo <= 1) return;
  const int axis = depth % 2;
  const int mid = lo + (hi - lo) / 2;
  std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi, [&](int a, int b) {
    const double ca = points_[static_cast<std::size_t>(a)](axis);
    const double cb = points_[static_cast<std::size_t>(b)](axis);
    return ca < cb || (ca == cb && a < b);
  });
  build(lo, mid, depth + 1);
  build(mid + 1, hi, depth + 1);
}

std::vector<int> KdTree2::radius_search(const Vec2& q, double radius) const {
  std::vector<int> out;
  if (radius < 0.0 || points_.empty()) return out;
  radius_search(0, static_cast<int>(order_.size()), 0, q, radius * radius, out);
  std::sort(out.begin(), out.end());
  return out;
}

void KdTree2::radius_search(int lo, int hi, int depth, const Vec2& q, double r2, std::vector<int>& out) const {
  if (lo >= hi) return;
  const int axis = depth % 2;
  const int mid = lo + (hi - lo) / 2;
  const int idx = order_[static_cast<std::size_t>(mid)];
  const Vec2& p = points_[static_cast<std::size_t>(idx)];
  if ((p - q).squaredNorm() <= r2) out.push_back(idx);
  const double diff = q(axis) - p(axis);
  // Points equal to the split coordinate may sit on either side.
  if (diff <= 0.0 || diff * diff <= r2) radius_search(lo, mid, depth + 1, q, r2, out);
  if (diff >= 0.0 || diff * diff <= r2) radius_search(mid + 1, hi, depth + 1, q, r2, out);
}

int KdTree2::nearest(const Vec2& q) const {
  int best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  nearest(0, static_cast<int>(order_.size()), 0, q, best, best_d2);
  return best;
}

void KdTree2::nearest(int lo, int hi, int depth, const Vec2& q, int& best, double& best_d2) const {
  if (lo >= hi) return;
  const int axis = depth % 2;
  const int mid = lo + (hi - lo) / 2;
  const int idx = order_[static_cast<std::size_t>(mid)];
  const Vec2& p = points_[static_cast<std::size_t>(idx)];
  const double d2 = (p - q).squaredNorm();
  if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
    best_d2 = d2;
    best = idx;
  }
  const double diff = q(axis) - p(axis);
  const bool left_first = diff <= 0.0;
  const int a_lo = left_first ? lo : mid + 1, a_hi = left_first ? mid : hi;
  const int b_lo = left_first ? mid + 1 : lo, b_hi = left_first ? hi : mid;
  nearest(a_lo, a_hi, depth + 1, q, best, best_d2);
  if (diff * diff <= best_d2) nearest(b_lo, b_hi, depth + 1, q, best, best_d2);
}

}  // namespace curio
