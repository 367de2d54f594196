#include "curio/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace curio {

GridMap::GridMap(int width, int height, double resolution, Vec2 origin, std::vector<std::uint8_t> occupied)
    : width_(width), height_(height), resolution_(resolution), origin_(std::move(origin)), cells_(std::move(occupied)) {
  if (width_ < 1 || height_ < 1) {
    throw std::invalid_argument("grid dimensions must be at least 1x1, got " + std::to_string(width_) + "x" +
                                std::to_string(height_));
  }
  if (!(resolution_ > 0.0) || !std::isfinite(resolution_)) {
    throw std::invalid_argument("grid resolution must be positive");
  }
  if (cells_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
    throw std::invalid_argument("grid cell count does not match width*height");
  }
  for (auto& c : cells_) c = c ? 1 : 0;
  free_cells_.reserve(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i] == 0) free_cells_.push_back(static_cast<int>(i));
  }
}

bool GridMap::in_bounds(const Vec2& p) const {
  const Vec2 g = (p - origin_) / resolution_;
  return g.x() >= 0.0 && g.y() >= 0.0 && g.x() < width_ && g.y() < height_;
}

std::optional<CellIndex> GridMap::cell_of(const Vec2& p) const {
  if (!in_bounds(p)) return std::nullopt;
  const Vec2 g = (p - origin_) / resolution_;
  return CellIndex{std::min(static_cast<int>(std::floor(g.x())), width_ - 1),
                   std::min(static_cast<int>(std::floor(g.y())), height_ - 1)};
}

Vec2 GridMap::cell_center(int ix, int iy) const {
  return origin_ + Vec2((ix + 0.5) * resolution_, (iy + 0.5) * resolution_);
}

Vec2 GridMap::cell_min_corner(int ix, int iy) const {
  return origin_ + Vec2(ix * resolution_, iy * resolution_);
}

bool is_footprint_free(const GridMap& grid, const Vec2& center, double radius) {
  if (!grid.in_bounds(center)) return false;
  const double res = grid.resolution();
  const Vec2 g = (center - grid.origin()) / res;
  const double rg = radius / res;
  const int x0 = static_cast<int>(std::floor(g.x() - rg));
  const int x1 = static_cast<int>(std::floor(g.x() + rg));
  const int y0 = static_cast<int>(std::floor(g.y() - rg));
  const int y1 = static_cast<int>(std::floor(g.y() + rg));
  const double r2 = radius * radius;
  for (int iy = y0; iy <= y1; ++iy) {
    for (int ix = x0; ix <= x1; ++ix) {
      if (!grid.occupied(ix, iy)) continue;
      const Vec2 lo = grid.cell_min_corner(ix, iy);
      const double qx = std::clamp(center.x(), lo.x(), lo.x() + res);
      const double qy = std::clamp(center.y(), lo.y(), lo.y() + res);
      const double dx = center.x() - qx;
      const double dy = center.y() - qy;
      if (dx * dx + dy * dy <= r2) return false;
    }
  }
  return true;
}

bool ray_clear(const GridMap& grid, const Vec2& from, const Vec2& to) {
  const double res = grid.resolution();
  const Vec2 a = (from - grid.origin()) / res;
  const Vec2 b = (to - grid.origin()) / res;
  const Vec2 d = b - a;

  int ix = static_cast<int>(std::floor(a.x()));
  int iy = static_cast<int>(std::floor(a.y()));
  const int ex = static_cast<int>(std::floor(b.x()));
  const int ey = static_cast<int>(std::floor(b.y()));
  const int step_x = d.x() > 0 ? 1 : (d.x() < 0 ? -1 : 0);
  const int step_y = d.y() > 0 ? 1 : (d.y() < 0 ? -1 : 0);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double t_delta_x = step_x != 0 ? 1.0 / std::abs(d.x()) : kInf;
  const double t_delta_y = step_y != 0 ? 1.0 / std::abs(d.y()) : kInf;
  double t_max_x = kInf;
  double t_max_y = kInf;
  if (step_x > 0) t_max_x = (std::floor(a.x()) + 1.0 - a.x()) * t_delta_x;
  if (step_x < 0) t_max_x = (a.x() - std::floor(a.x())) * t_delta_x;
  if (step_y > 0) t_max_y = (std::floor(a.y()) + 1.0 - a.y()) * t_delta_y;
  if (step_y < 0) t_max_y = (a.y() - std::floor(a.y())) * t_delta_y;

  auto is_end = [&](int cx, int cy) { return cx == ex && cy == ey; };
  auto blocked = [&](int cx, int cy) { return !is_end(cx, cy) && grid.occupied(cx, cy); };

  const int max_steps = std::abs(ex - ix) + std::abs(ey - iy) + 4;
  for (int n = 0; n <= max_steps; ++n) {
    if (blocked(ix, iy)) return false;
    if (is_end(ix, iy)) return true;
    const double t_next = std::min(t_max_x, t_max_y);
    if (t_next > 1.0) return true;
    const double tol = 1e-12 * std::max(1.0, t_next);
    if (std::abs(t_max_x - t_max_y) <= tol) {
      // Corner graze: both side cells must be clear.
      if (blocked(ix + step_x, iy) || blocked(ix, iy + step_y)) return false;
      ix += step_x;
      iy += step_y;
      t_max_x += t_delta_x;
      t_max_y += t_delta_y;
    } else if (t_max_x < t_max_y) {
      ix += step_x;
      t_max_x += t_delta_x;
    } else {
      iy += step_y;
      t_max_y += t_delta_y;
    }
  }
  return true;
}

std::vector<Landmark> visible_landmarks(const GridMap& grid, std::span<const Landmark> landmarks,
                                        const RobotState& pose, double range, double fov) {
  std::vector<Landmark> out;
  const Vec2 p = pose.position();
  const bool full_circle = fov >= kTwoPi;
  for (const auto& lm : landmarks) {
    const Vec2 delta = lm.position - p;
    if (delta.norm() > range) continue;
    if (!full_circle) {
      const double bearing = normalize_angle(std::atan2(delta.y(), delta.x()) - pose.theta);
      if (std::abs(bearing) > 0.5 * fov) continue;
    }
    if (!ray_clear(grid, p, lm.position)) continue;
    out.push_back(lm);
  }
  return out;
}

double landmark_density(const GridMap& grid) {
  const double total = static_cast<double>(grid.width()) * grid.height();
  return total > 0 ? grid.occupied_count() / total : 0.0;
}

}  // namespace curio
