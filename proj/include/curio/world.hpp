#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "curio/geometry.hpp"

namespace curio {

struct CellIndex {
  int ix = 0;
  int iy = 0;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Occupancy grid. Cell (0,0) has its lower-left corner at `origin`; iy grows with world y.
/// Immutable after construction.
class GridMap {
 public:
  GridMap() = default;

  /// `occupied` holds width*height flags in row-major order (index = iy*width + ix).
  /// Throws std::invalid_argument when the dimensions or resolution are invalid.
  GridMap(int width, int height, double resolution, Vec2 origin, std::vector<std::uint8_t> occupied);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  const Vec2& origin() const { return origin_; }
  double extent_x() const { return width_ * resolution_; }
  double extent_y() const { return height_ * resolution_; }

  bool in_bounds(int ix, int iy) const { return ix >= 0 && iy >= 0 && ix < width_ && iy < height_; }
  bool in_bounds(const Vec2& p) const;

  /// Out-of-bounds cells report occupied.
  bool occupied(int ix, int iy) const {
    return !in_bounds(ix, iy) || cells_[static_cast<std::size_t>(iy) * width_ + ix] != 0;
  }

  /// Cell containing p, or nullopt outside the map.
  std::optional<CellIndex> cell_of(const Vec2& p) const;
  Vec2 cell_center(int ix, int iy) const;
  Vec2 cell_min_corner(int ix, int iy) const;

  const std::vector<std::uint8_t>& cells() const { return cells_; }
  const std::vector<int>& free_cells() const { return free_cells_; }
  int occupied_count() const { return width_ * height_ - static_cast<int>(free_cells_.size()); }

  friend bool operator==(const GridMap& a, const GridMap& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.resolution_ == b.resolution_ &&
           a.origin_ == b.origin_ && a.cells_ == b.cells_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 1.0;
  Vec2 origin_ = Vec2::Zero();
  std::vector<std::uint8_t> cells_;
  std::vector<int> free_cells_;
};

struct Landmark {
  int id = 0;
  Vec2 position = Vec2::Zero();
  friend bool operator==(const Landmark&, const Landmark&) = default;
};

struct PedestrianSpec {
  int id = 0;
  Vec2 start = Vec2::Zero();
  double speed = 0.0;
  std::vector<Vec2> waypoints;  // visited in a loop
  friend bool operator==(const PedestrianSpec&, const PedestrianSpec&) = default;
};

enum class MeasurementMode { kRangeOnly, kRangeBearing };

/// How the CPC term enters the switched cost once triggered.
enum class CpcTermMode {
  kProportional,    // w1 * zeta
  kLiteralInverse,  // w1 / zeta
};

struct Params {
  // Cost composition.
  double w1 = 60.0;
  double w2 = 60.0;
  double w3 = 1.0;
  double uncertainty_threshold = 0.12;
  CpcTermMode cpc_term_mode = CpcTermMode::kProportional;
  bool cpc_enabled = true;

  // Timing.
  double dt = 0.5;
  int horizon = 8;

  // Sensing and noise.
  double sensor_range = 8.0;
  double sensor_fov = kTwoPi;
  MeasurementMode measurement_mode = MeasurementMode::kRangeBearing;
  Mat3 process_noise = Vec3(1e-3, 1e-3, 1e-4).asDiagonal();
  double range_variance = 0.01;
  double bearing_variance = 1e-3;
  Mat3 initial_covariance = Vec3(0.01, 0.01, 0.005).asDiagonal();

  // Crowd model.
  double social_distance = 1.5;
  double personal_distance = 1.2;
  double comfort_threshold = 1.5;
  double working_zone_radius = 8.0;
  double pedestrian_radius = 0.3;
  double pedestrian_max_speed = 2.0;

  // Robot.
  double robot_radius = 0.3;
  double v_max = 1.0;
  double omega_max = 1.0;

  // Tree planner.
  int tree_budget = 800;
  double goal_bias = 0.1;
  double neighbor_radius = 2.0;
  double connect_tolerance = 0.15;
  int max_candidates = 400;
  double prune_position_tolerance = 0.25;
  double prune_heading_tolerance = 0.35;

  // Tracking controller used for belief propagation.
  Vec3 lqr_q = Vec3(1.0, 1.0, 0.3);
  Eigen::Vector2d lqr_r = Eigen::Vector2d(0.5, 0.5);

  // Episode.
  double goal_tolerance = 0.5;
  int tick_limit = 600;
  double conv_threshold = 0.05;
  std::uint64_t seed = 0;
  bool allow_no_landmarks = false;

  friend bool operator==(const Params&, const Params&) = default;
};

struct Scenario {
  GridMap grid;
  std::vector<Landmark> landmarks;
  std::vector<PedestrianSpec> pedestrians;
  RobotState robot_start;
  Vec2 goal = Vec2::Zero();
  Params params;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// True iff no occupied cell (or out-of-map area) touches the closed disk.
bool is_footprint_free(const GridMap& grid, const Vec2& center, double radius);

/// Cell-stepping line walk from `from` to `to`. The cell containing `to` is not tested, so a
/// landmark mounted on a wall face stays visible. Passing exactly through a cell corner tests
/// both side cells.
bool ray_clear(const GridMap& grid, const Vec2& from, const Vec2& to);

/// Landmarks inside range and field of view with an unobstructed ray. Pedestrians never occlude.
std::vector<Landmark> visible_landmarks(const GridMap& grid, std::span<const Landmark> landmarks,
                                        const RobotState& pose, double range, double fov);

/// Fraction of occupied cells.
double landmark_density(const GridMap& grid);

}  // namespace curio
