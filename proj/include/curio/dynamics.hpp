#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "curio/geometry.hpp"
#include "curio/world.hpp"

namespace curio {

/// Below this turn rate the straight-line branch of the motion model is used.
inline constexpr double kOmegaEps = 1e-6;

/// Exact-arc unicycle update plus an additive state-space noise sample.
RobotState step(const RobotState& state, const Control& control, double dt, const Vec3& noise = Vec3::Zero());

struct MotionJacobians {
  Mat3 A;   // d f / d state
  Mat32 B;  // d f / d control
};

/// Jacobians of the noise-free `step`, on the same branch as `step`.
MotionJacobians motion_jacobians(const RobotState& state, const Control& control, double dt);

struct LandmarkObservation {
  int landmark_id = 0;
  double range = 0.0;
  std::optional<double> bearing;  // set in range-bearing mode
};

using Measurement = std::vector<LandmarkObservation>;

/// Number of scalar rows one landmark contributes.
inline int rows_per_landmark(MeasurementMode mode) { return mode == MeasurementMode::kRangeBearing ? 2 : 1; }

/// Noise-free range and bearing of a landmark seen from `state`.
double expected_range(const RobotState& state, const Vec2& landmark);
double expected_bearing(const RobotState& state, const Vec2& landmark);

/// `noise` holds rows_per_landmark(mode) samples per visible landmark, in order (range first).
/// An empty span means noise-free.
Measurement measure(const RobotState& true_state, std::span<const Landmark> visible, MeasurementMode mode,
                    std::span<const double> noise = {});

class EmptyMeasurementError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Stacked rows d(range)/d[x,y,theta] and, in range-bearing mode, d(bearing)/d[x,y,theta].
/// Throws EmptyMeasurementError for an empty landmark list.
Eigen::MatrixXd measurement_jacobian(const RobotState& state, std::span<const Landmark> visible, MeasurementMode mode);

/// Diagonal measurement covariance matching measurement_jacobian's row layout.
Eigen::MatrixXd measurement_noise(std::size_t landmark_count, MeasurementMode mode, double range_variance,
                                  double bearing_variance);

}  // namespace curio
