#include "curio/dynamics.hpp"

#include <cmath>

namespace curio {

RobotState step(const RobotState& s, const Control& u, double dt, const Vec3& noise) {
  RobotState out = s;
  if (std::abs(u.omega) > kOmegaEps) {
    const double th1 = s.theta + u.omega * dt;
    const double r = u.v / u.omega;
    out.x += r * (std::sin(th1) - std::sin(s.theta));
    out.y += r * (std::cos(s.theta) - std::cos(th1));
    out.theta = th1;
  } else {
    out.x += u.v * dt * std::cos(s.theta);
    out.y += u.v * dt * std::sin(s.theta);
  }
  out.x += noise.x();
  out.y += noise.y();
  out.theta = normalize_angle(out.theta + noise.z());
  return out;
}

MotionJacobians motion_jacobians(const RobotState& s, const Control& u, double dt) {
  MotionJacobians j;
  j.A.setIdentity();
  j.B.setZero();
  const double s0 = std::sin(s.theta);
  const double c0 = std::cos(s.theta);
  if (std::abs(u.omega) > kOmegaEps) {
    const double w = u.omega;
    const double th1 = s.theta + w * dt;
    const double s1 = std::sin(th1);
    const double c1 = std::cos(th1);
    j.A(0, 2) = (u.v / w) * (c1 - c0);
    j.A(1, 2) = (u.v / w) * (s1 - s0);
    j.B(0, 0) = (s1 - s0) / w;
    j.B(1, 0) = (c0 - c1) / w;
    j.B(0, 1) = -(u.v / (w * w)) * (s1 - s0) + (u.v / w) * c1 * dt;
    j.B(1, 1) = -(u.v / (w * w)) * (c0 - c1) + (u.v / w) * s1 * dt;
    j.B(2, 1) = dt;
  } else {
    // Straight branch; d/d omega uses the omega -> 0 limit of the arc model.
    j.A(0, 2) = -u.v * dt * s0;
    j.A(1, 2) = u.v * dt * c0;
    j.B(0, 0) = dt * c0;
    j.B(1, 0) = dt * s0;
    j.B(0, 1) = -0.5 * u.v * dt * dt * s0;
    j.B(1, 1) = 0.5 * u.v * dt * dt * c0;
    j.B(2, 1) = dt;
  }
  return j;
}

double expected_range(const RobotState& s, const Vec2& lm) { return (lm - s.position()).norm(); }

double expected_bearing(const RobotState& s, const Vec2& lm) {
  return normalize_angle(std::atan2(lm.y() - s.y, lm.x() - s.x) - s.theta);
}

Measurement measure(const RobotState& s, std::span<const Landmark> visible, MeasurementMode mode,
                    std::span<const double> noise) {
  const int rows = rows_per_landmark(mode);
  if (!noise.empty() && noise.size() != visible.size() * rows) {
    throw std::invalid_argument("measure: noise sample count does not match visible landmarks");
  }
  Measurement z;
  z.reserve(visible.size());
  for (std::size_t i = 0; i < visible.size(); ++i) {
    LandmarkObservation obs;
    obs.landmark_id = visible[i].id;
    const double n_r = noise.empty() ? 0.0 : noise[i * rows];
    obs.range = std::max(0.0, expected_range(s, visible[i].position) + n_r);
    if (mode == MeasurementMode::kRangeBearing) {
      const double n_b = noise.empty() ? 0.0 : noise[i * rows + 1];
      obs.bearing = normalize_angle(expected_bearing(s, visible[i].position) + n_b);
    }
    z.push_back(obs);
  }
  return z;
}

Eigen::MatrixXd measurement_jacobian(const RobotState& s, std::span<const Landmark> visible, MeasurementMode mode) {
  if (visible.empty()) throw EmptyMeasurementError("measurement_jacobian: no visible landmarks");
  const int rows = rows_per_landmark(mode);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(visible.size()) * rows, 3);
  for (std::size_t i = 0; i < visible.size(); ++i) {
    const double dx = s.x - visible[i].position.x();
    const double dy = s.y - visible[i].position.y();
    const double r2 = std::max(dx * dx + dy * dy, 1e-12);
    const double r = std::sqrt(r2);
    const auto row = static_cast<Eigen::Index>(i) * rows;
    C(row, 0) = dx / r;
    C(row, 1) = dy / r;
    if (mode == MeasurementMode::kRangeBearing) {
      // bearing = atan2(ly - y, lx - x) - theta
      C(row + 1, 0) = -dy / r2;
      C(row + 1, 1) = dx / r2;
      C(row + 1, 2) = -1.0;
    }
  }
  return C;
}

Eigen::MatrixXd measurement_noise(std::size_t landmark_count, MeasurementMode mode, double range_variance,
                                  double bearing_variance) {
  const int rows = rows_per_landmark(mode);
  Eigen::VectorXd diag(static_cast<Eigen::Index>(landmark_count) * rows);
  for (std::size_t i = 0; i < landmark_count; ++i) {
    diag(static_cast<Eigen::Index>(i) * rows) = range_variance;
    if (rows == 2) diag(static_cast<Eigen::Index>(i) * rows + 1) = bearing_variance;
  }
  return diag.asDiagonal();
}

}  // namespace curio
