#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace curio {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using Mat23 = Eigen::Matrix<double, 2, 3>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
  if (a > -kPi && a <= kPi) return a;
  a = std::fmod(a, kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  if (a > kPi) a -= kTwoPi;
  return a;
}

/// Planar pose [x, y, theta].
struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 position() const { return {x, y}; }
  Vec3 vec() const { return {x, y, theta}; }
  static RobotState from_vec(const Vec3& v) { return {v.x(), v.y(), normalize_angle(v.z())}; }

  friend bool operator==(const RobotState&, const RobotState&) = default;
};

/// State difference with the heading component wrapped.
inline Vec3 state_error(const RobotState& a, const RobotState& b) {
  return {a.x - b.x, a.y - b.y, normalize_angle(a.theta - b.theta)};
}

/// Unicycle input [v, omega].
struct Control {
  double v = 0.0;
  double omega = 0.0;

  friend bool operator==(const Control&, const Control&) = default;
};

/// Symmetrizes in place and clamps negative eigenvalues to zero.
inline void make_symmetric_psd(Mat3& m) {
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat3> es;
  es.computeDirect(m);
  if (es.eigenvalues().minCoeff() < 0.0) {
    Vec3 ev = es.eigenvalues().cwiseMax(0.0);
    m = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    m = 0.5 * (m + m.transpose()).eval();
  }
}

}  // namespace curio
