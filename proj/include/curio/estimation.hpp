#pragma once

#include <optional>
#include <span>
#include <vector>

#include "curio/dynamics.hpp"
#include "curio/trajectory.hpp"
#include "curio/world.hpp"

namespace curio {

/// Gaussian state estimate x ~ N(mean, cov).
struct Belief {
  RobotState mean;
  Mat3 cov = Mat3::Zero();
};

/// Landmark sensor configuration shared by the online filter and the belief predictor.
struct SensorModel {
  MeasurementMode mode = MeasurementMode::kRangeBearing;
  double range_variance = 0.01;
  double bearing_variance = 1e-3;
  double range = 8.0;
  double fov = kTwoPi;

  static SensorModel from(const Params& p) {
    return {p.measurement_mode, p.range_variance, p.bearing_variance, p.sensor_range, p.sensor_fov};
  }
};

/// Mean advanced by the noise-free model; cov = A cov A^T + M'.
Belief ekf_predict(const Belief& belief, const Control& control, double dt, const Mat3& process_noise);

/// Kalman correction. An empty measurement returns the input unchanged. Returns nullopt when the
/// innovation covariance is singular; the caller keeps the predicted belief in that case.
/// Throws std::invalid_argument when an observation names an unknown landmark.
std::optional<Belief> ekf_update(const Belief& belief, const Measurement& z, std::span<const Landmark> landmarks,
                                 const SensorModel& sensor);

/// Trace of the covariance.
inline double current_uncertainty(const Belief& belief) { return belief.cov.trace(); }

/// Feedback gain per candidate step, u = u* - K (x_hat - x*).
struct GainSchedule {
  std::vector<Mat23> gains;
};

/// Finite-horizon discrete LQR about the candidate's nominal (state, control) pairs.
GainSchedule feedback_gains(const TrajectoryCandidate& candidate, double dt, const Vec3& q_diag,
                            const Eigen::Vector2d& r_diag);

struct EnvelopeStep {
  RobotState nominal;
  Mat3 sigma = Mat3::Zero();   // online estimate covariance
  Mat3 lambda = Mat3::Zero();  // spread of the estimate about the nominal
  int visible_count = 0;
};

struct UncertaintyEnvelope {
  std::vector<EnvelopeStep> steps;
};

struct PropagationInputs {
  const GridMap* grid = nullptr;
  std::span<const Landmark> landmarks;
  SensorModel sensor;
  Mat3 process_noise = Mat3::Zero();
  double dt = 0.5;
};

/// Predicted (Sigma_k, Lambda_k) along the candidate under EKF + feedback tracking. Visibility is
/// evaluated at the nominal states. Throws std::invalid_argument if the candidate root is not the
/// belief mean within 1e-6, or if the gain schedule is shorter than the candidate.
UncertaintyEnvelope propagate_uncertainty(const TrajectoryCandidate& candidate, const Belief& start,
                                          const PropagationInputs& inputs, const GainSchedule& gains);

/// Sum over steps of trace(Lambda_k + Sigma_k).
double cpc_score(const UncertaintyEnvelope& envelope);

}  // namespace curio
