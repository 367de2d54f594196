#include "curio/estimation.hpp"

#include <cmath>
#include <stdexcept>

namespace curio {

Belief ekf_predict(const Belief& b, const Control& u, double dt, const Mat3& process_noise) {
  const MotionJacobians j = motion_jacobians(b.mean, u, dt);
  Belief out;
  out.mean = step(b.mean, u, dt);
  out.cov = j.A * b.cov * j.A.transpose() + process_noise;
  make_symmetric_psd(out.cov);
  return out;
}

std::optional<Belief> ekf_update(const Belief& b, const Measurement& z, std::span<const Landmark> landmarks,
                                 const SensorModel& sensor) {
  if (z.empty()) return b;

  std::vector<Landmark> matched;
  matched.reserve(z.size());
  for (const auto& obs : z) {
    const Landmark* found = nullptr;
    for (const auto& lm : landmarks) {
      if (lm.id == obs.landmark_id) {
        found = &lm;
        break;
      }
    }
    if (found == nullptr) throw std::invalid_argument("ekf_update: unknown landmark id " + std::to_string(obs.landmark_id));
    matched.push_back(*found);
  }

  const int rows = rows_per_landmark(sensor.mode);
  const Eigen::MatrixXd C = measurement_jacobian(b.mean, matched, sensor.mode);
  const Eigen::MatrixXd N = measurement_noise(matched.size(), sensor.mode, sensor.range_variance, sensor.bearing_variance);

  Eigen::VectorXd innovation(C.rows());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i) * rows;
    innovation(r) = z[i].range - expected_range(b.mean, matched[i].position);
    if (rows == 2) {
      const double bearing = z[i].bearing.value_or(expected_bearing(b.mean, matched[i].position));
      innovation(r + 1) = normalize_angle(bearing - expected_bearing(b.mean, matched[i].position));
    }
  }

  const Eigen::MatrixXd S = C * b.cov * C.transpose() + N;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
  const Eigen::VectorXd d = ldlt.vectorD();
  if (d.minCoeff() <= 1e-15 * std::max(1.0, d.maxCoeff())) return std::nullopt;

  // L = Sigma C^T S^-1
  const Eigen::Matrix<double, 3, Eigen::Dynamic> L = ldlt.solve(C * b.cov).transpose();
  Belief out;
  out.mean = RobotState::from_vec(b.mean.vec() + L * innovation);
  out.cov = b.cov - L * C * b.cov;
  make_symmetric_psd(out.cov);
  return out;
}

GainSchedule feedback_gains(const TrajectoryCandidate& c, double dt, const Vec3& q_diag, const Eigen::Vector2d& r_diag) {
  GainSchedule g;
  const std::size_t n = c.size();
  g.gains.resize(n, Mat23::Zero());
  if (n == 0) return g;
  const Mat3 Q = q_diag.asDiagonal();
  const Mat2 R = r_diag.asDiagonal();
  Mat3 P = Q;
  for (std::size_t k = n; k-- > 0;) {
    const MotionJacobians j = motion_jacobians(c.state_before(k), c.steps[k].control, dt);
    const Mat2 H = R + j.B.transpose() * P * j.B;
    const Mat23 K = H.ldlt().solve(j.B.transpose() * P * j.A);
    g.gains[k] = K;
    P = Q + j.A.transpose() * P * (j.A - j.B * K);
    P = 0.5 * (P + P.transpose()).eval();
  }
  return g;
}

UncertaintyEnvelope propagate_uncertainty(const TrajectoryCandidate& c, const Belief& start, const PropagationInputs& in,
                                          const GainSchedule& gains) {
  if (state_error(c.root, start.mean).cwiseAbs().maxCoeff() > 1e-6) {
    throw std::invalid_argument("propagate_uncertainty: candidate root differs from the belief mean");
  }
  if (gains.gains.size() < c.size()) throw std::invalid_argument("propagate_uncertainty: gain schedule too short");

  UncertaintyEnvelope env;
  env.steps.reserve(c.size());
  Mat3 sigma = start.cov;
  Mat3 lambda = Mat3::Zero();
  for (std::size_t k = 0; k < c.size(); ++k) {
    const RobotState& from = c.state_before(k);
    const RobotState& nominal = c.steps[k].state;
    const MotionJacobians j = motion_jacobians(from, c.steps[k].control, in.dt);

    const Mat3 sigma_bar = j.A * sigma * j.A.transpose() + in.process_noise;
    Mat3 gain_term = Mat3::Zero();  // L C Sigma_bar
    int visible_count = 0;
    if (in.grid != nullptr && !in.landmarks.empty()) {
      const auto visible = visible_landmarks(*in.grid, in.landmarks, nominal, in.sensor.range, in.sensor.fov);
      visible_count = static_cast<int>(visible.size());
      if (!visible.empty()) {
        const Eigen::MatrixXd C = measurement_jacobian(nominal, visible, in.sensor.mode);
        const Eigen::MatrixXd N =
            measurement_noise(visible.size(), in.sensor.mode, in.sensor.range_variance, in.sensor.bearing_variance);
        const Eigen::MatrixXd S = C * sigma_bar * C.transpose() + N;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
        if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
          const Eigen::Matrix<double, 3, Eigen::Dynamic> L = ldlt.solve(C * sigma_bar).transpose();
          gain_term = L * C * sigma_bar;
          gain_term = 0.5 * (gain_term + gain_term.transpose()).eval();
        }
      }
    }
    sigma = sigma_bar - gain_term;
    make_symmetric_psd(sigma);

    const Mat3 closed_loop = j.A - j.B * gains.gains[k];
    lambda = closed_loop * lambda * closed_loop.transpose() + gain_term;
    make_symmetric_psd(lambda);

    env.steps.push_back({nominal, sigma, lambda, visible_count});
  }
  return env;
}

double cpc_score(const UncertaintyEnvelope& env) {
  double zeta = 0.0;
  for (const auto& s : env.steps) zeta += (s.lambda + s.sigma).trace();
  return zeta;
}

}  // namespace curio
