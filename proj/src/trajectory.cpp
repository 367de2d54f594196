#include "curio/trajectory.hpp"

#include <cmath>

namespace curio {

TrajectoryCandidate make_candidate(const RobotState& root, std::span<const Control> controls, double dt) {
  TrajectoryCandidate c;
  c.root = root;
  c.steps.reserve(controls.size());
  RobotState s = root;
  for (std::size_t k = 0; k < controls.size(); ++k) {
    s = step(s, controls[k], dt);
    c.steps.push_back({s, controls[k], static_cast<double>(k + 1) * dt});
  }
  return c;
}

bool is_dynamically_consistent(const TrajectoryCandidate& c, double dt, double tol) {
  RobotState s = c.root;
  for (std::size_t k = 0; k < c.steps.size(); ++k) {
    s = step(s, c.steps[k].control, dt);
    const Vec3 e = state_error(s, c.steps[k].state);
    if (e.cwiseAbs().maxCoeff() > tol) return false;
    if (std::abs(c.steps[k].time - static_cast<double>(k + 1) * dt) > tol) return false;
  }
  return true;
}

}  // namespace curio
