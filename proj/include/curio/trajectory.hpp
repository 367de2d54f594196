#pragma once

#include <span>
#include <vector>

#include "curio/dynamics.hpp"

namespace curio {

/// One planning period along a candidate: the control applied from the previous state, the state
/// it reaches, and the time offset of that state from the root.
struct CandidateStep {
  RobotState state;
  Control control;
  double time = 0.0;
  friend bool operator==(const CandidateStep&, const CandidateStep&) = default;
};

/// K time-stamped (state, control) pairs rooted at the current pose. steps[k-1] is reached at k*dt.
struct TrajectoryCandidate {
  RobotState root;
  std::vector<CandidateStep> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  const RobotState& state_before(std::size_t i) const { return i == 0 ? root : steps[i - 1].state; }

  friend bool operator==(const TrajectoryCandidate&, const TrajectoryCandidate&) = default;
};

/// Integrates `controls` from `root` with zero noise.
TrajectoryCandidate make_candidate(const RobotState& root, std::span<const Control> controls, double dt);

/// Re-integrates the stored controls and compares every state within `tol`.
bool is_dynamically_consistent(const TrajectoryCandidate& candidate, double dt, double tol = 1e-9);

}  // namespace curio
