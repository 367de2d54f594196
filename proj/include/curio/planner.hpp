#pragma once

#include <optional>
#include <random>
#include <span>
#include <vector>

#include "curio/crowd.hpp"
#include "curio/trajectory.hpp"
#include "curio/world.hpp"

namespace curio {

/// Substeps per planning period stored on every arc (the arc holds substeps + 1 states).
inline constexpr int kArcSubsteps = 10;

/// States along one period of constant control: arc[i] is reached at i*dt/kArcSubsteps.
std::vector<RobotState> integrate_arc(const RobotState& from, const Control& control, double dt);

struct TreeNode {
  RobotState state;
  int parent = -1;
  Control control;               // applied from the parent
  std::vector<RobotState> arc;   // parent state .. node state
  int depth = 0;
  double cost = 0.0;             // path length from the root
  std::vector<int> children;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  std::size_t size() const { return nodes.size(); }
  int max_depth() const;

  /// Acyclicity, depth and cost bookkeeping, arc endpoints, dynamic consistency of every edge.
  bool check_invariants(double dt, double tol = 1e-9) const;
};

/// Pedestrian positions over the planning horizon: layers[k] holds every pedestrian at +k*dt,
/// in the same order in every layer.
struct PedestrianForecast {
  std::vector<std::vector<Pedestrian>> layers;
  double dt = 0.5;

  std::size_t count() const { return layers.empty() ? 0 : layers.front().size(); }

  /// Linear interpolation between layers, linear extrapolation past the last one.
  Vec2 position(std::size_t ped, double t) const;
};

struct CollisionContext {
  const GridMap* grid = nullptr;
  const PedestrianForecast* forecast = nullptr;  // may be null
  double robot_radius = 0.3;
  double pedestrian_radius = 0.3;
  // Overrides used while escaping an overlap the current pose is already in. Negative means the
  // regular limits.
  double escape_static_radius = -1.0;
  double escape_ped_clearance = -1.0;
};

/// Every arc sample clears the grid and keeps more than robot_radius + pedestrian_radius from
/// every forecast pedestrian. Sample i is checked at t0 + i*dt/(arc.size()-1).
bool obstacle_free(std::span<const RobotState> arc, double t0, double dt, const CollisionContext& ctx);

/// When `root` already violates the footprint or pedestrian clearance, loosens the limits so the
/// planner can back out instead of freezing: the static check shrinks to the center point and the
/// pedestrian clearance to just under the current distance. Returns nullopt when the root center
/// itself is in an occupied cell.
std::optional<CollisionContext> relax_for_root(const CollisionContext& ctx, const RobotState& root);

struct SteerResult {
  RobotState state;
  Control control;
  std::vector<RobotState> arc;
};

/// Best of the 15 motion primitives by endpoint distance to `to`. Ties go to smaller |omega|, then
/// positive omega.
SteerResult steer(const RobotState& from, const Vec2& to, double dt, double v_max, double omega_max);

struct TreeParams {
  int budget = 800;
  double goal_bias = 0.1;
  double neighbor_radius = 2.0;
  double connect_tolerance = 0.15;
  double dt = 0.5;
  double v_max = 1.0;
  double omega_max = 1.0;
  bool debug_checks = false;  // verify invariants after every iteration
};

/// Tries to make `new_parent` the parent of `node` using a fresh steer arc whose endpoint lies
/// within connect_tolerance of the node. Succeeds only if the root cost drops and the re-simulated
/// subtree stays collision-free. Returns whether the tree changed.
bool rewire(Tree& tree, int node, int new_parent, const CollisionContext& ctx, const TreeParams& params);

/// RRT*-style growth from `root`. Sampling draws only from `rng`.
Tree grow_tree(const RobotState& root, const Vec2& goal, const CollisionContext& ctx, const TreeParams& params,
               std::mt19937_64& rng);

/// Root-to-node chains of exactly K edges (or of the deepest available length), deduplicated,
/// ordered by cost then node index, capped, and re-validated.
std::vector<TrajectoryCandidate> find_path_candidates(const Tree& tree, int K, int max_candidates, double dt,
                                                      const CollisionContext& ctx);

struct PruneTolerance {
  double position = 0.25;
  double heading = 0.35;
};

/// Whether every step of the candidate is collision-free at its time offset.
bool candidate_obstacle_free(const TrajectoryCandidate& candidate, double dt, const CollisionContext& ctx);

/// Drops candidates whose root strays from `current` beyond the tolerances and those in collision
/// against the context's pedestrian forecast.
std::vector<TrajectoryCandidate> prune_unreachable(std::span<const TrajectoryCandidate> candidates,
                                                   const RobotState& current, double dt, const CollisionContext& ctx,
                                                   const PruneTolerance& tol = {});

/// Drops the first step of last cycle's candidate: its first state becomes the new root.
/// Returns nullopt when nothing would remain.
std::optional<TrajectoryCandidate> advance_candidate(const TrajectoryCandidate& candidate, double dt);

/// Re-integrates the candidate's controls from `root`, extending with the last control (or
/// truncating) to exactly `steps` steps.
TrajectoryCandidate reroot_candidate(const TrajectoryCandidate& candidate, const RobotState& root, std::size_t steps,
                                     double dt);

}  // namespace curio
