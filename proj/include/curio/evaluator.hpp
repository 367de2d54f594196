#pragma once

#include <optional>
#include <random>
#include <span>
#include <vector>

#include "curio/crowd.hpp"
#include "curio/estimation.hpp"
#include "curio/planner.hpp"
#include "curio/world.hpp"

namespace curio {

struct CostWeights {
  double w1 = 0.0;
  double w2 = 0.0;
  double w3 = 1.0;
  double threshold = 0.12;
  CpcTermMode mode = CpcTermMode::kProportional;
  bool cpc_enabled = true;  // false: the trigger never fires

  static CostWeights from(const Params& p) {
    return {p.w1, p.w2, p.w3, p.uncertainty_threshold, p.cpc_term_mode, p.cpc_enabled};
  }
};

struct CostBreakdown {
  double distance = 0.0;  // sum of step distances to the goal
  double crowd = 0.0;     // cnc density sum
  double zeta = 0.0;      // raw cpc score, 0 when inactive
  double cpc = 0.0;       // weighted cpc term, 0 when inactive
  double ell = 0.0;       // current uncertainty at decision time
  double total = 0.0;
  bool cpc_active = false;

  friend bool operator==(const CostBreakdown&, const CostBreakdown&) = default;
};

double distance_cost(const TrajectoryCandidate& candidate, const Vec2& goal);

/// w2 * cnc + w3 * distance.
double social_cost(const TrajectoryCandidate& candidate, std::span<const Hccdm> maps, const Vec2& goal,
                   const CostWeights& weights);

/// Whether the cpc term is switched on for this cycle: ell strictly above the threshold.
inline bool cpc_triggered(double ell, const CostWeights& w) { return w.cpc_enabled && ell > w.threshold; }

/// Everything belief propagation needs for one cycle.
struct EstimationContext {
  Belief belief;
  PropagationInputs inputs;
  Vec3 lqr_q = Vec3(1.0, 1.0, 0.3);
  Eigen::Vector2d lqr_r = Eigen::Vector2d(0.5, 0.5);
};

/// Switched cost. Propagation runs only when the trigger fires.
CostBreakdown total_cost(const TrajectoryCandidate& candidate, double ell, const EstimationContext& estimation,
                         std::span<const Hccdm> maps, const Vec2& goal, const CostWeights& weights);

/// Index of the smallest total (first one on ties), or nullopt for an empty list.
std::optional<std::size_t> select_optimal(std::span<const CostBreakdown> costs);

struct PlanDiagnostics {
  double ell = 0.0;
  bool cpc_active = false;
  std::size_t tree_nodes = 0;
  std::size_t fresh_candidates = 0;
  std::size_t carried_candidates = 0;
  double seconds = 0.0;  // wall time of the cycle
};

struct PlanResult {
  std::optional<std::size_t> chosen_index;
  std::vector<TrajectoryCandidate> candidates;  // fresh first, then carried
  std::vector<CostBreakdown> costs;
  std::vector<Hccdm> maps;
  PlanDiagnostics diagnostics;

  const TrajectoryCandidate* chosen() const { return chosen_index ? &candidates[*chosen_index] : nullptr; }
  const CostBreakdown* chosen_cost() const { return chosen_index ? &costs[*chosen_index] : nullptr; }
};

/// One planning cycle: prune carried candidates, forecast pedestrians, evaluate the trigger,
/// build the crowd maps, grow the tree, cost every candidate and pick the cheapest.
/// `pedestrians` carry current positions and velocities. `carried` candidates are expected to be
/// rooted near the belief mean already (see advance_candidate).
PlanResult plan_cycle(const Belief& belief, const Scenario& scenario, const Params& params,
                      std::span<const Pedestrian> pedestrians, std::span<const TrajectoryCandidate> carried,
                      std::mt19937_64& rng);

}  // namespace curio
