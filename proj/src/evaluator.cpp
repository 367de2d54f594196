#include "curio/evaluator.hpp"

#include <algorithm>
#include <chrono>

namespace curio {

double distance_cost(const TrajectoryCandidate& candidate, const Vec2& goal) {
  double d = 0.0;
  for (const auto& s : candidate.steps) d += (s.state.position() - goal).norm();
  return d;
}

double social_cost(const TrajectoryCandidate& candidate, std::span<const Hccdm> maps, const Vec2& goal,
                   const CostWeights& weights) {
  return weights.w2 * cnc_cost(candidate, maps) + weights.w3 * distance_cost(candidate, goal);
}

CostBreakdown total_cost(const TrajectoryCandidate& candidate, double ell, const EstimationContext& estimation,
                         std::span<const Hccdm> maps, const Vec2& goal, const CostWeights& weights) {
  CostBreakdown b;
  b.ell = ell;
  b.distance = distance_cost(candidate, goal);
  b.crowd = cnc_cost(candidate, maps);
  b.total = weights.w2 * b.crowd + weights.w3 * b.distance;
  b.cpc_active = cpc_triggered(ell, weights);
  if (b.cpc_active) {
    const GainSchedule gains = feedback_gains(candidate, estimation.inputs.dt, estimation.lqr_q, estimation.lqr_r);
    const UncertaintyEnvelope env = propagate_uncertainty(candidate, estimation.belief, estimation.inputs, gains);
    b.zeta = cpc_score(env);
    b.cpc = weights.mode == CpcTermMode::kProportional ? weights.w1 * b.zeta : weights.w1 / std::max(b.zeta, 1e-9);
    b.total += b.cpc;
  }
  return b;
}

std::optional<std::size_t> select_optimal(std::span<const CostBreakdown> costs) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    if (!best || costs[i].total < costs[*best].total) best = i;
  }
  return best;
}

PlanResult plan_cycle(const Belief& belief, const Scenario& scenario, const Params& params,
                      std::span<const Pedestrian> pedestrians, std::span<const TrajectoryCandidate> carried,
                      std::mt19937_64& rng) {
  const auto started = std::chrono::steady_clock::now();
  PlanResult result;
  const double dt = params.dt;
  const int K = params.horizon;

  PedestrianForecast forecast;
  forecast.dt = dt;
  forecast.layers = predict_pedestrians(pedestrians, K, dt);
  const CollisionContext full_ctx{&scenario.grid, &forecast, params.robot_radius, params.pedestrian_radius};
  const std::optional<CollisionContext> relaxed = relax_for_root(full_ctx, belief.mean);
  // A mean inside an occupied cell leaves nothing to plan from.
  CollisionContext ctx = full_ctx;
  if (relaxed) ctx = *relaxed;

  const auto survivors =
      relaxed ? prune_unreachable(carried, belief.mean, dt, ctx,
                                  {params.prune_position_tolerance, params.prune_heading_tolerance})
              : std::vector<TrajectoryCandidate>{};

  const CostWeights weights = CostWeights::from(params);
  const double ell = current_uncertainty(belief);
  result.diagnostics.ell = ell;
  result.diagnostics.cpc_active = cpc_triggered(ell, weights);

  const CrowdModelParams crowd{params.social_distance, params.personal_distance, params.working_zone_radius};
  result.maps = build_hccdm_sequence(forecast.layers, belief.mean.position(), crowd);

  TreeParams tp;
  tp.budget = params.tree_budget;
  tp.goal_bias = params.goal_bias;
  tp.neighbor_radius = params.neighbor_radius;
  tp.connect_tolerance = params.connect_tolerance;
  tp.dt = dt;
  tp.v_max = params.v_max;
  tp.omega_max = params.omega_max;
  if (relaxed) {
    Tree tree = grow_tree(belief.mean, scenario.goal, ctx, tp, rng);
    result.candidates = find_path_candidates(tree, K, params.max_candidates, dt, ctx);
    if (result.candidates.empty() && survivors.empty() && ctx.escape_static_radius < 0.0) {
      // Boxed in by the footprint margin (typically facing a wall after an estimate jump):
      // retry with the center-point check so the robot can turn away.
      ctx.escape_static_radius = 0.0;
      tree = grow_tree(belief.mean, scenario.goal, ctx, tp, rng);
      result.candidates = find_path_candidates(tree, K, params.max_candidates, dt, ctx);
    }
    result.diagnostics.tree_nodes = tree.size();
  } else {
    result.diagnostics.tree_nodes = 1;
  }
  result.diagnostics.fresh_candidates = result.candidates.size();

  // Carried candidates are re-rooted at the estimate and matched to the fresh horizon length.
  const std::size_t steps = result.candidates.empty() ? static_cast<std::size_t>(K) : result.candidates.front().size();
  for (const auto& c : survivors) {
    TrajectoryCandidate r = reroot_candidate(c, belief.mean, steps, dt);
    if (r.empty() || !candidate_obstacle_free(r, dt, ctx)) continue;
    result.candidates.push_back(std::move(r));
    ++result.diagnostics.carried_candidates;
  }

  EstimationContext est;
  est.belief = belief;
  est.inputs.grid = &scenario.grid;
  est.inputs.landmarks = scenario.landmarks;
  est.inputs.sensor = SensorModel::from(params);
  est.inputs.process_noise = params.process_noise;
  est.inputs.dt = dt;
  est.lqr_q = params.lqr_q;
  est.lqr_r = params.lqr_r;

  result.costs.reserve(result.candidates.size());
  for (const auto& c : result.candidates) {
    result.costs.push_back(total_cost(c, ell, est, result.maps, scenario.goal, weights));
  }
  result.chosen_index = select_optimal(result.costs);
  result.diagnostics.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace curio
