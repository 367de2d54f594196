#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "curio/evaluator.hpp"
#include "curio/world.hpp"

namespace curio {

struct PedestrianAgent {
  int id = 0;
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();  // displacement over the last step divided by its duration
  double speed = 0.0;
  std::vector<Vec2> waypoints;
  std::size_t target = 0;

  friend bool operator==(const PedestrianAgent&, const PedestrianAgent&) = default;
};

/// Agents at their start points, velocity pointing at the first waypoint.
std::vector<PedestrianAgent> spawn_pedestrians(std::span<const PedestrianSpec> specs);

/// Waypoint following with mutual repulsion, integrated in substeps of at most 0.1 s.
std::vector<PedestrianAgent> pedestrian_step(std::span<const PedestrianAgent> agents, double dt);

/// Planner view of the agents at time `t`.
std::vector<Pedestrian> observe_pedestrians(std::span<const PedestrianAgent> agents, double t);

struct TickRecord {
  int tick = 0;
  double time = 0.0;
  RobotState true_state;
  RobotState belief_mean;
  Mat3 covariance = Mat3::Zero();
  double cov_trace = 0.0;
  Control control;  // chosen at this tick, applied until the next one
  bool planned = false;
  std::vector<Vec2> pedestrians;
  double min_ped_distance = std::numeric_limits<double>::infinity();
  bool cpc_active = false;
  CostBreakdown cost;

  friend bool operator==(const TickRecord&, const TickRecord&) = default;
};

/// The state at time 0 plus one record per tick; tick i is at time i*dt.
struct EpisodeTrace {
  double dt = 0.5;
  RobotState start_true_state;
  RobotState start_belief_mean;
  Control start_control;
  std::vector<TickRecord> ticks;

  friend bool operator==(const EpisodeTrace&, const EpisodeTrace&) = default;
};

struct MetricsReport {
  double rmse = 0.0;
  double tcm = 1.0;
  int nm = 0;
  double td = 0.0;
  double md = 0.0;
  int nt = 0;
  double vel = 0.0;
  double length = 0.0;
  double time = 0.0;
  bool reached_goal = false;
  bool collided = false;
  int ticks = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

struct LocalizationMetrics {
  double rmse = 0.0;
  double tcm = 1.0;
  int nm = 0;
};

struct SocialMetrics {
  double td = 0.0;
  double md = 0.0;
  int nt = 0;
};

struct EfficiencyMetrics {
  double vel = 0.0;
  double length = 0.0;
  double time = 0.0;
};

/// RMSE of planar error; TCM = first time the trace drops below `conv_threshold` over total time
/// (1 if never); NM = re-divergences above 1.5x the threshold after the first convergence.
LocalizationMetrics localization_metrics(const EpisodeTrace& trace, double conv_threshold);

/// Each tick stands for the interval since the previous one. MD falls back to `no_pedestrian_md`
/// when no pedestrian was ever present.
SocialMetrics social_metrics(const EpisodeTrace& trace, double comfort_threshold, double no_pedestrian_md);

EfficiencyMetrics efficiency_metrics(const EpisodeTrace& trace);

struct EpisodeResult {
  EpisodeTrace trace;
  MetricsReport metrics;
  std::vector<double> cycle_seconds;  // plan_cycle wall time per cycle; not part of the trace
};

/// Closed-loop run until the goal is reached, a static collision, or the tick limit.
/// Every random draw comes from one generator seeded with `seed`.
EpisodeResult run_episode(const Scenario& scenario, std::uint64_t seed);

}  // namespace curio
