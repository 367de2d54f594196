#include "curio/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

namespace curio {

namespace {

constexpr double kSwitchRadius = 0.3;
constexpr double kRepulsionRange = 0.8;
constexpr double kRepulsionCap = 0.3;
constexpr double kContactRange = 0.5;
constexpr double kMaxSubstep = 0.1;

Vec2 desired_velocity(PedestrianAgent& a, double h) {
  if (a.waypoints.empty() || a.speed <= 0.0) return Vec2::Zero();
  Vec2 to = a.waypoints[a.target] - a.position;
  if (to.norm() <= kSwitchRadius) {
    a.target = (a.target + 1) % a.waypoints.size();
    to = a.waypoints[a.target] - a.position;
  }
  const double d = to.norm();
  if (d < 1e-12) return Vec2::Zero();
  // Never overshoot the waypoint within one substep.
  return std::min(a.speed, d / h) * to / d;
}

}  // namespace

std::vector<PedestrianAgent> spawn_pedestrians(std::span<const PedestrianSpec> specs) {
  std::vector<PedestrianAgent> out;
  out.reserve(specs.size());
  for (const auto& s : specs) {
    PedestrianAgent a;
    a.id = s.id;
    a.position = s.start;
    a.speed = s.speed;
    a.waypoints = s.waypoints;
    if (!a.waypoints.empty()) {
      const Vec2 to = a.waypoints.front() - a.position;
      if (to.norm() > 1e-12) a.velocity = a.speed * to / to.norm();
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<PedestrianAgent> pedestrian_step(std::span<const PedestrianAgent> agents, double dt) {
  std::vector<PedestrianAgent> cur(agents.begin(), agents.end());
  if (cur.empty() || dt <= 0.0) return cur;
  const int substeps = std::max(1, static_cast<int>(std::ceil(dt / kMaxSubstep - 1e-9)));
  const double h = dt / substeps;
  std::vector<Vec2> start(cur.size());
  for (std::size_t i = 0; i < cur.size(); ++i) start[i] = cur[i].position;

  std::vector<Vec2> vel(cur.size());
  for (int s = 0; s < substeps; ++s) {
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const Vec2 want = desired_velocity(cur[i], h);
      const Vec2 heading = want.norm() > 1e-12 ? Vec2(want.normalized()) : Vec2::Zero();
      Vec2 push = Vec2::Zero();
      for (std::size_t j = 0; j < cur.size(); ++j) {
        if (j == i) continue;
        const Vec2 away = cur[i].position - cur[j].position;
        const double d = away.norm();
        if (d >= kRepulsionRange || d < 1e-12) continue;
        const double scale = 1.0 - d / kRepulsionRange;
        push += scale * away / d;
        // Sidestep to the right of a neighbor ahead so head-on pairs pass each other.
        if (heading.dot(-away) > 0.0) push += scale * Vec2(heading.y(), -heading.x());
      }
      if (push.norm() > kRepulsionCap) push *= kRepulsionCap / push.norm();
      Vec2 v = want + push;
      for (std::size_t j = 0; j < cur.size(); ++j) {
        if (j == i) continue;
        const Vec2 to = cur[j].position - cur[i].position;
        const double d = to.norm();
        if (d >= kContactRange || d < 1e-12) continue;
        const Vec2 n = to / d;
        const double closing = v.dot(n);
        if (closing > 0.0) v -= closing * n;
      }
      const double cap = cur[i].speed + kRepulsionCap;
      if (v.norm() > cap) v *= cap / v.norm();
      vel[i] = v;
    }
    for (std::size_t i = 0; i < cur.size(); ++i) cur[i].position += h * vel[i];
  }
  for (std::size_t i = 0; i < cur.size(); ++i) cur[i].velocity = (cur[i].position - start[i]) / dt;
  return cur;
}

std::vector<Pedestrian> observe_pedestrians(std::span<const PedestrianAgent> agents, double t) {
  std::vector<Pedestrian> out;
  out.reserve(agents.size());
  for (const auto& a : agents) out.push_back({a.id, a.position, a.velocity, t});
  return out;
}

LocalizationMetrics localization_metrics(const EpisodeTrace& trace, double conv_threshold) {
  LocalizationMetrics m;
  if (trace.ticks.empty()) return m;
  double se = 0.0;
  for (const auto& t : trace.ticks) se += (t.true_state.position() - t.belief_mean.position()).squaredNorm();
  m.rmse = std::sqrt(se / static_cast<double>(trace.ticks.size()));

  const double total = trace.ticks.back().time;
  bool converged_once = false, converged = false;
  for (const auto& t : trace.ticks) {
    if (!converged_once) {
      if (t.cov_trace < conv_threshold) {
        converged_once = converged = true;
        m.tcm = total > 0.0 ? t.time / total : 0.0;
      }
      continue;
    }
    if (converged && t.cov_trace > 1.5 * conv_threshold) {
      ++m.nm;
      converged = false;
    } else if (!converged && t.cov_trace < conv_threshold) {
      converged = true;
    }
  }
  return m;
}

SocialMetrics social_metrics(const EpisodeTrace& trace, double comfort_threshold, double no_pedestrian_md) {
  SocialMetrics m;
  if (trace.ticks.empty()) return m;
  double below = 0.0, prev_time = 0.0, md = std::numeric_limits<double>::infinity();
  bool was_below = false;
  for (const auto& t : trace.ticks) {
    const bool is_below = t.min_ped_distance < comfort_threshold;
    if (is_below) below += t.time - prev_time;
    if (is_below && !was_below) ++m.nt;
    was_below = is_below;
    prev_time = t.time;
    md = std::min(md, t.min_ped_distance);
  }
  const double total = trace.ticks.back().time;
  m.td = total > 0.0 ? std::clamp(below / total, 0.0, 1.0) : 0.0;
  m.md = std::isfinite(md) ? md : no_pedestrian_md;
  return m;
}

EfficiencyMetrics efficiency_metrics(const EpisodeTrace& trace) {
  EfficiencyMetrics m;
  if (trace.ticks.empty()) return m;
  Vec2 prev = trace.start_true_state.position();
  for (const auto& t : trace.ticks) {
    m.length += (t.true_state.position() - prev).norm();
    prev = t.true_state.position();
  }
  m.time = trace.ticks.back().time;
  m.vel = m.time > 0.0 ? m.length / m.time : 0.0;
  return m;
}

namespace {

// Square root factor S with S S^T = cov, for covariances that may be singular.
Mat3 sqrt_factor(const Mat3& cov) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  const Vec3 ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal();
}

Vec3 sample_gaussian(const Mat3& factor, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Vec3 z;
  for (int i = 0; i < 3; ++i) z(i) = n01(rng);
  return factor * z;
}

Measurement sense(const Scenario& s, const RobotState& truth, std::mt19937_64& rng) {
  const Params& p = s.params;
  const auto visible = visible_landmarks(s.grid, s.landmarks, truth, p.sensor_range, p.sensor_fov);
  const int rows = rows_per_landmark(p.measurement_mode);
  std::vector<double> noise;
  noise.reserve(visible.size() * static_cast<std::size_t>(rows));
  std::normal_distribution<double> n01(0.0, 1.0);
  for (std::size_t i = 0; i < visible.size(); ++i) {
    noise.push_back(std::sqrt(p.range_variance) * n01(rng));
    if (rows == 2) noise.push_back(std::sqrt(p.bearing_variance) * n01(rng));
  }
  return measure(truth, visible, p.measurement_mode, noise);
}

Belief correct(const Belief& b, const Measurement& z, const Scenario& s) {
  if (z.empty()) return b;
  auto updated = ekf_update(b, z, s.landmarks, SensorModel::from(s.params));
  return updated ? *updated : b;
}

double min_distance(const RobotState& robot, std::span<const PedestrianAgent> agents) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& a : agents) d = std::min(d, (a.position - robot.position()).norm());
  return d;
}

bool in_static_collision(const GridMap& grid, const RobotState& s) {
  const auto cell = grid.cell_of(s.position());
  return !cell || grid.occupied(cell->ix, cell->iy);
}

}  // namespace

EpisodeResult run_episode(const Scenario& scenario, std::uint64_t seed) {
  const Params& p = scenario.params;
  std::mt19937_64 rng(seed);
  EpisodeResult out;
  EpisodeTrace& trace = out.trace;
  trace.dt = p.dt;

  const Mat3 init_factor = sqrt_factor(p.initial_covariance);
  const Mat3 process_factor = sqrt_factor(p.process_noise);

  RobotState truth = RobotState::from_vec(scenario.robot_start.vec() + sample_gaussian(init_factor, rng));
  std::vector<PedestrianAgent> agents = spawn_pedestrians(scenario.pedestrians);
  Belief belief{scenario.robot_start, p.initial_covariance};
  belief = correct(belief, sense(scenario, truth, rng), scenario);

  trace.start_true_state = truth;
  trace.start_belief_mean = belief.mean;

  std::optional<TrajectoryCandidate> last_plan;
  Control control{};
  auto plan = [&](double t) -> std::optional<PlanResult> {
    std::vector<TrajectoryCandidate> carried;
    if (last_plan) {
      if (auto next = advance_candidate(*last_plan, p.dt)) carried.push_back(std::move(*next));
    }
    PlanResult r = plan_cycle(belief, scenario, p, observe_pedestrians(agents, t), carried, rng);
    out.cycle_seconds.push_back(r.diagnostics.seconds);
    if (const auto* c = r.chosen()) {
      last_plan = *c;
      control = c->steps.front().control;
    } else {
      last_plan.reset();
      control = Control{};
    }
    return r;
  };

  if (!in_static_collision(scenario.grid, truth)) {
    plan(0.0);
    trace.start_control = control;
  } else {
    out.metrics.collided = true;
  }

  for (int tick = 1; tick <= p.tick_limit && !out.metrics.collided; ++tick) {
    const double t = tick * p.dt;
    const Control applied = control;
    truth = step(truth, applied, p.dt, sample_gaussian(process_factor, rng));
    agents = pedestrian_step(agents, p.dt);
    const Measurement z = sense(scenario, truth, rng);
    belief = correct(ekf_predict(belief, applied, p.dt, p.process_noise), z, scenario);

    TickRecord rec;
    rec.tick = tick;
    rec.time = t;
    rec.true_state = truth;
    rec.belief_mean = belief.mean;
    rec.covariance = belief.cov;
    rec.cov_trace = belief.cov.trace();
    for (const auto& a : agents) rec.pedestrians.push_back(a.position);
    rec.min_ped_distance = min_distance(truth, agents);

    if (in_static_collision(scenario.grid, truth)) {
      out.metrics.collided = true;
      trace.ticks.push_back(std::move(rec));
      break;
    }
    if ((truth.position() - scenario.goal).norm() <= p.goal_tolerance) {
      out.metrics.reached_goal = true;
      trace.ticks.push_back(std::move(rec));
      break;
    }

    const auto r = plan(t);
    rec.control = control;
    rec.planned = r->chosen() != nullptr;
    rec.cpc_active = r->diagnostics.cpc_active;
    if (const auto* c = r->chosen_cost()) rec.cost = *c;
    trace.ticks.push_back(std::move(rec));
  }

  const auto loc = localization_metrics(trace, p.conv_threshold);
  const auto soc = social_metrics(trace, p.comfort_threshold, p.working_zone_radius);
  const auto eff = efficiency_metrics(trace);
  MetricsReport& m = out.metrics;
  m.rmse = loc.rmse;
  m.tcm = loc.tcm;
  m.nm = loc.nm;
  m.td = soc.td;
  m.md = soc.md;
  m.nt = soc.nt;
  m.vel = eff.vel;
  m.length = eff.length;
  m.time = eff.time;
  m.ticks = static_cast<int>(trace.ticks.size());
  m.seed = seed;
  return out;
}

}  // namespace curio
