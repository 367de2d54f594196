#include "curio/planner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

namespace curio {

std::vector<RobotState> integrate_arc(const RobotState& from, const Control& control, double dt) {
  std::vector<RobotState> arc;
  arc.reserve(kArcSubsteps + 1);
  arc.push_back(from);
  for (int i = 1; i < kArcSubsteps; ++i) arc.push_back(step(from, control, dt * i / kArcSubsteps));
  arc.push_back(step(from, control, dt));
  return arc;
}

int Tree::max_depth() const {
  int d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

bool Tree::check_invariants(double dt, double tol) const {
  if (nodes.empty()) return true;
  if (nodes[0].parent != -1 || nodes[0].depth != 0 || nodes[0].cost != 0.0) return false;
  const int n = static_cast<int>(nodes.size());
  for (int i = 1; i < n; ++i) {
    const TreeNode& node = nodes[static_cast<std::size_t>(i)];
    if (node.parent < 0 || node.parent >= n || node.parent == i) return false;
    const TreeNode& parent = nodes[static_cast<std::size_t>(node.parent)];
    if (node.depth != parent.depth + 1) return false;
    if (std::abs(node.cost - (parent.cost + std::abs(node.control.v) * dt)) > 1e-9 * std::max(1.0, node.cost)) return false;
    if (node.arc.size() != kArcSubsteps + 1) return false;
    if (state_error(node.arc.front(), parent.state).cwiseAbs().maxCoeff() > tol) return false;
    if (state_error(node.arc.back(), node.state).cwiseAbs().maxCoeff() > tol) return false;
    if (state_error(step(parent.state, node.control, dt), node.state).cwiseAbs().maxCoeff() > tol) return false;
    if (std::count(parent.children.begin(), parent.children.end(), i) != 1) return false;
    // Walking up must reach the root in exactly `depth` hops.
    int cur = i, hops = 0;
    while (cur != 0 && hops <= node.depth) {
      cur = nodes[static_cast<std::size_t>(cur)].parent;
      ++hops;
    }
    if (cur != 0 || hops != node.depth) return false;
  }
  return true;
}

Vec2 PedestrianForecast::position(std::size_t ped, double t) const {
  if (layers.size() == 1) {
    const Pedestrian& p = layers[0][ped];
    return p.position + t * p.velocity;
  }
  const int last = static_cast<int>(layers.size()) - 2;
  const int i = std::clamp(static_cast<int>(std::floor(t / dt)), 0, last);
  const Vec2& a = layers[static_cast<std::size_t>(i)][ped].position;
  const Vec2& b = layers[static_cast<std::size_t>(i) + 1][ped].position;
  const double frac = (t - i * dt) / dt;
  return a + frac * (b - a);
}

bool obstacle_free(std::span<const RobotState> arc, double t0, double dt, const CollisionContext& ctx) {
  if (arc.empty()) return false;
  const double radius = ctx.escape_static_radius >= 0.0 ? ctx.escape_static_radius : ctx.robot_radius;
  const double clearance =
      ctx.escape_ped_clearance >= 0.0 ? ctx.escape_ped_clearance : ctx.robot_radius + ctx.pedestrian_radius;
  const bool check_peds = ctx.forecast != nullptr && !ctx.forecast->layers.empty();
  const std::size_t peds = check_peds ? ctx.forecast->count() : 0;
  const double sub = arc.size() > 1 ? dt / static_cast<double>(arc.size() - 1) : 0.0;
  for (std::size_t i = 0; i < arc.size(); ++i) {
    const Vec2 p = arc[i].position();
    if (ctx.grid != nullptr && !is_footprint_free(*ctx.grid, p, radius)) return false;
    const double t = t0 + static_cast<double>(i) * sub;
    for (std::size_t j = 0; j < peds; ++j) {
      if ((ctx.forecast->position(j, t) - p).norm() <= clearance) return false;
    }
  }
  return true;
}

std::optional<CollisionContext> relax_for_root(const CollisionContext& ctx, const RobotState& root) {
  CollisionContext out = ctx;
  const Vec2 p = root.position();
  if (ctx.grid != nullptr && !is_footprint_free(*ctx.grid, p, ctx.robot_radius)) {
    const auto cell = ctx.grid->cell_of(p);
    if (!cell || ctx.grid->occupied(cell->ix, cell->iy)) return std::nullopt;
    out.escape_static_radius = 0.0;
  }
  if (ctx.forecast != nullptr && !ctx.forecast->layers.empty()) {
    const double full = ctx.robot_radius + ctx.pedestrian_radius;
    double d0 = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < ctx.forecast->count(); ++j) d0 = std::min(d0, (ctx.forecast->position(j, 0.0) - p).norm());
    if (d0 <= full) out.escape_ped_clearance = 0.95 * d0;
  }
  return out;
}

SteerResult steer(const RobotState& from, const Vec2& to, double dt, double v_max, double omega_max) {
  // Preference order for ties: smaller |omega| first, positive before negative.
  const std::array<double, 5> omegas = {0.0, 0.5 * omega_max, -0.5 * omega_max, omega_max, -omega_max};
  const std::array<double, 3> speeds = {0.3 * v_max, 0.6 * v_max, v_max};
  Control best{};
  double best_d = std::numeric_limits<double>::infinity();
  for (double w : omegas) {
    for (double v : speeds) {
      const double d = (step(from, {v, w}, dt).position() - to).norm();
      if (d < best_d - 1e-12) {
        best_d = d;
        best = {v, w};
      }
    }
  }
  SteerResult r;
  r.control = best;
  r.arc = integrate_arc(from, best, dt);
  r.state = r.arc.back();
  return r;
}

namespace {

double edge_cost(const Control& u, double dt) { return std::abs(u.v) * dt; }

bool is_descendant(const Tree& tree, int node, int ancestor) {
  for (int cur = node; cur != -1; cur = tree.nodes[static_cast<std::size_t>(cur)].parent) {
    if (cur == ancestor) return true;
  }
  return false;
}

void collect_subtree(const Tree& tree, int node, std::vector<int>& out) {
  out.push_back(node);
  for (std::size_t i = out.size() - 1; i < out.size(); ++i) {
    for (int c : tree.nodes[static_cast<std::size_t>(out[i])].children) out.push_back(c);
  }
}

// Removes `node` from its parent's child list and returns the position it held.
std::ptrdiff_t detach(Tree& tree, int node) {
  auto& siblings = tree.nodes[static_cast<std::size_t>(tree.nodes[static_cast<std::size_t>(node)].parent)].children;
  const auto it = std::find(siblings.begin(), siblings.end(), node);
  const auto pos = it - siblings.begin();
  siblings.erase(it);
  return pos;
}

}  // namespace

bool rewire(Tree& tree, int node, int new_parent, const CollisionContext& ctx, const TreeParams& params) {
  if (node <= 0 || new_parent < 0 || node == new_parent) return false;
  TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
  if (n.parent == new_parent) return false;
  if (is_descendant(tree, new_parent, node)) return false;

  const TreeNode& p = tree.nodes[static_cast<std::size_t>(new_parent)];
  SteerResult s = steer(p.state, n.state.position(), params.dt, params.v_max, params.omega_max);
  if ((s.state.position() - n.state.position()).norm() > params.connect_tolerance) return false;
  const double new_cost = p.cost + edge_cost(s.control, params.dt);
  if (!(new_cost < n.cost - 1e-12)) return false;
  if (!obstacle_free(s.arc, p.depth * params.dt, params.dt, ctx)) return false;

  std::vector<int> subtree;
  collect_subtree(tree, node, subtree);
  std::vector<TreeNode> backup;
  backup.reserve(subtree.size());
  for (int i : subtree) backup.push_back(tree.nodes[static_cast<std::size_t>(i)]);

  const int old_parent = n.parent;
  const std::ptrdiff_t old_slot = detach(tree, node);
  n.parent = new_parent;
  n.control = s.control;
  n.arc = std::move(s.arc);
  n.state = s.state;
  n.depth = p.depth + 1;
  n.cost = new_cost;
  tree.nodes[static_cast<std::size_t>(new_parent)].children.push_back(node);

  // Re-simulate descendants with their stored controls; their timing shifts with the depth.
  bool ok = true;
  for (std::size_t k = 1; k < subtree.size() && ok; ++k) {
    TreeNode& d = tree.nodes[static_cast<std::size_t>(subtree[k])];
    const TreeNode& dp = tree.nodes[static_cast<std::size_t>(d.parent)];
    d.arc = integrate_arc(dp.state, d.control, params.dt);
    d.state = d.arc.back();
    d.depth = dp.depth + 1;
    d.cost = dp.cost + edge_cost(d.control, params.dt);
    ok = obstacle_free(d.arc, dp.depth * params.dt, params.dt, ctx);
  }
  if (!ok) {
    detach(tree, node);
    for (std::size_t k = 0; k < subtree.size(); ++k) tree.nodes[static_cast<std::size_t>(subtree[k])] = backup[k];
    auto& ch = tree.nodes[static_cast<std::size_t>(old_parent)].children;
    ch.insert(ch.begin() + old_slot, node);
    return false;
  }
  return true;
}

Tree grow_tree(const RobotState& root, const Vec2& goal, const CollisionContext& ctx, const TreeParams& params,
               std::mt19937_64& rng) {
  Tree tree;
  TreeNode r;
  r.state = root;
  r.arc = {root};
  tree.nodes.push_back(r);
  if (ctx.grid == nullptr || ctx.grid->free_cells().empty()) return tree;

  const GridMap& grid = *ctx.grid;
  const auto& free = grid.free_cells();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
  const double reach = params.v_max * params.dt + params.connect_tolerance;
  const double near_radius = std::min(params.neighbor_radius, reach);

  for (int iter = 0; iter < params.budget; ++iter) {
    Vec2 sample;
    if (unit(rng) < params.goal_bias) {
      sample = goal;
    } else {
      const int cell = free[pick(rng)];
      const double ox = unit(rng), oy = unit(rng);
      sample = grid.cell_min_corner(cell % grid.width(), cell / grid.width()) + grid.resolution() * Vec2(ox, oy);
    }

    int nearest = 0;
    double nearest_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      const double d2 = (tree.nodes[i].state.position() - sample).squaredNorm();
      if (d2 < nearest_d2) {
        nearest_d2 = d2;
        nearest = static_cast<int>(i);
      }
    }

    const TreeNode& qn = tree.nodes[static_cast<std::size_t>(nearest)];
    SteerResult s = steer(qn.state, sample, params.dt, params.v_max, params.omega_max);
    if (!obstacle_free(s.arc, qn.depth * params.dt, params.dt, ctx)) continue;
    const Vec2 target = s.state.position();

    std::vector<int> near;
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      if ((tree.nodes[i].state.position() - target).norm() <= near_radius) near.push_back(static_cast<int>(i));
    }

    int parent = nearest;
    double best_cost = qn.cost + edge_cost(s.control, params.dt);
    for (int j : near) {
      if (j == nearest) continue;
      const TreeNode& qj = tree.nodes[static_cast<std::size_t>(j)];
      SteerResult sj = steer(qj.state, target, params.dt, params.v_max, params.omega_max);
      if ((sj.state.position() - target).norm() > params.connect_tolerance) continue;
      const double c = qj.cost + edge_cost(sj.control, params.dt);
      if (!(c < best_cost - 1e-12)) continue;
      if (!obstacle_free(sj.arc, qj.depth * params.dt, params.dt, ctx)) continue;
      parent = j;
      best_cost = c;
      s = std::move(sj);
    }

    // The same primitive from the same parent would duplicate an existing node.
    const TreeNode& qp = tree.nodes[static_cast<std::size_t>(parent)];
    const bool duplicate = std::any_of(qp.children.begin(), qp.children.end(), [&](int c) {
      const Control& u = tree.nodes[static_cast<std::size_t>(c)].control;
      return u.v == s.control.v && u.omega == s.control.omega;
    });
    if (duplicate) continue;

    TreeNode node;
    node.parent = parent;
    node.control = s.control;
    node.state = s.state;
    node.arc = std::move(s.arc);
    node.depth = qp.depth + 1;
    node.cost = best_cost;
    const int idx = static_cast<int>(tree.nodes.size());
    tree.nodes[static_cast<std::size_t>(parent)].children.push_back(idx);
    tree.nodes.push_back(std::move(node));

    for (int j : near) {
      if (j == 0 || j == parent) continue;
      rewire(tree, j, idx, ctx, params);
    }
    if (params.debug_checks && !tree.check_invariants(params.dt)) {
      throw std::logic_error("grow_tree: invariant violated at iteration " + std::to_string(iter));
    }
  }
  return tree;
}

bool candidate_obstacle_free(const TrajectoryCandidate& candidate, double dt, const CollisionContext& ctx) {
  for (std::size_t k = 0; k < candidate.size(); ++k) {
    const auto arc = integrate_arc(candidate.state_before(k), candidate.steps[k].control, dt);
    if (!obstacle_free(arc, static_cast<double>(k) * dt, dt, ctx)) return false;
  }
  return true;
}

std::vector<TrajectoryCandidate> find_path_candidates(const Tree& tree, int K, int max_candidates, double dt,
                                                      const CollisionContext& ctx) {
  std::vector<TrajectoryCandidate> out;
  if (tree.nodes.empty() || K < 1 || max_candidates < 1) return out;
  const int depth = std::min(K, tree.max_depth());
  if (depth < 1) return out;

  std::vector<int> ends;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].depth == depth) ends.push_back(static_cast<int>(i));
  }
  std::stable_sort(ends.begin(), ends.end(), [&](int a, int b) {
    return tree.nodes[static_cast<std::size_t>(a)].cost < tree.nodes[static_cast<std::size_t>(b)].cost;
  });

  std::set<std::vector<std::pair<double, double>>> seen;
  for (int end : ends) {
    if (static_cast<int>(out.size()) >= max_candidates) break;
    std::vector<int> chain;
    for (int cur = end; cur != 0; cur = tree.nodes[static_cast<std::size_t>(cur)].parent) chain.push_back(cur);
    std::reverse(chain.begin(), chain.end());

    std::vector<std::pair<double, double>> key;
    TrajectoryCandidate c;
    c.root = tree.nodes[0].state;
    for (std::size_t k = 0; k < chain.size(); ++k) {
      const TreeNode& n = tree.nodes[static_cast<std::size_t>(chain[k])];
      c.steps.push_back({n.state, n.control, static_cast<double>(k + 1) * dt});
      key.emplace_back(n.control.v, n.control.omega);
    }
    if (!seen.insert(key).second) continue;
    if (!is_dynamically_consistent(c, dt) || !candidate_obstacle_free(c, dt, ctx)) continue;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<TrajectoryCandidate> prune_unreachable(std::span<const TrajectoryCandidate> candidates,
                                                   const RobotState& current, double dt, const CollisionContext& ctx,
                                                   const PruneTolerance& tol) {
  std::vector<TrajectoryCandidate> out;
  for (const auto& c : candidates) {
    if (c.empty()) continue;
    const Vec3 e = state_error(c.root, current);
    if (e.head<2>().norm() > tol.position || std::abs(e(2)) > tol.heading) continue;
    if (!candidate_obstacle_free(c, dt, ctx)) continue;
    out.push_back(c);
  }
  return out;
}

std::optional<TrajectoryCandidate> advance_candidate(const TrajectoryCandidate& candidate, double dt) {
  if (candidate.size() < 2) return std::nullopt;
  TrajectoryCandidate c;
  c.root = candidate.steps.front().state;
  c.steps.assign(candidate.steps.begin() + 1, candidate.steps.end());
  for (std::size_t k = 0; k < c.steps.size(); ++k) c.steps[k].time = static_cast<double>(k + 1) * dt;
  return c;
}

TrajectoryCandidate reroot_candidate(const TrajectoryCandidate& candidate, const RobotState& root, std::size_t steps,
                                     double dt) {
  std::vector<Control> controls;
  for (const auto& s : candidate.steps) controls.push_back(s.control);
  if (controls.empty()) return make_candidate(root, {}, dt);
  while (controls.size() < steps) controls.push_back(controls.back());
  controls.resize(steps);
  return make_candidate(root, controls, dt);
}

}  // namespace curio
