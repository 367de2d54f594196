#include "curio/crowd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "curio/kdtree.hpp"

namespace curio {

std::vector<Cluster> cluster_pedestrians(std::span<const Pedestrian> peds, double social_distance) {
  std::vector<Cluster> clusters;
  if (peds.empty()) return clusters;

  // Process in ascending id order so the result does not depend on input order.
  std::vector<std::size_t> by_id(peds.size());
  std::iota(by_id.begin(), by_id.end(), std::size_t{0});
  std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) { return peds[a].id < peds[b].id; });

  std::vector<Vec2> points;
  points.reserve(peds.size());
  for (std::size_t i : by_id) points.push_back(peds[i].position);
  const KdTree2 tree(points);

  std::vector<char> seen(points.size(), 0);
  std::vector<int> frontier;
  for (std::size_t seed = 0; seed < points.size(); ++seed) {
    if (seen[seed]) continue;
    std::vector<int> members;
    seen[seed] = 1;
    frontier.assign(1, static_cast<int>(seed));
    while (!frontier.empty()) {
      const int cur = frontier.back();
      frontier.pop_back();
      members.push_back(cur);
      for (int nb : tree.radius_search(points[static_cast<std::size_t>(cur)], social_distance)) {
        if (!seen[static_cast<std::size_t>(nb)]) {
          seen[static_cast<std::size_t>(nb)] = 1;
          frontier.push_back(nb);
        }
      }
    }
    std::sort(members.begin(), members.end());
    Cluster c;
    for (int m : members) {
      c.member_ids.push_back(peds[by_id[static_cast<std::size_t>(m)]].id);
      c.member_positions.push_back(points[static_cast<std::size_t>(m)]);
    }
    c.circle = enclosing_circle(c.member_positions);
    clusters.push_back(std::move(c));
  }
  return clusters;
}

namespace {

constexpr double kContainEps = 1e-12;

bool contains(const Circle& c, const Vec2& p) { return (p - c.center).norm() <= c.radius * (1.0 + kContainEps) + kContainEps; }

Circle diametral(const Vec2& a, const Vec2& b) {
  const Vec2 c = 0.5 * (a + b);
  return {c, std::max((a - c).norm(), (b - c).norm())};
}

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

std::optional<Circle> circumcircle(const Vec2& a, const Vec2& b, const Vec2& c) {
  // Translate to the bounding-box center for conditioning.
  const Vec2 lo = a.cwiseMin(b).cwiseMin(c);
  const Vec2 hi = a.cwiseMax(b).cwiseMax(c);
  const Vec2 o = 0.5 * (lo + hi);
  const Vec2 pa = a - o, pb = b - o, pc = c - o;
  const double d = 2.0 * (pa.x() * (pb.y() - pc.y()) + pb.x() * (pc.y() - pa.y()) + pc.x() * (pa.y() - pb.y()));
  if (d == 0.0) return std::nullopt;
  const double x = (pa.squaredNorm() * (pb.y() - pc.y()) + pb.squaredNorm() * (pc.y() - pa.y()) +
                    pc.squaredNorm() * (pa.y() - pb.y())) / d;
  const double y = (pa.squaredNorm() * (pc.x() - pb.x()) + pb.squaredNorm() * (pa.x() - pc.x()) +
                    pc.squaredNorm() * (pb.x() - pa.x())) / d;
  const Vec2 center = o + Vec2(x, y);
  const double r = std::max({(center - a).norm(), (center - b).norm(), (center - c).norm()});
  return Circle{center, r};
}

// Smallest circle with p and q on the boundary enclosing pts.
Circle circle_two_boundary(std::span<const Vec2> pts, const Vec2& p, const Vec2& q) {
  const Circle base = diametral(p, q);
  std::optional<Circle> left, right;
  for (const Vec2& r : pts) {
    if (contains(base, r)) continue;
    const double cr = cross(p, q, r);
    const auto c = circumcircle(p, q, r);
    if (!c) continue;
    if (cr > 0.0 && (!left || cross(p, q, c->center) > cross(p, q, left->center))) left = c;
    else if (cr < 0.0 && (!right || cross(p, q, c->center) < cross(p, q, right->center))) right = c;
  }
  if (!left && !right) return base;
  if (!left) return *right;
  if (!right) return *left;
  return left->radius <= right->radius ? *left : *right;
}

// Smallest circle with p on the boundary enclosing pts.
Circle circle_one_boundary(std::span<const Vec2> pts, const Vec2& p) {
  Circle c{p, 0.0};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (contains(c, pts[i])) continue;
    c = c.radius == 0.0 ? diametral(p, pts[i]) : circle_two_boundary(pts.first(i + 1), p, pts[i]);
  }
  return c;
}

}  // namespace

Circle enclosing_circle(std::span<const Vec2> points) {
  if (points.empty()) throw std::invalid_argument("enclosing_circle: empty point set");
  std::optional<Circle> c;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!c || !contains(*c, points[i])) c = circle_one_boundary(points.first(i + 1), points[i]);
  }
  // Tighten the radius to the farthest point so containment is exact.
  double r = 0.0;
  for (const auto& p : points) r = std::max(r, (p - c->center).norm());
  c->radius = r;
  return *c;
}

double gaussian_pdf(const Vec2& q, const Vec2& mean, double sigma) {
  const double d2 = (q - mean).squaredNorm();
  return std::exp(-0.5 * d2 / sigma) / (kTwoPi * sigma);
}

double Hccdm::density(const Vec2& q) const {
  double h = 0.0;
  for (const auto& c : components) h += c.weight * gaussian_pdf(q, c.mean, c.sigma);
  return h;
}

Hccdm build_hccdm(std::span<const Cluster> clusters, double personal_distance) {
  Hccdm map;
  double total = 0.0;
  for (const auto& c : clusters) total += c.size();
  for (const auto& c : clusters) {
    GaussianComponent g;
    if (c.size() == 1) {
      g.mean = c.member_positions.front();
      g.sigma = personal_distance;
    } else {
      g.mean = c.circle.center;
      g.sigma = c.circle.radius + personal_distance;
    }
    g.weight = c.size() / total;
    map.components.push_back(g);
  }
  return map;
}

std::vector<std::vector<Pedestrian>> predict_pedestrians(std::span<const Pedestrian> peds, int steps, double dt) {
  std::vector<std::vector<Pedestrian>> out(static_cast<std::size_t>(std::max(steps, 0)) + 1);
  for (int k = 0; k <= steps; ++k) {
    auto& layer = out[static_cast<std::size_t>(k)];
    layer.reserve(peds.size());
    for (const auto& p : peds) {
      Pedestrian q = p;
      q.position = p.position + (k * dt) * p.velocity;
      q.timestamp = p.timestamp + k * dt;
      layer.push_back(q);
    }
  }
  return out;
}

std::vector<Pedestrian> update_working_zone(std::span<const Pedestrian> peds, const Vec2& robot, double radius) {
  std::vector<Pedestrian> out;
  for (const auto& p : peds) {
    if ((p.position - robot).norm() <= radius) out.push_back(p);
  }
  return out;
}

std::vector<Hccdm> build_hccdm_sequence(const std::vector<std::vector<Pedestrian>>& forecast, const Vec2& robot,
                                        const CrowdModelParams& params) {
  std::vector<Hccdm> maps;
  maps.reserve(forecast.size());
  for (const auto& layer : forecast) {
    const auto zone = update_working_zone(layer, robot, params.working_zone_radius);
    const auto clusters = cluster_pedestrians(zone, params.social_distance);
    Hccdm map = build_hccdm(clusters, params.personal_distance);
    map.timestamp = layer.empty() ? 0.0 : layer.front().timestamp;
    map.zone_center = robot;
    map.zone_radius = params.working_zone_radius;
    maps.push_back(std::move(map));
  }
  return maps;
}

double cnc_cost(const TrajectoryCandidate& candidate, std::span<const Hccdm> maps) {
  if (candidate.empty()) return 0.0;
  if (maps.size() < candidate.size() + 1) throw std::invalid_argument("cnc_cost: forecast shorter than the candidate");
  double h = 0.0;
  for (std::size_t k = 0; k < candidate.size(); ++k) h += maps[k + 1].density(candidate.steps[k].state.position());
  return h;
}

double cnc_cost(const TrajectoryCandidate& candidate, const std::vector<std::vector<Pedestrian>>& forecast,
                const CrowdModelParams& params) {
  const auto maps = build_hccdm_sequence(forecast, candidate.root.position(), params);
  return cnc_cost(candidate, maps);
}

}  // namespace curio
