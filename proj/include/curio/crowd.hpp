#pragma once

#include <span>
#include <vector>

#include "curio/geometry.hpp"
#include "curio/trajectory.hpp"

namespace curio {

struct Pedestrian {
  int id = 0;
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  double timestamp = 0.0;
};

struct Circle {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

/// A crowd (or a single person): members are pedestrian ids in ascending order.
struct Cluster {
  std::vector<int> member_ids;
  std::vector<Vec2> member_positions;
  Circle circle;

  int size() const { return static_cast<int>(member_ids.size()); }
};

/// Connected components of the graph linking pedestrians at distance <= social_distance, found by
/// KD-tree range search. Clusters are ordered by their smallest member id.
std::vector<Cluster> cluster_pedestrians(std::span<const Pedestrian> peds, double social_distance);

/// Minimal enclosing circle (Welzl-style incremental construction). Throws std::invalid_argument for
/// an empty point set.
Circle enclosing_circle(std::span<const Vec2> points);

/// Isotropic component with covariance diag(sigma, sigma).
struct GaussianComponent {
  Vec2 mean = Vec2::Zero();
  double sigma = 1.0;
  double weight = 0.0;
};

/// N(q | mean, diag(sigma, sigma)) = exp(-|q - mean|^2 / (2 sigma)) / (2 pi sigma).
double gaussian_pdf(const Vec2& q, const Vec2& mean, double sigma);

/// Human comfort and crowd density map: a weighted isotropic Gaussian mixture.
struct Hccdm {
  std::vector<GaussianComponent> components;
  double timestamp = 0.0;
  Vec2 zone_center = Vec2::Zero();
  double zone_radius = 0.0;

  double density(const Vec2& q) const;
};

/// One component per cluster. Singletons: mean at the person, sigma = personal distance. Crowds: mean
/// at the enclosing-circle center, sigma = radius + personal distance. Weights are proportional to
/// cluster size.
Hccdm build_hccdm(std::span<const Cluster> clusters, double personal_distance);

/// Constant-velocity forecast; element k holds the pedestrians at time +k*dt, for k = 0..steps.
std::vector<std::vector<Pedestrian>> predict_pedestrians(std::span<const Pedestrian> peds, int steps, double dt);

/// Pedestrians within `radius` of the robot.
std::vector<Pedestrian> update_working_zone(std::span<const Pedestrian> peds, const Vec2& robot, double radius);

struct CrowdModelParams {
  double social_distance = 1.5;
  double personal_distance = 1.2;
  double working_zone_radius = 8.0;
};

/// Per-step maps for one planning cycle: maps[k] is built from the pedestrians forecast to +k*dt
/// that lie inside the working zone around `robot`.
std::vector<Hccdm> build_hccdm_sequence(const std::vector<std::vector<Pedestrian>>& forecast, const Vec2& robot,
                                        const CrowdModelParams& params);

/// Sum over candidate steps of the mixture density at the step position. Step k (reached at
/// +k*dt) is scored against maps[k]. Throws std::invalid_argument if the maps do not cover the
/// candidate horizon.
double cnc_cost(const TrajectoryCandidate& candidate, std::span<const Hccdm> maps);

/// Convenience form that builds the per-step maps first.
double cnc_cost(const TrajectoryCandidate& candidate, const std::vector<std::vector<Pedestrian>>& forecast,
                const CrowdModelParams& params);

}  // namespace curio
