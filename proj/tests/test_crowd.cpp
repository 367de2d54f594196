#include <doctest.h>

#include <random>

#include "curio/crowd.hpp"
#include "curio/kdtree.hpp"
#include "support.hpp"

using namespace curio;

namespace {

std::vector<Pedestrian> as_peds(const std::vector<Vec2>& pts) {
  std::vector<Pedestrian> out;
  for (std::size_t i = 0; i < pts.size(); ++i) out.push_back({static_cast<int>(i), pts[i], Vec2::Zero(), 0.0});
  return out;
}

std::vector<std::vector<int>> partition_of(const std::vector<Cluster>& cs) {
  std::vector<std::vector<int>> out;
  for (const auto& c : cs) out.push_back(c.member_ids);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Vec2> random_points(std::mt19937_64& rng, int n, double box) {
  std::uniform_real_distribution<double> u(0.0, box);
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng));
  return pts;
}

}  // namespace

TEST_CASE("kd-tree queries agree with linear scans") {
  std::mt19937_64 rng(1);
  const auto pts = random_points(rng, 300, 10.0);
  const KdTree2 tree(pts);
  std::uniform_real_distribution<double> u(-1.0, 11.0);
  for (int i = 0; i < 200; ++i) {
    const Vec2 q(u(rng), u(rng));
    const double r = std::abs(u(rng)) * 0.3;
    std::vector<int> ref;
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int j = 0; j < static_cast<int>(pts.size()); ++j) {
      const double d = (pts[j] - q).norm();
      if (d <= r) ref.push_back(j);
      if (d < bd) bd = d, best = j;
    }
    CHECK(tree.radius_search(q, r) == ref);
    CHECK(tree.nearest(q) == best);
  }
  CHECK(KdTree2().nearest({0, 0}) == -1);
}

TEST_CASE("clustering: small cases") {
  const auto one = cluster_pedestrians(as_peds({{2, 3}}), 1.5);
  REQUIRE(one.size() == 1);
  CHECK(one[0].size() == 1);
  CHECK(one[0].circle.radius == 0.0);
  CHECK(cluster_pedestrians(as_peds({{0, 0}, {1.51, 0}}), 1.5).size() == 2);
  CHECK(cluster_pedestrians(as_peds({{0, 0}, {1.5, 0}}), 1.5).size() == 1);
  CHECK(cluster_pedestrians({}, 1.5).empty());
}

TEST_CASE("clustering: union-find partition on random crowds") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = random_points(rng, 50, 20.0);
    const auto cs = cluster_pedestrians(as_peds(pts), 1.5);
    CHECK(partition_of(cs) == testing::brute_partition(pts, 1.5));
    for (const auto& c : cs) {
      for (const auto& p : c.member_positions) CHECK((p - c.circle.center).norm() <= c.circle.radius + 1e-9);
    }
  }
}

TEST_CASE("clustering: permutation invariance and refinement") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = random_points(rng, 40, 12.0);
    auto peds = as_peds(pts);
    const auto base = partition_of(cluster_pedestrians(peds, 1.5));
    std::shuffle(peds.begin(), peds.end(), rng);
    CHECK(partition_of(cluster_pedestrians(peds, 1.5)) == base);

    const auto finer = partition_of(cluster_pedestrians(peds, 0.9));
    for (const auto& f : finer) {
      bool inside = false;
      for (const auto& b : base) inside = inside || std::includes(b.begin(), b.end(), f.begin(), f.end());
      CHECK(inside);
    }
  }
}

TEST_CASE("enclosing circle: fixed cases") {
  const std::vector<Vec2> two = {{0, 0}, {1, 0}};
  const Circle c2 = enclosing_circle(two);
  CHECK(c2.center.isApprox(Vec2(0.5, 0)));
  CHECK(c2.radius == doctest::Approx(0.5));
  const std::vector<Vec2> tri = {{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}};
  const Circle c3 = enclosing_circle(tri);
  CHECK(c3.radius == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(c3.center.isApprox(Vec2(0.5, std::sqrt(3.0) / 6), 1e-12));
  CHECK_THROWS_AS(enclosing_circle({}), std::invalid_argument);
}

TEST_CASE("enclosing circle: exhaustive pair/triple search") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> count(1, 12);
  for (int trial = 0; trial < 300; ++trial) {
    const auto pts = random_points(rng, trial < 100 ? 10 : count(rng), 5.0);
    const Circle c = enclosing_circle(pts);
    const testing::RefCircle ref = testing::brute_mec(pts);
    CHECK(std::abs(c.radius - ref.r) < 1e-9);
    for (const auto& p : pts) CHECK((p - c.center).norm() <= c.radius + 1e-9);
  }
}

TEST_CASE("mixture components and weights") {
  const auto single = build_hccdm(cluster_pedestrians(as_peds({{2, 3}}), 1.5), 1.2);
  REQUIRE(single.components.size() == 1);
  CHECK(single.components[0].mean.isApprox(Vec2(2, 3)));
  CHECK(single.components[0].sigma == doctest::Approx(1.2));
  CHECK(single.components[0].weight == 1.0);

  const auto pair = build_hccdm(cluster_pedestrians(as_peds({{0, 0}, {1, 0}}), 1.5), 1.2);
  REQUIRE(pair.components.size() == 1);
  CHECK(pair.components[0].mean.isApprox(Vec2(0.5, 0)));
  CHECK(pair.components[0].sigma == doctest::Approx(1.7));

  const auto mixed = build_hccdm(cluster_pedestrians(as_peds({{0, 0}, {1, 0}, {0, 1}, {10, 10}}), 1.5), 1.2);
  REQUIRE(mixed.components.size() == 2);
  CHECK(mixed.components[0].weight == doctest::Approx(0.75));
  CHECK(mixed.components[1].weight == doctest::Approx(0.25));
  CHECK(build_hccdm({}, 1.2).density({0, 0}) == 0.0);
}

TEST_CASE("gaussian pdf: peak, symmetry, unit mass") {
  CHECK(gaussian_pdf({1, 1}, {1, 1}, 1.0) == doctest::Approx(1.0 / (2 * kPi)).epsilon(1e-12));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const Vec2 mu(u(rng), u(rng)), d(u(rng), u(rng));
    const double s = 0.5 + std::abs(u(rng));
    CHECK(gaussian_pdf(mu + d, mu, s) == doctest::Approx(gaussian_pdf(mu - d, mu, s)).epsilon(1e-12));
  }
  // Midpoint rule over a 12 sigma square with spacing sigma / 100; sigma >= 1 so the square spans
  // at least six standard deviations each way.
  for (double s : {1.0, 1.2, 1.7, 2.5}) {
    const double h = s / 100.0;
    double mass = 0.0;
    for (int i = 0; i < 1200; ++i) {
      for (int j = 0; j < 1200; ++j) {
        mass += gaussian_pdf({-6 * s + (i + 0.5) * h, -6 * s + (j + 0.5) * h}, {0, 0}, s);
      }
    }
    CHECK(std::abs(mass * h * h - 1.0) < 1e-3);
  }
}

TEST_CASE("constant-velocity forecast") {
  std::vector<Pedestrian> peds = {{0, {1, 1}, {0, 0}, 0.0}, {1, {0, 0}, {1, 0}, 0.0}};
  const auto f = predict_pedestrians(peds, 4, 0.5);
  REQUIRE(f.size() == 5);
  for (const auto& layer : f) CHECK(layer[0].position.isApprox(Vec2(1, 1)));
  CHECK(f[4][1].position.x() == doctest::Approx(2.0));
  peds[1].velocity = -peds[1].velocity;
  const auto g = predict_pedestrians(peds, 4, 0.5);
  for (int k = 0; k <= 4; ++k) CHECK((g[k][1].position + f[k][1].position).isApprox(2 * peds[1].position));
  CHECK(predict_pedestrians(peds, 0, 0.5).size() == 1);
}

TEST_CASE("working zone filter") {
  std::mt19937_64 rng(6);
  const auto pts = random_points(rng, 60, 20.0);
  const auto peds = as_peds(pts);
  const Vec2 robot(10, 10);
  const auto kept = update_working_zone(peds, robot, 6.0);
  std::vector<int> ids, ref;
  for (const auto& p : kept) ids.push_back(p.id);
  for (const auto& p : peds)
    if ((p.position - robot).norm() <= 6.0) ref.push_back(p.id);
  CHECK(ids == ref);
  CHECK(update_working_zone(peds, robot, 100.0).size() == peds.size());
  const std::vector<Pedestrian> edge = {{0, {8.01, 0}, {0, 0}, 0.0}};
  CHECK(update_working_zone(edge, {0, 0}, 8.0).empty());
}

TEST_CASE("crowd cost: trivial cases and direct summation") {
  const std::vector<Control> us(4, Control{1.0, 0.1});
  const TrajectoryCandidate c = make_candidate({0, 0, 0}, us, 0.5);
  const CrowdModelParams params{1.5, 1.2, 8.0};
  CHECK(cnc_cost(c, predict_pedestrians({}, 4, 0.5), params) == 0.0);
  const std::vector<Pedestrian> far = {{0, {60, 60}, {0, 0}, 0.0}};
  CHECK(cnc_cost(c, predict_pedestrians(far, 4, 0.5), CrowdModelParams{1.5, 1.2, 200.0}) < 1e-6);
  CHECK_THROWS_AS(cnc_cost(c, predict_pedestrians(far, 2, 0.5), params), std::invalid_argument);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Pedestrian> peds;
    std::vector<Vec2> p0, vel;
    for (int i = 0; i < 12; ++i) {
      p0.emplace_back(6 * u(rng) + 2, 6 * u(rng));
      vel.emplace_back(u(rng), u(rng));
      peds.push_back({i, p0.back(), vel.back(), 0.0});
    }
    std::vector<Control> cu;
    for (int k = 0; k < 8; ++k) cu.push_back({0.5 + 0.5 * std::abs(u(rng)), u(rng)});
    const TrajectoryCandidate cand = make_candidate({u(rng), u(rng), u(rng)}, cu, 0.5);
    double ref = 0.0;
    for (int k = 1; k <= 8; ++k) {
      std::vector<Vec2> in_zone;
      for (int i = 0; i < 12; ++i) {
        const Vec2 p = p0[i] + k * 0.5 * vel[i];
        if ((p - cand.root.position()).norm() <= 5.0) in_zone.push_back(p);
      }
      ref += testing::direct_density(in_zone, cand.steps[k - 1].state.position(), 1.5, 1.2);
    }
    const double got = cnc_cost(cand, predict_pedestrians(peds, 8, 0.5), CrowdModelParams{1.5, 1.2, 5.0});
    CHECK(std::abs(got - ref) < 1e-12);
  }
}

TEST_CASE("crowd cost falls off moving away from a single crowd") {
  const std::vector<Pedestrian> peds = {{0, {0, 0}, {0, 0}, 0.0}, {1, {1, 0}, {0, 0}, 0.0}};
  const auto maps = build_hccdm_sequence(predict_pedestrians(peds, 2, 0.5), {0, 0}, {1.5, 1.2, 100.0});
  const Vec2 mu(0.5, 0.0), dir = Vec2(0.6, 0.8);
  double prev = std::numeric_limits<double>::infinity();
  for (double t = 0.0; t < 10.0; t += 0.25) {
    // Two steps, both shifted by t along the same ray away from the component.
    TrajectoryCandidate c{{0, 0, 0}, {}};
    c.steps.push_back({{mu.x() + t * dir.x(), mu.y() + t * dir.y(), 0}, {}, 0.5});
    c.steps.push_back({{mu.x() + (t + 0.5) * dir.x(), mu.y() + (t + 0.5) * dir.y(), 0}, {}, 1.0});
    const double h = cnc_cost(c, maps);
    CHECK(h <= prev);
    prev = h;
  }
}
