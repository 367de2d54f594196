#pragma once

// Independent reference implementations used as test oracles. None of these call into the code
// under test beyond plain data types.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "curio/crowd.hpp"
#include "curio/world.hpp"

namespace testing {

using curio::Vec2;
using curio::Vec3;

inline curio::GridMap open_grid(int w, int h, double res, const std::vector<std::pair<int, int>>& occupied = {},
                                Vec2 origin = Vec2::Zero()) {
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(w * h), 0);
  for (auto [ix, iy] : occupied) cells[static_cast<std::size_t>(iy * w + ix)] = 1;
  return curio::GridMap(w, h, res, origin, cells);
}

/// Forward Euler on the unicycle with n substeps.
inline Vec3 euler_integrate(Vec3 s, double v, double w, double dt, int n) {
  const double h = dt / n;
  for (int i = 0; i < n; ++i) {
    s.x() += h * v * std::cos(s.z());
    s.y() += h * v * std::sin(s.z());
    s.z() += h * w;
  }
  return s;
}

inline double wrap(double a) {
  while (a > M_PI) a -= 2 * M_PI;
  while (a <= -M_PI) a += 2 * M_PI;
  return a;
}

/// Closed-form arc endpoint written out independently of the library.
inline Vec3 arc_endpoint(const Vec3& s, double v, double w, double dt) {
  if (std::abs(w) < 1e-6) return {s.x() + v * dt * std::cos(s.z()), s.y() + v * dt * std::sin(s.z()), s.z()};
  return {s.x() + v / w * (std::sin(s.z() + w * dt) - std::sin(s.z())),
          s.y() + v / w * (std::cos(s.z()) - std::cos(s.z() + w * dt)), s.z() + w * dt};
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

/// Partition of point indices by pairwise distance <= d, each group sorted, groups sorted.
inline std::vector<std::vector<int>> brute_partition(const std::vector<Vec2>& pts, double d) {
  const int n = static_cast<int>(pts.size());
  UnionFind uf(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((pts[i] - pts[j]).norm() <= d) uf.unite(i, j);
  std::vector<std::vector<int>> groups;
  std::vector<int> slot(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const int r = uf.find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[slot[r]].push_back(i);
  }
  std::sort(groups.begin(), groups.end());
  return groups;
}

struct RefCircle {
  Vec2 c;
  double r;
};

/// Smallest circle among all diametral pair circles and triple circumcircles containing every point.
inline RefCircle brute_mec(const std::vector<Vec2>& p) {
  if (p.size() == 1) return {p[0], 0.0};
  RefCircle best{Vec2::Zero(), std::numeric_limits<double>::infinity()};
  auto consider = [&](const Vec2& c, double r) {
    if (r >= best.r) return;
    for (const auto& q : p)
      if ((q - c).norm() > r + 1e-9) return;
    best = {c, r};
  };
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec2 c = 0.5 * (p[i] + p[j]);
      consider(c, (p[i] - c).norm());
      for (std::size_t k = j + 1; k < n; ++k) {
        const Vec2 a = p[i], b = p[j], e = p[k];
        const double d = 2.0 * (a.x() * (b.y() - e.y()) + b.x() * (e.y() - a.y()) + e.x() * (a.y() - b.y()));
        if (std::abs(d) < 1e-14) continue;
        const double ux = (a.squaredNorm() * (b.y() - e.y()) + b.squaredNorm() * (e.y() - a.y()) +
                           e.squaredNorm() * (a.y() - b.y())) / d;
        const double uy = (a.squaredNorm() * (e.x() - b.x()) + b.squaredNorm() * (a.x() - e.x()) +
                           e.squaredNorm() * (b.x() - a.x())) / d;
        const Vec2 c3(ux, uy);
        consider(c3, std::max({(a - c3).norm(), (b - c3).norm(), (e - c3).norm()}));
      }
    }
  }
  return best;
}

/// Crowd density at q written straight from the mixture definition, using the brute-force
/// partition and circle.
inline double direct_density(const std::vector<Vec2>& peds, const Vec2& q, double d_sd, double d_pd) {
  if (peds.empty()) return 0.0;
  double h = 0.0;
  for (const auto& g : brute_partition(peds, d_sd)) {
    std::vector<Vec2> pts;
    for (int i : g) pts.push_back(peds[i]);
    Vec2 mu = pts[0];
    double sigma = d_pd;
    if (pts.size() > 1) {
      const RefCircle c = brute_mec(pts);
      mu = c.c;
      sigma = c.r + d_pd;
    }
    const double weight = static_cast<double>(pts.size()) / static_cast<double>(peds.size());
    h += weight * std::exp(-(q - mu).squaredNorm() / (2.0 * sigma)) / (2.0 * M_PI * sigma);
  }
  return h;
}

/// Exhaustive closed-disk / cell intersection, with anything past the map border counted as blocked.
inline bool brute_footprint_free(const curio::GridMap& g, const Vec2& c, double r) {
  const Vec2 lo = g.origin(), hi = g.origin() + Vec2(g.extent_x(), g.extent_y());
  if (c.x() - r < lo.x() || c.y() - r < lo.y() || c.x() + r > hi.x() || c.y() + r > hi.y()) return false;
  for (int iy = 0; iy < g.height(); ++iy) {
    for (int ix = 0; ix < g.width(); ++ix) {
      if (!g.occupied(ix, iy)) continue;
      const double x0 = lo.x() + ix * g.resolution(), y0 = lo.y() + iy * g.resolution();
      const double nx = std::clamp(c.x(), x0, x0 + g.resolution());
      const double ny = std::clamp(c.y(), y0, y0 + g.resolution());
      if (std::hypot(nx - c.x(), ny - c.y()) <= r) return false;
    }
  }
  return true;
}

/// Dense sampling along the open segment; samples inside the target's own cell are ignored.
inline bool dense_ray_clear(const curio::GridMap& g, const Vec2& a, const Vec2& b, int samples = 1000) {
  const auto target = g.cell_of(b);
  for (int i = 0; i <= samples; ++i) {
    const Vec2 p = a + (b - a) * (static_cast<double>(i) / samples);
    const auto cell = g.cell_of(p);
    if (!cell) return false;
    if (target && *cell == *target) continue;
    if (g.occupied(cell->ix, cell->iy)) return false;
  }
  return true;
}

inline double frobenius_rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref) {
  return (a - ref).norm() / ref.norm();
}

}  // namespace testing
