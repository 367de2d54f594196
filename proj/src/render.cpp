#include "curio/render.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "curio/crowd.hpp"

namespace curio {

namespace {

class Canvas {
 public:
  Canvas(const GridMap& grid, double ppm) : grid_(grid), ppm_(ppm) {}

  double x(double wx) const { return (wx - grid_.origin().x()) * ppm_; }
  double y(double wy) const { return (grid_.extent_y() - (wy - grid_.origin().y())) * ppm_; }
  double len(double m) const { return m * ppm_; }
  double width() const { return grid_.extent_x() * ppm_; }
  double height() const { return grid_.extent_y() * ppm_; }

 private:
  const GridMap& grid_;
  double ppm_;
};

bool inside(const GridMap& g, const Vec2& p) {
  const Vec2 rel = p - g.origin();
  return rel.x() >= 0.0 && rel.y() >= 0.0 && rel.x() <= g.extent_x() && rel.y() <= g.extent_y();
}

void check_consistent(const EpisodeTrace& trace, const Scenario& s) {
  auto fail = [](const std::string& what) { throw RenderError("trace does not match the scenario: " + what); };
  if (!trace.ticks.empty() && !inside(s.grid, trace.start_true_state.position())) fail("start outside the grid");
  for (const auto& t : trace.ticks) {
    if (!inside(s.grid, t.true_state.position())) fail("tick " + std::to_string(t.tick) + " lies outside the grid");
    if (t.pedestrians.size() != s.pedestrians.size()) fail("pedestrian count differs at tick " + std::to_string(t.tick));
  }
}

void occupancy_layer(std::ostream& os, const GridMap& g, const Canvas& c) {
  os << "<g id=\"occupancy\" fill=\"#444\">\n";
  const double r = g.resolution();
  for (int iy = 0; iy < g.height(); ++iy) {
    // One rectangle per horizontal run of occupied cells.
    int ix = 0;
    while (ix < g.width()) {
      if (!g.occupied(ix, iy)) {
        ++ix;
        continue;
      }
      const int start = ix;
      while (ix < g.width() && g.occupied(ix, iy)) ++ix;
      const Vec2 lo = g.cell_min_corner(start, iy);
      os << "<rect x=\"" << c.x(lo.x()) << "\" y=\"" << c.y(lo.y() + r) << "\" width=\"" << c.len((ix - start) * r)
         << "\" height=\"" << c.len(r) << "\"/>\n";
    }
  }
  os << "</g>\n";
}

void heatmap_layer(std::ostream& os, const EpisodeTrace& trace, const Scenario& s, const Canvas& c,
                   const RenderOptions& opt) {
  os << "<g id=\"hccdm\">\n";
  if (!trace.ticks.empty() && !trace.ticks.back().pedestrians.empty()) {
    const TickRecord& last = trace.ticks.back();
    std::vector<Pedestrian> peds;
    for (std::size_t i = 0; i < last.pedestrians.size(); ++i) {
      peds.push_back({s.pedestrians[i].id, last.pedestrians[i], Vec2::Zero(), last.time});
    }
    const auto zone = update_working_zone(peds, last.true_state.position(), s.params.working_zone_radius);
    const auto clusters = cluster_pedestrians(zone, s.params.social_distance);
    const Hccdm map = build_hccdm(clusters, s.params.personal_distance);

    const GridMap& g = s.grid;
    const double cell = std::max(g.extent_x(), g.extent_y()) / std::max(1, opt.heatmap_cells);
    const int nx = static_cast<int>(std::ceil(g.extent_x() / cell));
    const int ny = static_cast<int>(std::ceil(g.extent_y() / cell));
    std::vector<double> values(static_cast<std::size_t>(nx * ny));
    double peak = 0.0;
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const Vec2 q = g.origin() + Vec2((i + 0.5) * cell, (j + 0.5) * cell);
        const double v = map.density(q);
        values[static_cast<std::size_t>(j * nx + i)] = v;
        peak = std::max(peak, v);
      }
    }
    if (peak > 0.0) {
      for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
          const double a = values[static_cast<std::size_t>(j * nx + i)] / peak;
          if (a < 0.02) continue;
          const double wx = g.origin().x() + i * cell, wy = g.origin().y() + (j + 1) * cell;
          os << "<rect x=\"" << c.x(wx) << "\" y=\"" << c.y(wy) << "\" width=\"" << c.len(cell) << "\" height=\""
             << c.len(cell) << "\" fill=\"#d7301f\" fill-opacity=\"" << 0.6 * a << "\"/>\n";
        }
      }
    }
  }
  os << "</g>\n";
}

void ellipse_layer(std::ostream& os, const EpisodeTrace& trace, const Canvas& c, int max_ellipses) {
  os << "<g id=\"covariance\" fill=\"none\" stroke=\"#3182bd\" stroke-width=\"1\">\n";
  const std::size_t n = trace.ticks.size();
  if (n > 0 && max_ellipses > 0) {
    const std::size_t stride = std::max<std::size_t>(1, (n + static_cast<std::size_t>(max_ellipses) - 1) /
                                                            static_cast<std::size_t>(max_ellipses));
    for (std::size_t i = 0; i < n; i += stride) {
      const TickRecord& t = trace.ticks[i];
      const Mat2 P = t.covariance.topLeftCorner<2, 2>();
      Eigen::SelfAdjointEigenSolver<Mat2> es(P);
      const Vec2 ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
      const Vec2 major = es.eigenvectors().col(1);
      // SVG rotation is clockwise because y points down.
      const double angle = -std::atan2(major.y(), major.x()) * 180.0 / kPi;
      const double cx = c.x(t.belief_mean.x), cy = c.y(t.belief_mean.y);
      os << "<ellipse cx=\"" << cx << "\" cy=\"" << cy << "\" rx=\"" << c.len(ev(1)) << "\" ry=\"" << c.len(ev(0))
         << "\" transform=\"rotate(" << angle << ' ' << cx << ' ' << cy << ")\"/>\n";
    }
  }
  os << "</g>\n";
}

}  // namespace

std::string render_svg(const EpisodeTrace& trace, const Scenario& s, const RenderOptions& opt) {
  check_consistent(trace, s);
  const Canvas c(s.grid, opt.pixels_per_meter);
  std::ostringstream os;
  os << std::setprecision(6);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << c.width() << "\" height=\"" << c.height()
     << "\" viewBox=\"0 0 " << c.width() << ' ' << c.height() << "\">\n";
  os << "<rect id=\"background\" x=\"0\" y=\"0\" width=\"" << c.width() << "\" height=\"" << c.height()
     << "\" fill=\"#ffffff\"/>\n";
  occupancy_layer(os, s.grid, c);
  heatmap_layer(os, trace, s, c, opt);

  os << "<g id=\"landmarks\" fill=\"#31a354\">\n";
  for (const auto& lm : s.landmarks) {
    os << "<circle cx=\"" << c.x(lm.position.x()) << "\" cy=\"" << c.y(lm.position.y()) << "\" r=\"" << c.len(0.15)
       << "\"/>\n";
  }
  os << "</g>\n";

  os << "<g id=\"pedestrians\">\n";
  for (const auto& p : s.pedestrians) {
    os << "<circle class=\"ped-start\" cx=\"" << c.x(p.start.x()) << "\" cy=\"" << c.y(p.start.y()) << "\" r=\""
       << c.len(s.params.pedestrian_radius) << "\" fill=\"none\" stroke=\"#756bb1\"/>\n";
  }
  if (!trace.ticks.empty()) {
    for (const auto& p : trace.ticks.back().pedestrians) {
      os << "<circle class=\"ped-end\" cx=\"" << c.x(p.x()) << "\" cy=\"" << c.y(p.y()) << "\" r=\""
         << c.len(s.params.pedestrian_radius) << "\" fill=\"#756bb1\"/>\n";
    }
  }
  os << "</g>\n";

  os << "<g id=\"endpoints\">\n";
  os << "<circle cx=\"" << c.x(s.robot_start.x) << "\" cy=\"" << c.y(s.robot_start.y) << "\" r=\""
     << c.len(s.params.robot_radius) << "\" fill=\"#fd8d3c\"/>\n";
  os << "<circle cx=\"" << c.x(s.goal.x()) << "\" cy=\"" << c.y(s.goal.y()) << "\" r=\""
     << c.len(s.params.goal_tolerance) << "\" fill=\"none\" stroke=\"#e6550d\" stroke-width=\"2\"/>\n";
  os << "</g>\n";

  ellipse_layer(os, trace, c, opt.max_ellipses);

  if (!trace.ticks.empty()) {
    os << "<polyline id=\"trajectory\" fill=\"none\" stroke=\"#000\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < trace.ticks.size(); ++i) {
      if (i > 0) os << ' ';
      os << c.x(trace.ticks[i].true_state.x) << ',' << c.y(trace.ticks[i].true_state.y);
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace curio
