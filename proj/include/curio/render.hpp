#pragma once

#include <stdexcept>
#include <string>

#include "curio/simkit.hpp"
#include "curio/world.hpp"

namespace curio {

class RenderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RenderOptions {
  double pixels_per_meter = 20.0;
  int max_ellipses = 40;
  int heatmap_cells = 80;  // along the longer map side
};

/// SVG document: occupancy, final-tick crowd density heatmap, landmarks, pedestrian start and end
/// markers, the true trajectory (one vertex per tick) and subsampled 1-sigma position ellipses.
/// Throws RenderError when the trace leaves the grid or its pedestrian count differs from the
/// scenario.
std::string render_svg(const EpisodeTrace& trace, const Scenario& scenario, const RenderOptions& options = {});

}  // namespace curio
