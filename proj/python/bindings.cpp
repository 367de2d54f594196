#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "curio/crowd.hpp"
#include "curio/dynamics.hpp"
#include "curio/render.hpp"
#include "curio/scenario_io.hpp"
#include "curio/simkit.hpp"
#include "curio/trace_io.hpp"

namespace py = pybind11;
using namespace curio;

namespace {

using Pose = std::tuple<double, double, double>;
using Point = std::pair<double, double>;

Pose to_tuple(const RobotState& s) { return {s.x, s.y, s.theta}; }

py::dict metrics_dict(const MetricsReport& m) {
  py::dict d;
  d["RMSE"] = m.rmse;
  d["TCM"] = m.tcm;
  d["NM"] = m.nm;
  d["TD"] = m.td;
  d["MD"] = m.md;
  d["NT"] = m.nt;
  d["Vel"] = m.vel;
  d["Length"] = m.length;
  d["Time"] = m.time;
  d["reached_goal"] = m.reached_goal;
  d["collided"] = m.collided;
  d["ticks"] = m.ticks;
  d["seed"] = m.seed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Navigation simulator core";

  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);

  py::class_<Scenario>(m, "Scenario")
      .def_property_readonly("pedestrian_count", [](const Scenario& s) { return s.pedestrians.size(); })
      .def_property_readonly("landmark_count", [](const Scenario& s) { return s.landmarks.size(); })
      .def_property_readonly("grid_shape", [](const Scenario& s) { return std::pair{s.grid.width(), s.grid.height()}; })
      .def_property_readonly("robot_start", [](const Scenario& s) { return to_tuple(s.robot_start); })
      .def_property_readonly("goal", [](const Scenario& s) { return Point{s.goal.x(), s.goal.y()}; })
      .def("to_json", &serialize_scenario);

  m.def("load_scenario", [](const std::string& text) { return load_scenario(text); }, py::arg("text"));
  m.def("load_scenario_file", &load_scenario_file, py::arg("path"));

  py::class_<EpisodeResult>(m, "EpisodeResult")
      .def_property_readonly("metrics", [](const EpisodeResult& r) { return metrics_dict(r.metrics); })
      .def_property_readonly("tick_count", [](const EpisodeResult& r) { return r.trace.ticks.size(); })
      .def_property_readonly("cycle_seconds", [](const EpisodeResult& r) { return r.cycle_seconds; })
      .def_property_readonly("true_path",
                             [](const EpisodeResult& r) {
                               std::vector<Pose> out;
                               for (const auto& t : r.trace.ticks) out.push_back(to_tuple(t.true_state));
                               return out;
                             })
      .def("trace_jsonl",
           [](const EpisodeResult& r) {
             std::ostringstream os;
             write_trace_jsonl(os, r.trace);
             return os.str();
           })
      .def("render_svg", [](const EpisodeResult& r, const Scenario& s) { return render_svg(r.trace, s); });

  m.def("run_episode", &run_episode, py::arg("scenario"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());

  m.def(
      "step",
      [](const Pose& s, std::pair<double, double> u, double dt) {
        return to_tuple(step({std::get<0>(s), std::get<1>(s), std::get<2>(s)}, {u.first, u.second}, dt));
      },
      py::arg("state"), py::arg("control"), py::arg("dt"), "Noise-free unicycle step.");

  m.def(
      "enclosing_circle",
      [](const std::vector<Point>& pts) {
        std::vector<Vec2> v;
        for (const auto& [x, y] : pts) v.emplace_back(x, y);
        const Circle c = enclosing_circle(v);
        return std::tuple{c.center.x(), c.center.y(), c.radius};
      },
      py::arg("points"));

  m.def(
      "cluster_pedestrians",
      [](const std::vector<Point>& pts, double social_distance) {
        std::vector<Pedestrian> peds;
        for (std::size_t i = 0; i < pts.size(); ++i) {
          peds.push_back({static_cast<int>(i), Vec2(pts[i].first, pts[i].second), Vec2::Zero(), 0.0});
        }
        std::vector<std::vector<int>> out;
        for (const auto& c : cluster_pedestrians(peds, social_distance)) out.push_back(c.member_ids);
        return out;
      },
      py::arg("points"), py::arg("social_distance"), "Pedestrian indices grouped into crowds.");

  m.def(
      "gaussian_pdf",
      [](Point q, Point mean, double sigma) {
        return gaussian_pdf(Vec2(q.first, q.second), Vec2(mean.first, mean.second), sigma);
      },
      py::arg("q"), py::arg("mean"), py::arg("sigma"));
}
