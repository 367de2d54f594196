#include <doctest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <sstream>

#include "curio/render.hpp"
#include "curio/scenario_io.hpp"
#include "curio/trace_io.hpp"

using namespace curio;
namespace pt = boost::property_tree;

namespace {

const char* kRoom = R"({"grid": {"resolution": 0.5, "rows": [
    "....................", "........##..........", "........##..........", "....................",
    "....................", "....................", "....................", "...................."]},
  "landmarks": [[1.0, 3.5], [5.0, 0.5], [9.0, 3.5]],
  "pedestrians": [{"id": 0, "start": [7.0, 1.0], "speed": 0.5, "waypoints": [[2.0, 1.0], [7.0, 1.0]]}],
  "robot_start": [1.0, 2.0, 0.0], "goal": [9.0, 2.0], "params": {"tick_limit": 30}})";

pt::ptree parse_svg(const std::string& svg) {
  std::istringstream is(svg);
  pt::ptree tree;
  pt::read_xml(is, tree);
  return tree;
}

const pt::ptree* find_id(const pt::ptree& node, const std::string& id) {
  for (const auto& [name, child] : node) {
    if (name == "<xmlattr>") continue;
    if (child.get<std::string>("<xmlattr>.id", "") == id) return &child;
    if (const auto* hit = find_id(child, id)) return hit;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("trace survives a JSONL round trip") {
  const Scenario s = load_scenario(kRoom);
  const EpisodeResult r = run_episode(s, 4);
  REQUIRE(!r.trace.ticks.empty());
  std::stringstream ss;
  write_trace_jsonl(ss, r.trace);
  const std::string text = ss.str();
  CHECK(text.rfind("{", 0) == 0);
  CHECK(text.find("\"record\":\"start\"") < text.find("\"record\":\"tick\""));
  std::istringstream in(text);
  const EpisodeTrace back = read_trace_jsonl(in);
  CHECK(back == r.trace);
  std::stringstream again;
  write_trace_jsonl(again, back);
  CHECK(again.str() == text);
}

TEST_CASE("infinite pedestrian distance is written as null") {
  EpisodeTrace t;
  t.ticks.push_back({});
  t.ticks[0].tick = 1;
  t.ticks[0].time = 0.5;
  const auto j = tick_to_json(t.ticks[0]);
  CHECK(j.at("min_ped_distance").is_null());
  CHECK(tick_from_json(j) == t.ticks[0]);
}

TEST_CASE("malformed traces are rejected") {
  std::istringstream empty("");
  CHECK_THROWS_AS(read_trace_jsonl(empty), TraceFormatError);
  std::istringstream junk("{\"record\": \"start\"\n");
  CHECK_THROWS_AS(read_trace_jsonl(junk), TraceFormatError);
  std::istringstream kind("{\"record\": \"middle\"}\n");
  CHECK_THROWS_AS(read_trace_jsonl(kind), TraceFormatError);
}

TEST_CASE("metrics JSON round trip") {
  MetricsReport m;
  m.rmse = 0.123456789012345;
  m.tcm = 0.25;
  m.nm = 2;
  m.td = 0.1;
  m.md = 1.7;
  m.nt = 3;
  m.vel = 0.8;
  m.length = 12.0;
  m.time = 15.0;
  m.reached_goal = true;
  m.ticks = 30;
  m.seed = 9;
  CHECK(metrics_from_json(metrics_to_json(m)) == m);
  CHECK(metrics_from_json(nlohmann::json::parse(metrics_to_json(m).dump())) == m);
  CHECK_THROWS_AS(metrics_from_json(nlohmann::json::object()), TraceFormatError);
}

TEST_CASE("SVG is well-formed with one trajectory vertex per tick") {
  const Scenario s = load_scenario(kRoom);
  const EpisodeResult r = run_episode(s, 2);
  const std::string svg = render_svg(r.trace, s);
  CHECK(svg.rfind("<?xml", 0) == 0);
  const pt::ptree doc = parse_svg(svg);
  CHECK(doc.count("svg") == 1);
  for (const char* layer : {"background", "occupancy", "hccdm", "landmarks", "pedestrians", "covariance"}) {
    CHECK_MESSAGE(find_id(doc, layer) != nullptr, layer);
  }
  const pt::ptree* poly = find_id(doc, "trajectory");
  REQUIRE(poly);
  std::istringstream pts(poly->get<std::string>("<xmlattr>.points"));
  std::size_t vertices = 0;
  for (std::string p; pts >> p;) ++vertices;
  CHECK(vertices == r.trace.ticks.size());
  const pt::ptree* lms = find_id(doc, "landmarks");
  CHECK(lms->count("circle") == s.landmarks.size());
}

TEST_CASE("empty trace renders map layers only") {
  const Scenario s = load_scenario(kRoom);
  const std::string svg = render_svg(EpisodeTrace{}, s);
  const pt::ptree doc = parse_svg(svg);
  CHECK(find_id(doc, "occupancy") != nullptr);
  CHECK(find_id(doc, "trajectory") == nullptr);
  CHECK(find_id(doc, "covariance")->count("ellipse") == 0);
}

TEST_CASE("traces that do not fit the scenario") {
  const Scenario s = load_scenario(kRoom);
  EpisodeTrace t = run_episode(s, 1).trace;
  REQUIRE(!t.ticks.empty());
  EpisodeTrace off = t;
  off.ticks.back().true_state.x = 50.0;
  CHECK_THROWS_AS(render_svg(off, s), RenderError);
  EpisodeTrace crowd = t;
  crowd.ticks.front().pedestrians.push_back({1, 1});
  CHECK_THROWS_AS(render_svg(crowd, s), RenderError);
}
