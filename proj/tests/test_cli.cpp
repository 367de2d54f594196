#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "curio/scenario_io.hpp"
#include "curio/trace_io.hpp"

using namespace curio;
using namespace curio::cli;
namespace fs = std::filesystem;

namespace {

const char* kLit = R"({"grid": {"resolution": 0.5, "rows": [
    "....................", "....................", "....................", "....................",
    "....................", "....................", "....................", "...................."]},
  "landmarks": [[1.0, 3.5], [3.0, 0.5], [5.0, 3.5], [7.0, 0.5], [9.0, 3.5], [5.0, 0.5]],
  "robot_start": [1.0, 2.0, 0.0], "goal": [9.0, 2.0], "params": {"tick_limit": 40, "tree_budget": 300}})";

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("curio_cli_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

fs::path write_scenario(const fs::path& dir, const char* text) {
  const fs::path p = dir / "scenario.json";
  std::ofstream(p) << text;
  return p;
}

int invoke(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "curio_nav");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

}  // namespace

TEST_CASE("seed lists") {
  CHECK(parse_seed_list("7") == std::vector<std::uint64_t>{7});
  CHECK(parse_seed_list("1,2,5") == std::vector<std::uint64_t>{1, 2, 5});
  CHECK(parse_seed_list("0..3,8") == std::vector<std::uint64_t>{0, 1, 2, 3, 8});
  CHECK_THROWS_AS(parse_seed_list(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_seed_list("3..1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_seed_list("a"), std::invalid_argument);
}

TEST_CASE("modes") {
  for (PlannerMode m : kAllModes) CHECK(parse_mode(mode_name(m)) == m);
  CHECK_FALSE(parse_mode("bogus").has_value());
  const Params p;
  CHECK(apply_mode(p, PlannerMode::kFull) == p);
  CHECK(apply_mode(p, PlannerMode::kCpcOnly).w2 == 0.0);
  CHECK_FALSE(apply_mode(p, PlannerMode::kCncOnly).cpc_enabled);
  const Params d = apply_mode(p, PlannerMode::kDistanceOnly);
  CHECK(d.w1 == 0.0);
  CHECK(d.w2 == 0.0);
}

TEST_CASE("run writes files per seed and the summary matches the metrics files") {
  TempDir tmp;
  const fs::path scen = write_scenario(tmp.path, kLit);
  const fs::path out = tmp.path / "out";
  std::string text;
  REQUIRE(invoke({"run", "--scenario", scen.string(), "--seed", "0..9", "--out", out.string()}, &text) == 0);
  std::vector<MetricsReport> runs;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::string stem = run_stem(PlannerMode::kFull, seed);
    CHECK(fs::exists(out / (stem + ".trace.jsonl")));
    CHECK_FALSE(fs::exists(out / (stem + ".svg")));
    runs.push_back(read_metrics_file(out / (stem + ".metrics.json")));
    CHECK(runs.back().seed == seed);
  }
  CHECK(std::distance(fs::directory_iterator(out), fs::directory_iterator{}) == 20);
  const std::string table = format_table({{"full", summarize(runs)}});
  CHECK(text == "runs per mode: 10\n" + table);

  const auto rows = summarize(runs);
  double mean = 0.0;
  for (const auto& r : runs) mean += r.rmse;
  CHECK(rows[0].name == "RMSE");
  CHECK(rows[0].mean == doctest::Approx(mean / 10));
}

TEST_CASE("render flag adds an SVG and the render command reproduces it") {
  TempDir tmp;
  const fs::path scen = write_scenario(tmp.path, kLit);
  REQUIRE(invoke({"run", "--scenario", scen.string(), "--seed", "3", "--out", tmp.path.string(), "--render"}) == 0);
  const fs::path svg = tmp.path / (run_stem(PlannerMode::kFull, 3) + ".svg");
  REQUIRE(fs::exists(svg));
  const fs::path again = tmp.path / "again.svg";
  REQUIRE(invoke({"render", "--trace", (tmp.path / (run_stem(PlannerMode::kFull, 3) + ".trace.jsonl")).string(),
                  "--scenario", scen.string(), "--out", again.string()}) == 0);
  std::ifstream a(svg), b(again);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
}

TEST_CASE("bad input exits nonzero") {
  TempDir tmp;
  std::string err;
  CHECK(invoke({"run", "--scenario", (tmp.path / "missing.json").string(), "--seed", "0", "--out", tmp.path.string()},
               nullptr, &err) != 0);
  CHECK_FALSE(err.empty());
  const fs::path scen = write_scenario(tmp.path, kLit);
  CHECK(invoke({"run", "--scenario", scen.string(), "--seed", "x", "--out", tmp.path.string()}) != 0);
  CHECK(invoke({"run", "--scenario", scen.string(), "--seed", "0", "--mode", "fast", "--out", tmp.path.string()}) != 0);
  CHECK(invoke({}) != 0);
}

TEST_CASE("cnc-only never switches the uncertainty term on") {
  const Scenario s = load_scenario_file(CURIO_SCENARIO_DIR "/two_corridor.json");
  TempDir tmp;
  const RunOutput r = execute_run(s, {"", {0, 1}, PlannerMode::kCncOnly, tmp.path, false}, 2);
  CHECK(r.files.size() == 4);
  for (std::uint64_t seed : {0, 1}) {
    const EpisodeTrace t = read_trace_file(tmp.path / (run_stem(PlannerMode::kCncOnly, seed) + ".trace.jsonl"));
    for (const auto& tick : t.ticks) {
      CHECK_FALSE(tick.cpc_active);
      CHECK(tick.cost.zeta == 0.0);
    }
  }
}

TEST_CASE("distance-only equals full on a well-lit map without pedestrians") {
  const Scenario s = load_scenario(kLit);
  TempDir tmp;
  const RunOutput full = execute_run(s, {"", {0, 1, 2}, PlannerMode::kFull, tmp.path, false}, 3);
  const RunOutput dist = execute_run(s, {"", {0, 1, 2}, PlannerMode::kDistanceOnly, tmp.path, false}, 3);
  for (std::uint64_t seed : {0, 1, 2}) {
    const auto a = read_trace_file(tmp.path / (run_stem(PlannerMode::kFull, seed) + ".trace.jsonl"));
    const auto b = read_trace_file(tmp.path / (run_stem(PlannerMode::kDistanceOnly, seed) + ".trace.jsonl"));
    CHECK(a == b);
    for (const auto& t : a.ticks) CHECK_FALSE(t.cpc_active);
  }
  CHECK(full.metrics == dist.metrics);
}
