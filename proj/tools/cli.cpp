#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "curio/render.hpp"
#include "curio/scenario_io.hpp"
#include "curio/trace_io.hpp"

namespace curio::cli {

namespace fs = std::filesystem;

std::string mode_name(PlannerMode mode) {
  switch (mode) {
    case PlannerMode::kFull: return "full";
    case PlannerMode::kCpcOnly: return "cpc-only";
    case PlannerMode::kCncOnly: return "cnc-only";
    case PlannerMode::kDistanceOnly: return "distance-only";
  }
  return "full";
}

std::optional<PlannerMode> parse_mode(const std::string& name) {
  for (PlannerMode m : kAllModes) {
    if (mode_name(m) == name) return m;
  }
  return std::nullopt;
}

Params apply_mode(Params p, PlannerMode mode) {
  switch (mode) {
    case PlannerMode::kFull: break;
    case PlannerMode::kCpcOnly: p.w2 = 0.0; break;
    case PlannerMode::kCncOnly: p.cpc_enabled = false; break;
    case PlannerMode::kDistanceOnly:
      p.w1 = 0.0;
      p.w2 = 0.0;
      break;
  }
  return p;
}

namespace {

std::uint64_t parse_seed(const std::string& s) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw std::invalid_argument("bad seed '" + s + "'");
  }
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw std::invalid_argument("seed out of range '" + s + "'");
  }
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }), item.end());
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(parse_seed(item));
      continue;
    }
    const std::uint64_t lo = parse_seed(item.substr(0, dots));
    const std::uint64_t hi = parse_seed(item.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("empty seed range '" + item + "'");
    if (hi - lo >= 100000) throw std::invalid_argument("seed range too large '" + item + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw std::invalid_argument("no seeds given");
  return seeds;
}

int thread_limit() {
  if (const char* env = std::getenv("CURIO_NAV_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string run_stem(PlannerMode mode, std::uint64_t seed) { return mode_name(mode) + "_seed" + std::to_string(seed); }

RunOutput execute_run(const Scenario& scenario, const RunConfig& config, int threads) {
  fs::create_directories(config.out_dir);
  Scenario s = scenario;
  s.params = apply_mode(s.params, config.mode);

  const std::size_t n = config.seeds.size();
  RunOutput out;
  out.metrics.resize(n);
  std::vector<std::vector<fs::path>> files(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const std::uint64_t seed = config.seeds[i];
        const EpisodeResult r = run_episode(s, seed);
        const fs::path stem = config.out_dir / run_stem(config.mode, seed);
        const fs::path metrics = fs::path(stem.string() + ".metrics.json");
        const fs::path trace = fs::path(stem.string() + ".trace.jsonl");
        write_metrics_file(metrics, r.metrics);
        write_trace_file(trace, r.trace);
        files[i] = {metrics, trace};
        if (config.render) {
          const fs::path svg = fs::path(stem.string() + ".svg");
          std::ofstream os(svg);
          if (!os) throw std::runtime_error("cannot write " + svg.string());
          os << render_svg(r.trace, s);
          files[i].push_back(svg);
        }
        out.metrics[i] = r.metrics;
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const int pool = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(n, 1)));
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::thread> ts;
    for (int t = 0; t < pool; ++t) ts.emplace_back(worker);
    for (auto& t : ts) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  for (auto& f : files) out.files.insert(out.files.end(), f.begin(), f.end());
  return out;
}

std::vector<MetricSummary> summarize(std::span<const MetricsReport> runs) {
  using Getter = double (*)(const MetricsReport&);
  static const std::pair<const char*, Getter> columns[] = {
      {"RMSE", [](const MetricsReport& m) { return m.rmse; }},
      {"TCM", [](const MetricsReport& m) { return m.tcm; }},
      {"NM", [](const MetricsReport& m) { return static_cast<double>(m.nm); }},
      {"TD", [](const MetricsReport& m) { return m.td; }},
      {"MD", [](const MetricsReport& m) { return m.md; }},
      {"NT", [](const MetricsReport& m) { return static_cast<double>(m.nt); }},
      {"Vel", [](const MetricsReport& m) { return m.vel; }},
      {"Length", [](const MetricsReport& m) { return m.length; }},
      {"Time", [](const MetricsReport& m) { return m.time; }},
      {"Goal", [](const MetricsReport& m) { return m.reached_goal ? 1.0 : 0.0; }},
  };
  std::vector<MetricSummary> rows;
  const double n = static_cast<double>(runs.size());
  for (const auto& [name, get] : columns) {
    MetricSummary row{name, 0.0, 0.0};
    if (!runs.empty()) {
      for (const auto& r : runs) row.mean += get(r);
      row.mean /= n;
      if (runs.size() > 1) {
        double ss = 0.0;
        for (const auto& r : runs) ss += (get(r) - row.mean) * (get(r) - row.mean);
        row.stddev = std::sqrt(ss / (n - 1.0));
      }
    }
    rows.push_back(row);
  }
  return rows;
}

std::string format_table(const std::vector<std::pair<std::string, std::vector<MetricSummary>>>& rows) {
  std::ostringstream out;
  if (rows.empty()) return {};
  out << std::left << std::setw(16) << "mode";
  for (const auto& r : rows.front().second) out << std::setw(22) << r.name;
  out << '\n';
  for (const auto& [label, summary] : rows) {
    out << std::setw(16) << label;
    for (const auto& r : summary) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(4) << r.mean << " +- " << r.stddev;
      out << std::setw(22) << cell.str();
    }
    out << '\n';
  }
  return out.str();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Uncertainty- and crowd-aware navigation simulator"};
  app.require_subcommand(1);

  std::string scenario_path, seeds_text, mode_text = "full", out_dir, trace_path, svg_path;
  bool render = false;

  auto* run = app.add_subcommand("run", "Run episodes for one planner mode");
  run->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--seed", seeds_text, "Seed or seed list (e.g. 3 or 0,1,2 or 0..9)")->required();
  run->add_option("--mode", mode_text, "full | cpc-only | cnc-only | distance-only");
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--render", render, "Also write an SVG per run");

  auto* ablate = app.add_subcommand("ablate", "Run all four planner modes over the same seeds");
  ablate->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  ablate->add_option("--seeds", seeds_text, "Seed list (e.g. 0..9)")->required();
  ablate->add_option("--out", out_dir, "Output directory")->required();

  auto* draw = app.add_subcommand("render", "Render a trace to SVG");
  draw->add_option("--trace", trace_path, "Trace JSONL file")->required();
  draw->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  draw->add_option("--out", svg_path, "Output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    const Scenario scenario = load_scenario_file(scenario_path);

    if (draw->parsed()) {
      const EpisodeTrace trace = read_trace_file(trace_path);
      const std::string svg = render_svg(trace, scenario);
      std::ofstream os(svg_path);
      if (!os) throw std::runtime_error("cannot write " + svg_path);
      os << svg;
      return 0;
    }

    const auto seeds = parse_seed_list(seeds_text);
    std::vector<std::pair<std::string, std::vector<MetricSummary>>> table;
    if (run->parsed()) {
      const auto mode = parse_mode(mode_text);
      if (!mode) throw std::invalid_argument("unknown mode '" + mode_text + "'");
      const RunOutput r = execute_run(scenario, {scenario_path, seeds, *mode, out_dir, render}, thread_limit());
      table.emplace_back(mode_name(*mode), summarize(r.metrics));
    } else {
      for (PlannerMode m : kAllModes) {
        const RunOutput r = execute_run(scenario, {scenario_path, seeds, m, out_dir, false}, thread_limit());
        table.emplace_back(mode_name(m), summarize(r.metrics));
      }
    }
    out << "runs per mode: " << seeds.size() << '\n';
    out << format_table(table);
    return 0;
  } catch (const ScenarioError& e) {
    err << "scenario error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace curio::cli
