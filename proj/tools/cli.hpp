#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "curio/simkit.hpp"
#include "curio/world.hpp"

namespace curio::cli {

enum class PlannerMode { kFull, kCpcOnly, kCncOnly, kDistanceOnly };

inline constexpr PlannerMode kAllModes[] = {PlannerMode::kFull, PlannerMode::kCpcOnly, PlannerMode::kCncOnly,
                                            PlannerMode::kDistanceOnly};

std::string mode_name(PlannerMode mode);
std::optional<PlannerMode> parse_mode(const std::string& name);

/// cpc-only: w2 = 0. cnc-only: CPC trigger disabled. distance-only: w1 = w2 = 0.
Params apply_mode(Params params, PlannerMode mode);

/// Accepts "7", "1,2,5" and inclusive ranges "0..9" (mixable: "0..3,8"). Throws
/// std::invalid_argument on malformed or empty input.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// CURIO_NAV_THREADS if set to a positive integer, else the hardware concurrency (at least 1).
int thread_limit();

struct RunConfig {
  std::filesystem::path scenario;
  std::vector<std::uint64_t> seeds;
  PlannerMode mode = PlannerMode::kFull;
  std::filesystem::path out_dir;
  bool render = false;
};

/// Per-run file stem inside the output directory, e.g. "full_seed3".
std::string run_stem(PlannerMode mode, std::uint64_t seed);

struct RunOutput {
  std::vector<MetricsReport> metrics;  // in seed order
  std::vector<std::filesystem::path> files;
};

/// Runs one episode per seed (concurrently, up to `threads`) and writes
/// <stem>.metrics.json, <stem>.trace.jsonl and optionally <stem>.svg.
RunOutput execute_run(const Scenario& scenario, const RunConfig& config, int threads);

struct MetricSummary {
  std::string name;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single run
};

/// RMSE, TCM, NM, TD, MD, NT, Vel, Length, Time and the goal rate, in that order.
std::vector<MetricSummary> summarize(std::span<const MetricsReport> runs);

/// One row per label, each cell "mean +- std".
std::string format_table(const std::vector<std::pair<std::string, std::vector<MetricSummary>>>& rows);

/// Full command-line entry point. Returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace curio::cli
