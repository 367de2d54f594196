#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "curio/simkit.hpp"

namespace curio {

class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json tick_to_json(const TickRecord& tick);
TickRecord tick_from_json(const nlohmann::json& j);

/// First line is a header record (`"record": "start"`), then one `"record": "tick"` line per tick.
/// An infinite pedestrian distance is written as null.
void write_trace_jsonl(std::ostream& os, const EpisodeTrace& trace);
EpisodeTrace read_trace_jsonl(std::istream& is);

nlohmann::json metrics_to_json(const MetricsReport& m);
MetricsReport metrics_from_json(const nlohmann::json& j);

void write_trace_file(const std::filesystem::path& path, const EpisodeTrace& trace);
EpisodeTrace read_trace_file(const std::filesystem::path& path);
void write_metrics_file(const std::filesystem::path& path, const MetricsReport& m);
MetricsReport read_metrics_file(const std::filesystem::path& path);

}  // namespace curio
