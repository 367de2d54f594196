#include "curio/trace_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace curio {

using nlohmann::json;

namespace {

json state_json(const RobotState& s) { return json::array({s.x, s.y, s.theta}); }

RobotState state_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw TraceFormatError("expected [x, y, theta]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json control_json(const Control& u) { return json::array({u.v, u.omega}); }

Control control_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw TraceFormatError("expected [v, omega]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double finite_or_inf(const json& j) { return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>(); }

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw TraceFormatError(std::string("missing field '") + key + "'");
  return j.at(key).get<T>();
}

}  // namespace

json tick_to_json(const TickRecord& t) {
  json cov = json::array();
  for (int r = 0; r < 3; ++r) cov.push_back(json::array({t.covariance(r, 0), t.covariance(r, 1), t.covariance(r, 2)}));
  json peds = json::array();
  for (const auto& p : t.pedestrians) peds.push_back(json::array({p.x(), p.y()}));
  return {
      {"record", "tick"},
      {"tick", t.tick},
      {"time", t.time},
      {"true_state", state_json(t.true_state)},
      {"belief_mean", state_json(t.belief_mean)},
      {"covariance", cov},
      {"cov_trace", t.cov_trace},
      {"control", control_json(t.control)},
      {"planned", t.planned},
      {"pedestrians", peds},
      {"min_ped_distance", finite_or_null(t.min_ped_distance)},
      {"cpc_active", t.cpc_active},
      {"cost",
       {{"distance", t.cost.distance},
        {"crowd", t.cost.crowd},
        {"zeta", t.cost.zeta},
        {"cpc", t.cost.cpc},
        {"ell", t.cost.ell},
        {"total", t.cost.total},
        {"cpc_active", t.cost.cpc_active}}},
  };
}

TickRecord tick_from_json(const json& j) {
  try {
    TickRecord t;
    t.tick = field<int>(j, "tick");
    t.time = field<double>(j, "time");
    t.true_state = state_from(j.at("true_state"));
    t.belief_mean = state_from(j.at("belief_mean"));
    const json& cov = j.at("covariance");
    if (!cov.is_array() || cov.size() != 3) throw TraceFormatError("covariance must be 3x3");
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) t.covariance(r, c) = cov.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
    }
    t.cov_trace = field<double>(j, "cov_trace");
    t.control = control_from(j.at("control"));
    t.planned = field<bool>(j, "planned");
    for (const auto& p : j.at("pedestrians")) t.pedestrians.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    t.min_ped_distance = finite_or_inf(j.at("min_ped_distance"));
    t.cpc_active = field<bool>(j, "cpc_active");
    const json& c = j.at("cost");
    t.cost.distance = field<double>(c, "distance");
    t.cost.crowd = field<double>(c, "crowd");
    t.cost.zeta = field<double>(c, "zeta");
    t.cost.cpc = field<double>(c, "cpc");
    t.cost.ell = field<double>(c, "ell");
    t.cost.total = field<double>(c, "total");
    t.cost.cpc_active = field<bool>(c, "cpc_active");
    return t;
  } catch (const json::exception& e) {
    throw TraceFormatError(std::string("malformed tick record: ") + e.what());
  }
}

void write_trace_jsonl(std::ostream& os, const EpisodeTrace& trace) {
  const json header = {
      {"record", "start"},
      {"dt", trace.dt},
      {"true_state", state_json(trace.start_true_state)},
      {"belief_mean", state_json(trace.start_belief_mean)},
      {"control", control_json(trace.start_control)},
  };
  os << header.dump() << '\n';
  for (const auto& t : trace.ticks) os << tick_to_json(t).dump() << '\n';
}

EpisodeTrace read_trace_jsonl(std::istream& is) {
  EpisodeTrace trace;
  std::string line;
  bool have_header = false;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw TraceFormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
    const std::string kind = j.value("record", "");
    if (kind == "start") {
      trace.dt = field<double>(j, "dt");
      trace.start_true_state = state_from(j.at("true_state"));
      trace.start_belief_mean = state_from(j.at("belief_mean"));
      trace.start_control = control_from(j.at("control"));
      have_header = true;
    } else if (kind == "tick") {
      trace.ticks.push_back(tick_from_json(j));
    } else {
      throw TraceFormatError("line " + std::to_string(lineno) + ": unknown record kind");
    }
  }
  if (!have_header) throw TraceFormatError("trace has no start record");
  return trace;
}

json metrics_to_json(const MetricsReport& m) {
  return {
      {"RMSE", m.rmse},   {"TCM", m.tcm},         {"NM", m.nm},           {"TD", m.td},
      {"MD", m.md},       {"NT", m.nt},           {"Vel", m.vel},         {"Length", m.length},
      {"Time", m.time},   {"reached_goal", m.reached_goal}, {"collided", m.collided},
      {"ticks", m.ticks}, {"seed", m.seed},
  };
}

MetricsReport metrics_from_json(const json& j) {
  try {
    MetricsReport m;
    m.rmse = field<double>(j, "RMSE");
    m.tcm = field<double>(j, "TCM");
    m.nm = field<int>(j, "NM");
    m.td = field<double>(j, "TD");
    m.md = field<double>(j, "MD");
    m.nt = field<int>(j, "NT");
    m.vel = field<double>(j, "Vel");
    m.length = field<double>(j, "Length");
    m.time = field<double>(j, "Time");
    m.reached_goal = field<bool>(j, "reached_goal");
    m.collided = field<bool>(j, "collided");
    m.ticks = field<int>(j, "ticks");
    m.seed = field<std::uint64_t>(j, "seed");
    return m;
  } catch (const json::exception& e) {
    throw TraceFormatError(std::string("malformed metrics: ") + e.what());
  }
}

void write_trace_file(const std::filesystem::path& path, const EpisodeTrace& trace) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_trace_jsonl(os, trace);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

EpisodeTrace read_trace_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_trace_jsonl(is);
}

void write_metrics_file(const std::filesystem::path& path, const MetricsReport& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << metrics_to_json(m).dump(2) << '\n';
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

MetricsReport read_metrics_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  try {
    return metrics_from_json(json::parse(is));
  } catch (const json::parse_error& e) {
    throw TraceFormatError(path.string() + ": " + e.what());
  }
}

}  // namespace curio
