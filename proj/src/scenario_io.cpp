#include "curio/scenario_io.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace curio {

using nlohmann::json;

namespace {

Vec2 read_point(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError(std::string(what) + ": expected [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json write_point(const Vec2& p) { return json::array({p.x(), p.y()}); }

double read_number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ParseError("params." + key + ": expected a number");
  return j.get<double>();
}

int read_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ParseError("params." + key + ": expected an integer");
  return j.get<int>();
}

bool read_bool(const json& j, const std::string& key) {
  if (!j.is_boolean()) throw ParseError("params." + key + ": expected a boolean");
  return j.get<bool>();
}

Mat3 read_cov3(const json& j, const std::string& key) {
  Mat3 m = Mat3::Zero();
  if (j.is_array() && j.size() == 3 && j[0].is_number()) {
    for (int i = 0; i < 3; ++i) m(i, i) = read_number(j[i], key);
    return m;
  }
  if (j.is_array() && j.size() == 3) {
    for (int r = 0; r < 3; ++r) {
      if (!j[r].is_array() || j[r].size() != 3) throw ParseError("params." + key + ": expected a 3x3 matrix");
      for (int c = 0; c < 3; ++c) m(r, c) = read_number(j[r][c], key);
    }
    return m;
  }
  throw ParseError("params." + key + ": expected a diagonal [a,b,c] or a 3x3 matrix");
}

json write_cov3(const Mat3& m) {
  json out = json::array();
  for (int r = 0; r < 3; ++r) out.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return out;
}

template <int N>
Eigen::Matrix<double, N, 1> read_vec(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != N) throw ParseError("params." + key + ": expected " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v(i) = read_number(j[i], key);
  return v;
}

struct ParamField {
  std::function<void(const json&, Params&, const std::string&)> read;
  std::function<json(const Params&)> write;
};

#define CURIO_NUM(name) \
  {#name, {[](const json& j, Params& p, const std::string& k) { p.name = read_number(j, k); }, [](const Params& p) { return json(p.name); }}}
#define CURIO_INT(name) \
  {#name, {[](const json& j, Params& p, const std::string& k) { p.name = read_int(j, k); }, [](const Params& p) { return json(p.name); }}}
#define CURIO_BOOL(name) \
  {#name, {[](const json& j, Params& p, const std::string& k) { p.name = read_bool(j, k); }, [](const Params& p) { return json(p.name); }}}

const std::map<std::string, ParamField>& param_fields() {
  static const std::map<std::string, ParamField> fields = {
      CURIO_NUM(w1),
      CURIO_NUM(w2),
      CURIO_NUM(w3),
      CURIO_NUM(uncertainty_threshold),
      {"cpc_term_mode",
       {[](const json& j, Params& p, const std::string& k) {
          const auto s = j.is_string() ? j.get<std::string>() : std::string();
          if (s == "proportional") p.cpc_term_mode = CpcTermMode::kProportional;
          else if (s == "literal-inverse") p.cpc_term_mode = CpcTermMode::kLiteralInverse;
          else throw ParseError("params." + k + ": expected \"proportional\" or \"literal-inverse\"");
        },
        [](const Params& p) {
          return json(p.cpc_term_mode == CpcTermMode::kProportional ? "proportional" : "literal-inverse");
        }}},
      CURIO_BOOL(cpc_enabled),
      CURIO_NUM(dt),
      CURIO_INT(horizon),
      CURIO_NUM(sensor_range),
      CURIO_NUM(sensor_fov),
      {"measurement_mode",
       {[](const json& j, Params& p, const std::string& k) {
          const auto s = j.is_string() ? j.get<std::string>() : std::string();
          if (s == "range-only") p.measurement_mode = MeasurementMode::kRangeOnly;
          else if (s == "range-bearing") p.measurement_mode = MeasurementMode::kRangeBearing;
          else throw ParseError("params." + k + ": expected \"range-only\" or \"range-bearing\"");
        },
        [](const Params& p) {
          return json(p.measurement_mode == MeasurementMode::kRangeOnly ? "range-only" : "range-bearing");
        }}},
      {"process_noise",
       {[](const json& j, Params& p, const std::string& k) { p.process_noise = read_cov3(j, k); },
        [](const Params& p) { return write_cov3(p.process_noise); }}},
      CURIO_NUM(range_variance),
      CURIO_NUM(bearing_variance),
      {"initial_covariance",
       {[](const json& j, Params& p, const std::string& k) { p.initial_covariance = read_cov3(j, k); },
        [](const Params& p) { return write_cov3(p.initial_covariance); }}},
      CURIO_NUM(social_distance),
      CURIO_NUM(personal_distance),
      CURIO_NUM(comfort_threshold),
      CURIO_NUM(working_zone_radius),
      CURIO_NUM(pedestrian_radius),
      CURIO_NUM(pedestrian_max_speed),
      CURIO_NUM(robot_radius),
      CURIO_NUM(v_max),
      CURIO_NUM(omega_max),
      CURIO_INT(tree_budget),
      CURIO_NUM(goal_bias),
      CURIO_NUM(neighbor_radius),
      CURIO_NUM(connect_tolerance),
      CURIO_INT(max_candidates),
      CURIO_NUM(prune_position_tolerance),
      CURIO_NUM(prune_heading_tolerance),
      {"lqr_q",
       {[](const json& j, Params& p, const std::string& k) { p.lqr_q = read_vec<3>(j, k); },
        [](const Params& p) { return json::array({p.lqr_q(0), p.lqr_q(1), p.lqr_q(2)}); }}},
      {"lqr_r",
       {[](const json& j, Params& p, const std::string& k) { p.lqr_r = read_vec<2>(j, k); },
        [](const Params& p) { return json::array({p.lqr_r(0), p.lqr_r(1)}); }}},
      CURIO_NUM(goal_tolerance),
      CURIO_INT(tick_limit),
      CURIO_NUM(conv_threshold),
      {"seed",
       {[](const json& j, Params& p, const std::string& k) {
          if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
            throw ParseError("params." + k + ": expected a nonnegative integer");
          }
          p.seed = j.get<std::uint64_t>();
        },
        [](const Params& p) { return json(p.seed); }}},
      CURIO_BOOL(allow_no_landmarks),
  };
  return fields;
}

#undef CURIO_NUM
#undef CURIO_INT
#undef CURIO_BOOL

GridMap read_rows(const json& rows, double resolution, const Vec2& origin) {
  if (!rows.is_array() || rows.empty()) throw ParseError("grid.rows: expected a nonempty array of strings");
  const int height = static_cast<int>(rows.size());
  int width = -1;
  std::vector<std::uint8_t> cells;
  std::vector<std::string> lines;
  for (const auto& r : rows) {
    if (!r.is_string()) throw ParseError("grid.rows: expected strings");
    lines.push_back(r.get<std::string>());
    if (width < 0) width = static_cast<int>(lines.back().size());
    if (static_cast<int>(lines.back().size()) != width) throw ParseError("grid.rows: rows differ in length");
  }
  cells.assign(static_cast<std::size_t>(width) * height, 0);
  // First row is the top of the map.
  for (int r = 0; r < height; ++r) {
    const int iy = height - 1 - r;
    for (int ix = 0; ix < width; ++ix) {
      const char c = lines[r][ix];
      if (c == '#') cells[static_cast<std::size_t>(iy) * width + ix] = 1;
      else if (c != '.') throw ParseError(std::string("grid.rows: unexpected character '") + c + "'");
    }
  }
  return GridMap(width, height, resolution, origin, std::move(cells));
}

GridMap read_grid(const json& g) {
  try {
    if (g.is_array()) return read_rows(g, 1.0, Vec2::Zero());
    if (!g.is_object()) throw ParseError("grid: expected an object or an array of row strings");
    const double resolution = g.contains("resolution") ? g.at("resolution").get<double>() : 1.0;
    const Vec2 origin = g.contains("origin") ? read_point(g.at("origin"), "grid.origin") : Vec2::Zero();
    if (g.contains("rows")) return read_rows(g.at("rows"), resolution, origin);
    if (!g.contains("width") || !g.contains("height")) throw ParseError("grid: needs rows or width/height");
    const int width = g.at("width").get<int>();
    const int height = g.at("height").get<int>();
    if (width < 1 || height < 1) throw ValidationError("grid: width and height must be at least 1");
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(width) * height, 0);
    if (g.contains("occupied")) {
      for (const auto& o : g.at("occupied")) {
        int ix = 0, iy = 0;
        if (o.is_number_integer()) {
          const long long idx = o.get<long long>();
          if (idx < 0 || idx >= static_cast<long long>(cells.size())) throw ValidationError("grid.occupied: index out of range");
          ix = static_cast<int>(idx % width);
          iy = static_cast<int>(idx / width);
        } else if (o.is_array() && o.size() == 2) {
          ix = o[0].get<int>();
          iy = o[1].get<int>();
          if (ix < 0 || iy < 0 || ix >= width || iy >= height) throw ValidationError("grid.occupied: cell out of range");
        } else {
          throw ParseError("grid.occupied: expected linear indices or [ix, iy] pairs");
        }
        cells[static_cast<std::size_t>(iy) * width + ix] = 1;
      }
    }
    return GridMap(width, height, resolution, origin, std::move(cells));
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("grid: ") + e.what());
  } catch (const json::exception& e) {
    throw ParseError(std::string("grid: ") + e.what());
  }
}

json write_grid(const GridMap& grid) {
  json rows = json::array();
  for (int iy = grid.height() - 1; iy >= 0; --iy) {
    std::string line(static_cast<std::size_t>(grid.width()), '.');
    for (int ix = 0; ix < grid.width(); ++ix) {
      if (grid.occupied(ix, iy)) line[static_cast<std::size_t>(ix)] = '#';
    }
    rows.push_back(std::move(line));
  }
  return json{{"resolution", grid.resolution()}, {"origin", write_point(grid.origin())}, {"rows", std::move(rows)}};
}

bool is_symmetric_psd(const Mat3& m) {
  if (!m.allFinite()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) return false;
  Eigen::SelfAdjointEigenSolver<Mat3> es(m);
  return es.eigenvalues().minCoeff() >= -1e-12;
}

std::string describe(const Vec2& p) {
  std::ostringstream os;
  os << "(" << p.x() << ", " << p.y() << ")";
  return os.str();
}

void require_free(const GridMap& grid, const Vec2& p, const char* what) {
  const auto cell = grid.cell_of(p);
  if (!cell) throw ValidationError(std::string(what) + " " + describe(p) + " lies outside the grid");
  if (grid.occupied(cell->ix, cell->iy)) {
    throw ValidationError(std::string(what) + " " + describe(p) + " lies in occupied cell (" + std::to_string(cell->ix) +
                          ", " + std::to_string(cell->iy) + ")");
  }
}

}  // namespace

void validate_params(const Params& p) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string("params.") + name + " must be positive");
  };
  auto nonnegative = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(std::string("params.") + name + " must be nonnegative");
  };
  nonnegative(p.w1, "w1");
  nonnegative(p.w2, "w2");
  nonnegative(p.w3, "w3");
  positive(p.uncertainty_threshold, "uncertainty_threshold");
  positive(p.dt, "dt");
  if (p.horizon < 1) throw ValidationError("params.horizon must be at least 1");
  positive(p.sensor_range, "sensor_range");
  positive(p.sensor_fov, "sensor_fov");
  nonnegative(p.range_variance, "range_variance");
  nonnegative(p.bearing_variance, "bearing_variance");
  if (!is_symmetric_psd(p.process_noise)) throw ValidationError("params.process_noise must be symmetric positive semidefinite");
  if (!is_symmetric_psd(p.initial_covariance)) {
    throw ValidationError("params.initial_covariance must be symmetric positive semidefinite");
  }
  positive(p.social_distance, "social_distance");
  positive(p.personal_distance, "personal_distance");
  positive(p.comfort_threshold, "comfort_threshold");
  positive(p.working_zone_radius, "working_zone_radius");
  positive(p.pedestrian_radius, "pedestrian_radius");
  positive(p.pedestrian_max_speed, "pedestrian_max_speed");
  positive(p.robot_radius, "robot_radius");
  positive(p.v_max, "v_max");
  positive(p.omega_max, "omega_max");
  if (p.tree_budget < 1) throw ValidationError("params.tree_budget must be at least 1");
  if (!(p.goal_bias >= 0.0 && p.goal_bias <= 1.0)) throw ValidationError("params.goal_bias must lie in [0, 1]");
  positive(p.neighbor_radius, "neighbor_radius");
  positive(p.connect_tolerance, "connect_tolerance");
  if (p.max_candidates < 1) throw ValidationError("params.max_candidates must be at least 1");
  positive(p.prune_position_tolerance, "prune_position_tolerance");
  positive(p.prune_heading_tolerance, "prune_heading_tolerance");
  if ((p.lqr_q.array() < 0.0).any()) throw ValidationError("params.lqr_q must be nonnegative");
  if (!((p.lqr_r.array() > 0.0).all())) throw ValidationError("params.lqr_r must be positive");
  positive(p.goal_tolerance, "goal_tolerance");
  if (p.tick_limit < 1) throw ValidationError("params.tick_limit must be at least 1");
  positive(p.conv_threshold, "conv_threshold");
}

void validate_scenario(const Scenario& s) {
  validate_params(s.params);
  require_free(s.grid, s.robot_start.position(), "robot_start");
  require_free(s.grid, s.goal, "goal");
  if (s.landmarks.empty() && !s.params.allow_no_landmarks) {
    throw ValidationError("scenario has no landmarks; set params.allow_no_landmarks to permit this");
  }
  std::set<int> ids;
  for (const auto& lm : s.landmarks) {
    if (!ids.insert(lm.id).second) throw ValidationError("duplicate landmark id " + std::to_string(lm.id));
    if (!s.grid.in_bounds(lm.position)) {
      throw ValidationError("landmark " + std::to_string(lm.id) + " at " + describe(lm.position) + " lies outside the grid");
    }
  }
  ids.clear();
  for (const auto& ped : s.pedestrians) {
    if (!ids.insert(ped.id).second) throw ValidationError("duplicate pedestrian id " + std::to_string(ped.id));
    if (!(ped.speed >= 0.0) || ped.speed > s.params.pedestrian_max_speed) {
      throw ValidationError("pedestrian " + std::to_string(ped.id) + " speed outside [0, pedestrian_max_speed]");
    }
  }
}

Scenario load_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed scenario document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("scenario document must be a JSON object");
  for (const char* key : {"grid", "robot_start", "goal"}) {
    if (!doc.contains(key)) throw ParseError(std::string("scenario is missing required key '") + key + "'");
  }

  Scenario s;
  s.grid = read_grid(doc.at("grid"));

  try {
    if (doc.contains("landmarks")) {
      int next_id = 0;
      for (const auto& l : doc.at("landmarks")) {
        Landmark lm;
        if (l.is_object()) {
          lm.id = l.contains("id") ? l.at("id").get<int>() : next_id;
          lm.position = read_point(l.at("position"), "landmarks[].position");
        } else {
          lm.id = next_id;
          lm.position = read_point(l, "landmarks[]");
        }
        next_id = lm.id + 1;
        s.landmarks.push_back(lm);
      }
    }
    if (doc.contains("pedestrians")) {
      int next_id = 0;
      for (const auto& p : doc.at("pedestrians")) {
        if (!p.is_object()) throw ParseError("pedestrians[]: expected objects");
        PedestrianSpec ped;
        ped.id = p.contains("id") ? p.at("id").get<int>() : next_id;
        ped.start = read_point(p.at("start"), "pedestrians[].start");
        ped.speed = p.contains("speed") ? p.at("speed").get<double>() : 0.0;
        if (p.contains("waypoints")) {
          for (const auto& w : p.at("waypoints")) ped.waypoints.push_back(read_point(w, "pedestrians[].waypoints[]"));
        }
        next_id = ped.id + 1;
        s.pedestrians.push_back(std::move(ped));
      }
    }
    const auto& rs = doc.at("robot_start");
    if (!rs.is_array() || rs.size() != 3) throw ParseError("robot_start: expected [x, y, theta]");
    s.robot_start = RobotState{rs[0].get<double>(), rs[1].get<double>(), normalize_angle(rs[2].get<double>())};
    s.goal = read_point(doc.at("goal"), "goal");

    if (doc.contains("params")) {
      const auto& pj = doc.at("params");
      if (!pj.is_object()) throw ParseError("params: expected an object");
      const auto& fields = param_fields();
      for (const auto& [key, value] : pj.items()) {
        const auto it = fields.find(key);
        if (it == fields.end()) throw ParseError("params: unknown key '" + key + "'");
        it->second.read(value, s.params, key);
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }

  validate_scenario(s);
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& s) {
  json doc;
  doc["grid"] = write_grid(s.grid);
  json lms = json::array();
  for (const auto& lm : s.landmarks) lms.push_back(json{{"id", lm.id}, {"position", write_point(lm.position)}});
  doc["landmarks"] = std::move(lms);
  json peds = json::array();
  for (const auto& p : s.pedestrians) {
    json wps = json::array();
    for (const auto& w : p.waypoints) wps.push_back(write_point(w));
    peds.push_back(json{{"id", p.id}, {"start", write_point(p.start)}, {"speed", p.speed}, {"waypoints", std::move(wps)}});
  }
  doc["pedestrians"] = std::move(peds);
  doc["robot_start"] = json::array({s.robot_start.x, s.robot_start.y, s.robot_start.theta});
  doc["goal"] = write_point(s.goal);
  json params = json::object();
  for (const auto& [key, field] : param_fields()) params[key] = field.write(s.params);
  doc["params"] = std::move(params);
  return doc.dump(2);
}

}  // namespace curio
