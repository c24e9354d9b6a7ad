#include "cotrans/scenario_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cotrans/errors.hpp"
#include "json.hpp"

namespace cotrans {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

Vec3 vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(where + ": expected an array of 3 numbers");
  return {number(j[0], where), number(j[1], where), number(j[2], where)};
}

std::vector<double> numbers(const json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || (n != 0 && j.size() != n)) {
    throw ConfigError(where + ": expected an array of " + std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, where));
  return out;
}

Mat3 inertia(const json& j, const std::string& where) {
  if (j.is_array() && j.size() == 3 && j[0].is_number()) return vec3(j, where).asDiagonal();
  if (j.is_array() && j.size() == 3) {
    Mat3 m;
    for (int r = 0; r < 3; ++r) m.row(r) = vec3(j[r], where).transpose();
    return m;
  }
  throw ConfigError(where + ": expected a diagonal [Ixx, Iyy, Izz] or a 3x3 matrix");
}

template <typename T>
void maybe(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  const std::string path = where + "." + key;
  if constexpr (std::is_same_v<T, double>) {
    out = number(obj.at(key), path);
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!obj.at(key).is_boolean()) throw ConfigError(path + ": expected a boolean");
    out = obj.at(key).get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!obj.at(key).is_string()) throw ConfigError(path + ": expected a string");
    out = obj.at(key).get<std::string>();
  } else if constexpr (std::is_same_v<T, Vec3>) {
    out = vec3(obj.at(key), path);
  }
}

// Position arrays in files are [x, y, height].
void maybe_position(const json& obj, const char* key, Vec3& out, const std::string& where) {
  if (obj.contains(key)) out = ned_from_display(vec3(obj.at(key), where + "." + key));
}

void parse_uav(const json& j, UavParams& p) {
  check_keys(j, {"mass", "inertia", "gravity"}, "uav");
  maybe(j, "mass", p.mass, "uav");
  maybe(j, "gravity", p.gravity, "uav");
  if (j.contains("inertia")) p.inertia = vec3(j.at("inertia"), "uav.inertia");
}

void parse_rig(const json& j, RigParams& p) {
  check_keys(j, {"payload_mass", "payload_inertia", "gravity", "uavs"}, "rig");
  maybe(j, "payload_mass", p.payload_mass, "rig");
  maybe(j, "gravity", p.gravity, "rig");
  if (j.contains("payload_inertia")) p.payload_inertia = inertia(j.at("payload_inertia"), "rig.payload_inertia");
  if (j.contains("uavs")) {
    const json& arr = j.at("uavs");
    if (!arr.is_array()) throw ConfigError("rig.uavs: expected an array");
    p.uavs.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "rig.uavs[" + std::to_string(i) + "]";
      check_keys(arr[i], {"mass", "inertia", "attachment", "link_length"}, where);
      UavLink link;
      maybe(arr[i], "mass", link.mass, where);
      maybe(arr[i], "link_length", link.link_length, where);
      maybe(arr[i], "attachment", link.attachment, where);
      if (arr[i].contains("inertia")) link.inertia = inertia(arr[i].at("inertia"), where + ".inertia");
      p.uavs.push_back(link);
    }
  }
}

std::array<double, 2> quadratic_gains(const json& j, const std::string& where) {
  check_keys(j, {"beta", "alpha", "k"}, where);
  if (j.contains("beta")) {
    if (j.contains("alpha") || j.contains("k")) throw ConfigError(where + ": give either beta or (alpha, k)");
    const auto b = numbers(j.at("beta"), 2, where + ".beta");
    return {b[0], b[1]};
  }
  if (!j.contains("alpha") || !j.contains("k")) throw ConfigError(where + ": expected beta or both alpha and k");
  try {
    return quadratic_gains_from_alpha_k({number(j.at("alpha"), where), number(j.at("k"), where)});
  } catch (const ParameterError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

void parse_gains(const json& j, ScenarioConfig& cfg) {
  check_keys(j, {"uav", "payload", "attitude", "payload_attitude"}, "gains");
  if (j.contains("uav")) {
    const json& u = j.at("uav");
    check_keys(u, {"beta", "alpha", "k", "yaw"}, "gains.uav");
    if (u.contains("beta")) {
      if (u.contains("alpha") || u.contains("k")) throw ConfigError("gains.uav: give either beta or (alpha, k)");
      const auto b = numbers(u.at("beta"), 4, "gains.uav.beta");
      cfg.uav_gains.position = {b[0], b[1], b[2], b[3]};
    } else if (u.contains("alpha") || u.contains("k")) {
      if (!u.contains("alpha") || !u.contains("k")) throw ConfigError("gains.uav: alpha and k go together");
      const auto a = numbers(u.at("alpha"), 3, "gains.uav.alpha");
      try {
        cfg.uav_gains.position = quartic_gains_from_alpha_k({{a[0], a[1], a[2]}, number(u.at("k"), "gains.uav.k")});
      } catch (const ParameterError& e) {
        throw ConfigError(std::string("gains.uav: ") + e.what());
      }
    }
    if (u.contains("yaw")) cfg.uav_gains.yaw = quadratic_gains(u.at("yaw"), "gains.uav.yaw");
  }
  if (j.contains("payload")) cfg.payload_gains.position = quadratic_gains(j.at("payload"), "gains.payload");
  if (j.contains("attitude")) cfg.payload_gains.attitude = quadratic_gains(j.at("attitude"), "gains.attitude");
  if (j.contains("payload_attitude")) {
    cfg.payload_gains.payload_attitude = quadratic_gains(j.at("payload_attitude"), "gains.payload_attitude");
  }
}

void parse_reference(const json& j, ReferenceSpec& r) {
  check_keys(j, {"kind", "radius", "angular_rate", "height", "center", "position", "waypoints", "speeds"},
             "reference");
  std::string kind = "circle";
  maybe(j, "kind", kind, "reference");
  if (kind == "circle") {
    r.kind = ReferenceSpec::Kind::Circle;
    maybe(j, "radius", r.circle.radius, "reference");
    maybe(j, "angular_rate", r.circle.angular_rate, "reference");
    maybe(j, "height", r.circle.height, "reference");
    if (j.contains("center")) {
      const auto c = numbers(j.at("center"), 2, "reference.center");
      r.circle.center = Vec3(c[0], c[1], 0.0);
    }
  } else if (kind == "hover") {
    r.kind = ReferenceSpec::Kind::Hover;
    maybe_position(j, "position", r.hover, "reference");
  } else if (kind == "waypoints") {
    r.kind = ReferenceSpec::Kind::Waypoints;
    if (!j.contains("waypoints") || !j.at("waypoints").is_array()) {
      throw ConfigError("reference.waypoints: expected an array of [x, y, height]");
    }
    r.waypoints.clear();
    for (const auto& w : j.at("waypoints")) r.waypoints.push_back(ned_from_display(vec3(w, "reference.waypoints")));
    if (j.contains("speeds")) r.speeds = numbers(j.at("speeds"), 0, "reference.speeds");
  } else {
    throw ConfigError("reference.kind: expected circle, hover or waypoints, got '" + kind + "'");
  }
}

void parse_disturbance(const json& j, DisturbanceSpec& d) {
  check_keys(j, {"force", "start", "duration"}, "disturbance");
  maybe(j, "force", d.force, "disturbance");
  maybe(j, "start", d.start, "disturbance");
  maybe(j, "duration", d.duration, "disturbance");
}

void parse_mission(const json& j, MissionSpec& m) {
  static const std::set<std::string> keys = {
      "payload_spawn", "helipad", "payload_rest_height", "formation_height", "spawn_radius_min",
      "spawn_radius_max", "formation_speed", "descend_speed", "formation_tolerance", "attach_tolerance",
      "attach_velocity_tolerance", "attach_timeout", "cruise_height", "transport_speed", "transport_via",
      "land_tolerance", "settle_time", "dispersal_radius_min", "dispersal_radius_max", "dispersal_height",
      "dispersal_speed", "detach_duration"};
  check_keys(j, keys, "mission");
  maybe_position(j, "payload_spawn", m.payload_spawn, "mission");
  maybe_position(j, "helipad", m.helipad, "mission");
  maybe(j, "payload_rest_height", m.payload_rest_height, "mission");
  maybe(j, "formation_height", m.formation_height, "mission");
  maybe(j, "spawn_radius_min", m.spawn_radius_min, "mission");
  maybe(j, "spawn_radius_max", m.spawn_radius_max, "mission");
  maybe(j, "formation_speed", m.formation_speed, "mission");
  maybe(j, "descend_speed", m.descend_speed, "mission");
  maybe(j, "formation_tolerance", m.formation_tolerance, "mission");
  maybe(j, "attach_tolerance", m.attach_tolerance, "mission");
  maybe(j, "attach_velocity_tolerance", m.attach_velocity_tolerance, "mission");
  maybe(j, "attach_timeout", m.attach_timeout, "mission");
  maybe(j, "cruise_height", m.cruise_height, "mission");
  maybe(j, "transport_speed", m.transport_speed, "mission");
  maybe(j, "land_tolerance", m.land_tolerance, "mission");
  maybe(j, "settle_time", m.settle_time, "mission");
  maybe(j, "dispersal_radius_min", m.dispersal_radius_min, "mission");
  maybe(j, "dispersal_radius_max", m.dispersal_radius_max, "mission");
  maybe(j, "dispersal_height", m.dispersal_height, "mission");
  maybe(j, "dispersal_speed", m.dispersal_speed, "mission");
  maybe(j, "detach_duration", m.detach_duration, "mission");
  if (j.contains("transport_via")) {
    if (!j.at("transport_via").is_array()) throw ConfigError("mission.transport_via: expected an array");
    m.transport_via.clear();
    for (const auto& w : j.at("transport_via")) {
      m.transport_via.push_back(ned_from_display(vec3(w, "mission.transport_via")));
    }
  }
}

void parse_robustness(const json& j, RobustnessSpec& r) {
  check_keys(j, {"gust_force", "gust_start", "gust_duration", "mass_variation", "recovery_delay"}, "robustness");
  maybe(j, "gust_force", r.gust_force, "robustness");
  maybe(j, "gust_start", r.gust_start, "robustness");
  maybe(j, "gust_duration", r.gust_duration, "robustness");
  maybe(j, "mass_variation", r.mass_variation, "robustness");
  maybe(j, "recovery_delay", r.recovery_delay, "robustness");
}

void parse_output(const json& j, OutputSpec& o) {
  check_keys(j, {"dir", "format"}, "output");
  maybe(j, "dir", o.dir, "output");
  if (j.contains("format")) {
    std::string f;
    maybe(j, "format", f, "output");
    if (f == "csv") {
      o.csv = true;
      o.json = false;
    } else if (f == "json") {
      o.csv = false;
      o.json = true;
    } else if (f == "both") {
      o.csv = o.json = true;
    } else {
      throw ConfigError("output.format: expected csv, json or both");
    }
  }
}

json position_json(const Vec3& ned) {
  const Vec3 d = display_from_ned(ned);
  return json::array({d.x(), d.y(), d.z()});
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json matrix_json(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return rows;
}

}  // namespace

std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::SingleUav: return "single-uav";
    case ScenarioKind::Payload: return "payload";
    case ScenarioKind::Mission: return "mission";
    case ScenarioKind::Robustness: return "robustness";
  }
  return "unknown";
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
  if (s == "single-uav") return ScenarioKind::SingleUav;
  if (s == "payload") return ScenarioKind::Payload;
  if (s == "mission") return ScenarioKind::Mission;
  if (s == "robustness") return ScenarioKind::Robustness;
  throw ConfigError("scenario: expected single-uav, payload, mission or robustness, got '" + s + "'");
}

RigParams ScenarioConfig::controller_rig() const {
  RigParams belief = rig;
  if (controller_payload_mass) belief.payload_mass = *controller_payload_mass;
  return belief;
}

int ScenarioConfig::hold_steps() const {
  return std::max(1, static_cast<int>(std::lround(controller_period() / dt)));
}

void ScenarioConfig::validate() const {
  if (log_stride < 1) throw ConfigError("log_stride must be at least 1");
  if (!(dt > 0.0) || dt > 0.01) throw ConfigError("dt must lie in (0, 0.01] s");
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("duration must be positive");
  if (!(controller_rate_hz > 0.0) || controller_period() < dt - 1e-15) {
    throw ConfigError("controller period must be at least dt");
  }
  if (controller_payload_mass && !(*controller_payload_mass > 0.0)) {
    throw ConfigError("controller payload mass must be positive");
  }
  try {
    uav.validate();
    rig.validate();
    controller_rig().validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (kind != ScenarioKind::SingleUav && rig.uav_count() < 3) {
    throw ConfigError("payload scenarios need at least 3 UAVs");
  }
  if (reference.kind == ReferenceSpec::Kind::Waypoints && reference.waypoints.size() < 2) {
    throw ConfigError("reference.waypoints needs at least two points");
  }
  if (!is_hurwitz({uav_gains.position.begin(), uav_gains.position.end()}) ||
      !is_hurwitz({uav_gains.yaw.begin(), uav_gains.yaw.end()}) ||
      !is_hurwitz({payload_gains.position.begin(), payload_gains.position.end()}) ||
      !is_hurwitz({payload_gains.attitude.begin(), payload_gains.attitude.end()}) ||
      !is_hurwitz({payload_gains.payload_attitude.begin(), payload_gains.payload_attitude.end()})) {
    throw ConfigError("gains: every error chain must be Hurwitz");
  }
  if (disturbance.duration < 0.0) throw ConfigError("disturbance.duration must be non-negative");
  const auto& m = mission;
  if (!(m.spawn_radius_min >= 0.0 && m.spawn_radius_max >= m.spawn_radius_min) ||
      !(m.dispersal_radius_min >= 0.0 && m.dispersal_radius_max >= m.dispersal_radius_min)) {
    throw ConfigError("mission: radius ranges must be ordered and non-negative");
  }
  if (!(m.attach_tolerance > 0.0) || !(m.attach_timeout > 0.0)) {
    throw ConfigError("mission: attach tolerance and timeout must be positive");
  }
  if (!(robustness.mass_variation >= 0.0 && robustness.mass_variation < 1.0)) {
    throw ConfigError("robustness.mass_variation must lie in [0, 1)");
  }
}

ScenarioConfig ScenarioConfig::defaults(ScenarioKind kind) {
  ScenarioConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case ScenarioKind::SingleUav:
      cfg.duration = 60.0;
      break;
    case ScenarioKind::Payload:
      cfg.duration = 40.0;
      cfg.initial_offset = Vec3(-0.2, 0.0, 0.0);
      break;
    case ScenarioKind::Robustness:
      cfg.duration = 30.0;
      break;
    case ScenarioKind::Mission:
      cfg.duration = 400.0;
      cfg.log_stride = 10;
      break;
  }
  return cfg;
}

ScenarioConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"scenario", "dt", "duration", "controller_rate_hz", "seed", "transient_time", "log_stride", "uav", "rig",
                 "controller_payload_mass", "gains", "attitude_feedforward", "payload_attitude_hold", "reference", "initial_offset",
                 "disturbance", "mission", "robustness", "output"},
             "config");
  if (!j.contains("scenario") || !j.at("scenario").is_string()) {
    throw ConfigError("config.scenario: required string");
  }
  ScenarioConfig cfg = ScenarioConfig::defaults(scenario_kind_from_string(j.at("scenario").get<std::string>()));
  maybe(j, "dt", cfg.dt, "config");
  maybe(j, "duration", cfg.duration, "config");
  maybe(j, "controller_rate_hz", cfg.controller_rate_hz, "config");
  maybe(j, "transient_time", cfg.transient_time, "config");
  maybe(j, "attitude_feedforward", cfg.attitude_feedforward, "config");
  maybe(j, "payload_attitude_hold", cfg.payload_attitude_hold, "config");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("config.seed: expected a non-negative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("log_stride")) {
    if (!j.at("log_stride").is_number_integer()) throw ConfigError("config.log_stride: expected an integer");
    cfg.log_stride = j.at("log_stride").get<int>();
  }
  if (j.contains("controller_payload_mass")) {
    cfg.controller_payload_mass = number(j.at("controller_payload_mass"), "config.controller_payload_mass");
  }
  if (j.contains("initial_offset")) cfg.initial_offset = ned_from_display(vec3(j.at("initial_offset"), "initial_offset"));
  if (j.contains("uav")) parse_uav(j.at("uav"), cfg.uav);
  if (j.contains("rig")) parse_rig(j.at("rig"), cfg.rig);
  if (j.contains("gains")) parse_gains(j.at("gains"), cfg);
  if (j.contains("reference")) parse_reference(j.at("reference"), cfg.reference);
  if (j.contains("disturbance")) parse_disturbance(j.at("disturbance"), cfg.disturbance);
  if (j.contains("mission")) parse_mission(j.at("mission"), cfg.mission);
  if (j.contains("robustness")) parse_robustness(j.at("robustness"), cfg.robustness);
  if (j.contains("output")) parse_output(j.at("output"), cfg.output);
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ScenarioConfig& cfg) {
  json j;
  j["scenario"] = to_string(cfg.kind);
  j["dt"] = cfg.dt;
  j["duration"] = cfg.duration;
  j["controller_rate_hz"] = cfg.controller_rate_hz;
  j["seed"] = cfg.seed;
  j["transient_time"] = cfg.transient_time;
  j["log_stride"] = cfg.log_stride;
  j["attitude_feedforward"] = cfg.attitude_feedforward;
  j["payload_attitude_hold"] = cfg.payload_attitude_hold;
  j["uav"] = {{"mass", cfg.uav.mass}, {"inertia", vec_json(cfg.uav.inertia)}, {"gravity", cfg.uav.gravity}};
  json uavs = json::array();
  for (const auto& u : cfg.rig.uavs) {
    uavs.push_back({{"mass", u.mass},
                    {"inertia", matrix_json(u.inertia)},
                    {"attachment", vec_json(u.attachment)},
                    {"link_length", u.link_length}});
  }
  j["rig"] = {{"payload_mass", cfg.rig.payload_mass},
              {"payload_inertia", matrix_json(cfg.rig.payload_inertia)},
              {"gravity", cfg.rig.gravity},
              {"uavs", uavs}};
  if (cfg.controller_payload_mass) j["controller_payload_mass"] = *cfg.controller_payload_mass;
  const auto& ug = cfg.uav_gains;
  const auto& pg = cfg.payload_gains;
  j["gains"] = {{"uav",
                 {{"beta", {ug.position[0], ug.position[1], ug.position[2], ug.position[3]}},
                  {"yaw", {{"beta", {ug.yaw[0], ug.yaw[1]}}}}}},
                {"payload", {{"beta", {pg.position[0], pg.position[1]}}}},
                {"attitude", {{"beta", {pg.attitude[0], pg.attitude[1]}}}},
                {"payload_attitude", {{"beta", {pg.payload_attitude[0], pg.payload_attitude[1]}}}}};
  const auto& r = cfg.reference;
  switch (r.kind) {
    case ReferenceSpec::Kind::Circle:
      j["reference"] = {{"kind", "circle"},
                        {"radius", r.circle.radius},
                        {"angular_rate", r.circle.angular_rate},
                        {"height", r.circle.height},
                        {"center", {r.circle.center.x(), r.circle.center.y()}}};
      break;
    case ReferenceSpec::Kind::Hover:
      j["reference"] = {{"kind", "hover"}, {"position", position_json(r.hover)}};
      break;
    case ReferenceSpec::Kind::Waypoints: {
      json pts = json::array();
      for (const auto& w : r.waypoints) pts.push_back(position_json(w));
      j["reference"] = {{"kind", "waypoints"}, {"waypoints", pts}, {"speeds", r.speeds}};
      break;
    }
  }
  j["initial_offset"] = position_json(cfg.initial_offset);
  j["disturbance"] = {{"force", vec_json(cfg.disturbance.force)},
                      {"start", cfg.disturbance.start},
                      {"duration", cfg.disturbance.duration}};
  const auto& m = cfg.mission;
  json via = json::array();
  for (const auto& w : m.transport_via) via.push_back(position_json(w));
  j["mission"] = {{"payload_spawn", position_json(m.payload_spawn)},
                  {"helipad", position_json(m.helipad)},
                  {"payload_rest_height", m.payload_rest_height},
                  {"formation_height", m.formation_height},
                  {"spawn_radius_min", m.spawn_radius_min},
                  {"spawn_radius_max", m.spawn_radius_max},
                  {"formation_speed", m.formation_speed},
                  {"descend_speed", m.descend_speed},
                  {"formation_tolerance", m.formation_tolerance},
                  {"attach_tolerance", m.attach_tolerance},
                  {"attach_velocity_tolerance", m.attach_velocity_tolerance},
                  {"attach_timeout", m.attach_timeout},
                  {"cruise_height", m.cruise_height},
                  {"transport_speed", m.transport_speed},
                  {"transport_via", via},
                  {"land_tolerance", m.land_tolerance},
                  {"settle_time", m.settle_time},
                  {"dispersal_radius_min", m.dispersal_radius_min},
                  {"dispersal_radius_max", m.dispersal_radius_max},
                  {"dispersal_height", m.dispersal_height},
                  {"dispersal_speed", m.dispersal_speed},
                  {"detach_duration", m.detach_duration}};
  const auto& rb = cfg.robustness;
  j["robustness"] = {{"gust_force", rb.gust_force},
                     {"gust_start", rb.gust_start},
                     {"gust_duration", rb.gust_duration},
                     {"mass_variation", rb.mass_variation},
                     {"recovery_delay", rb.recovery_delay}};
  j["output"] = {{"dir", cfg.output.dir},
                 {"format", cfg.output.csv && cfg.output.json ? "both" : (cfg.output.json ? "json" : "csv")}};
  return j.dump(2);
}

}  // namespace cotrans
