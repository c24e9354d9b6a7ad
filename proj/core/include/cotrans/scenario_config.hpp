#pragma once

// Scenario configuration. Files are JSON objects; every object rejects keys
// it does not know. Positions in files are [x, y, height] with height
// positive up; they are converted to NED (z = -height) on load.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cotrans/gains.hpp"
#include "cotrans/payload_system.hpp"
#include "cotrans/reference.hpp"
#include "cotrans/uav_model.hpp"

namespace cotrans {

enum class ScenarioKind { SingleUav, Payload, Mission, Robustness };

std::string to_string(ScenarioKind k);
ScenarioKind scenario_kind_from_string(const std::string& s);

struct ReferenceSpec {
  enum class Kind { Circle, Hover, Waypoints };
  Kind kind = Kind::Circle;
  CircularReference circle;
  Vec3 hover = Vec3(0.0, 0.0, -5.0);  // NED
  std::vector<Vec3> waypoints;        // NED
  std::vector<double> speeds{1.0};
};

struct DisturbanceSpec {
  Vec3 force = Vec3::Zero();  // inertial, N
  double start = 10.0;        // s
  double duration = 5.0;      // s

  bool active(double t) const { return force.squaredNorm() > 0.0 && t >= start && t < start + duration; }
  Vec3 at(double t) const { return active(t) ? force : Vec3::Zero(); }
};

struct MissionSpec {
  Vec3 payload_spawn{-71.5, -104.37, 0.0};  // NED, ground level
  Vec3 helipad{-38.073, -165.647, 0.0};     // NED, ground level
  // Height of the payload centre of mass when resting on the ground. The
  // default places the UAV attachment targets at 3.6 m for the default rig.
  double payload_rest_height = 0.275;
  double formation_height = 4.3;
  double spawn_radius_min = 3.0;
  double spawn_radius_max = 6.0;
  double formation_speed = 1.5;
  double descend_speed = 0.3;
  double formation_tolerance = 0.1;
  double attach_tolerance = 0.05;
  double attach_velocity_tolerance = 0.1;
  double attach_timeout = 30.0;
  double cruise_height = 6.0;
  double transport_speed = 2.0;
  std::vector<Vec3> transport_via{Vec3(-62.0, -125.0, -6.0), Vec3(-45.0, -140.0, -6.0)};  // NED
  double land_tolerance = 0.1;
  double settle_time = 3.0;
  double dispersal_radius_min = 5.0;
  double dispersal_radius_max = 10.0;
  double dispersal_height = 5.0;
  double dispersal_speed = 1.5;
  double detach_duration = 20.0;
};

struct RobustnessSpec {
  double gust_force = 5.0;  // N along +x
  double gust_start = 10.0;
  double gust_duration = 5.0;
  double mass_variation = 0.1;
  double recovery_delay = 10.0;  // s after gust end at which recovery is judged
};

struct OutputSpec {
  std::string dir = "out";
  bool csv = true;
  bool json = false;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::SingleUav;
  double dt = 1e-3;
  double duration = 60.0;
  double controller_rate_hz = 50.0;
  std::uint64_t seed = 1;
  double transient_time = 10.0;  // start of the post-transient window
  int log_stride = 1;            // log every n-th physics step

  UavParams uav;
  RigParams rig = RigParams::table_one();
  // Payload mass assumed by the controller; the plant uses rig.payload_mass.
  std::optional<double> controller_payload_mass;

  UavGains uav_gains;
  PayloadGains payload_gains;
  bool attitude_feedforward = false;
  bool payload_attitude_hold = true;

  ReferenceSpec reference;
  Vec3 initial_offset = Vec3::Zero();  // NED offset from the reference start
  DisturbanceSpec disturbance;
  MissionSpec mission;
  RobustnessSpec robustness;
  OutputSpec output;

  double controller_period() const { return 1.0 / controller_rate_hz; }
  RigParams controller_rig() const;

  // Physics steps per controller hold (rounded).
  int hold_steps() const;

  // dt in (0, 0.01], duration > 0, controller period >= dt, masses positive,
  // rig valid with N >= 3 for payload scenarios. Throws ConfigError.
  void validate() const;

  static ScenarioConfig defaults(ScenarioKind kind);
};

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);

// Serialized form (round-trips through parse_config).
std::string dump_config(const ScenarioConfig& cfg);

// [x, y, height] <-> NED.
inline Vec3 ned_from_display(const Vec3& p) { return {p.x(), p.y(), -p.z()}; }
inline Vec3 display_from_ned(const Vec3& p) { return {p.x(), p.y(), -p.z()}; }

}  // namespace cotrans
