#pragma once

// Cooperative pick-and-place mission:
//
//   Formation  UAVs fly from random spawn points to their attachment
//              points at the formation height.
//   Descend    UAVs descend onto the link tops above the resting payload.
//   Attached   Mode switch to the payload-UAV model once every UAV is
//              within the attach tolerance and nearly at rest; the
//              payload lifts to cruise height.
//   Transport  Smooth waypoint path to the helipad and landing.
//   Detach     UAVs revert to independent flight toward random dispersal
//              targets; the payload stays on the ground.
//
// Ground contact is not modelled: the payload is frozen on the ground
// before attachment and after detachment.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cotrans/scenario_config.hpp"
#include "cotrans/sim_log.hpp"

namespace cotrans {

enum class MissionPhase { Formation = 0, Descend = 1, Attached = 2, Transport = 3, Detach = 4 };

std::string to_string(MissionPhase p);

struct PhaseEntry {
  MissionPhase phase;
  double time;
};

struct MissionReport {
  RunLog log;
  std::vector<PhaseEntry> phases;
  bool completed = false;
  std::optional<std::string> failure;

  // UAV attachment targets (NED) derived from the payload spawn.
  std::vector<Vec3> attach_targets;
  // Largest UAV velocity change across the attach mode switch.
  double handoff_velocity_jump = 0.0;
  // Largest UAV position change across the attach mode switch.
  double handoff_position_jump = 0.0;
  // Payload position change across the switch (payload pose is retained).
  double handoff_payload_jump = 0.0;
  // Payload distance to the helipad landing point when Detach begins.
  double landing_error = 0.0;

  bool phases_monotonic() const;
};

// Attachment point of UAV i above a payload resting at `payload` (NED).
Vec3 attachment_target(const Vec3& payload, const UavLink& link);

MissionReport run_mission(const ScenarioConfig& cfg);

}  // namespace cotrans
