#pragma once

// Reference trajectories in the NED frame. Heights are positive-up at the
// configuration boundary and stored internally as z = -height.

#include <array>
#include <vector>

#include "cotrans/math.hpp"
#include "cotrans/payload_fbl.hpp"
#include "cotrans/uav_fbl.hpp"

namespace cotrans {

// Position and derivatives 0..4 at one instant.
struct PathSample {
  std::array<Vec3, 5> d{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};

  UavReference as_uav(double yaw = 0.0) const;
  PayloadReference as_payload() const;
};

// x = r sin(w t), y = r cos(w t), height constant for t >= 0.
struct CircularReference {
  double radius = 1.0;
  double angular_rate = 0.5;
  double height = 5.0;
  Vec3 center = Vec3::Zero();  // NED offset of the circle centre (z ignored)

  PathSample sample(double t) const;
};

// Piecewise rest-to-rest polynomial path through waypoints. Each segment
// uses the ninth-order blend s(u) = 126u^5 - 420u^6 + 540u^7 - 315u^8 + 70u^9,
// whose first four derivatives vanish at both ends, so the path is C4 at
// every knot with zero boundary derivatives. Segment durations follow from
// the requested peak speed: T = (315/128) * distance / speed.
class SmoothWaypointReference {
 public:
  // Waypoints in NED. `speeds` holds one peak speed for all segments or
  // one per segment. Throws ParameterError for fewer than two waypoints,
  // coincident consecutive waypoints or non-positive speeds.
  SmoothWaypointReference(std::vector<Vec3> waypoints, std::vector<double> speeds, double start_time = 0.0);

  PathSample sample(double t) const;

  double start_time() const { return start_time_; }
  double end_time() const { return knots_.back(); }
  const std::vector<double>& knot_times() const { return knots_; }
  const std::vector<Vec3>& waypoints() const { return waypoints_; }

 private:
  std::vector<Vec3> waypoints_;
  std::vector<double> knots_;
  double start_time_;
};

// Blend s(u) and its derivatives 0..4 with respect to u.
std::array<double, 5> smooth_blend(double u);

inline constexpr double kBlendPeakSpeedFactor = 315.0 / 128.0;

// Constant position, zero derivatives.
PathSample hold_sample(const Vec3& position);

}  // namespace cotrans
