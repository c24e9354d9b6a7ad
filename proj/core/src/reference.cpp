#include "cotrans/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cotrans/errors.hpp"

namespace cotrans {

UavReference PathSample::as_uav(double yaw) const {
  UavReference r;
  r.position = d;
  r.yaw = {yaw, 0.0, 0.0};
  return r;
}

PayloadReference PathSample::as_payload() const {
  PayloadReference r;
  r.position = {d[0], d[1], d[2]};
  return r;
}

PathSample hold_sample(const Vec3& position) {
  PathSample s;
  s.d[0] = position;
  return s;
}

PathSample CircularReference::sample(double t) const {
  PathSample s;
  double scale = radius;
  for (int n = 0; n <= 4; ++n) {
    const double phase = angular_rate * t + n * std::numbers::pi / 2.0;
    s.d[n] = Vec3(scale * std::sin(phase), scale * std::cos(phase), 0.0);
    scale *= angular_rate;
  }
  s.d[0] += Vec3(center.x(), center.y(), -height);
  return s;
}

std::array<double, 5> smooth_blend(double u) {
  u = std::clamp(u, 0.0, 1.0);
  const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u, u6 = u5 * u, u7 = u6 * u, u8 = u7 * u,
               u9 = u8 * u;
  return {126 * u5 - 420 * u6 + 540 * u7 - 315 * u8 + 70 * u9,
          630 * u4 - 2520 * u5 + 3780 * u6 - 2520 * u7 + 630 * u8,
          2520 * u3 - 12600 * u4 + 22680 * u5 - 17640 * u6 + 5040 * u7,
          7560 * u2 - 50400 * u3 + 113400 * u4 - 105840 * u5 + 35280 * u6,
          15120 * u - 151200 * u2 + 453600 * u3 - 529200 * u4 + 211680 * u5};
}

SmoothWaypointReference::SmoothWaypointReference(std::vector<Vec3> waypoints, std::vector<double> speeds,
                                                 double start_time)
    : waypoints_(std::move(waypoints)), start_time_(start_time) {
  const std::size_t segments = waypoints_.size() < 2 ? 0 : waypoints_.size() - 1;
  if (segments == 0) throw ParameterError("SmoothWaypointReference: at least two waypoints are required");
  if (speeds.size() != 1 && speeds.size() != segments) {
    throw ParameterError("SmoothWaypointReference: expected one speed or one per segment");
  }
  knots_.push_back(start_time_);
  for (std::size_t i = 0; i < segments; ++i) {
    const double dist = (waypoints_[i + 1] - waypoints_[i]).norm();
    if (dist < 1e-9) {
      throw ParameterError("SmoothWaypointReference: waypoints " + std::to_string(i) + " and " +
                           std::to_string(i + 1) + " coincide");
    }
    const double speed = speeds.size() == 1 ? speeds[0] : speeds[i];
    if (!(speed > 0.0) || !std::isfinite(speed)) {
      throw ParameterError("SmoothWaypointReference: speeds must be positive");
    }
    knots_.push_back(knots_.back() + kBlendPeakSpeedFactor * dist / speed);
  }
}

PathSample SmoothWaypointReference::sample(double t) const {
  if (t <= knots_.front()) return hold_sample(waypoints_.front());
  if (t >= knots_.back()) return hold_sample(waypoints_.back());
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const std::size_t seg = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const double t0 = knots_[seg];
  const double duration = knots_[seg + 1] - t0;
  const Vec3 delta = waypoints_[seg + 1] - waypoints_[seg];
  const auto s = smooth_blend((t - t0) / duration);

  PathSample out;
  out.d[0] = waypoints_[seg] + s[0] * delta;
  double inv = 1.0;
  for (int n = 1; n <= 4; ++n) {
    inv /= duration;
    out.d[n] = s[n] * inv * delta;
  }
  return out;
}

}  // namespace cotrans
