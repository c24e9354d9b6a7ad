#pragma once

// Closed-loop rollouts. Controllers run at the configured rate with a
// zero-order hold; physics integrates with RK4 at cfg.dt. A controller or
// integration failure ends the run early: the partial log is returned and
// the summary carries a "failure" note with the time stamp.
//
// Table schemas (vectors as [x, y, height]):
//   single-uav  "uav":     t, hold, position, velocity, attitude, rates,
//                          thrust, thrust_rate, reference, error, inputs,
//                          v (commanded output derivatives) and pred
//                          (b + Delta U_bar, the plant's output derivatives)
//   payload     "payload": t, hold, disturbance, position, velocity,
//                          attitude, rates, reference, error, v, pred
//                          (b + Delta u_bar under the controller model) and
//                          acc (plant acceleration)
//               "uav<i>":  t, hold, position, attitude, rates, thrust,
//                          torque, desired attitude, attitude error

#include <functional>
#include <string>

#include "cotrans/analysis.hpp"
#include "cotrans/reference.hpp"
#include "cotrans/scenario_config.hpp"
#include "cotrans/sim_log.hpp"

namespace cotrans {

using ReferenceFn = std::function<PathSample(double)>;

// Reference trajectory named by the config.
ReferenceFn make_reference(const ReferenceSpec& spec);

RunLog run_single_uav(const ScenarioConfig& cfg);
RunLog run_payload(const ScenarioConfig& cfg);

struct RobustnessReport {
  RunLog nominal;
  RunLog wind;
  RunLog heavy;  // plant payload mass (1 + variation) x belief
  RunLog light;  // plant payload mass (1 - variation) x belief

  double nominal_rms = 0.0;         // post-transient payload tracking RMS
  double wind_max_deviation = 0.0;  // max |r_wind(t) - r_nominal(t)|
  double wind_max_error = 0.0;      // max tracking error of the wind run
  double wind_recovery_rms = 0.0;   // wind tracking RMS from gust end + recovery delay
  double nominal_recovery_rms = 0.0;
  bool recovered = false;           // wind_recovery_rms < 2 nominal_recovery_rms
  double heavy_rms_change = 0.0;    // |rms - nominal| / nominal, post-transient
  double light_rms_change = 0.0;
  EffortReport nominal_effort, heavy_effort, light_effort;
  double heavy_effort_ratio = 0.0;  // integral |U| ratio to nominal
  double light_effort_ratio = 0.0;
  double heavy_squared_effort_ratio = 0.0;
  double light_squared_effort_ratio = 0.0;

  Summary summary() const;
};

// Runs nominal, wind, heavy and light payload cases concurrently. The gust
// is a constant inertial +x force on the payload; controllers are blind to
// it and to the mass mismatch.
RobustnessReport run_robustness(const ScenarioConfig& cfg);

// Writes every case under <dir>/<case>/ and the merged report to
// <dir>/summary.json.
std::vector<std::string> write_robustness(const RobustnessReport& r, const std::string& dir, bool csv, bool json);

}  // namespace cotrans
