#pragma once

// Payload-position linearization over the stacked per-UAV force commands,
// thrust vectoring and per-UAV attitude linearization.
//
// With u_i = R0^T f_i (payload frame) and u_bar = [u_1; ...; u_N]:
//
//   r0_ddot = b(X) + Delta(X) u_bar,
//   Delta   = R0 (P11 S1 + P12 S2),  S1 = [I3 ... I3],  S2 = [hat(rho_1) ... hat(rho_N)],
//   b       = R0 hat(w0) v0 + R0 fbar(X).
//
// The allocation u_bar = Delta^+ (v - b) gives r0_ddot = v whenever the
// UAV thrust directions match the command exactly.

#include <optional>
#include <vector>

#include "cotrans/gains.hpp"
#include "cotrans/math.hpp"
#include "cotrans/payload_system.hpp"

namespace cotrans {

struct PayloadLinearization {
  MatX delta;  // 3 x 3N
  Vec3 b = Vec3::Zero();
  // Payload angular acceleration w0_dot = rot_b + rot_delta u_bar, with
  // rot_delta = P21 S1 + P22 S2.
  MatX rot_delta;  // 3 x 3N
  Vec3 rot_b = Vec3::Zero();
};

// Throws Error if rank(Delta) < 3 (corrupted parameters).
PayloadLinearization payload_delta_b(const SystemState& x, const RigParams& params, const PBlocks& p);
PayloadLinearization payload_delta_b(const SystemState& x, const RigParams& params);

struct PayloadReference {
  // position derivatives 0..2
  std::array<Vec3, 3> position{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
};

Vec3 payload_tracking_v(const SystemState& x, const PayloadReference& ref, const PayloadGains& g);

// u_bar = Delta^+ (v - b). Verifies b + Delta u_bar = v to 1e-9 (relative)
// and throws DegenerateAllocationError otherwise.
VecX allocate(const PayloadLinearization& lin, const Vec3& v);

struct TvcResult {
  double thrust = 0.0;
  Mat3 desired_rotation = Mat3::Identity();
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  // Set when the command was below the magnitude floor and the previous
  // attitude was held.
  bool held_previous = false;

  Vec3 desired_angles() const { return {yaw, pitch, roll}; }
};

inline constexpr double kTvcMinForce = 1e-6;

// Thrust vectoring for a commanded force F (the force the UAV must apply).
// Desired body z axis is -F/|F| (thrust opposes body z in NED); the y and x
// axes follow from the zero-yaw heading [1, 0, 0]; roll and pitch are the
// atan2 extraction from the desired rotation; desired yaw is zero.
//
// |F| <= 1e-6 N returns `previous` (or level) with held_previous set.
// F parallel to [1, 0, 0] throws DegenerateAllocationError.
TvcResult thrust_vectoring(const Vec3& force, const std::optional<TvcResult>& previous = std::nullopt);

struct AttitudeTarget {
  Vec3 angles = Vec3::Zero();  // (yaw, pitch, roll)
  Vec3 rates = Vec3::Zero();
  Vec3 accels = Vec3::Zero();
};

// Desired Euler accelerations (yaw, pitch, roll order):
// T = d_ddot + beta9 (d_dot - Theta_dot) + beta10 (d - Theta).
Vec3 attitude_tracking_T(const EulerZYX& attitude, const Vec3& rates, const AttitudeTarget& target,
                         const PayloadGains& g);

// tau_bar = R_Theta^-1 (T - R_Theta_dot w), tau = J tau_bar + w x J w.
Vec3 torque_from_T(const Vec3& T, const EulerZYX& attitude, const Vec3& rates, const Mat3& inertia);

// Desired payload angular acceleration that levels the payload and holds
// zero yaw: -kp e_R - kd w0 with e_R = vee(R0 - R0^T) / 2.
Vec3 payload_attitude_hold(const SystemState& x, const PayloadGains& g);

// u_bar solving Delta u_bar = v - b exactly and, in the least-squares
// sense within the null space of Delta, rot_b + rot_delta u_bar = alpha.
// Falls back to allocate() when the stacked map loses rank.
VecX allocate_with_attitude_hold(const PayloadLinearization& lin, const Vec3& v, const Vec3& alpha);

struct PayloadControllerOptions {
  // The position-only linearization leaves the payload rotation as
  // internal dynamics, which the minimum-norm allocation does not
  // stabilize. When set, the allocation also shapes the payload angular
  // acceleration through the null space of Delta; r0_ddot is unchanged.
  bool payload_attitude_hold = true;
  // Feed filtered finite differences of the TVC angles forward as the
  // desired Euler rates and accelerations. Off by default.
  bool attitude_feedforward = false;
  double feedforward_time_constant = 0.05;  // s
  double controller_period = 0.02;          // s
};

// Per-run memory of the payload controller, owned by the caller.
struct PayloadControllerMemory {
  std::vector<std::optional<TvcResult>> last_tvc;
  std::vector<Vec3> last_angles;
  std::vector<Vec3> filtered_rates;
  std::vector<Vec3> filtered_accels;
  bool primed = false;
};

struct PayloadControl {
  Vec3 v = Vec3::Zero();
  VecX u_bar;
  PayloadLinearization lin;
  std::vector<TvcResult> tvc;
  std::vector<AttitudeTarget> attitude_targets;
  std::vector<Vec3> attitude_T;
  Vec3 payload_alpha = Vec3::Zero();  // requested payload angular acceleration
  SystemInput input;
  int held_commands = 0;
};

class PayloadFblController {
 public:
  // `belief` is the controller's model of the rig; it may differ from the
  // plant (mass uncertainty studies).
  PayloadFblController(RigParams belief, PayloadGains gains, PayloadControllerOptions options = {});

  PayloadControl compute(const SystemState& x, const PayloadReference& ref, PayloadControllerMemory& memory) const;

  const RigParams& belief() const { return belief_; }
  const PBlocks& P() const { return p_; }
  const PayloadGains& gains() const { return gains_; }

 private:
  RigParams belief_;
  PBlocks p_;
  PayloadGains gains_;
  PayloadControllerOptions options_;
};

}  // namespace cotrans
