#include "cotrans/payload_fbl.hpp"

#include <cmath>
#include <sstream>

#include "cotrans/errors.hpp"

namespace cotrans {

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kAllocationTolerance = 1e-9;

}  // namespace

PayloadLinearization payload_delta_b(const SystemState& x, const RigParams& params, const PBlocks& p) {
  const int n = params.uav_count();
  const Mat3 rot0 = rot_zyx(x.attitude);
  const Vec3& v0 = x.velocity;
  const Vec3& w0 = x.rates;
  const Vec3 gravity_body = params.gravity * rot0.transpose() * kUnitZ;

  PayloadLinearization lin;
  lin.delta.resize(3, 3 * n);
  Vec3 drift_trans = -p.total_mass * w0.cross(v0) + p.total_mass * gravity_body;
  Vec3 drift_rot = -w0.cross(p.apparent_inertia * w0);
  for (int i = 0; i < n; ++i) {
    const auto& link = params.uavs[i];
    const Vec3& rho = link.attachment;
    lin.delta.block<3, 3>(0, 3 * i) = rot0 * (p.p11 + p.p12 * hat(rho));
    drift_trans -= link.mass * w0.cross(w0.cross(rho));
    drift_rot += -link.mass * rho.cross(w0.cross(v0)) + rho.cross(link.mass * gravity_body);
  }
  const Vec3 fbar = p.p11 * drift_trans + p.p12 * drift_rot;
  lin.b = rot0 * w0.cross(v0) + rot0 * fbar;
  lin.rot_delta.resize(3, 3 * n);
  for (int i = 0; i < n; ++i) {
    lin.rot_delta.block<3, 3>(0, 3 * i) = p.p21 + p.p22 * hat(params.uavs[i].attachment);
  }
  lin.rot_b = p.p21 * drift_trans + p.p22 * drift_rot;

  Eigen::JacobiSVD<MatX> svd(lin.delta);
  const auto& s = svd.singularValues();
  if (!(s(0) > 0.0) || s(2) / s(0) < kRankTolerance) {
    std::ostringstream msg;
    msg << "payload_delta_b: decoupling matrix lost rank (sigma = " << s.transpose()
        << "); rig parameters are corrupted";
    throw Error(msg.str());
  }
  return lin;
}

PayloadLinearization payload_delta_b(const SystemState& x, const RigParams& params) {
  return payload_delta_b(x, params, assemble_P(params));
}

Vec3 payload_tracking_v(const SystemState& x, const PayloadReference& ref, const PayloadGains& g) {
  const Vec3 e = ref.position[0] - x.position;
  const Vec3 e_dot = ref.position[1] - rot_zyx(x.attitude) * x.velocity;
  return ref.position[2] + g.position[0] * e_dot + g.position[1] * e;
}

VecX allocate(const PayloadLinearization& lin, const Vec3& v) {
  const Vec3 demand = v - lin.b;
  const VecX u_bar = right_pinv(lin.delta) * demand;
  const double residual = (lin.delta * u_bar - demand).norm();
  if (residual > kAllocationTolerance * std::max(1.0, demand.norm())) {
    std::ostringstream msg;
    msg << "allocate: residual " << residual << " exceeds tolerance";
    throw DegenerateAllocationError(msg.str());
  }
  return u_bar;
}

Vec3 payload_attitude_hold(const SystemState& x, const PayloadGains& g) {
  const Mat3 rot0 = rot_zyx(x.attitude);
  const Vec3 e_r = 0.5 * vee(rot0 - rot0.transpose());
  return -g.payload_attitude[1] * e_r - g.payload_attitude[0] * x.rates;
}

VecX allocate_with_attitude_hold(const PayloadLinearization& lin, const Vec3& v, const Vec3& alpha) {
  const auto cols = lin.delta.cols();
  if (lin.rot_delta.cols() != cols) return allocate(lin, v);
  // Minimum-norm solution plus the null-space correction that best meets
  // the rotational demand.
  const VecX u_mn = allocate(lin, v);
  const MatX null_proj = MatX::Identity(cols, cols) - right_pinv(lin.delta) * lin.delta;
  const MatX a = lin.rot_delta * null_proj;
  const Vec3 demand = alpha - lin.rot_b - lin.rot_delta * u_mn;
  Eigen::JacobiSVD<MatX> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-9);
  if (svd.rank() == 0) return u_mn;
  VecX u = u_mn + null_proj * svd.solve(demand);
  const Vec3 residual = lin.delta * u - (v - lin.b);
  if (residual.norm() > kAllocationTolerance * std::max(1.0, (v - lin.b).norm())) {
    throw DegenerateAllocationError("allocate_with_attitude_hold: position residual exceeds tolerance");
  }
  return u;
}

TvcResult thrust_vectoring(const Vec3& force, const std::optional<TvcResult>& previous) {
  const double magnitude = force.norm();
  if (!(magnitude > kTvcMinForce)) {
    TvcResult held = previous.value_or(TvcResult{});
    held.thrust = magnitude;
    held.held_previous = true;
    return held;
  }
  const Vec3 heading(1.0, 0.0, 0.0);
  const Vec3 z_axis = -force / magnitude;
  const Vec3 y_raw = z_axis.cross(heading);
  if (y_raw.norm() < 1e-9) {
    throw DegenerateAllocationError("thrust_vectoring: commanded force is parallel to the zero-yaw heading");
  }
  const Vec3 y_axis = y_raw.normalized();
  const Vec3 x_axis = y_axis.cross(z_axis).normalized();

  TvcResult out;
  out.thrust = magnitude;
  out.desired_rotation.col(0) = x_axis;
  out.desired_rotation.col(1) = y_axis;
  out.desired_rotation.col(2) = z_axis;
  const Mat3& r = out.desired_rotation;
  out.roll = std::atan2(r(2, 1), r(2, 2));
  out.pitch = std::atan2(-r(2, 0), std::hypot(r(2, 1), r(2, 2)));
  out.yaw = 0.0;
  return out;
}

Vec3 attitude_tracking_T(const EulerZYX& attitude, const Vec3& rates, const AttitudeTarget& target,
                         const PayloadGains& g) {
  const Vec3 angles = attitude.as_vector();
  const Vec3 euler_rates = euler_rate_matrix(attitude) * rates;
  Vec3 e;
  for (int k = 0; k < 3; ++k) e(k) = wrap_angle(target.angles(k) - angles(k));
  const Vec3 e_dot = target.rates - euler_rates;
  return target.accels + g.attitude[0] * e_dot + g.attitude[1] * e;
}

Vec3 torque_from_T(const Vec3& T, const EulerZYX& attitude, const Vec3& rates, const Mat3& inertia) {
  const Mat3 rate_map = euler_rate_matrix(attitude);
  const Mat3 rate_map_dot = euler_rate_matrix_dot(attitude, rate_map * rates);
  const Vec3 tau_bar = rate_map.partialPivLu().solve(T - rate_map_dot * rates);
  return inertia * tau_bar + rates.cross(inertia * rates);
}

PayloadFblController::PayloadFblController(RigParams belief, PayloadGains gains, PayloadControllerOptions options)
    : belief_(std::move(belief)), p_(assemble_P(belief_)), gains_(gains), options_(options) {}

PayloadControl PayloadFblController::compute(const SystemState& x, const PayloadReference& ref,
                                             PayloadControllerMemory& memory) const {
  const int n = belief_.uav_count();
  if (static_cast<int>(x.uavs.size()) != n) {
    throw ParameterError("PayloadFblController: state UAV count does not match the rig");
  }
  if (static_cast<int>(memory.last_tvc.size()) != n) {
    memory.last_tvc.assign(n, std::nullopt);
    memory.last_angles.assign(n, Vec3::Zero());
    memory.filtered_rates.assign(n, Vec3::Zero());
    memory.filtered_accels.assign(n, Vec3::Zero());
    memory.primed = false;
  }

  PayloadControl out;
  out.lin = payload_delta_b(x, belief_, p_);
  out.v = payload_tracking_v(x, ref, gains_);
  if (options_.payload_attitude_hold) {
    out.payload_alpha = payload_attitude_hold(x, gains_);
    out.u_bar = allocate_with_attitude_hold(out.lin, out.v, out.payload_alpha);
  } else {
    out.u_bar = allocate(out.lin, out.v);
  }

  const Mat3 rot0 = rot_zyx(x.attitude);
  const double period = options_.controller_period;
  const double blend = period / (options_.feedforward_time_constant + period);

  out.tvc.resize(n);
  out.attitude_targets.resize(n);
  out.attitude_T.resize(n);
  out.input.resize(n);
  for (int i = 0; i < n; ++i) {
    const Vec3 force = rot0 * out.u_bar.segment<3>(3 * i);
    out.tvc[i] = thrust_vectoring(force, memory.last_tvc[i]);
    if (out.tvc[i].held_previous) ++out.held_commands;
    memory.last_tvc[i] = out.tvc[i];

    AttitudeTarget& target = out.attitude_targets[i];
    target.angles = out.tvc[i].desired_angles();
    if (options_.attitude_feedforward) {
      if (memory.primed) {
        Vec3 raw_rate;
        for (int k = 0; k < 3; ++k) raw_rate(k) = wrap_angle(target.angles(k) - memory.last_angles[i](k)) / period;
        const Vec3 prev_rate = memory.filtered_rates[i];
        memory.filtered_rates[i] += blend * (raw_rate - memory.filtered_rates[i]);
        const Vec3 raw_accel = (memory.filtered_rates[i] - prev_rate) / period;
        memory.filtered_accels[i] += blend * (raw_accel - memory.filtered_accels[i]);
      }
      target.rates = memory.filtered_rates[i];
      target.accels = memory.filtered_accels[i];
    }
    memory.last_angles[i] = target.angles;

    const auto& uav = x.uavs[i];
    out.attitude_T[i] = attitude_tracking_T(uav.attitude, uav.rates, target, gains_);
    out.input[i].thrust = out.tvc[i].thrust;
    out.input[i].torque = torque_from_T(out.attitude_T[i], uav.attitude, uav.rates, belief_.uavs[i].inertia);
  }
  memory.primed = true;
  return out;
}

}  // namespace cotrans
