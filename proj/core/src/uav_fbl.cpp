#include "cotrans/uav_fbl.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cotrans/errors.hpp"

namespace cotrans {

using namespace uav_index;

namespace {

constexpr double kMaxDeltaCondition = 1e10;

std::string describe_state(const UavVector14& x) {
  std::ostringstream os;
  os << "x = [" << x.transpose() << "]";
  return os.str();
}

struct Kinematics {
  EulerZYX att;
  Mat3 rot;
  Vec3 w;
  double zeta;
  double xi;
};

Kinematics unpack_kinematics(const UavVector14& x) {
  Kinematics k;
  k.att = EulerZYX::from_vector(x.segment<3>(kYaw));
  k.rot = rot_zyx(k.att);
  k.w = x.segment<3>(kRatesExt);
  k.zeta = x(kThrust);
  k.xi = x(kThrustRate);
  return k;
}

}  // namespace

UavOutputDerivatives uav_output_derivatives(const UavVector14& x, const UavParams& p) {
  const Kinematics k = unpack_kinematics(x);
  if (k.zeta == 0.0) {
    throw SingularLinearizationError("uav_output_derivatives: zero thrust state, " + describe_state(x));
  }
  const Mat3 rate_map = euler_rate_matrix(k.att);
  const Vec3 body_z = k.rot.col(2);

  UavOutputDerivatives y;
  y.position[0] = x.segment<3>(kPos);
  y.position[1] = x.segment<3>(kVel);
  y.position[2] = p.gravity * kUnitZ - (k.zeta / p.mass) * body_z;
  y.position[3] = -(k.xi / p.mass) * body_z - (k.zeta / p.mass) * (k.rot * k.w.cross(kUnitZ));
  y.yaw = x(kYaw);
  y.yaw_rate = rate_map.row(0).dot(k.w);
  return y;
}

Linearization uav_delta_b(const UavVector14& x, const UavParams& p) {
  const Kinematics k = unpack_kinematics(x);
  if (k.zeta == 0.0) {
    throw SingularLinearizationError("uav_delta_b: zero thrust state, " + describe_state(x));
  }
  const Mat3 rate_map = euler_rate_matrix(k.att);
  const Mat3 rate_map_dot = euler_rate_matrix_dot(k.att, rate_map * k.w);
  const Vec3 inv_inertia = p.inertia.cwiseInverse();
  const Vec3 drift_acc = -inv_inertia.cwiseProduct(k.w.cross(p.inertia.cwiseProduct(k.w)));
  const Vec3 w_x_e3 = k.w.cross(kUnitZ);
  const Mat3 hat_e3 = hat(kUnitZ);

  Linearization lin;
  lin.b.head<3>() = -(1.0 / p.mass) * k.rot *
                    (2.0 * k.xi * w_x_e3 + k.zeta * k.w.cross(w_x_e3) - k.zeta * hat_e3 * drift_acc);
  lin.b(3) = rate_map_dot.row(0).dot(k.w) + rate_map.row(0).dot(drift_acc);

  lin.delta.block<3, 1>(0, 0) = -(1.0 / p.mass) * k.rot.col(2);
  lin.delta.block<3, 3>(0, 1) = (k.zeta / p.mass) * k.rot * hat_e3 * inv_inertia.asDiagonal();
  lin.delta(3, 0) = 0.0;
  lin.delta.block<1, 3>(3, 1) = rate_map.row(0) * inv_inertia.asDiagonal();

  Eigen::JacobiSVD<Mat4> svd(lin.delta);
  const auto& s = svd.singularValues();
  if (!(s(3) > 0.0) || s(0) / s(3) > kMaxDeltaCondition) {
    std::ostringstream msg;
    msg << "uav_delta_b: decoupling matrix is singular (cond = " << (s(3) > 0.0 ? s(0) / s(3) : INFINITY)
        << "), " << describe_state(x);
    throw SingularLinearizationError(msg.str());
  }
  return lin;
}

Vec4 uav_tracking_v(const UavOutputDerivatives& y, const UavReference& ref, const UavGains& g) {
  const auto& bp = g.position;
  Vec4 v;
  v.head<3>() = ref.position[4] + bp[0] * (ref.position[3] - y.position[3]) +
                bp[1] * (ref.position[2] - y.position[2]) + bp[2] * (ref.position[1] - y.position[1]) +
                bp[3] * (ref.position[0] - y.position[0]);
  const double e_yaw = wrap_angle(ref.yaw[0] - y.yaw);
  const double e_yaw_rate = ref.yaw[1] - y.yaw_rate;
  v(3) = ref.yaw[2] + g.yaw[0] * e_yaw_rate + g.yaw[1] * e_yaw;
  return v;
}

ExtendedUavInput uav_input_from_v(const Linearization& lin, const Vec4& v) {
  Eigen::FullPivLU<Mat4> lu(lin.delta);
  if (!lu.isInvertible()) {
    throw SingularLinearizationError("uav_input_from_v: decoupling matrix is not invertible");
  }
  return lu.solve(v - lin.b);
}

UavFblController::UavFblController(UavParams params, UavGains gains, UavGuardBand guard)
    : params_(params), gains_(gains), guard_(guard) {
  params_.validate();
}

UavControl UavFblController::compute(const UavVector14& x, const UavReference& ref) const {
  const double min_thrust = guard_.min_thrust_fraction * params_.mass * params_.gravity;
  const double max_tilt = std::numbers::pi / 2.0 - guard_.tilt_margin;
  if (x(kThrust) < min_thrust) {
    throw SingularLinearizationError("UavFblController: thrust state " + std::to_string(x(kThrust)) +
                                     " N below guard band, " + describe_state(x));
  }
  if (std::abs(x(kPitch)) > max_tilt || std::abs(x(kRoll)) > max_tilt) {
    throw SingularLinearizationError("UavFblController: tilt outside guard band, " + describe_state(x));
  }
  UavControl out;
  out.lin = uav_delta_b(x, params_);
  out.v = uav_tracking_v(uav_output_derivatives(x, params_), ref, gains_);
  out.input = uav_input_from_v(out.lin, out.v);
  return out;
}

UavVector14 UavFblController::engage(const UavState12& s) const {
  ExtendedUavState e;
  e.position = s.position;
  e.attitude = s.attitude;
  e.velocity = s.velocity;
  e.rates = s.rates;
  e.thrust = params_.mass * params_.gravity;
  e.thrust_rate = 0.0;
  return e.pack();
}

}  // namespace cotrans
