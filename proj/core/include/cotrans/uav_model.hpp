#pragma once

// Rigid-body quadrotor with thrust/torque inputs, in the 12-state standard
// form and in the 14-state extended form where thrust is the output of a
// double integrator (thrust zeta, thrust rate xi, input xi_dot).

#include <Eigen/Core>

#include "cotrans/math.hpp"

namespace cotrans {

using UavVector12 = Eigen::Matrix<double, 12, 1>;
using UavVector14 = Eigen::Matrix<double, 14, 1>;

struct UavParams {
  double mass = 1.5;
  Vec3 inertia{0.029, 0.029, 0.055};  // Ix, Iy, Iz
  double gravity = 9.81;

  // Throws ParameterError unless every field is finite and positive.
  void validate() const;
};

// Packed layout [r(3), yaw, pitch, roll, r_dot(3), p, q, r].
struct UavState12 {
  Vec3 position = Vec3::Zero();
  EulerZYX attitude;
  Vec3 velocity = Vec3::Zero();
  Vec3 rates = Vec3::Zero();

  UavVector12 pack() const;
  static UavState12 unpack(const UavVector12& x);
};

// Packed layout [r(3), yaw, pitch, roll, r_dot(3), zeta, xi, p, q, r].
struct ExtendedUavState {
  Vec3 position = Vec3::Zero();
  EulerZYX attitude;
  Vec3 velocity = Vec3::Zero();
  double thrust = 0.0;       // zeta [N]
  double thrust_rate = 0.0;  // xi [N/s]
  Vec3 rates = Vec3::Zero();

  UavVector14 pack() const;
  static ExtendedUavState unpack(const UavVector14& x);

  // Hover at a position: level attitude, thrust = m g.
  static ExtendedUavState hover(const Vec3& position, const UavParams& p);
};

namespace uav_index {
inline constexpr int kPos = 0;
inline constexpr int kYaw = 3;
inline constexpr int kPitch = 4;
inline constexpr int kRoll = 5;
inline constexpr int kVel = 6;
// Extended layout only.
inline constexpr int kThrust = 9;
inline constexpr int kThrustRate = 10;
inline constexpr int kRatesExt = 11;
// Standard layout only.
inline constexpr int kRates = 9;
}  // namespace uav_index

// U = [f_t, tau_x, tau_y, tau_z].
using UavInput = Vec4;
// U_bar = [xi_dot, tau_x, tau_y, tau_z].
using ExtendedUavInput = Vec4;

// Derivative of the standard 12-state model. Throws
// SingularConfigurationError at pitch = +-pi/2.
UavVector12 uav_rhs(const UavVector12& x, const UavInput& u, const UavParams& p);

// Derivative of the extended 14-state model.
UavVector14 ext_uav_rhs(const UavVector14& x, const ExtendedUavInput& u, const UavParams& p);

// Thrust-projection vector o = -(1/m) R(Theta) e3; translational
// acceleration is g e3 + o * thrust.
Vec3 thrust_projection(const EulerZYX& attitude, double mass);

}  // namespace cotrans
