#pragma once

// Rigid payload carried by N UAVs through vertical links with spherical
// joints at the UAV end. The payload translational and rotational
// accelerations follow from
//
//   [ m_T I3        -sum m_i hat(rho_i) ] [ v0_dot ]   [ Q_trans ]
//   [ sum m_i hat(rho_i)     Jbar0      ] [ w0_dot ] = [ Q_rot   ]
//
// with Jbar0 = J0 - sum m_i hat(rho_i)^2 and P the inverse of the block
// matrix. Each UAV's attitude evolves independently under its own torque.
//
// Thrust sign: f_i = -f_t,i R_i e3, so positive thrust lifts in NED.

#include <vector>

#include "cotrans/math.hpp"

namespace cotrans {

struct UavLink {
  double mass = 1.5;
  Mat3 inertia = Vec3(0.029, 0.029, 0.055).asDiagonal();
  Vec3 attachment = Vec3::Zero();  // rho_i, payload frame [m]
  double link_length = 3.2;        // l_i [m]
};

struct RigParams {
  double payload_mass = 3.0;
  Mat3 payload_inertia = Vec3(0.556, 0.556, 0.556).asDiagonal();
  double gravity = 9.81;
  std::vector<UavLink> uavs;

  int uav_count() const { return static_cast<int>(uavs.size()); }
  double total_mass() const;

  // Masses positive, inertias symmetric positive definite, attachment
  // points pairwise distinct, at least one UAV. Throws ParameterError.
  void validate() const;

  // Four UAVs on a 1 m square, 0.125 m above the payload centre of mass.
  static RigParams table_one();
};

struct PBlocks {
  Mat3 p11, p12, p21, p22;
  Mat3 apparent_inertia;
  Vec3 mass_moment;  // sum m_i rho_i
  double total_mass = 0.0;

  Eigen::Matrix<double, 6, 6> full() const;
};

// Jbar0 = J0 - sum m_i hat(rho_i)^2. Throws ParameterError if not SPD.
Mat3 apparent_inertia(const RigParams& p);

// The 6x6 generalized mass matrix before inversion.
Eigen::Matrix<double, 6, 6> payload_mass_matrix(const RigParams& p);

PBlocks assemble_P(const RigParams& p);

struct UavAttitudeState {
  EulerZYX attitude;
  Vec3 rates = Vec3::Zero();
};

// Packed layout [r0, v0, Theta0, w0, (Theta_i, w_i) for each UAV].
// v0 and w0 are expressed in the payload frame.
struct SystemState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  EulerZYX attitude;
  Vec3 rates = Vec3::Zero();
  std::vector<UavAttitudeState> uavs;

  VecX pack() const;
  static SystemState unpack(const VecX& x);
  static int packed_size(int uav_count) { return 12 + 6 * uav_count; }
};

namespace sys_index {
inline constexpr int kPos = 0;
inline constexpr int kVel = 3;
inline constexpr int kAtt = 6;
inline constexpr int kRates = 9;
inline int uav_att(int i) { return 12 + 6 * i; }
inline int uav_rates(int i) { return 12 + 6 * i + 3; }
}  // namespace sys_index

struct UavCommand {
  double thrust = 0.0;  // f_t [N]
  Vec3 torque = Vec3::Zero();
};

// Stacked [f_t, tau_x, tau_y, tau_z] per UAV.
using SystemInput = std::vector<UavCommand>;
VecX pack_input(const SystemInput& u);

struct DisturbanceForce {
  Vec3 force = Vec3::Zero();  // inertial frame, applied at the payload centre of mass
};

struct UavKinematics {
  Vec3 position;
  Vec3 velocity;
};

// r_i = r0 + R0 (rho_i - l_i e3), r_i_dot = R0 v0 + R0 hat(w0) (rho_i - l_i e3).
std::vector<UavKinematics> uav_positions(const SystemState& x, const RigParams& p);

// Inertial force of UAV i: -f_t R_i e3.
Vec3 uav_force(const EulerZYX& attitude, double thrust);

// State derivative with P precomputed for one parameter set.
class PayloadDynamics {
 public:
  explicit PayloadDynamics(RigParams params);

  VecX rhs(const VecX& x, const SystemInput& u, const DisturbanceForce& d = {}) const;

  const RigParams& params() const { return params_; }
  const PBlocks& P() const { return p_; }

 private:
  RigParams params_;
  PBlocks p_;
};

// Convenience form that assembles P on every call.
VecX system_rhs(const VecX& x, const SystemInput& u, const RigParams& p, const DisturbanceForce& d = {});

// Kinetic plus potential energy with each UAV mass lumped at its
// attachment point, the mass distribution the equations of motion encode.
double total_energy(const SystemState& x, const RigParams& p);

// Inertial linear momentum m_T r0_dot + sum m_i R0 (w0 x rho_i).
Vec3 linear_momentum(const SystemState& x, const RigParams& p);

}  // namespace cotrans
