#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cotrans/errors.hpp"
#include "cotrans/payload_fbl.hpp"

using namespace cotrans;

namespace {

constexpr double kDeg = M_PI / 180.0;

SystemState random_state(std::mt19937_64& rng, int n, double max_angle = 60.0 * kDeg) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SystemState s;
  s.position = Vec3(u(rng), u(rng), u(rng) - 5.0);
  s.velocity = Vec3(u(rng), u(rng), u(rng));
  s.attitude = {max_angle * u(rng), max_angle * u(rng), max_angle * u(rng)};
  s.rates = Vec3(u(rng), u(rng), u(rng));
  for (int i = 0; i < n; ++i) {
    s.uavs.push_back({{max_angle * u(rng), max_angle * u(rng), max_angle * u(rng)}, Vec3(u(rng), u(rng), u(rng))});
  }
  return s;
}

SystemState level_state(int n) {
  SystemState s;
  s.uavs.resize(n);
  return s;
}

// Payload translational acceleration r0_ddot = R0 (w0 x v0 + v0_dot) from the plant.
Vec3 plant_acceleration(const SystemState& s, const SystemInput& u, const RigParams& p) {
  const VecX d = system_rhs(s.pack(), u, p);
  return rot_zyx(s.attitude) * (s.rates.cross(s.velocity) + d.segment<3>(sys_index::kVel));
}

}  // namespace

TEST(PayloadFbl, DecouplingBlocksAtLevelAttitude) {
  const auto rig = RigParams::table_one();
  const auto p = assemble_P(rig);
  const auto lin = payload_delta_b(level_state(4), rig, p);
  ASSERT_EQ(lin.delta.cols(), 12);
  for (int i = 0; i < 4; ++i) {
    const Mat3 expected = p.p11 + p.p12 * hat(rig.uavs[i].attachment);
    EXPECT_LT((lin.delta.block<3, 3>(0, 3 * i) - expected).cwiseAbs().maxCoeff(), 1e-14);
  }
  // At rest the drift is the gravity-affine term alone.
  const Vec3 drift = p.p11 * (rig.gravity * p.total_mass * Vec3::UnitZ()) +
                     p.p12 * p.mass_moment.cross(rig.gravity * Vec3::UnitZ());
  EXPECT_LT((lin.b - drift).norm(), 1e-12);
}

TEST(PayloadFbl, DecouplingHasFullRankAcrossRandomStates) {
  const auto rig = RigParams::table_one();
  const auto p = assemble_P(rig);
  std::mt19937_64 rng(31);
  for (int k = 0; k < 2000; ++k) {
    const auto lin = payload_delta_b(random_state(rng, 4), rig, p);
    Eigen::JacobiSVD<MatX> svd(lin.delta);
    EXPECT_GT(svd.singularValues()(2), 0.0);
    const MatX id = lin.delta * right_pinv(lin.delta);
    EXPECT_LT((id - MatX::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(PayloadFbl, DecouplingAndDriftPredictPlantAcceleration) {
  const auto rig = RigParams::table_one();
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> f(10.0, 30.0);
  for (int k = 0; k < 50; ++k) {
    const SystemState s = random_state(rng, 4);
    SystemInput u;
    VecX u_bar(12);
    const Mat3 r0 = rot_zyx(s.attitude);
    for (int i = 0; i < 4; ++i) {
      u.push_back({f(rng), Vec3::Zero()});
      u_bar.segment<3>(3 * i) = r0.transpose() * uav_force(s.uavs[i].attitude, u[i].thrust);
    }
    const auto lin = payload_delta_b(s, rig);
    EXPECT_LT((lin.b + lin.delta * u_bar - plant_acceleration(s, u, rig)).norm(), 1e-10);
    const VecX d = system_rhs(s.pack(), u, rig);
    EXPECT_LT((lin.rot_b + lin.rot_delta * u_bar - d.segment<3>(sys_index::kRates)).norm(), 1e-10);
  }
}

TEST(PayloadFbl, TrackingLaw) {
  SystemState s = level_state(4);
  const PayloadGains g;
  EXPECT_EQ(payload_tracking_v(s, PayloadReference{}, g), Vec3::Zero());
  PayloadReference ref;
  ref.position[0] = Vec3(1.0, 0.0, 0.0);
  EXPECT_NEAR(payload_tracking_v(s, ref, g)(0), 5.0, 1e-15);
  // Velocity error uses the inertial velocity R0 v0.
  s.attitude.yaw = M_PI / 2;
  s.velocity = Vec3(1.0, 0.0, 0.0);
  const Vec3 v = payload_tracking_v(s, PayloadReference{}, g);
  EXPECT_NEAR(v(1), -g.position[0], 1e-12);
  EXPECT_NEAR(v(0), 0.0, 1e-12);
}

TEST(PayloadFbl, AllocationCancelsDrift) {
  const auto rig = RigParams::table_one();
  const auto lin = payload_delta_b(level_state(4), rig);
  EXPECT_LT(allocate(lin, lin.b).norm(), 1e-12);
}

TEST(PayloadFbl, AllocationReducesToScaledErrorForSingleCentredUav) {
  RigParams rig;
  rig.uavs.push_back(UavLink{});
  const auto lin = payload_delta_b(level_state(1), rig);
  const Vec3 v(0.3, -0.2, 0.1);
  EXPECT_LT((allocate(lin, v) - rig.total_mass() * (v - lin.b)).norm(), 1e-12);
}

TEST(PayloadFbl, AllocationHasMinimumNorm) {
  const auto rig = RigParams::table_one();
  std::mt19937_64 rng(41);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const auto lin = payload_delta_b(random_state(rng, 4), rig);
    const Vec3 v(n(rng), n(rng), n(rng));
    const VecX u = allocate(lin, v);
    EXPECT_LT((lin.b + lin.delta * u - v).norm(), 1e-9);
    const MatX null_proj = MatX::Identity(12, 12) - right_pinv(lin.delta) * lin.delta;
    VecX z(12);
    for (int i = 0; i < 12; ++i) z(i) = n(rng);
    const VecX other = u + null_proj * z;
    EXPECT_LT((lin.b + lin.delta * other - v).norm(), 1e-9);
    EXPECT_GE(other.norm(), u.norm() - 1e-12);
  }
}

TEST(PayloadFbl, AttitudeHoldKeepsPositionExactAndMeetsRotationalDemand) {
  const auto rig = RigParams::table_one();
  std::mt19937_64 rng(43);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const auto lin = payload_delta_b(random_state(rng, 4), rig);
    const Vec3 v(n(rng), n(rng), n(rng));
    const Vec3 alpha(n(rng), n(rng), n(rng));
    const VecX u = allocate_with_attitude_hold(lin, v, alpha);
    EXPECT_LT((lin.b + lin.delta * u - v).norm(), 1e-9);
    EXPECT_LT((lin.rot_b + lin.rot_delta * u - alpha).norm(), 1e-8);
  }
}

TEST(PayloadFbl, AttitudeHoldTargetsLevelZeroYaw) {
  SystemState s = level_state(4);
  const PayloadGains g;
  EXPECT_EQ(payload_attitude_hold(s, g), Vec3::Zero());
  s.attitude.roll = 0.01;
  s.rates = Vec3(0.0, 0.2, 0.0);
  const Vec3 a = payload_attitude_hold(s, g);
  EXPECT_NEAR(a(0), -g.payload_attitude[1] * std::sin(0.01), 1e-12);
  EXPECT_NEAR(a(1), -g.payload_attitude[0] * 0.2, 1e-12);
}

TEST(PayloadFbl, ThrustVectoringLift) {
  const auto t = thrust_vectoring(Vec3(0, 0, -22.07));
  EXPECT_NEAR(t.thrust, 22.07, 1e-12);
  EXPECT_LT((t.desired_rotation - Mat3::Identity()).norm(), 1e-15);
  EXPECT_EQ(t.roll, 0.0);
  EXPECT_EQ(t.pitch, 0.0);
  EXPECT_EQ(t.yaw, 0.0);
  EXPECT_FALSE(t.held_previous);
}

TEST(PayloadFbl, ThrustVectoringTiltTowardX) {
  const double a = 5.0 * kDeg;
  const Vec3 f = 22.0 * Vec3(std::sin(a), 0.0, -std::cos(a));
  const auto t = thrust_vectoring(f);
  // Pushing toward +x in NED is nose-down: negative pitch.
  EXPECT_NEAR(t.pitch, -a, 1e-12);
  EXPECT_NEAR(t.roll, 0.0, 1e-12);
  // Geometric oracle: the desired attitude reproduces the force.
  EXPECT_LT((uav_force(EulerZYX{t.yaw, t.pitch, t.roll}, t.thrust) - f).norm(), 1e-12);
  EXPECT_LT((t.desired_rotation * t.desired_rotation.transpose() - Mat3::Identity()).norm(), 1e-14);
}

TEST(PayloadFbl, ThrustVectoringAlignsBodyZWithCommand) {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 200; ++k) {
    const Vec3 f(u(rng), u(rng), -20.0 + u(rng));
    const auto t = thrust_vectoring(f);
    const Mat3& rd = t.desired_rotation;
    EXPECT_LT((rd * rd.transpose() - Mat3::Identity()).norm(), 1e-12);
    EXPECT_NEAR(rd.determinant(), 1.0, 1e-12);
    EXPECT_LT((-t.thrust * rd.col(2) - f).norm(), 1e-12);
    // The body y axis is orthogonal to the heading [1, 0, 0].
    EXPECT_NEAR(rd(0, 1), 0.0, 1e-14);
    // Roll and pitch come from the bottom row, which is independent of yaw.
    const Mat3 r = rot_zyx(EulerZYX{0.0, t.pitch, t.roll});
    EXPECT_LT((r.row(2) - rd.row(2)).norm(), 1e-12);
  }
}

TEST(PayloadFbl, ZeroYawExtractionTiltsThrustAtSecondOrder) {
  // Imposing zero yaw on the extracted roll and pitch rotates the thrust
  // direction by an angle of order roll * pitch.
  for (double deg : {1.0, 3.0, 10.0}) {
    const double a = deg * kDeg;
    const Vec3 f = 20.0 * Vec3(std::sin(a), std::sin(a), -1.0).normalized();
    const auto t = thrust_vectoring(f);
    const Vec3 realized = uav_force(EulerZYX{0.0, t.pitch, t.roll}, t.thrust);
    const double angle = std::acos(std::clamp(realized.dot(f) / (realized.norm() * f.norm()), -1.0, 1.0));
    EXPECT_LT(angle, a * a) << deg << " deg";
  }
}

TEST(PayloadFbl, ThrustVectoringIsScaleInvariant) {
  const Vec3 f(1.0, -2.0, -20.0);
  const auto a = thrust_vectoring(f);
  const auto b = thrust_vectoring(3.5 * f);
  EXPECT_LT((a.desired_rotation - b.desired_rotation).norm(), 1e-14);
  EXPECT_NEAR(b.thrust, 3.5 * a.thrust, 1e-12);
}

TEST(PayloadFbl, ThrustVectoringHoldsBelowFloor) {
  const auto prev = thrust_vectoring(Vec3(1.0, 1.0, -20.0));
  const auto held = thrust_vectoring(Vec3(1e-7, 0.0, 0.0), prev);
  EXPECT_TRUE(held.held_previous);
  EXPECT_EQ(held.roll, prev.roll);
  EXPECT_EQ(held.pitch, prev.pitch);
  const auto level = thrust_vectoring(Vec3::Zero());
  EXPECT_TRUE(level.held_previous);
  EXPECT_EQ(level.desired_rotation, Mat3::Identity());
}

TEST(PayloadFbl, ThrustVectoringRejectsHeadingParallelForce) {
  EXPECT_THROW(thrust_vectoring(Vec3(3.0, 0.0, 0.0)), DegenerateAllocationError);
}

TEST(PayloadFbl, AttitudeTrackingLaw) {
  const PayloadGains g;
  AttitudeTarget target;
  EXPECT_EQ(attitude_tracking_T({}, Vec3::Zero(), target, g), Vec3::Zero());
  target.angles = Vec3(0.0, 0.0, 0.1);
  EXPECT_NEAR(attitude_tracking_T({}, Vec3::Zero(), target, g)(2), 8.5, 1e-12);
  target = {};
  target.accels = Vec3(0.1, 0.2, 0.3);
  EXPECT_LT((attitude_tracking_T({}, Vec3::Zero(), target, g) - target.accels).norm(), 1e-15);
}

TEST(PayloadFbl, TorqueFromTAtRest) {
  const Mat3 j = Vec3(0.029, 0.029, 0.055).asDiagonal();
  const Vec3 T(1.0, 2.0, 3.0);
  // At the origin the rate map is a permutation: (yaw, pitch, roll) = (r, q, p).
  const Vec3 tau = torque_from_T(T, {}, Vec3::Zero(), j);
  EXPECT_LT((tau - j * Vec3(3.0, 2.0, 1.0)).norm(), 1e-14);
}

TEST(PayloadFbl, TorqueFromTRealizesEulerAccelerations) {
  const Mat3 j = Vec3(0.029, 0.029, 0.055).asDiagonal();
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const EulerZYX att{u(rng), u(rng), u(rng)};
    const Vec3 w(2 * u(rng), 2 * u(rng), 2 * u(rng));
    const Vec3 T = k % 2 ? Vec3::Zero() : Vec3(u(rng), u(rng), u(rng));
    const Vec3 tau = torque_from_T(T, att, w, j);
    // Theta_ddot = R_dot w + R w_dot with w_dot from Euler's equations.
    const Vec3 w_dot = j.inverse() * (tau - w.cross(j * w));
    const Mat3 r = euler_rate_matrix(att);
    const Vec3 theta_dd = euler_rate_matrix_dot(att, r * w) * w + r * w_dot;
    EXPECT_LT((theta_dd - T).norm(), 1e-10);
  }
}

TEST(PayloadFbl, ControllerLinearizesWhenAttitudesMatchCommands) {
  const auto rig = RigParams::table_one();
  const PayloadFblController ctrl(rig, PayloadGains{});
  std::mt19937_64 rng(59);
  for (int k = 0; k < 20; ++k) {
    SystemState s = random_state(rng, 4, 10.0 * kDeg);
    PayloadReference ref;
    ref.position[0] = s.position + Vec3(0.3, -0.1, 0.2);
    ref.position[2] = Vec3(0.1, 0.0, -0.1);
    PayloadControllerMemory mem;
    const auto out = ctrl.compute(s, ref, mem);
    // Attitudes realizing the desired rotations exactly (including their implied yaw).
    for (int i = 0; i < 4; ++i) s.uavs[i].attitude = euler_from_rotation(out.tvc[i].desired_rotation);
    EXPECT_LT((plant_acceleration(s, out.input, rig) - out.v).norm(), 1e-9);
    const VecX d = system_rhs(s.pack(), out.input, rig);
    EXPECT_LT((d.segment<3>(sys_index::kRates) - out.payload_alpha).norm(), 1e-8);
  }
}

TEST(PayloadFbl, ControllerRejectsMismatchedState) {
  const PayloadFblController ctrl(RigParams::table_one(), PayloadGains{});
  PayloadControllerMemory mem;
  EXPECT_THROW(ctrl.compute(level_state(3), PayloadReference{}, mem), ParameterError);
}
