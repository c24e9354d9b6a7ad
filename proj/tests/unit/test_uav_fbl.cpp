#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cotrans/errors.hpp"
#include "cotrans/uav_fbl.hpp"
#include "lie_oracle.hpp"

using namespace cotrans;

namespace {

UavVector14 random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  UavVector14 x;
  for (int i = 0; i < 14; ++i) x(i) = u(rng);
  x(uav_index::kYaw) *= 3.0;
  x(uav_index::kThrust) = 8.0 + 12.0 * std::abs(u(rng));
  x(uav_index::kThrustRate) *= 5.0;
  return x;
}

// Central difference of a state function along the flow x_dot = f(x, u).
template <typename F>
auto along_flow(F&& fn, const UavVector14& x, const ExtendedUavInput& u, const UavParams& p, double h = 1e-6) {
  const UavVector14 d = ext_uav_rhs(x, u, p);
  return ((fn(UavVector14(x + h * d)) - fn(UavVector14(x - h * d))) / (2.0 * h)).eval();
}

}  // namespace

TEST(UavFbl, ClosedFormMatchesLieDerivativeOracle) {
  const UavParams p;
  std::mt19937_64 rng(3);
  for (int k = 0; k < 100; ++k) {
    const UavVector14 x = random_state(rng);
    const auto lin = uav_delta_b(x, p);
    const auto ref = oracle::delta_b(x, p);
    const double scale_d = std::max(1.0, ref.delta.cwiseAbs().maxCoeff());
    const double scale_b = std::max(1.0, ref.b.cwiseAbs().maxCoeff());
    EXPECT_LT((lin.delta - ref.delta).cwiseAbs().maxCoeff() / scale_d, 1e-6) << "state " << x.transpose();
    EXPECT_LT((lin.b - ref.b).cwiseAbs().maxCoeff() / scale_b, 1e-6) << "state " << x.transpose();
  }
}

TEST(UavFbl, OutputDerivativesAreConsistentAlongTheFlow) {
  const UavParams p;
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const UavVector14 x = random_state(rng);
    const ExtendedUavInput u(0.7, 0.02, -0.01, 0.03);
    const auto y = uav_output_derivatives(x, p);
    for (int n = 0; n < 3; ++n) {
      const Vec3 fd = along_flow([&](const UavVector14& z) { return uav_output_derivatives(z, p).position[n]; }, x,
                                 ExtendedUavInput::Zero(), p);
      EXPECT_LT((fd - y.position[n + 1]).norm(), 1e-6 * (1.0 + fd.norm()));
    }
    // Highest derivatives pick up the input through b + Delta U_bar.
    const auto lin = uav_delta_b(x, p);
    const Vec4 pred = lin.b + lin.delta * u;
    const Vec3 r4 = along_flow([&](const UavVector14& z) { return uav_output_derivatives(z, p).position[3]; }, x, u, p);
    EXPECT_LT((r4 - pred.head<3>()).norm(), 1e-5 * (1.0 + r4.norm()));
    const double yaw_dd = along_flow(
        [&](const UavVector14& z) {
          Eigen::Matrix<double, 1, 1> m;
          m << uav_output_derivatives(z, p).yaw_rate;
          return m;
        },
        x, u, p)(0);
    EXPECT_NEAR(yaw_dd, pred(3), 1e-5 * (1.0 + std::abs(yaw_dd)));
  }
}

TEST(UavFbl, InputRealizesCommandedDerivatives) {
  const UavParams p;
  std::mt19937_64 rng(7);
  for (int k = 0; k < 50; ++k) {
    const UavVector14 x = random_state(rng);
    const auto lin = uav_delta_b(x, p);
    const Vec4 v(1.0, -2.0, 0.5, 0.3);
    const ExtendedUavInput u = uav_input_from_v(lin, v);
    EXPECT_LT((lin.b + lin.delta * u - v).norm(), 1e-9);
  }
}

TEST(UavFbl, TrackingOnReferenceGivesFeedforward) {
  const UavParams p;
  UavOutputDerivatives y;
  UavReference ref;
  for (int n = 0; n < 4; ++n) y.position[n] = ref.position[n] = Vec3(n + 1.0, -n, 0.5 * n);
  ref.position[4] = Vec3(0.1, 0.2, 0.3);
  y.yaw = ref.yaw[0] = 0.4;
  y.yaw_rate = ref.yaw[1] = -0.1;
  ref.yaw[2] = 0.05;
  const Vec4 v = uav_tracking_v(y, ref, UavGains{});
  EXPECT_LT((v - Vec4(0.1, 0.2, 0.3, 0.05)).norm(), 1e-14);
}

TEST(UavFbl, TrackingGainsMultiplyErrors) {
  UavOutputDerivatives y;
  UavReference ref;
  ref.position[0] = Vec3(1.0, 0.0, 0.0);
  ref.yaw[0] = 0.2;
  const UavGains g;
  const Vec4 v = uav_tracking_v(y, ref, g);
  EXPECT_NEAR(v(0), g.position[3] * 1.0, 1e-14);
  EXPECT_NEAR(v(3), g.yaw[1] * 0.2, 1e-14);
  // Angle errors are wrapped.
  y.yaw = 3.1;
  ref.yaw[0] = -3.1;
  EXPECT_NEAR(uav_tracking_v(y, ref, g)(3), g.yaw[1] * (2 * M_PI - 6.2), 1e-12);
}

TEST(UavFbl, ZeroThrustIsSingular) {
  UavVector14 x = UavVector14::Zero();
  EXPECT_THROW(uav_delta_b(x, UavParams{}), SingularLinearizationError);
  EXPECT_THROW(uav_output_derivatives(x, UavParams{}), SingularLinearizationError);
}

TEST(UavFbl, GuardBandRejectsLowThrustAndSteepTilt) {
  const UavParams p;
  const UavFblController c(p, UavGains{});
  UavVector14 x = ExtendedUavState::hover(Vec3::Zero(), p).pack();
  EXPECT_NO_THROW(c.compute(x, UavReference{}));
  x(uav_index::kThrust) = 0.01 * p.mass * p.gravity;
  EXPECT_THROW(c.compute(x, UavReference{}), SingularLinearizationError);
  x = ExtendedUavState::hover(Vec3::Zero(), p).pack();
  x(uav_index::kPitch) = M_PI / 2 - 0.01;
  EXPECT_THROW(c.compute(x, UavReference{}), SingularLinearizationError);
}

TEST(UavFbl, EngageSetsHoverThrust) {
  const UavParams p;
  const UavFblController c(p, UavGains{});
  UavState12 s;
  s.position = Vec3(1, 2, -3);
  const auto e = ExtendedUavState::unpack(c.engage(s));
  EXPECT_DOUBLE_EQ(e.thrust, p.mass * p.gravity);
  EXPECT_EQ(e.thrust_rate, 0.0);
  EXPECT_EQ(e.position, s.position);
}

TEST(UavFbl, HoverNeedsNoInput) {
  const UavParams p;
  const UavFblController c(p, UavGains{});
  UavReference ref;
  ref.position[0] = Vec3(0, 0, -5);
  const auto out = c.compute(ExtendedUavState::hover(ref.position[0], p).pack(), ref);
  EXPECT_LT(out.input.norm(), 1e-12);
}
