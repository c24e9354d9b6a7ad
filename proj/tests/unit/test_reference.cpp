#include <gtest/gtest.h>

#include <cmath>

#include "cotrans/errors.hpp"
#include "cotrans/reference.hpp"

using namespace cotrans;

namespace {

// Sixth-order central first derivative of channel n.
template <typename Ref>
Vec3 fd_derivative(const Ref& ref, double t, int n, double h = 1e-3) {
  const auto at = [&](double s) { return ref.sample(s).d[n]; };
  return (45.0 * (at(t + h) - at(t - h)) - 9.0 * (at(t + 2 * h) - at(t - 2 * h)) + (at(t + 3 * h) - at(t - 3 * h))) /
         (60.0 * h);
}

}  // namespace

TEST(CircularReference, InitialSample) {
  const CircularReference c;
  const auto s = c.sample(0.0);
  EXPECT_LT((s.d[0] - Vec3(0.0, 1.0, -5.0)).norm(), 1e-15);
  EXPECT_NEAR(s.d[1].x(), 0.5, 1e-15);
  EXPECT_NEAR(s.d[1].y(), 0.0, 1e-15);
}

TEST(CircularReference, DerivativeAmplitudes) {
  const CircularReference c;
  for (double t : {0.0, 0.7, 3.3, 12.0}) {
    const auto s = c.sample(t);
    EXPECT_NEAR(s.d[1].norm(), 0.5, 1e-14);
    EXPECT_NEAR(s.d[2].norm(), 0.25, 1e-14);
    EXPECT_NEAR(s.d[3].norm(), 0.125, 1e-14);
    EXPECT_NEAR(s.d[4].norm(), 1.0 / 16.0, 1e-14);
    EXPECT_EQ(s.d[1].z(), 0.0);
  }
}

TEST(CircularReference, ChannelsAreConsistent) {
  CircularReference c;
  c.radius = 2.0;
  c.angular_rate = 0.8;
  c.center = Vec3(1.0, -1.0, 0.0);
  for (double t : {0.5, 2.0, 7.5}) {
    for (int n = 0; n < 4; ++n) EXPECT_LT((fd_derivative(c, t, n) - c.sample(t).d[n + 1]).norm(), 1e-9);
  }
}

TEST(SmoothBlend, BoundaryValues) {
  const auto a = smooth_blend(0.0);
  const auto b = smooth_blend(1.0);
  EXPECT_EQ(a[0], 0.0);
  EXPECT_NEAR(b[0], 1.0, 1e-14);
  for (int k = 1; k < 5; ++k) {
    EXPECT_NEAR(a[k], 0.0, 1e-12);
    EXPECT_NEAR(b[k], 0.0, 1e-9);
  }
  EXPECT_NEAR(smooth_blend(0.5)[1], kBlendPeakSpeedFactor, 1e-12);
}

TEST(SmoothWaypointReference, EndpointsAndTiming) {
  const SmoothWaypointReference ref({Vec3(0, 0, -1), Vec3(3, 4, -1), Vec3(3, 4, -3)}, {1.0}, 2.0);
  EXPECT_DOUBLE_EQ(ref.start_time(), 2.0);
  EXPECT_NEAR(ref.knot_times()[1], 2.0 + kBlendPeakSpeedFactor * 5.0, 1e-12);
  EXPECT_NEAR(ref.end_time(), 2.0 + kBlendPeakSpeedFactor * 7.0, 1e-12);
  const auto first = ref.sample(0.0);
  const auto last = ref.sample(100.0);
  EXPECT_EQ(first.d[0], Vec3(0, 0, -1));
  EXPECT_LT((last.d[0] - Vec3(3, 4, -3)).norm(), 1e-14);
  for (int k = 1; k < 5; ++k) {
    EXPECT_EQ(first.d[k].norm(), 0.0);
    EXPECT_EQ(last.d[k].norm(), 0.0);
  }
  // Peak speed is reached mid-segment.
  EXPECT_NEAR(ref.sample(0.5 * (ref.knot_times()[0] + ref.knot_times()[1])).d[1].norm(), 1.0, 1e-12);
}

TEST(SmoothWaypointReference, ContinuousAcrossKnots) {
  const SmoothWaypointReference ref({Vec3(0, 0, 0), Vec3(1, 0, -2), Vec3(2, 2, -2), Vec3(0, 1, 0)}, {0.8, 1.2, 0.5});
  for (std::size_t k = 1; k + 1 < ref.knot_times().size(); ++k) {
    const double t = ref.knot_times()[k];
    const auto lo = ref.sample(t - 1e-9);
    const auto hi = ref.sample(t + 1e-9);
    for (int n = 0; n < 5; ++n) EXPECT_LT((lo.d[n] - hi.d[n]).norm(), 1e-6) << "knot " << k << " derivative " << n;
  }
}

TEST(SmoothWaypointReference, ChannelsAreConsistent) {
  const SmoothWaypointReference ref({Vec3(0, 0, 0), Vec3(2, -1, -3)}, {0.7});
  for (double t : {0.5, 1.7, 4.0}) {
    for (int n = 0; n < 4; ++n) {
      const Vec3 fd = fd_derivative(ref, t, n);
      EXPECT_LT((fd - ref.sample(t).d[n + 1]).norm(), 1e-7 * (1.0 + fd.norm()));
    }
  }
}

TEST(SmoothWaypointReference, Rejections) {
  EXPECT_THROW(SmoothWaypointReference({Vec3::Zero()}, {1.0}), ParameterError);
  EXPECT_THROW(SmoothWaypointReference({Vec3::Zero(), Vec3::Zero()}, {1.0}), ParameterError);
  EXPECT_THROW(SmoothWaypointReference({Vec3::Zero(), Vec3::Ones()}, {0.0}), ParameterError);
  EXPECT_THROW(SmoothWaypointReference({Vec3::Zero(), Vec3::Ones(), Vec3(2, 0, 0)}, {1.0, 1.0, 1.0}),
               ParameterError);
}

TEST(PathSample, Conversions) {
  const CircularReference c;
  const auto s = c.sample(1.0);
  const auto u = s.as_uav(0.3);
  for (int n = 0; n < 5; ++n) EXPECT_EQ(u.position[n], s.d[n]);
  EXPECT_EQ(u.yaw[0], 0.3);
  const auto p = s.as_payload();
  for (int n = 0; n < 3; ++n) EXPECT_EQ(p.position[n], s.d[n]);
  const auto h = hold_sample(Vec3(1, 2, 3));
  EXPECT_EQ(h.d[0], Vec3(1, 2, 3));
  EXPECT_EQ(h.d[2], Vec3::Zero());
}
