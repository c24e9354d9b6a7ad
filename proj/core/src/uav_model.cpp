#include "cotrans/uav_model.hpp"

#include <cmath>

#include "cotrans/errors.hpp"

namespace cotrans {

using namespace uav_index;

void UavParams::validate() const {
  const bool ok = std::isfinite(mass) && mass > 0.0 && std::isfinite(gravity) && gravity > 0.0 &&
                  inertia.allFinite() && (inertia.array() > 0.0).all();
  if (!ok) throw ParameterError("UavParams: mass, inertia and gravity must be finite and positive");
}

UavVector12 UavState12::pack() const {
  UavVector12 x;
  x.segment<3>(kPos) = position;
  x.segment<3>(kYaw) = attitude.as_vector();
  x.segment<3>(kVel) = velocity;
  x.segment<3>(kRates) = rates;
  return x;
}

UavState12 UavState12::unpack(const UavVector12& x) {
  return {x.segment<3>(kPos), EulerZYX::from_vector(x.segment<3>(kYaw)), x.segment<3>(kVel),
          x.segment<3>(kRates)};
}

UavVector14 ExtendedUavState::pack() const {
  UavVector14 x;
  x.segment<3>(kPos) = position;
  x.segment<3>(kYaw) = attitude.as_vector();
  x.segment<3>(kVel) = velocity;
  x(kThrust) = thrust;
  x(kThrustRate) = thrust_rate;
  x.segment<3>(kRatesExt) = rates;
  return x;
}

ExtendedUavState ExtendedUavState::unpack(const UavVector14& x) {
  ExtendedUavState s;
  s.position = x.segment<3>(kPos);
  s.attitude = EulerZYX::from_vector(x.segment<3>(kYaw));
  s.velocity = x.segment<3>(kVel);
  s.thrust = x(kThrust);
  s.thrust_rate = x(kThrustRate);
  s.rates = x.segment<3>(kRatesExt);
  return s;
}

ExtendedUavState ExtendedUavState::hover(const Vec3& position, const UavParams& p) {
  ExtendedUavState s;
  s.position = position;
  s.thrust = p.mass * p.gravity;
  return s;
}

Vec3 thrust_projection(const EulerZYX& attitude, double mass) {
  return -rot_zyx(attitude).col(2) / mass;
}

namespace {

Vec3 body_angular_acceleration(const Vec3& w, const Vec3& torque, const Vec3& inertia) {
  const double ix = inertia(0), iy = inertia(1), iz = inertia(2);
  return {(iy - iz) / ix * w(1) * w(2) + torque(0) / ix,
          (iz - ix) / iy * w(0) * w(2) + torque(1) / iy,
          (ix - iy) / iz * w(0) * w(1) + torque(2) / iz};
}

}  // namespace

UavVector12 uav_rhs(const UavVector12& x, const UavInput& u, const UavParams& p) {
  const EulerZYX att = EulerZYX::from_vector(x.segment<3>(kYaw));
  const Vec3 w = x.segment<3>(kRates);
  UavVector12 dx;
  dx.segment<3>(kPos) = x.segment<3>(kVel);
  dx.segment<3>(kYaw) = euler_rate_matrix(att) * w;
  dx.segment<3>(kVel) = p.gravity * kUnitZ + thrust_projection(att, p.mass) * u(0);
  dx.segment<3>(kRates) = body_angular_acceleration(w, u.tail<3>(), p.inertia);
  return dx;
}

UavVector14 ext_uav_rhs(const UavVector14& x, const ExtendedUavInput& u, const UavParams& p) {
  const EulerZYX att = EulerZYX::from_vector(x.segment<3>(kYaw));
  const Vec3 w = x.segment<3>(kRatesExt);
  UavVector14 dx;
  dx.segment<3>(kPos) = x.segment<3>(kVel);
  dx.segment<3>(kYaw) = euler_rate_matrix(att) * w;
  dx.segment<3>(kVel) = p.gravity * kUnitZ + thrust_projection(att, p.mass) * x(kThrust);
  dx(kThrust) = x(kThrustRate);
  dx(kThrustRate) = u(0);
  dx.segment<3>(kRatesExt) = body_angular_acceleration(w, u.tail<3>(), p.inertia);
  return dx;
}

}  // namespace cotrans
