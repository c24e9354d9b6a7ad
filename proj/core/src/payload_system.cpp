#include "cotrans/payload_system.hpp"

#include <cmath>
#include <sstream>

#include "cotrans/errors.hpp"

namespace cotrans {

using namespace sys_index;

namespace {

bool is_spd(const Mat3& m) {
  if (!m.allFinite() || !m.isApprox(m.transpose(), 1e-12)) return false;
  Eigen::LLT<Mat3> llt(m);
  return llt.info() == Eigen::Success;
}

}  // namespace

double RigParams::total_mass() const {
  double m = payload_mass;
  for (const auto& u : uavs) m += u.mass;
  return m;
}

void RigParams::validate() const {
  if (!(payload_mass > 0.0) || !std::isfinite(payload_mass)) {
    throw ParameterError("RigParams: payload mass must be positive");
  }
  if (!(gravity > 0.0) || !std::isfinite(gravity)) throw ParameterError("RigParams: gravity must be positive");
  if (!is_spd(payload_inertia)) throw ParameterError("RigParams: payload inertia must be symmetric positive definite");
  if (uavs.empty()) throw ParameterError("RigParams: at least one UAV is required");
  for (std::size_t i = 0; i < uavs.size(); ++i) {
    const auto& u = uavs[i];
    if (!(u.mass > 0.0) || !std::isfinite(u.mass)) {
      throw ParameterError("RigParams: UAV " + std::to_string(i + 1) + " mass must be positive");
    }
    if (!is_spd(u.inertia)) {
      throw ParameterError("RigParams: UAV " + std::to_string(i + 1) + " inertia must be symmetric positive definite");
    }
    if (!u.attachment.allFinite() || !std::isfinite(u.link_length) || u.link_length < 0.0) {
      throw ParameterError("RigParams: UAV " + std::to_string(i + 1) + " attachment/link length invalid");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if ((uavs[j].attachment - u.attachment).norm() < 1e-9) {
        std::ostringstream msg;
        msg << "RigParams: attachment points of UAV " << j + 1 << " and UAV " << i + 1 << " coincide";
        throw ParameterError(msg.str());
      }
    }
  }
}

RigParams RigParams::table_one() {
  RigParams p;
  const double xs[4] = {0.5, 0.5, -0.5, -0.5};
  const double ys[4] = {0.5, -0.5, -0.5, 0.5};
  for (int i = 0; i < 4; ++i) {
    UavLink u;
    u.attachment = Vec3(xs[i], ys[i], -0.125);
    p.uavs.push_back(u);
  }
  return p;
}

Eigen::Matrix<double, 6, 6> PBlocks::full() const {
  Eigen::Matrix<double, 6, 6> m;
  m << p11, p12, p21, p22;
  return m;
}

Mat3 apparent_inertia(const RigParams& p) {
  Mat3 j = p.payload_inertia;
  for (const auto& u : p.uavs) {
    const Mat3 h = hat(u.attachment);
    j -= u.mass * h * h;
  }
  if (!is_spd(j)) throw ParameterError("apparent_inertia: result is not symmetric positive definite");
  return j;
}

Eigen::Matrix<double, 6, 6> payload_mass_matrix(const RigParams& p) {
  Vec3 moment = Vec3::Zero();
  for (const auto& u : p.uavs) moment += u.mass * u.attachment;
  const Mat3 s = hat(moment);
  Eigen::Matrix<double, 6, 6> m;
  m << p.total_mass() * Mat3::Identity(), -s, s, apparent_inertia(p);
  return m;
}

PBlocks assemble_P(const RigParams& p) {
  p.validate();
  const Eigen::Matrix<double, 6, 6> m = payload_mass_matrix(p);
  Eigen::LLT<Eigen::Matrix<double, 6, 6>> llt(m);
  if (llt.info() != Eigen::Success) throw ParameterError("assemble_P: generalized mass matrix is singular");
  const Eigen::Matrix<double, 6, 6> inv = llt.solve(Eigen::Matrix<double, 6, 6>::Identity());

  PBlocks b;
  b.p11 = inv.block<3, 3>(0, 0);
  b.p12 = inv.block<3, 3>(0, 3);
  b.p21 = inv.block<3, 3>(3, 0);
  b.p22 = inv.block<3, 3>(3, 3);
  b.apparent_inertia = m.block<3, 3>(3, 3);
  b.total_mass = p.total_mass();
  b.mass_moment.setZero();
  for (const auto& u : p.uavs) b.mass_moment += u.mass * u.attachment;
  return b;
}

VecX SystemState::pack() const {
  VecX x(packed_size(static_cast<int>(uavs.size())));
  x.segment<3>(kPos) = position;
  x.segment<3>(kVel) = velocity;
  x.segment<3>(kAtt) = attitude.as_vector();
  x.segment<3>(kRates) = rates;
  for (std::size_t i = 0; i < uavs.size(); ++i) {
    x.segment<3>(uav_att(static_cast<int>(i))) = uavs[i].attitude.as_vector();
    x.segment<3>(uav_rates(static_cast<int>(i))) = uavs[i].rates;
  }
  return x;
}

SystemState SystemState::unpack(const VecX& x) {
  if (x.size() < 12 || (x.size() - 12) % 6 != 0) {
    throw ParameterError("SystemState::unpack: packed size must be 12 + 6N");
  }
  SystemState s;
  s.position = x.segment<3>(kPos);
  s.velocity = x.segment<3>(kVel);
  s.attitude = EulerZYX::from_vector(x.segment<3>(kAtt));
  s.rates = x.segment<3>(kRates);
  const int n = static_cast<int>((x.size() - 12) / 6);
  s.uavs.resize(n);
  for (int i = 0; i < n; ++i) {
    s.uavs[i].attitude = EulerZYX::from_vector(x.segment<3>(uav_att(i)));
    s.uavs[i].rates = x.segment<3>(uav_rates(i));
  }
  return s;
}

VecX pack_input(const SystemInput& u) {
  VecX out(4 * u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    out(4 * i) = u[i].thrust;
    out.segment<3>(4 * i + 1) = u[i].torque;
  }
  return out;
}

std::vector<UavKinematics> uav_positions(const SystemState& x, const RigParams& p) {
  const Mat3 r0 = rot_zyx(x.attitude);
  const Vec3 r0_dot = r0 * x.velocity;
  std::vector<UavKinematics> out;
  out.reserve(p.uavs.size());
  for (const auto& u : p.uavs) {
    const Vec3 arm = u.attachment - u.link_length * kUnitZ;
    out.push_back({x.position + r0 * arm, r0_dot + r0 * x.rates.cross(arm)});
  }
  return out;
}

Vec3 uav_force(const EulerZYX& attitude, double thrust) { return -thrust * rot_zyx(attitude).col(2); }

PayloadDynamics::PayloadDynamics(RigParams params) : params_(std::move(params)), p_(assemble_P(params_)) {}

VecX PayloadDynamics::rhs(const VecX& x, const SystemInput& u, const DisturbanceForce& d) const {
  const int n = params_.uav_count();
  if (x.size() != SystemState::packed_size(n) || static_cast<int>(u.size()) != n) {
    throw ParameterError("PayloadDynamics::rhs: state/input size does not match the UAV count");
  }
  const Vec3 v0 = x.segment<3>(kVel);
  const Vec3 w0 = x.segment<3>(kRates);
  const EulerZYX att0 = EulerZYX::from_vector(x.segment<3>(kAtt));
  const Mat3 rot0 = rot_zyx(att0);
  const Mat3 w0_hat = hat(w0);
  const Vec3 gravity_body = params_.gravity * rot0.transpose() * kUnitZ;

  Vec3 q_trans = -p_.total_mass * w0.cross(v0) + p_.total_mass * gravity_body + rot0.transpose() * d.force;
  Vec3 q_rot = -w0.cross(p_.apparent_inertia * w0);

  VecX dx(x.size());
  for (int i = 0; i < n; ++i) {
    const auto& link = params_.uavs[i];
    const Vec3& rho = link.attachment;
    const EulerZYX att_i = EulerZYX::from_vector(x.segment<3>(uav_att(i)));
    const Vec3 w_i = x.segment<3>(uav_rates(i));
    const Vec3 f_body = rot0.transpose() * uav_force(att_i, u[i].thrust);

    q_trans += -link.mass * (w0_hat * w0_hat * rho) + f_body;
    q_rot += -link.mass * rho.cross(w0.cross(v0)) + rho.cross(f_body + link.mass * gravity_body);

    dx.segment<3>(uav_att(i)) = euler_rate_matrix(att_i) * w_i;
    dx.segment<3>(uav_rates(i)) = link.inertia.ldlt().solve(u[i].torque - w_i.cross(link.inertia * w_i));
  }

  dx.segment<3>(kPos) = rot0 * v0;
  dx.segment<3>(kAtt) = euler_rate_matrix(att0) * w0;
  dx.segment<3>(kVel) = p_.p11 * q_trans + p_.p12 * q_rot;
  dx.segment<3>(kRates) = p_.p21 * q_trans + p_.p22 * q_rot;
  return dx;
}

VecX system_rhs(const VecX& x, const SystemInput& u, const RigParams& p, const DisturbanceForce& d) {
  return PayloadDynamics(p).rhs(x, u, d);
}

double total_energy(const SystemState& x, const RigParams& p) {
  const Mat3 rot0 = rot_zyx(x.attitude);
  const Vec3 r0_dot = rot0 * x.velocity;
  double kinetic = 0.5 * p.payload_mass * r0_dot.squaredNorm() + 0.5 * x.rates.dot(p.payload_inertia * x.rates);
  double potential = -p.payload_mass * p.gravity * x.position.z();
  for (std::size_t i = 0; i < p.uavs.size(); ++i) {
    const auto& link = p.uavs[i];
    const Vec3 v_i = r0_dot + rot0 * x.rates.cross(link.attachment);
    const Vec3 r_i = x.position + rot0 * link.attachment;
    kinetic += 0.5 * link.mass * v_i.squaredNorm();
    if (i < x.uavs.size()) kinetic += 0.5 * x.uavs[i].rates.dot(link.inertia * x.uavs[i].rates);
    potential += -link.mass * p.gravity * r_i.z();
  }
  return kinetic + potential;
}

Vec3 linear_momentum(const SystemState& x, const RigParams& p) {
  const Mat3 rot0 = rot_zyx(x.attitude);
  Vec3 m = p.total_mass() * (rot0 * x.velocity);
  for (const auto& link : p.uavs) m += link.mass * (rot0 * x.rates.cross(link.attachment));
  return m;
}

}  // namespace cotrans
