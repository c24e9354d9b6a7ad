#pragma once

// Exact input-output linearization of the extended UAV model with outputs
// y = (r_x, r_y, r_z, yaw) and vector relative degree (4, 4, 4, 2):
//
//   (r^(4), yaw_ddot) = b(x) + Delta(x) * U_bar.
//
// With R = R(Theta), w the body rates, J = diag(I) and
// w_dot = a_d + J^-1 tau where a_d = -J^-1 (w x J w):
//
//   r^(4) = -(1/m) R [ U1 e3 + 2 xi (w x e3) + zeta w x (w x e3)
//                      - zeta hat(e3) (a_d + J^-1 tau) ]
//   yaw_ddot = c_dot . w + c . (a_d + J^-1 tau),   c = row 0 of R_Theta.

#include <array>

#include "cotrans/gains.hpp"
#include "cotrans/math.hpp"
#include "cotrans/uav_model.hpp"

namespace cotrans {

struct UavOutputDerivatives {
  // position derivatives 0..3 (r, r_dot, r_ddot, r_dddot)
  std::array<Vec3, 4> position;
  double yaw = 0.0;
  double yaw_rate = 0.0;
};

struct UavReference {
  // position derivatives 0..4
  std::array<Vec3, 5> position{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  // yaw derivatives 0..2
  std::array<double, 3> yaw{0.0, 0.0, 0.0};
};

struct Linearization {
  Mat4 delta = Mat4::Zero();
  Vec4 b = Vec4::Zero();
};

// Outputs and their state-only derivatives. Throws SingularLinearizationError
// when zeta == 0 and SingularConfigurationError at the pitch singularity.
UavOutputDerivatives uav_output_derivatives(const UavVector14& x, const UavParams& p);

// Closed-form decoupling matrix and drift. Throws SingularLinearizationError
// (message carries the state) when cond(Delta) > 1e10.
Linearization uav_delta_b(const UavVector14& x, const UavParams& p);

// New input v from the quartic position chains and the quadratic yaw chain.
Vec4 uav_tracking_v(const UavOutputDerivatives& y, const UavReference& ref, const UavGains& g);

// U_bar = Delta^-1 (v - b).
ExtendedUavInput uav_input_from_v(const Linearization& lin, const Vec4& v);

struct UavControl {
  ExtendedUavInput input = ExtendedUavInput::Zero();
  Vec4 v = Vec4::Zero();
  Linearization lin;
};

struct UavGuardBand {
  double min_thrust_fraction = 0.05;  // of m g
  double tilt_margin = 0.05;          // rad from +-pi/2
};

// Feedback-linearizing tracking controller for one UAV. The (zeta, xi)
// integrator lives in the plant state owned by the caller.
class UavFblController {
 public:
  UavFblController(UavParams params, UavGains gains, UavGuardBand guard = {});

  // Throws SingularLinearizationError outside the guard band.
  UavControl compute(const UavVector14& x, const UavReference& ref) const;

  // State the controller expects at engage: hover thrust, zero thrust rate.
  UavVector14 engage(const UavState12& s) const;

  const UavParams& params() const { return params_; }
  const UavGains& gains() const { return gains_; }

 private:
  UavParams params_;
  UavGains gains_;
  UavGuardBand guard_;
};

}  // namespace cotrans
