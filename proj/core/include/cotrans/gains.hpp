#pragma once

// Tracking-gain construction from the Lyapunov design parameters.
//
// For an error chain with relative degree r, the design picks a Hurwitz
// polynomial q = e^(r-1) + a_1 e^(r-2) + ... + a_{r-1} e and a decay rate k,
// then enforces q_dot = -(k/2) q. Expanding gives the closed-loop
// polynomial (s + k/2)(s^(r-1) + a_1 s^(r-2) + ... + a_{r-1}) whose
// coefficients are the feedback gains.

#include <array>
#include <complex>
#include <optional>
#include <vector>

namespace cotrans {

struct UavGains {
  // Multiply (e_dddot, e_ddot, e_dot, e) on each position axis.
  std::array<double, 4> position{6.5, 26.0, 28.5, 15.0};
  // Multiply (e_dot, e) on the yaw channel.
  std::array<double, 2> yaw{4.0, 4.0};
};

struct PayloadGains {
  // Multiply (e_dot, e) on each payload position axis.
  std::array<double, 2> position{4.5, 5.0};
  // Multiply (e_dot, e) on each UAV Euler angle.
  std::array<double, 2> attitude{18.0, 85.0};
  // (kd, kp) of the payload attitude hold in the allocation null space.
  std::array<double, 2> payload_attitude{4.0, 4.0};
};

struct CubicAlpha {
  std::array<double, 3> alpha;
  double k;
};

struct LinearAlpha {
  double alpha;
  double k;
};

// beta = (a1 + k/2, a2 + k a1/2, a3 + k a2/2, k a3/2). Throws ParameterError
// if s^3 + a1 s^2 + a2 s + a3 is not Hurwitz or k < 0.
std::array<double, 4> quartic_gains_from_alpha_k(const CubicAlpha& design);

// beta = (a + k/2, k a/2). Throws ParameterError if a <= 0 or k < 0.
std::array<double, 2> quadratic_gains_from_alpha_k(const LinearAlpha& design);

// All real (alpha, k > 0) designs that expand to the given gains, one per
// real negative root of the closed-loop polynomial whose deflated factor is
// Hurwitz. Empty when the closed-loop poles are all complex.
std::vector<CubicAlpha> decompose_quartic_gains(const std::array<double, 4>& beta);
std::vector<LinearAlpha> decompose_quadratic_gains(const std::array<double, 2>& beta);

// Roots of the monic polynomial s^n + c[0] s^(n-1) + ... + c[n-1].
std::vector<std::complex<double>> monic_roots(const std::vector<double>& coeffs);

// -max Re(root) of the monic closed-loop polynomial: the slowest decay rate
// of the error chain. Non-positive for an unstable or marginal chain.
double chain_decay_rate(const std::vector<double>& coeffs);

bool is_hurwitz(const std::vector<double>& coeffs);

}  // namespace cotrans
