#pragma once

#include <string>

#include "cotrans/errors.hpp"

namespace cotrans {

// Classical fourth-order Runge-Kutta step of x_dot = rhs(x). The input is
// whatever `rhs` captures, so it is held constant across the step.
// Throws IntegrationError (carrying `t`) if the result is not finite.
template <typename State, typename Rhs>
State rk4_step(Rhs&& rhs, const State& x, double dt, double t = 0.0) {
  if (!(dt > 0.0)) throw IntegrationError("rk4_step: dt must be positive", t);
  const State k1 = rhs(x);
  const State k2 = rhs(State(x + (0.5 * dt) * k1));
  const State k3 = rhs(State(x + (0.5 * dt) * k2));
  const State k4 = rhs(State(x + dt * k3));
  State next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) {
    throw IntegrationError("rk4_step: non-finite state at t = " + std::to_string(t), t);
  }
  return next;
}

}  // namespace cotrans
