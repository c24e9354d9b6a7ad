#pragma once

// Forward-mode dual numbers and a Lie-derivative oracle for the extended
// UAV model, written directly from the scalar equations of motion and
// independent of the library's closed-form linearization.

#include <array>
#include <cmath>

#include "cotrans/uav_model.hpp"

namespace oracle {

template <typename T>
struct Dual {
  T a{};  // value
  T e{};  // derivative

  Dual() = default;
  Dual(double v) : a(v), e(0.0) {}  // NOLINT: implicit lift of constants
  Dual(T v, T d) : a(v), e(d) {}
};

template <typename T> Dual<T> operator+(const Dual<T>& x, const Dual<T>& y) { return {x.a + y.a, x.e + y.e}; }
template <typename T> Dual<T> operator-(const Dual<T>& x, const Dual<T>& y) { return {x.a - y.a, x.e - y.e}; }
template <typename T> Dual<T> operator-(const Dual<T>& x) { return {-x.a, -x.e}; }
template <typename T> Dual<T> operator*(const Dual<T>& x, const Dual<T>& y) { return {x.a * y.a, x.a * y.e + x.e * y.a}; }
template <typename T> Dual<T> operator/(const Dual<T>& x, const Dual<T>& y) {
  return {x.a / y.a, (x.e * y.a - x.a * y.e) / (y.a * y.a)};
}
template <typename T> Dual<T> operator*(double s, const Dual<T>& x) { return {s * x.a, s * x.e}; }
template <typename T> Dual<T> operator+(const Dual<T>& x, double s) { return {x.a + s, x.e}; }

using std::cos;
using std::sin;
template <typename T> Dual<T> sin(const Dual<T>& x) { return {sin(x.a), cos(x.a) * x.e}; }
template <typename T> Dual<T> cos(const Dual<T>& x) { return {cos(x.a), -1.0 * (sin(x.a) * x.e)}; }

template <typename T>
using State = std::array<T, 14>;
using Input = std::array<double, 4>;

// Extended UAV: [x, y, z, yaw, pitch, roll, vx, vy, vz, zeta, xi, p, q, r],
// input [xi_dot, tau_x, tau_y, tau_z], NED with thrust along -body z.
template <typename T>
State<T> rhs(const State<T>& s, const Input& u, const cotrans::UavParams& prm) {
  const T& psi = s[3];
  const T& th = s[4];
  const T& ph = s[5];
  const T& zeta = s[9];
  const T& p = s[11];
  const T& q = s[12];
  const T& r = s[13];
  const T cps = cos(psi), sps = sin(psi), cth = cos(th), sth = sin(th), cph = cos(ph), sph = sin(ph);
  const double m = prm.mass, ix = prm.inertia.x(), iy = prm.inertia.y(), iz = prm.inertia.z();
  State<T> d;
  d[0] = s[6];
  d[1] = s[7];
  d[2] = s[8];
  d[3] = (sph * q + cph * r) / cth;
  d[4] = cph * q - sph * r;
  d[5] = p + (sph * q + cph * r) * (sth / cth);
  const T k = -1.0 * (zeta / T(m));
  d[6] = k * (cps * sth * cph + sps * sph);
  d[7] = k * (sps * sth * cph - cps * sph);
  d[8] = k * (cth * cph) + prm.gravity;
  d[9] = s[10];
  d[10] = T(u[0]);
  d[11] = ((iy - iz) * (q * r) + T(u[1])) / T(ix);
  d[12] = ((iz - ix) * (p * r) + T(u[2])) / T(iy);
  d[13] = ((ix - iy) * (p * q) + T(u[3])) / T(iz);
  return d;
}

// Lie derivative of output component `c` along the drift, `k` times,
// evaluated at x. k = 0 is the output itself.
template <int K, typename T>
T lie(const State<T>& x, int c, const cotrans::UavParams& prm) {
  if constexpr (K == 0) {
    return x[c];
  } else {
    using D = Dual<T>;
    const State<T> f = rhs<T>(x, Input{0, 0, 0, 0}, prm);
    State<D> xd;
    for (int i = 0; i < 14; ++i) xd[i] = D(x[i], f[i]);
    return lie<K - 1, D>(xd, c, prm).e;
  }
}

// Derivative of L_f^k h along an arbitrary vector field value w at x.
template <int K>
double lie_along(const State<double>& x, const State<double>& w, int c, const cotrans::UavParams& prm) {
  using D = Dual<double>;
  State<D> xd;
  for (int i = 0; i < 14; ++i) xd[i] = D(x[i], w[i]);
  return lie<K, D>(xd, c, prm).e;
}

struct DeltaB {
  cotrans::Mat4 delta = cotrans::Mat4::Zero();
  cotrans::Vec4 b = cotrans::Vec4::Zero();
};

// Rows: x, y, z (relative degree 4) and yaw (relative degree 2).
inline DeltaB delta_b(const cotrans::UavVector14& xv, const cotrans::UavParams& prm) {
  State<double> x;
  for (int i = 0; i < 14; ++i) x[i] = xv(i);
  const State<double> f0 = rhs<double>(x, Input{0, 0, 0, 0}, prm);
  DeltaB out;
  for (int row = 0; row < 4; ++row) {
    const int c = row < 3 ? row : 3;
    const auto along = [&](const State<double>& w) {
      return row < 3 ? lie_along<3>(x, w, c, prm) : lie_along<1>(x, w, c, prm);
    };
    out.b(row) = along(f0);
    for (int j = 0; j < 4; ++j) {
      Input e{0, 0, 0, 0};
      e[j] = 1.0;
      const State<double> fj = rhs<double>(x, e, prm);
      State<double> g;
      for (int i = 0; i < 14; ++i) g[i] = fj[i] - f0[i];
      out.delta(row, j) = along(g);
    }
  }
  return out;
}

}  // namespace oracle
