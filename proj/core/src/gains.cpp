#include "cotrans/gains.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "cotrans/errors.hpp"

namespace cotrans {

namespace {

constexpr double kRealRootTol = 1e-9;

template <typename Range>
std::string format_coeffs(const Range& c) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? ", " : "") << c[i];
  os << "]";
  return os.str();
}

void check_rate(double k) {
  if (!std::isfinite(k) || k < 0.0) {
    throw ParameterError("gains: decay rate k must be finite and non-negative, got " + std::to_string(k));
  }
}

}  // namespace

std::vector<std::complex<double>> monic_roots(const std::vector<double>& coeffs) {
  const int n = static_cast<int>(coeffs.size());
  if (n == 0) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) companion(0, j) = -coeffs[j];
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  const auto ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double chain_decay_rate(const std::vector<double>& coeffs) {
  double max_re = -std::numeric_limits<double>::infinity();
  for (const auto& r : monic_roots(coeffs)) max_re = std::max(max_re, r.real());
  return -max_re;
}

bool is_hurwitz(const std::vector<double>& coeffs) {
  if (std::any_of(coeffs.begin(), coeffs.end(), [](double c) { return !(c > 0.0); })) return false;
  return chain_decay_rate(coeffs) > 0.0;
}

std::array<double, 4> quartic_gains_from_alpha_k(const CubicAlpha& d) {
  const auto& a = d.alpha;
  if (!is_hurwitz({a[0], a[1], a[2]})) {
    throw ParameterError("gains: s^3 + a1 s^2 + a2 s + a3 is not Hurwitz for alpha = " + format_coeffs(a));
  }
  check_rate(d.k);
  const double h = 0.5 * d.k;
  return {a[0] + h, a[1] + h * a[0], a[2] + h * a[1], h * a[2]};
}

std::array<double, 2> quadratic_gains_from_alpha_k(const LinearAlpha& d) {
  if (!(d.alpha > 0.0) || !std::isfinite(d.alpha)) {
    throw ParameterError("gains: alpha must be positive for a Hurwitz first-order factor, got " +
                         std::to_string(d.alpha));
  }
  check_rate(d.k);
  return {d.alpha + 0.5 * d.k, 0.5 * d.k * d.alpha};
}

std::vector<CubicAlpha> decompose_quartic_gains(const std::array<double, 4>& beta) {
  std::vector<CubicAlpha> out;
  for (const auto& root : monic_roots({beta.begin(), beta.end()})) {
    if (std::abs(root.imag()) > kRealRootTol * std::max(1.0, std::abs(root))) continue;
    const double h = -root.real();
    if (!(h > 0.0)) continue;
    // Synthetic division by (s + h).
    const double a1 = beta[0] - h;
    const double a2 = beta[1] - h * a1;
    const double a3 = beta[2] - h * a2;
    if (!is_hurwitz({a1, a2, a3})) continue;
    out.push_back({{a1, a2, a3}, 2.0 * h});
  }
  return out;
}

std::vector<LinearAlpha> decompose_quadratic_gains(const std::array<double, 2>& beta) {
  std::vector<LinearAlpha> out;
  for (const auto& root : monic_roots({beta[0], beta[1]})) {
    if (std::abs(root.imag()) > kRealRootTol * std::max(1.0, std::abs(root))) continue;
    const double h = -root.real();
    const double a = beta[0] - h;
    if (!(h > 0.0) || !(a > 0.0)) continue;
    out.push_back({a, 2.0 * h});
  }
  return out;
}

}  // namespace cotrans
