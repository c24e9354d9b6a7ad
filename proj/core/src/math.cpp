#include "cotrans/math.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cotrans/errors.hpp"

namespace cotrans {

namespace {

constexpr double kPitchSingularCos = 1e-9;
constexpr double kNormalEquationCondLimit = 1e8;
constexpr double kRankTolerance = 1e-10;

}  // namespace

Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v(2), v(1),
       v(2), 0.0, -v(0),
       -v(1), v(0), 0.0;
  return m;
}

Vec3 vee(const Mat3& m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

Mat3 rot_zyx(const EulerZYX& e) {
  const double cy = std::cos(e.yaw), sy = std::sin(e.yaw);
  const double cp = std::cos(e.pitch), sp = std::sin(e.pitch);
  const double cr = std::cos(e.roll), sr = std::sin(e.roll);
  Mat3 r;
  r << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
       sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
       -sp, cp * sr, cp * cr;
  return r;
}

EulerZYX euler_from_rotation(const Mat3& r) {
  EulerZYX e;
  e.roll = std::atan2(r(2, 1), r(2, 2));
  e.pitch = std::atan2(-r(2, 0), std::hypot(r(2, 1), r(2, 2)));
  e.yaw = std::atan2(r(1, 0), r(0, 0));
  return e;
}

Mat3 euler_rate_matrix(const EulerZYX& e) {
  const double cp = std::cos(e.pitch);
  if (std::abs(cp) < kPitchSingularCos) {
    std::ostringstream msg;
    msg << "euler_rate_matrix: pitch " << e.pitch << " rad is at the ZYX singularity";
    throw SingularConfigurationError(msg.str());
  }
  const double tp = std::tan(e.pitch);
  const double cr = std::cos(e.roll), sr = std::sin(e.roll);
  Mat3 m;
  m << 0.0, sr / cp, cr / cp,
       0.0, cr, -sr,
       1.0, sr * tp, cr * tp;
  return m;
}

Mat3 euler_rate_matrix_dot(const EulerZYX& e, const Vec3& euler_rates) {
  const double cp = std::cos(e.pitch);
  if (std::abs(cp) < kPitchSingularCos) {
    throw SingularConfigurationError("euler_rate_matrix_dot: pitch at the ZYX singularity");
  }
  const double sp = std::sin(e.pitch), tp = std::tan(e.pitch);
  const double cr = std::cos(e.roll), sr = std::sin(e.roll);
  const double pitch_dot = euler_rates(1);
  const double roll_dot = euler_rates(2);
  const double sec2 = 1.0 / (cp * cp);
  Mat3 m;
  m << 0.0, cr * roll_dot / cp + sr * sp * pitch_dot * sec2,
            -sr * roll_dot / cp + cr * sp * pitch_dot * sec2,
       0.0, -sr * roll_dot, -cr * roll_dot,
       0.0, cr * roll_dot * tp + sr * pitch_dot * sec2,
            -sr * roll_dot * tp + cr * pitch_dot * sec2;
  return m;
}

MatX right_pinv(const MatX& a) {
  if (a.rows() == 0 || a.cols() < a.rows()) {
    throw DegenerateAllocationError("right_pinv: expected a wide matrix with at least as many columns as rows");
  }
  const MatX gram = a * a.transpose();
  Eigen::SelfAdjointEigenSolver<MatX> eig(gram, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();

  // sigma_min / sigma_max of A is the square root of the Gram ratio.
  if (!(lmax > 0.0) || lmin <= 0.0 || std::sqrt(lmin / lmax) < kRankTolerance) {
    Eigen::JacobiSVD<MatX> svd(a);
    const auto& s = svd.singularValues();
    const double ratio = s(0) > 0.0 ? s(s.size() - 1) / s(0) : 0.0;
    if (ratio < kRankTolerance) {
      std::ostringstream msg;
      msg << "right_pinv: rank-deficient matrix (sigma_min/sigma_max = " << ratio << ")";
      throw DegenerateAllocationError(msg.str());
    }
  }

  if (lmin > 0.0 && lmax / lmin <= kNormalEquationCondLimit) {
    return a.transpose() * gram.ldlt().solve(MatX::Identity(a.rows(), a.rows()));
  }

  Eigen::JacobiSVD<MatX> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecX inv_s = svd.singularValues().cwiseInverse();
  return svd.matrixV() * inv_s.asDiagonal() * svd.matrixU().transpose();
}

double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, kTwoPi);
  if (a <= 0.0) a += kTwoPi;
  return a - std::numbers::pi;
}

}  // namespace cotrans
