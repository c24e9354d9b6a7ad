#pragma once

// SO(3) and Euler-angle helpers shared by the UAV and payload models.
//
// Conventions used everywhere in the library:
//  * NED inertial frame, z axis pointing down, gravity +g along z.
//  * Euler angles are ZYX: R = Rz(yaw) * Ry(pitch) * Rx(roll), rotating a
//    body-frame vector into the inertial frame.
//  * Attitude state vectors are ordered (yaw, pitch, roll) and body rates
//    (p, q, r) about the body x, y, z axes.

#include <Eigen/Dense>

namespace cotrans {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline const Vec3 kUnitZ{0.0, 0.0, 1.0};

struct EulerZYX {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;

  // (yaw, pitch, roll), the order used in state vectors.
  Vec3 as_vector() const { return {yaw, pitch, roll}; }
  static EulerZYX from_vector(const Vec3& v) { return {v(0), v(1), v(2)}; }
};

Mat3 hat(const Vec3& v);

// Inverse of hat for a skew-symmetric matrix.
Vec3 vee(const Mat3& m);

Mat3 rot_zyx(const EulerZYX& e);

// Roll and pitch recovered with the atan2 forms
//   roll  = atan2(R32, R33)
//   pitch = atan2(-R31, sqrt(R32^2 + R33^2))
// Yaw is returned as atan2(R21, R11).
EulerZYX euler_from_rotation(const Mat3& r);

// Matrix R_Theta with Theta_dot = R_Theta * omega, where Theta is ordered
// (yaw, pitch, roll) and omega = (p, q, r):
//
//   [ 0   sin(roll)/cos(pitch)        cos(roll)/cos(pitch)       ]
//   [ 0   cos(roll)                   -sin(roll)                 ]
//   [ 1   sin(roll)*tan(pitch)        cos(roll)*tan(pitch)       ]
//
// Throws SingularConfigurationError when |cos(pitch)| < 1e-9.
Mat3 euler_rate_matrix(const EulerZYX& e);

// Time derivative of euler_rate_matrix given the Euler rates
// (yaw_dot, pitch_dot, roll_dot).
Mat3 euler_rate_matrix_dot(const EulerZYX& e, const Vec3& euler_rates);

// Minimum-norm right inverse A^T (A A^T)^-1 of a 3 x n matrix with rank 3.
// Uses the normal equations while cond(A A^T) <= 1e8 and an SVD otherwise.
// Throws DegenerateAllocationError when sigma_3 / sigma_1 < 1e-10.
MatX right_pinv(const MatX& a);

// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace cotrans
