#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>

namespace cio {

using Eigen::Matrix3d;
using Eigen::Quaterniond;
using Eigen::Vector3d;

inline Matrix3d skew(const Vector3d& v) {
  Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

// Quaternion for a rotation of |w|*dt about axis w (body rates).
inline Quaterniond quat_exp(const Vector3d& w, double dt) {
  const double angle = w.norm() * dt;
  if (angle < 1e-12) {
    Quaterniond q(1.0, 0.5 * w.x() * dt, 0.5 * w.y() * dt, 0.5 * w.z() * dt);
    q.normalize();
    return q;
  }
  return Quaterniond(Eigen::AngleAxisd(angle, w.normalized()));
}

// dq/dt = 0.5 * q * (0, w) with w the body angular velocity.
inline Eigen::Vector4d quat_derivative(const Quaterniond& q, const Vector3d& w) {
  const Quaterniond wq(0.0, w.x(), w.y(), w.z());
  const Quaterniond dq = q * wq;
  return Eigen::Vector4d(0.5 * dq.w(), 0.5 * dq.x(), 0.5 * dq.y(), 0.5 * dq.z());
}

// Rodrigues rotation of v about unit axis e by angle.
inline Vector3d rodrigues_rotate(const Vector3d& v, const Vector3d& e, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return c * v + s * e.cross(v) + (1.0 - c) * e.dot(v) * e;
}

inline double angle_between(const Vector3d& a, const Vector3d& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na < 1e-15 || nb < 1e-15) return 0.0;
  const double c = a.dot(b) / (na * nb);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

inline double yaw_of(const Quaterniond& q) {
  const Vector3d xb = q * Vector3d::UnitX();
  return std::atan2(xb.y(), xb.x());
}

inline Quaterniond yaw_quat(double yaw) {
  return Quaterniond(Eigen::AngleAxisd(yaw, Vector3d::UnitZ()));
}

}  // namespace cio
