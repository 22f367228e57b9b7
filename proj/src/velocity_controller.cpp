#include "cio/velocity_controller.hpp"

#include <cmath>

#include "cio/errors.hpp"

namespace cio {

void ControllerGains::validate() const {
  if (!(kp_vel > 0.0 && kp_att > 0.0 && kd_att > 0.0 && a_max > 0.0)) {
    throw ConfigError("controller gains must be positive");
  }
}

Vector3d velocity_to_acceleration(const Vector3d& v_ref, const Vector3d& v_est,
                                  const ControllerGains& g, double gravity) {
  Vector3d a = g.kp_vel * (v_ref - v_est);
  const double h = a.head<2>().norm();
  if (h > g.a_max) a.head<2>() *= g.a_max / h;
  a.z() += gravity;
  return a;
}

AttitudeThrust acceleration_to_attitude_thrust(const Vector3d& a_des, double yaw,
                                               const VehicleParams& p) {
  const double norm = a_des.norm();
  if (norm < 0.1 * p.g) {
    throw DegenerateAcceleration("acceleration_to_attitude_thrust: |a_des| too small");
  }
  AttitudeThrust out;
  out.thrust = p.m_t * norm;

  const Vector3d z_b = a_des / norm;
  const Vector3d x_c(std::cos(yaw), std::sin(yaw), 0.0);
  Vector3d y_b = z_b.cross(x_c);
  const double yn = y_b.norm();
  if (yn < 1e-9) {
    // Thrust direction parallel to the yaw heading; fall back to world y.
    y_b = z_b.cross(Vector3d::UnitY()).cross(z_b);
    y_b.normalize();
  } else {
    y_b /= yn;
  }
  const Vector3d x_b = y_b.cross(z_b);

  Matrix3d R;
  R.col(0) = x_b;
  R.col(1) = y_b;
  R.col(2) = z_b;
  out.q_des = Quaterniond(R).normalized();
  return out;
}

Vector3d attitude_rate_controller(const Quaterniond& q_des, const Quaterniond& q,
                                  const Vector3d& omega, const ControllerGains& g,
                                  const VehicleParams& p) {
  Quaterniond err = q.conjugate() * q_des;
  if (err.w() < 0.0) err.coeffs() *= -1.0;
  const Vector3d theta = 2.0 * err.vec();  // small-angle rotation vector
  const Vector3d alpha = g.kp_att * theta - g.kd_att * omega;
  return p.I_t.cwiseProduct(alpha);
}

}  // namespace cio
