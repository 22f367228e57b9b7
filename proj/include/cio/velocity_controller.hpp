#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "cio/geometry.hpp"
#include "cio/vehicle_model.hpp"
#include "cio/vehicle_params.hpp"

namespace cio {

struct ControllerGains {
  double kp_vel = 2.5;     // [1/s]
  double kp_att = 250.0;   // [1/s^2], inertia-normalized
  double kd_att = 25.0;    // [1/s]
  double yaw_ref = 0.0;    // [rad]
  double a_max = 5.0;      // horizontal acceleration cap [m/s^2]

  void validate() const;
};

// Proportional velocity law with gravity compensation; the horizontal
// component is saturated at a_max.
Vector3d velocity_to_acceleration(const Vector3d& v_ref, const Vector3d& v_est,
                                  const ControllerGains& g, double gravity = 9.81);

struct AttitudeThrust {
  double thrust = 0.0;  // [N]
  Quaterniond q_des = Quaterniond::Identity();
};

// Maps a desired acceleration to a collective thrust and attitude quaternion
// (desired body z along the acceleration, x-axis set by yaw). Throws
// DegenerateAcceleration when the thrust direction is ill-defined.
AttitudeThrust acceleration_to_attitude_thrust(const Vector3d& a_des, double yaw,
                                               const VehicleParams& p);

// Quaternion-error PD law producing body moments, inertia-normalized.
Vector3d attitude_rate_controller(const Quaterniond& q_des, const Quaterniond& q,
                                  const Vector3d& omega, const ControllerGains& g,
                                  const VehicleParams& p);

}  // namespace cio
