#pragma once

#include <Eigen/Dense>

#include "cio/geometry.hpp"
#include "cio/wrench_estimator.hpp"

namespace cio {

using Matrix12d = Eigen::Matrix<double, 12, 12>;

// EKF over [r; q; v; omega] with a 12-dimensional error state
// [dr; dtheta; dv; domega] (minimal attitude parameterization). v and omega
// are body-frame, r world-frame.
struct FilterState {
  Vector3d r = Vector3d::Zero();
  Quaterniond q = Quaterniond::Identity();
  Vector3d v = Vector3d::Zero();
  Vector3d omega = Vector3d::Zero();
  Matrix12d P = Matrix12d::Zero();
  double t = 0.0;
};

struct PseudoMeasurement {
  Vector3d z = Vector3d::Zero();   // body-frame velocity [m/s]
  Matrix3d R_k = Matrix3d::Identity();
};

// Strapdown prediction: orientation from the gyro, velocity from the
// accelerometer specific force plus gravity, position from velocity. No
// sensor-bias states. Throws NonFiniteState on NaN/Inf.
FilterState predict(const FilterState& fs, const ImuSample& imu, const Matrix12d& Q, double dt,
                    double g = 9.81);

// Projection of v_prev onto the plane orthogonal to F_e. Throws ZeroForce
// when the force magnitude is below eps.
Vector3d parallel_velocity(const Vector3d& v_prev, const Vector3d& F_e, double eps = 1e-6);

// Collision pseudo-measurement: the velocity component along the contact
// force is zeroed, tangential components are kept. Joseph-form covariance
// update.
FilterState contact_update(const FilterState& fs, const Vector3d& F_e, const Matrix3d& R_k);

// Measurement update with z = 0 (prolonged contact, vehicle at rest).
FilterState zero_velocity_update(const FilterState& fs, const Matrix3d& R_k);

// Generic velocity-block measurement update (shared by the two above).
FilterState velocity_update(const FilterState& fs, const PseudoMeasurement& m);

// Pseudo-measurement covariance: isotropic by default; the anisotropic
// variant inflates the variance tangential to the contact force.
Matrix3d pseudo_measurement_covariance(double sigma, const Vector3d& F_e, bool anisotropic,
                                       double tangential_factor = 10.0);

}  // namespace cio
