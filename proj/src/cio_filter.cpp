#include "cio/cio_filter.hpp"

#include <cmath>

#include "cio/errors.hpp"

namespace cio {

FilterState predict(const FilterState& fs, const ImuSample& imu, const Matrix12d& Q, double dt,
                    double g) {
  FilterState out = fs;
  const Matrix3d R = fs.q.toRotationMatrix();
  const Vector3d g_world(0.0, 0.0, -g);
  const Vector3d g_body = R.transpose() * g_world;

  out.r = fs.r + dt * (R * fs.v);
  out.v = fs.v + dt * (imu.a + g_body - imu.omega.cross(fs.v));
  const Quaterniond dq = quat_exp(imu.omega, dt);
  out.q = (fs.q * dq).normalized();
  out.omega = imu.omega;
  out.t = fs.t + dt;

  Matrix12d F = Matrix12d::Identity();
  F.block<3, 3>(0, 3) = -R * skew(fs.v) * dt;
  F.block<3, 3>(0, 6) = R * dt;
  F.block<3, 3>(3, 3) = dq.toRotationMatrix().transpose();
  F.block<3, 3>(6, 3) = skew(g_body) * dt;
  F.block<3, 3>(6, 6) = Matrix3d::Identity() - skew(imu.omega) * dt;
  F.block<3, 3>(6, 9) = skew(fs.v) * dt;
  F.block<3, 3>(9, 9).setZero();  // angular rate is measurement-driven

  out.P = F * fs.P * F.transpose() + Q;
  out.P = 0.5 * (out.P + out.P.transpose()).eval();

  if (!out.r.allFinite() || !out.v.allFinite() || !out.q.coeffs().allFinite() ||
      !out.P.allFinite()) {
    throw NonFiniteState("predict: filter state is not finite");
  }
  return out;
}

Vector3d parallel_velocity(const Vector3d& v_prev, const Vector3d& F_e, double eps) {
  if (F_e.norm() <= eps) {
    throw ZeroForce("parallel_velocity: contact force magnitude below threshold");
  }
  return v_prev - (v_prev.dot(F_e) / F_e.dot(F_e)) * F_e;
}

FilterState velocity_update(const FilterState& fs, const PseudoMeasurement& m) {
  const Matrix3d P_vv = fs.P.block<3, 3>(6, 6);
  const Matrix3d S = P_vv + m.R_k;

  Eigen::SelfAdjointEigenSolver<Matrix3d> eig(S);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  if (lmin <= 0.0 || lmax / lmin > 1e12) {
    throw IllConditionedInnovation("velocity_update: innovation covariance ill conditioned");
  }

  const Eigen::Matrix<double, 12, 3> PHt = fs.P.block<12, 3>(0, 6);
  const Eigen::Matrix<double, 12, 3> K = PHt * S.inverse();
  const Vector3d innovation = m.z - fs.v;
  const Eigen::Matrix<double, 12, 1> dx = K * innovation;

  FilterState out = fs;
  out.r += dx.segment<3>(0);
  out.q = (fs.q * quat_exp(dx.segment<3>(3), 1.0)).normalized();
  out.v += dx.segment<3>(6);
  out.omega += dx.segment<3>(9);

  Matrix12d IKH = Matrix12d::Identity();
  IKH.block<12, 3>(0, 6) -= K;
  out.P = IKH * fs.P * IKH.transpose() + K * m.R_k * K.transpose();
  out.P = 0.5 * (out.P + out.P.transpose()).eval();
  return out;
}

FilterState contact_update(const FilterState& fs, const Vector3d& F_e, const Matrix3d& R_k) {
  PseudoMeasurement m;
  m.z = parallel_velocity(fs.v, F_e);
  m.R_k = R_k;
  return velocity_update(fs, m);
}

FilterState zero_velocity_update(const FilterState& fs, const Matrix3d& R_k) {
  PseudoMeasurement m;
  m.z = Vector3d::Zero();
  m.R_k = R_k;
  return velocity_update(fs, m);
}

Matrix3d pseudo_measurement_covariance(double sigma, const Vector3d& F_e, bool anisotropic,
                                       double tangential_factor) {
  const double var = sigma * sigma;
  if (!anisotropic || F_e.norm() < 1e-12) return var * Matrix3d::Identity();
  const Vector3d n = F_e.normalized();
  const Matrix3d nn = n * n.transpose();
  return var * nn + tangential_factor * var * (Matrix3d::Identity() - nn);
}

}  // namespace cio
