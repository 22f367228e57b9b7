#include "cio/wrench_estimator.hpp"

#include <cmath>

namespace cio {

namespace {

// Exact zero-order-hold update of x' = K (rho - x) over one sample period,
// so the discrete response matches the continuous first-order filter at the
// sample instants.
inline double lpf(double x, double rho, double K, double dt) {
  const double a = std::exp(-K * dt);
  return rho + (x - rho) * a;
}

inline Vector3d lpf(const Vector3d& x, const Vector3d& rho, double K, double dt) {
  const double a = std::exp(-K * dt);
  return rho + (x - rho) * a;
}

}  // namespace

WrenchEstimate update_flying(const WrenchEstimate& est, const ImuSample& imu,
                             const std::optional<EncoderSample>& enc, const ControlWrench& u,
                             double dt, const VehicleParams& p) {
  WrenchEstimate out = est;

  const double m_w = enc ? p.m_w : 0.0;
  const double I_w = enc ? p.I_w : 0.0;
  const double gamma_dot_sum = enc ? (enc->gamma_dot_l + enc->gamma_dot_r) : 0.0;

  const Vector3d omega_dot =
      est.has_prev_omega ? Vector3d((imu.omega - est.prev_omega) / dt) : Vector3d::Zero();

  // Force channel: residual of the translational dynamics.
  const Vector3d F_in(0.0, 0.0, u.F_in_z);
  const Vector3d rho_F = p.m_t * imu.a - F_in;
  out.F_e_hat = lpf(est.F_e_hat, rho_F, p.K_F, dt);

  // Moment channel: residual of the rotational dynamics including the
  // wheel coupling terms.
  const double mwL2 = 2.0 * m_w * p.L * p.L;
  const Vector3d Ib_w = p.I_b.cwiseProduct(imu.omega);
  const Vector3d coupling(mwL2 * (omega_dot.x() + imu.omega.z() * imu.omega.y()),
                          I_w * gamma_dot_sum,
                          mwL2 * (omega_dot.z() - imu.omega.x() * imu.omega.y()));
  const Vector3d rho_M =
      p.I_t.cwiseProduct(omega_dot) + imu.omega.cross(Ib_w) + coupling - u.M_in;
  out.M_e_hat = lpf(est.M_e_hat, rho_M, p.K_M, dt);

  // Wheel moment channels.
  if (enc) {
    const double rho_wl = I_w * (omega_dot.y() + enc->gamma_dot_l);
    const double rho_wr = I_w * (omega_dot.y() + enc->gamma_dot_r);
    out.M_w_hat_l = lpf(est.M_w_hat_l, rho_wl, p.K_w, dt);
    out.M_w_hat_r = lpf(est.M_w_hat_r, rho_wr, p.K_w, dt);
  } else {
    out.M_w_hat_l = lpf(est.M_w_hat_l, 0.0, p.K_w, dt);
    out.M_w_hat_r = lpf(est.M_w_hat_r, 0.0, p.K_w, dt);
  }

  out.prev_omega = imu.omega;
  out.has_prev_omega = true;
  return out;
}

WrenchEstimate update_rolling(const WrenchEstimate& est, const EncoderSample& enc,
                              const Vector3d& omega, const ControlWrench& u, double f_in_x,
                              double dt, const VehicleParams& p) {
  WrenchEstimate out = est;

  const double omega_dot_y =
      est.has_prev_omega ? (omega.y() - est.prev_omega.y()) / dt : 0.0;

  const double c_x = 0.5 * p.m_t * p.R + 2.0 * p.I_w / p.R;
  const double c_y = p.m_t * p.R * p.R / (4.0 * p.L);
  const double c_z = 0.5 * p.R / p.L * p.I_t.z() + p.m_w * p.L * p.R + p.I_w * p.L / p.R;

  const double rho_Fx =
      c_x * (enc.gamma_dot_r + enc.gamma_dot_l + 2.0 * omega_dot_y) - f_in_x;
  const double rho_Fy =
      c_y * (enc.gamma_r - enc.gamma_l) * (enc.gamma_r + enc.gamma_l + 2.0 * omega.y());
  const double rho_Mz = c_z * (enc.gamma_dot_r - enc.gamma_dot_l) - u.M_in.z();

  out.F_e_hat.x() = lpf(est.F_e_hat.x(), rho_Fx, p.K_F, dt);
  out.F_e_hat.y() = lpf(est.F_e_hat.y(), rho_Fy, p.K_F, dt);
  out.F_e_hat.z() = 0.0;
  out.M_e_hat = Vector3d(0.0, 0.0, lpf(est.M_e_hat.z(), rho_Mz, p.K_M, dt));
  out.M_w_hat_l = 0.0;
  out.M_w_hat_r = 0.0;

  out.prev_omega = omega;
  out.has_prev_omega = true;
  return out;
}

double collision_metric(const WrenchEstimate& est, const CollisionWeights& w) {
  return w.w_Fe * est.F_e_hat.squaredNorm() + w.w_Me * est.M_e_hat.squaredNorm() +
         w.w_Mw * (est.M_w_hat_l * est.M_w_hat_l + est.M_w_hat_r * est.M_w_hat_r);
}

}  // namespace cio
