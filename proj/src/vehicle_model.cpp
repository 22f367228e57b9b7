#include "cio/vehicle_model.hpp"

#include <cmath>

#include "cio/errors.hpp"

namespace cio {

Eigen::Matrix<double, 4, 8> mixing_matrix(const VehicleParams& p) {
  const double ct = p.thrust_coefficient();
  const double cq = p.torque_coefficient();
  const double lct = p.l * ct;
  Eigen::Matrix<double, 4, 8> m;
  m << ct, ct, ct, ct, ct, ct, ct, ct,
      -lct, lct, lct, -lct, lct, -lct, -lct, lct,
      -lct, -lct, lct, lct, -lct, -lct, lct, lct,
      -cq, cq, -cq, cq, cq, -cq, cq, -cq;
  return m;
}

ControlWrench mix_rotor_speeds(const RotorSpeeds& n, const VehicleParams& p) {
  const Eigen::Matrix<double, 8, 1> sq = n.n_bar.array().square();
  const Eigen::Vector4d w = mixing_matrix(p) * sq;
  ControlWrench out;
  out.F_in_z = w(0);
  out.M_in = w.tail<3>();
  return out;
}

RotorSpeeds allocate_wrench(const ControlWrench& w, const VehicleParams& p) {
  const Eigen::Matrix<double, 4, 8> mix = mixing_matrix(p);
  const Eigen::Vector4d target(w.F_in_z, w.M_in.x(), w.M_in.y(), w.M_in.z());
  // mix * mix^T is diagonal for this rotor layout, but solve generally.
  const Eigen::Matrix4d gram = mix * mix.transpose();
  const Eigen::Matrix<double, 8, 1> sq = mix.transpose() * gram.ldlt().solve(target);

  RotorSpeeds out;
  for (int j = 0; j < 8; ++j) {
    double s = sq(j);
    if (s < -1e-9) {
      throw InfeasibleAllocation("allocate_wrench: negative squared rotor speed " +
                                 std::to_string(s) + " at rotor " + std::to_string(j));
    }
    s = std::max(s, 0.0);
    out.n_bar(j) = std::min(std::sqrt(s), p.rotor_speed_max);
  }
  return out;
}

namespace {

Vector3d gravity_body(const RigidState& s, const VehicleParams& p) {
  return s.q.conjugate() * Vector3d(0.0, 0.0, -p.g);
}

}  // namespace

StateDerivative quadrotor_derivative(const RigidState& s, const ControlWrench& u,
                                     const Vector3d& F_e, const Vector3d& M_e,
                                     const VehicleParams& p) {
  StateDerivative d;
  const Vector3d F_in(0.0, 0.0, u.F_in_z);
  d.v_dot = (F_in + F_e) / p.m_t + gravity_body(s, p) - s.omega.cross(s.v);
  const Vector3d It_w = p.I_t.cwiseProduct(s.omega);
  const Vector3d rhs = u.M_in + M_e - s.omega.cross(It_w);
  d.omega_dot = rhs.cwiseQuotient(p.I_t);
  d.q_dot = quat_derivative(s.q, s.omega);
  d.r_dot = s.q * s.v;
  return d;
}

StateDerivative rollocopter_derivative(const RigidState& s, const ControlWrench& u,
                                       const Vector3d& F_e, const Vector3d& M_e,
                                       double M_w_l, double M_w_r, const VehicleParams& p) {
  StateDerivative d;
  const Vector3d F_in(0.0, 0.0, u.F_in_z);
  d.v_dot = (F_in + F_e) / p.m_t + gravity_body(s, p) - s.omega.cross(s.v);

  const double mwL2 = 2.0 * p.m_w * p.L * p.L;
  const Vector3d Ib_w = p.I_b.cwiseProduct(s.omega);
  const Vector3d gyro = s.omega.cross(Ib_w);
  const Vector3d M = u.M_in + M_e;
  const double wx = s.omega.x(), wy = s.omega.y(), wz = s.omega.z();

  if (p.I_w < 1e-12) {
    // Wheel-free reduction: the wheel rows vanish and omega decouples.
    d.omega_dot.x() = (M.x() - gyro.x() - mwL2 * wz * wy) / (p.I_t.x() + mwL2);
    d.omega_dot.y() = (M.y() - gyro.y()) / p.I_t.y();
    d.omega_dot.z() = (M.z() - gyro.z() + mwL2 * wx * wy) / (p.I_t.z() + mwL2);
    d.gamma_l_dot = -d.omega_dot.y();
    d.gamma_r_dot = -d.omega_dot.y();
  } else {
    // Unknowns [wx_dot, wy_dot, wz_dot, gl_dot, gr_dot]
    Eigen::Matrix<double, 5, 5> A = Eigen::Matrix<double, 5, 5>::Zero();
    Eigen::Matrix<double, 5, 1> b;
    A(0, 0) = p.I_t.x() + mwL2;
    A(1, 1) = p.I_t.y();
    A(1, 3) = p.I_w;
    A(1, 4) = p.I_w;
    A(2, 2) = p.I_t.z() + mwL2;
    A(3, 1) = p.I_w;
    A(3, 3) = p.I_w;
    A(4, 1) = p.I_w;
    A(4, 4) = p.I_w;
    b << M.x() - gyro.x() - mwL2 * wz * wy,
        M.y() - gyro.y(),
        M.z() - gyro.z() + mwL2 * wx * wy,
        M_w_l,
        M_w_r;

    Eigen::FullPivLU<Eigen::Matrix<double, 5, 5>> lu(A);
    const double max_piv = std::abs(lu.matrixLU()(0, 0));
    const double min_piv = std::abs(lu.matrixLU()(4, 4));
    if (min_piv <= 0.0 || max_piv / min_piv > 1e12) {
      throw SingularInertia("rollocopter_derivative: assembled mass matrix is singular");
    }
    const Eigen::Matrix<double, 5, 1> x = lu.solve(b);
    d.omega_dot = x.head<3>();
    d.gamma_l_dot = x(3);
    d.gamma_r_dot = x(4);
  }

  d.q_dot = quat_derivative(s.q, s.omega);
  d.r_dot = s.q * s.v;
  return d;
}

Vector3d rolling_constrained_velocity(double gamma_l, double gamma_r, double omega_y,
                                      const VehicleParams& p) {
  const double v_x = 0.5 * p.R * (gamma_r + gamma_l + 2.0 * omega_y);
  const double w_z = 0.5 * p.R / p.L * (gamma_r - gamma_l);
  return Vector3d(v_x, 0.0, w_z);
}

namespace {

using StateVec = Eigen::Matrix<double, 15, 1>;

StateVec pack(const RigidState& s) {
  StateVec x;
  x.segment<3>(0) = s.r;
  x(3) = s.q.w();
  x(4) = s.q.x();
  x(5) = s.q.y();
  x(6) = s.q.z();
  x.segment<3>(7) = s.v;
  x.segment<3>(10) = s.omega;
  x(13) = s.gamma_l;
  x(14) = s.gamma_r;
  return x;
}

RigidState unpack(const StateVec& x) {
  RigidState s;
  s.r = x.segment<3>(0);
  s.q = Quaterniond(x(3), x(4), x(5), x(6));
  s.v = x.segment<3>(7);
  s.omega = x.segment<3>(10);
  s.gamma_l = x(13);
  s.gamma_r = x(14);
  return s;
}

StateVec pack(const StateDerivative& d) {
  StateVec x;
  x.segment<3>(0) = d.r_dot;
  x.segment<4>(3) = d.q_dot;
  x.segment<3>(7) = d.v_dot;
  x.segment<3>(10) = d.omega_dot;
  x(13) = d.gamma_l_dot;
  x(14) = d.gamma_r_dot;
  return x;
}

}  // namespace

RigidState step(const RigidState& s, const ControlWrench& u, const ExternalWrench& ext,
                double dt, const VehicleParams& p, VehicleMode mode) {
  auto f = [&](const StateVec& x) -> StateVec {
    const RigidState st = unpack(x);
    StateDerivative d;
    if (mode == VehicleMode::Rolling) {
      d = rollocopter_derivative(st, u, ext.F_e, ext.M_e, ext.M_w_l, ext.M_w_r, p);
    } else {
      d = quadrotor_derivative(st, u, ext.F_e, ext.M_e, p);
    }
    return pack(d);
  };

  const StateVec x0 = pack(s);
  const StateVec k1 = f(x0);
  const StateVec k2 = f(x0 + 0.5 * dt * k1);
  const StateVec k3 = f(x0 + 0.5 * dt * k2);
  const StateVec k4 = f(x0 + dt * k3);
  StateVec x1 = x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  if (!x1.allFinite()) throw NonFiniteState("step: state is not finite");

  RigidState out = unpack(x1);
  out.q.normalize();

  if (mode == VehicleMode::Rolling) {
    // Project onto the no-slip manifold: wheel rates are the master
    // coordinates, lateral/vertical slip and shaft roll are removed.
    const Vector3d c = rolling_constrained_velocity(out.gamma_l, out.gamma_r, out.omega.y(), p);
    out.v.x() = c.x();
    out.v.y() = 0.0;
    out.v.z() = 0.0;
    out.omega.x() = 0.0;
    out.omega.z() = c.z();
  }
  return out;
}

double mechanical_energy(const RigidState& s, const VehicleParams& p) {
  const double trans = 0.5 * p.m_t * s.v.squaredNorm();
  const double rot = 0.5 * s.omega.dot(p.I_t.cwiseProduct(s.omega));
  const double pot = p.m_t * p.g * s.r.z();
  return trans + rot + pot;
}

}  // namespace cio
