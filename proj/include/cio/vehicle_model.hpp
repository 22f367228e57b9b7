#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "cio/geometry.hpp"
#include "cio/vehicle_params.hpp"

namespace cio {

// Rigid-body state. v and omega are body-frame, r world-frame. The quaternion
// rotates body-frame vectors into the world frame (q * v_body = v_world).
struct RigidState {
  Vector3d r = Vector3d::Zero();
  Quaterniond q = Quaterniond::Identity();
  Vector3d v = Vector3d::Zero();
  Vector3d omega = Vector3d::Zero();
  double gamma_l = 0.0;  // left wheel rate relative to body [rad/s]
  double gamma_r = 0.0;  // right wheel rate relative to body [rad/s]
};

struct StateDerivative {
  Vector3d r_dot = Vector3d::Zero();
  Eigen::Vector4d q_dot = Eigen::Vector4d::Zero();  // (w, x, y, z)
  Vector3d v_dot = Vector3d::Zero();
  Vector3d omega_dot = Vector3d::Zero();
  double gamma_l_dot = 0.0;
  double gamma_r_dot = 0.0;
};

// Rotor-generated wrench: collective thrust along body z plus body moments.
struct ControlWrench {
  double F_in_z = 0.0;             // [N], >= 0
  Vector3d M_in = Vector3d::Zero();  // [N m]
};

struct RotorSpeeds {
  Eigen::Matrix<double, 8, 1> n_bar = Eigen::Matrix<double, 8, 1>::Zero();  // [rad/s]
};

// External wrench applied to the vehicle, plus per-wheel contact moments
// (only meaningful for the hybrid platform).
struct ExternalWrench {
  Vector3d F_e = Vector3d::Zero();
  Vector3d M_e = Vector3d::Zero();
  double M_w_l = 0.0;
  double M_w_r = 0.0;
};

enum class VehicleMode { Flying, Rolling };

// 4x8 map from squared rotor speeds to [F_z; Mx; My; Mz].
Eigen::Matrix<double, 4, 8> mixing_matrix(const VehicleParams& p);

ControlWrench mix_rotor_speeds(const RotorSpeeds& n, const VehicleParams& p);

// Minimum-norm squared-speed allocation. Throws InfeasibleAllocation if any
// squared speed would be negative beyond 1e-9.
RotorSpeeds allocate_wrench(const ControlWrench& w, const VehicleParams& p);

StateDerivative quadrotor_derivative(const RigidState& s, const ControlWrench& u,
                                     const Vector3d& F_e, const Vector3d& M_e,
                                     const VehicleParams& p);

// Hybrid-vehicle dynamics: couples omega_dot and wheel accelerations through
// a 5x5 linear system. Throws SingularInertia if that system is ill
// conditioned (I_w below 1e-12 falls back to the wheel-free reduction).
StateDerivative rollocopter_derivative(const RigidState& s, const ControlWrench& u,
                                       const Vector3d& F_e, const Vector3d& M_e,
                                       double M_w_l, double M_w_r, const VehicleParams& p);

// No-slip rolling kinematics: wheel rates + body pitch rate -> (v_x, v_y, w_z).
Vector3d rolling_constrained_velocity(double gamma_l, double gamma_r, double omega_y,
                                      const VehicleParams& p);

// One RK4 step. In rolling mode the state is projected onto the no-slip
// manifold afterwards (v_y = v_z = w_x = 0, v_x and w_z slaved to the wheel
// rates). Throws NonFiniteState on NaN/Inf.
RigidState step(const RigidState& s, const ControlWrench& u, const ExternalWrench& ext,
                double dt, const VehicleParams& p, VehicleMode mode = VehicleMode::Flying);

// Kinetic + potential energy of the flying rigid body (total inertia).
double mechanical_energy(const RigidState& s, const VehicleParams& p);

}  // namespace cio
