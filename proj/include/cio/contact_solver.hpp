#pragma once

#include <Eigen/Dense>

#include "cio/vehicle_params.hpp"

namespace cio {

using Eigen::Vector3d;

// Total external wrench in the wheel/body frame. F_e carries the gravity
// offset convention used by the contact equations: F_e = f_l + f_r + m_t*g*z.
struct TotalWrench {
  Vector3d F_e = Vector3d::Zero();
  Vector3d M_e = Vector3d::Zero();
  double M_w_l = 0.0;
  double M_w_r = 0.0;
};

// Per-wheel contact forces and contact points. Points are expressed in the
// wheel-center frame (p_y = 0, p_x^2 + p_z^2 = R^2).
struct ContactSolution {
  Vector3d f_l = Vector3d::Zero();
  Vector3d f_r = Vector3d::Zero();
  Vector3d p_l = Vector3d::Zero();
  Vector3d p_r = Vector3d::Zero();
};

// Evaluates the contact model forward: wheel forces/points -> total wrench.
TotalWrench forward_wrench(const ContactSolution& sol, const VehicleParams& p);

// Closed-form recovery of per-wheel contact forces and points from the total
// wrench. The side carrying the lateral force is chosen by the sign of F_e^y
// (F_e^y >= 0 -> right wheel). Throws DegenerateWrench when the contact
// direction is unobservable and NoRealSolution when no wheel-circle
// intersection exists.
ContactSolution estimate_contact(const TotalWrench& w, const VehicleParams& p);

// Independent grid-search oracle over contact angles (R sin t, 0, -R cos t),
// resolution 1e-3 rad with local refinement. Same contract as
// estimate_contact.
ContactSolution brute_force_contact(const TotalWrench& w, const VehicleParams& p);

// Largest absolute mismatch between forward_wrench(sol) and w.
double reconstruction_residual(const ContactSolution& sol, const TotalWrench& w,
                               const VehicleParams& p);

}  // namespace cio
