#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cio/vehicle_model.hpp"

namespace cio {

struct Box {
  Vector3d center = Vector3d::Zero();
  Vector3d half = Vector3d::Zero();
};

// Infinite plane; free space is on the side the normal points into.
struct Wall {
  Vector3d point = Vector3d::Zero();
  Vector3d normal = Vector3d::UnitX();
};

struct Environment {
  std::vector<Box> boxes;
  std::vector<Wall> walls;
  bool ground = true;  // plane z = 0
  double restitution = 0.0;
  double tangential_friction = 0.0;

  void validate() const;
};

// Outcome of one contact-resolution pass over a dynamics substep.
struct ContactResolution {
  RigidState state;
  Vector3d delta_v = Vector3d::Zero();  // world-frame velocity change
  Vector3d impulse = Vector3d::Zero();  // world-frame impulse [N s]
  Vector3d normal = Vector3d::Zero();   // impulse-weighted contact normal
  bool contact = false;
};

// Penalty-impulse contact handling for a bounding sphere: penetrating states
// are projected back to the surface, the inward normal velocity is replaced
// by -restitution * v_n, and tangential velocity is scaled by
// (1 - tangential_friction). Throws TunnelingDetected when the sphere center
// crosses an obstacle surface in a single step.
ContactResolution resolve_contacts(const RigidState& s, const Environment& env, double radius,
                                   double mass);

}  // namespace cio
