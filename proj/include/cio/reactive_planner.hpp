#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "cio/geometry.hpp"
#include "cio/rng.hpp"

namespace cio {

enum class BouncePolicy { Cone, Specular };

struct PlannerConfig {
  double v_nom = 1.0;                  // [m/s]
  double dpsi_min = 30.0 * M_PI / 180.0;
  double dpsi_max = 60.0 * M_PI / 180.0;
  double bounce_period = 2.5;          // [s]
  double bounce_amplitude = 0.7;       // [m/s]
  uint64_t rng_seed = 0;
  BouncePolicy policy = BouncePolicy::Cone;
  bool planar = true;  // operate on the horizontal components only

  void validate() const;
};

enum class ReferenceCause { Init, Collision, VerticalBounce };

struct ReferenceVelocity {
  Vector3d v_ref = Vector3d::Zero();
  double t_issued = 0.0;
  ReferenceCause cause = ReferenceCause::Init;
};

// Reflection of v_prev across the plane orthogonal to F_e. Throws ZeroForce.
Vector3d specular_bounce(const Vector3d& v_prev, const Vector3d& F_e, double eps = 1e-6);

// Rotates the contact-force direction by dpsi towards the previous reference
// (Rodrigues rotation about the mutual perpendicular) and rescales to v_nom.
// Throws ZeroForce / ParallelDegenerate.
Vector3d cone_bounce(const Vector3d& v_prev_ref, const Vector3d& F_e, double dpsi,
                     const PlannerConfig& cfg, double eps = 1e-6);

double sample_cone_angle(Rng& rng, const PlannerConfig& cfg);

// Square-wave vertical reference: +amplitude for the first half of each
// period, -amplitude for the second half.
double vertical_bounce_reference(double t, const PlannerConfig& cfg);

// Event-driven reference-velocity generator. Owns its RNG; deterministic
// under a fixed seed and event stream.
class ReactivePlanner {
 public:
  explicit ReactivePlanner(const PlannerConfig& cfg);

  const ReferenceVelocity& reference() const { return ref_; }

  // New reference from a detected collision force.
  const ReferenceVelocity& on_collision(const Vector3d& F_e, double t);

 private:
  PlannerConfig cfg_;
  Rng rng_;
  ReferenceVelocity ref_;
};

}  // namespace cio
