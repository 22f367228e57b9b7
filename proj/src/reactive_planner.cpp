#include "cio/reactive_planner.hpp"

#include <cmath>

#include "cio/errors.hpp"

namespace cio {

void PlannerConfig::validate() const {
  if (!(v_nom > 0.0)) throw ConfigError("planner.v_nom must be positive");
  if (!(dpsi_min >= 0.0 && dpsi_min <= dpsi_max && dpsi_max < M_PI / 2)) {
    throw ConfigError("planner angles must satisfy 0 <= dpsi_min <= dpsi_max < pi/2");
  }
  if (!(bounce_period > 0.0)) throw ConfigError("planner.bounce_period must be positive");
}

Vector3d specular_bounce(const Vector3d& v_prev, const Vector3d& F_e, double eps) {
  if (F_e.norm() <= eps) {
    throw ZeroForce("specular_bounce: contact force magnitude below threshold");
  }
  return v_prev - 2.0 * (v_prev.dot(F_e) / F_e.dot(F_e)) * F_e;
}

Vector3d cone_bounce(const Vector3d& v_prev_ref, const Vector3d& F_e, double dpsi,
                     const PlannerConfig& cfg, double eps) {
  const double fn = F_e.norm();
  if (fn <= eps) throw ZeroForce("cone_bounce: contact force magnitude below threshold");
  const double vn = v_prev_ref.norm();
  if (vn <= 0.0) throw ZeroForce("cone_bounce: previous reference has zero norm");

  const Vector3d f_hat = F_e / fn;
  const Vector3d cross = f_hat.cross(v_prev_ref);
  if (cross.norm() < 1e-9 * vn) {
    throw ParallelDegenerate("cone_bounce: rotation axis undefined (parallel vectors)");
  }
  const Vector3d e = cross.normalized();
  // Full Rodrigues formula; the (e . f_hat) e term vanishes since e is
  // perpendicular to f_hat by construction.
  const Vector3d rotated = std::cos(dpsi) * f_hat + std::sin(dpsi) * e.cross(f_hat) +
                           (1.0 - std::cos(dpsi)) * e.dot(f_hat) * e;
  return cfg.v_nom / rotated.norm() * rotated;
}

double sample_cone_angle(Rng& rng, const PlannerConfig& cfg) {
  return rng.uniform(cfg.dpsi_min, cfg.dpsi_max);
}

double vertical_bounce_reference(double t, const PlannerConfig& cfg) {
  const double phase = std::fmod(t, cfg.bounce_period) / cfg.bounce_period;
  return phase < 0.5 ? cfg.bounce_amplitude : -cfg.bounce_amplitude;
}

ReactivePlanner::ReactivePlanner(const PlannerConfig& cfg) : cfg_(cfg), rng_(cfg.rng_seed) {
  cfg_.validate();
  ref_.v_ref = Vector3d(cfg_.v_nom, 0.0, 0.0);
  ref_.t_issued = 0.0;
  ref_.cause = ReferenceCause::Init;
}

const ReferenceVelocity& ReactivePlanner::on_collision(const Vector3d& F_e, double t) {
  Vector3d f = F_e;
  Vector3d v_prev = ref_.v_ref;
  if (cfg_.planar) {
    f.z() = 0.0;
    v_prev.z() = 0.0;
  }
  if (f.norm() <= 1e-6) {
    // Vertical-only contact in planar mode: keep the current heading.
    return ref_;
  }
  if (v_prev.norm() <= 1e-9) v_prev = Vector3d(cfg_.v_nom, 0.0, 0.0);

  Vector3d next;
  if (cfg_.policy == BouncePolicy::Specular) {
    next = specular_bounce(v_prev, f);
  } else {
    const double dpsi = sample_cone_angle(rng_, cfg_);
    try {
      next = cone_bounce(v_prev, f, dpsi, cfg_);
    } catch (const ParallelDegenerate&) {
      // Head-on collision: the rotation axis is undefined, sample an escape
      // direction uniformly on the circle orthogonal to the force (in planar
      // mode that circle degenerates to the two vertical axes).
      const Vector3d f_hat = f.normalized();
      Vector3d axis;
      if (cfg_.planar) {
        axis = rng_.uniform01() < 0.5 ? Vector3d::UnitZ() : -Vector3d::UnitZ();
      } else {
        Vector3d ortho = f_hat.cross(Vector3d::UnitZ());
        if (ortho.norm() < 1e-6) ortho = f_hat.cross(Vector3d::UnitX());
        ortho.normalize();
        const Vector3d ortho2 = f_hat.cross(ortho);
        const double phi = rng_.uniform(0.0, 2.0 * M_PI);
        axis = std::cos(phi) * ortho + std::sin(phi) * ortho2;
      }
      const double dpsi = sample_cone_angle(rng_, cfg_);
      next = cfg_.v_nom * rodrigues_rotate(f_hat, axis, dpsi);
    }
  }
  if (cfg_.planar) next.z() = 0.0;

  ref_.v_ref = next;
  ref_.t_issued = t;
  ref_.cause = ReferenceCause::Collision;
  return ref_;
}

}  // namespace cio
