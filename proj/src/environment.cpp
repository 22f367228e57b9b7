#include "cio/environment.hpp"

#include <cmath>

#include "cio/errors.hpp"

namespace cio {

void Environment::validate() const {
  if (!(restitution >= 0.0 && restitution <= 1.0)) {
    throw ConfigError("environment.restitution must lie in [0, 1]");
  }
  if (tangential_friction < 0.0 || tangential_friction > 1.0) {
    throw ConfigError("environment.tangential_friction must lie in [0, 1]");
  }
  for (const auto& b : boxes) {
    if (!(b.half.minCoeff() > 0.0)) throw ConfigError("environment box has non-positive extents");
  }
  for (const auto& w : walls) {
    if (w.normal.norm() < 1e-9) throw ConfigError("environment wall has degenerate normal");
  }
}

namespace {

struct Penetration {
  Vector3d normal;
  double depth;
};

void check_tunneling(double depth, double radius) {
  if (depth > radius) {
    throw TunnelingDetected("body center crossed an obstacle surface in one step");
  }
}

}  // namespace

ContactResolution resolve_contacts(const RigidState& s, const Environment& env, double radius,
                                   double mass) {
  ContactResolution out;
  out.state = s;

  std::vector<Penetration> pens;
  const Vector3d& c = s.r;

  if (env.ground && c.z() < radius) {
    const double depth = radius - c.z();
    check_tunneling(depth, radius);
    pens.push_back({Vector3d::UnitZ(), depth});
  }
  for (const auto& w : env.walls) {
    const Vector3d n = w.normal.normalized();
    const double d = n.dot(c - w.point);
    if (d < radius) {
      const double depth = radius - d;
      check_tunneling(depth, radius);
      pens.push_back({n, depth});
    }
  }
  for (const auto& b : env.boxes) {
    const Vector3d lo = b.center - b.half;
    const Vector3d hi = b.center + b.half;
    const Vector3d q = c.cwiseMax(lo).cwiseMin(hi);
    const Vector3d d = c - q;
    const double dist = d.norm();
    if (dist >= radius) continue;
    if (dist > 1e-9) {
      pens.push_back({d / dist, radius - dist});
    } else {
      // Center inside the box counts as tunneling for any finite radius.
      throw TunnelingDetected("body center inside a box obstacle");
    }
  }

  if (pens.empty()) return out;

  Vector3d v_world = s.q * s.v;
  const Vector3d v_before = v_world;
  Vector3d pos = s.r;
  double impulse_sum = 0.0;
  Vector3d normal_acc = Vector3d::Zero();

  for (const auto& pen : pens) {
    pos += pen.normal * pen.depth;
    const double vn = pen.normal.dot(v_world);
    if (vn < 0.0) {
      const Vector3d v_t_before = v_world - vn * pen.normal;
      const Vector3d v_t_after = v_t_before * (1.0 - env.tangential_friction);
      v_world = v_t_after - env.restitution * vn * pen.normal;
      const double j = mass * std::abs((1.0 + env.restitution) * vn);
      impulse_sum += j;
      normal_acc += j * pen.normal;
    }
  }

  out.state.r = pos;
  out.state.v = s.q.conjugate() * v_world;
  out.delta_v = v_world - v_before;
  out.impulse = mass * out.delta_v;
  out.contact = true;
  if (impulse_sum > 0.0) out.normal = normal_acc.normalized();
  return out;
}

}  // namespace cio
