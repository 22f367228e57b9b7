#include "cio/contact_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "cio/errors.hpp"

namespace cio {

namespace {

constexpr double kDegenerateTol = 1e-12;
constexpr double kDiscriminantTol = 1e-9;
constexpr double kThetaMax = M_PI / 2 - 1e-9;  // lower half of the wheel
constexpr double kGridStep = 1e-3;

inline double sgn(double x) { return x >= 0.0 ? 1.0 : -1.0; }

struct Branch {
  bool carrier_right;  // which wheel carries the lateral force component
};

inline Branch select_branch(const TotalWrench& w) { return {w.F_e.y() >= 0.0}; }

// Contact forces implied by the carrier contact point: the force sums and the
// x/z moment equations are linear once the lateral force is assigned.
struct Forces {
  Vector3d f_l, f_r;
};

Forces fill_forces(const TotalWrench& w, const Branch& br, double p_x_c, double p_z_c,
                   const VehicleParams& p) {
  const double Fx = w.F_e.x();
  const double Fy = w.F_e.y();
  const double Fz = w.F_e.z() - p.m_t * p.g;
  Forces f;
  if (br.carrier_right) {
    const double f_z_r = 0.5 * (Fz - (w.M_e.x() + p_z_c * Fy) / p.L);
    const double f_x_r = 0.5 * (Fx + (w.M_e.z() - p_x_c * Fy) / p.L);
    f.f_r = Vector3d(f_x_r, Fy, f_z_r);
    f.f_l = Vector3d(Fx - f_x_r, 0.0, Fz - f_z_r);
  } else {
    const double f_z_l = 0.5 * (Fz + (w.M_e.x() + p_z_c * Fy) / p.L);
    const double f_x_l = 0.5 * (Fx - (w.M_e.z() - p_x_c * Fy) / p.L);
    f.f_l = Vector3d(f_x_l, Fy, f_z_l);
    f.f_r = Vector3d(Fx - f_x_l, 0.0, Fz - f_z_l);
  }
  return f;
}

// Intersection of the line alpha*p_x + beta*p_z = gamma with the wheel
// circle. Returns the two roots (equal at tangency).
struct LineRoots {
  Eigen::Vector2d first, second;  // (p_x, p_z), first uses the preferred sign
  bool distinct;
};

// Root preference follows the collision geometry: the signed offset is keyed
// to sgn(F_e^x) through the p_x coordinate when the line is steep in p_x,
// otherwise to -sgn(F_e^z - m_t g) through p_z.
LineRoots line_circle_roots(double alpha, double beta, double gamma, double s_pref,
                            const VehicleParams& p) {
  const double denom = alpha * alpha + beta * beta;
  double disc = p.R * p.R * denom - gamma * gamma;
  if (disc < -kDiscriminantTol) {
    throw NoRealSolution("contact line does not intersect the wheel circle (discriminant " +
                         std::to_string(disc) + ")");
  }
  disc = std::max(disc, 0.0);
  const double s = s_pref * std::sqrt(disc);
  LineRoots r;
  r.first = Eigen::Vector2d((alpha * gamma - beta * s) / denom, (beta * gamma + alpha * s) / denom);
  r.second =
      Eigen::Vector2d((alpha * gamma + beta * s) / denom, (beta * gamma - alpha * s) / denom);
  r.distinct = disc > 0.0;
  return r;
}

double preferred_sign(double alpha, double beta, double F_x, double F_z_tilde) {
  if (std::abs(beta) >= std::abs(alpha)) return sgn(F_x) * sgn(beta);
  return -sgn(F_z_tilde) * sgn(alpha);
}

// Ranks candidate solutions: contact points on the lower half of the wheel
// and opposing their contact force are preferred.
double physicality_score(const ContactSolution& sol, const VehicleParams& p) {
  double score = 0.0;
  if (sol.p_l.z() <= 1e-9 && sol.p_r.z() <= 1e-9) score += 10.0;
  auto oppose = [&](const Vector3d& pt, const Vector3d& f) {
    const double fn = f.norm();
    if (fn < 1e-9) return 0.0;
    return -(pt / p.R).dot(f / fn);
  };
  score += oppose(sol.p_l, sol.f_l);
  score += oppose(sol.p_r, sol.f_r);
  return score;
}

ContactSolution assemble(const Branch& br, const Forces& f, const Eigen::Vector2d& pc,
                         const Eigen::Vector2d& po) {
  ContactSolution sol;
  sol.f_l = f.f_l;
  sol.f_r = f.f_r;
  if (br.carrier_right) {
    sol.p_r = Vector3d(pc.x(), 0.0, pc.y());
    sol.p_l = Vector3d(po.x(), 0.0, po.y());
  } else {
    sol.p_l = Vector3d(pc.x(), 0.0, pc.y());
    sol.p_r = Vector3d(po.x(), 0.0, po.y());
  }
  return sol;
}

}  // namespace

TotalWrench forward_wrench(const ContactSolution& sol, const VehicleParams& p) {
  TotalWrench w;
  w.F_e = sol.f_l + sol.f_r + Vector3d(0.0, 0.0, p.m_t * p.g);
  w.M_w_l = sol.p_l.z() * sol.f_l.x() - sol.p_l.x() * sol.f_l.z();
  w.M_w_r = sol.p_r.z() * sol.f_r.x() - sol.p_r.x() * sol.f_r.z();
  w.M_e.x() = p.L * (sol.f_l.z() - sol.f_r.z()) - sol.p_l.z() * sol.f_l.y() -
              sol.p_r.z() * sol.f_r.y();
  w.M_e.y() = w.M_w_l + w.M_w_r;
  w.M_e.z() = p.L * (sol.f_r.x() - sol.f_l.x()) + sol.p_l.x() * sol.f_l.y() +
              sol.p_r.x() * sol.f_r.y();
  return w;
}

double reconstruction_residual(const ContactSolution& sol, const TotalWrench& w,
                               const VehicleParams& p) {
  const TotalWrench r = forward_wrench(sol, p);
  double err = (r.F_e - w.F_e).cwiseAbs().maxCoeff();
  err = std::max(err, (r.M_e - w.M_e).cwiseAbs().maxCoeff());
  err = std::max(err, std::abs(r.M_w_l - w.M_w_l));
  err = std::max(err, std::abs(r.M_w_r - w.M_w_r));
  return err;
}

ContactSolution estimate_contact(const TotalWrench& w, const VehicleParams& p) {
  const Branch br = select_branch(w);
  const double Fx = w.F_e.x();
  const double Fz_t = w.F_e.z() - p.m_t * p.g;

  double a, b, c;
  if (br.carrier_right) {
    a = w.M_e.x() - p.L * Fz_t;
    b = w.M_e.z() + p.L * Fx;
    c = -2.0 * p.L * w.M_w_r;
  } else {
    a = w.M_e.x() + p.L * Fz_t;
    b = w.M_e.z() - p.L * Fx;
    c = 2.0 * p.L * w.M_w_l;
  }
  if (a * a + b * b < kDegenerateTol) {
    throw DegenerateWrench("contact direction unobservable (a^2 + b^2 < 1e-12)");
  }

  const LineRoots carrier_roots =
      line_circle_roots(a, b, -c, preferred_sign(a, b, Fx, Fz_t), p);

  struct Candidate {
    ContactSolution sol;
    double score;
  };
  std::vector<Candidate> candidates;

  const int n_carrier = carrier_roots.distinct ? 2 : 1;
  for (int ic = 0; ic < n_carrier; ++ic) {
    const Eigen::Vector2d pc = ic == 0 ? carrier_roots.first : carrier_roots.second;
    const Forces f = fill_forces(w, br, pc.x(), pc.y(), p);
    const Vector3d f_o = br.carrier_right ? f.f_l : f.f_r;
    const double M_w_o = br.carrier_right ? w.M_w_l : w.M_w_r;

    const double ao = -f_o.z();
    const double bo = f_o.x();
    if (ao * ao + bo * bo < kDegenerateTol) {
      // Unloaded wheel: its contact point carries no information; use the
      // resting convention when consistent, otherwise reject this root.
      if (std::abs(M_w_o) < 1e-9) {
        const Eigen::Vector2d po(0.0, -p.R);
        const ContactSolution sol = assemble(br, f, pc, po);
        candidates.push_back({sol, physicality_score(sol, p)});
      }
      continue;
    }

    LineRoots other_roots;
    try {
      other_roots = line_circle_roots(ao, bo, M_w_o, preferred_sign(ao, bo, Fx, Fz_t), p);
    } catch (const NoRealSolution&) {
      continue;
    }
    const int n_other = other_roots.distinct ? 2 : 1;
    for (int io = 0; io < n_other; ++io) {
      const Eigen::Vector2d po = io == 0 ? other_roots.first : other_roots.second;
      const ContactSolution sol = assemble(br, f, pc, po);
      candidates.push_back({sol, physicality_score(sol, p)});
    }
  }

  if (candidates.empty()) {
    throw NoRealSolution("no contact point combination is consistent with the wrench");
  }
  const auto best = std::max_element(
      candidates.begin(), candidates.end(),
      [](const Candidate& x, const Candidate& y) { return x.score < y.score; });
  return best->sol;
}

namespace {

// Residual of the two per-wheel moment equations for given contact angles.
// The remaining constraints are satisfied exactly by fill_forces.
struct GridObjective {
  const TotalWrench& w;
  const Branch& br;
  const VehicleParams& p;

  double carrier_residual(double theta_c, Forces* forces_out = nullptr) const {
    const double px = p.R * std::sin(theta_c);
    const double pz = -p.R * std::cos(theta_c);
    const Forces f = fill_forces(w, br, px, pz, p);
    const Vector3d f_c = br.carrier_right ? f.f_r : f.f_l;
    const double M_w_c = br.carrier_right ? w.M_w_r : w.M_w_l;
    if (forces_out) *forces_out = f;
    return pz * f_c.x() - px * f_c.z() - M_w_c;
  }

  double other_residual(const Forces& f, double cos_o, double sin_o) const {
    const Vector3d f_o = br.carrier_right ? f.f_l : f.f_r;
    const double M_w_o = br.carrier_right ? w.M_w_l : w.M_w_r;
    return -p.R * cos_o * f_o.x() - p.R * sin_o * f_o.z() - M_w_o;
  }

  double operator()(double theta_c, double theta_o) const {
    Forces f;
    const double rc = carrier_residual(theta_c, &f);
    const double ro = other_residual(f, std::cos(theta_o), std::sin(theta_o));
    return rc * rc + ro * ro;
  }
};

struct GridTables {
  std::vector<double> theta, c, s;
};

const GridTables& grid_tables() {
  static const GridTables t = [] {
    GridTables g;
    for (double th = -kThetaMax; th <= kThetaMax; th += kGridStep) {
      g.theta.push_back(th);
      g.c.push_back(std::cos(th));
      g.s.push_back(std::sin(th));
    }
    return g;
  }();
  return t;
}

// Damped Newton refinement of the squared-residual objective in the two
// contact angles.
Eigen::Vector2d refine(const GridObjective& obj, Eigen::Vector2d th) {
  const double h = 1e-6;
  double val = obj(th.x(), th.y());
  for (int it = 0; it < 60; ++it) {
    const double fpx = obj(th.x() + h, th.y());
    const double fmx = obj(th.x() - h, th.y());
    const double fpy = obj(th.x(), th.y() + h);
    const double fmy = obj(th.x(), th.y() - h);
    const Eigen::Vector2d grad((fpx - fmx) / (2 * h), (fpy - fmy) / (2 * h));
    Eigen::Matrix2d H;
    H(0, 0) = (fpx - 2 * val + fmx) / (h * h);
    H(1, 1) = (fpy - 2 * val + fmy) / (h * h);
    const double fxy = obj(th.x() + h, th.y() + h);
    H(0, 1) = H(1, 0) = (fxy - fpx - fpy + val) / (h * h);

    Eigen::Vector2d step = H.fullPivLu().solve(-grad);
    if (!step.allFinite() || step.norm() > 0.1) step = -grad.normalized() * kGridStep;

    double lambda = 1.0;
    for (int ls = 0; ls < 20; ++ls) {
      Eigen::Vector2d cand = th + lambda * step;
      cand.x() = std::clamp(cand.x(), -kThetaMax, kThetaMax);
      cand.y() = std::clamp(cand.y(), -kThetaMax, kThetaMax);
      const double cv = obj(cand.x(), cand.y());
      if (cv < val) {
        th = cand;
        val = cv;
        break;
      }
      lambda *= 0.5;
    }
    if (val < 1e-24 || grad.norm() < 1e-14) break;
  }
  return th;
}

}  // namespace

ContactSolution brute_force_contact(const TotalWrench& w, const VehicleParams& p) {
  const Branch br = select_branch(w);
  const GridObjective obj{w, br, p};
  const GridTables& g = grid_tables();
  const int n = static_cast<int>(g.theta.size());

  // Best theta_o (and runner-up basin) for every carrier angle.
  std::vector<double> best_val(n);
  std::vector<int> best_io(n);
  for (int ic = 0; ic < n; ++ic) {
    Forces f;
    const double rc = obj.carrier_residual(g.theta[ic], &f);
    const Vector3d f_o = br.carrier_right ? f.f_l : f.f_r;
    const double M_w_o = br.carrier_right ? w.M_w_l : w.M_w_r;
    const double A = -p.R * f_o.x();
    const double B = -p.R * f_o.z();
    const double C = -M_w_o;
    double bv = std::numeric_limits<double>::infinity();
    int bi = 0;
    for (int io = 0; io < n; ++io) {
      const double ro = A * g.c[io] + B * g.s[io] + C;
      const double v = ro * ro;
      if (v < bv) {
        bv = v;
        bi = io;
      }
    }
    best_val[ic] = rc * rc + bv;
    best_io[ic] = bi;
  }

  // Collect local minima of the carrier-angle profile, then refine each and
  // keep the best-scoring exact solution.
  std::vector<std::pair<int, int>> seeds;
  for (int ic = 0; ic < n; ++ic) {
    const bool left_ok = ic == 0 || best_val[ic] <= best_val[ic - 1];
    const bool right_ok = ic == n - 1 || best_val[ic] <= best_val[ic + 1];
    if (left_ok && right_ok) seeds.emplace_back(ic, best_io[ic]);
  }
  std::sort(seeds.begin(), seeds.end(), [&](const auto& x, const auto& y) {
    return best_val[x.first] < best_val[y.first];
  });
  if (seeds.size() > 8) seeds.resize(8);

  double best_res = std::numeric_limits<double>::infinity();
  double best_score = -std::numeric_limits<double>::infinity();
  ContactSolution best_sol;
  bool have = false;
  for (const auto& [ic, io] : seeds) {
    const Eigen::Vector2d th =
        refine(obj, Eigen::Vector2d(g.theta[ic], g.theta[io]));
    const double res = std::sqrt(obj(th.x(), th.y()));
    Forces f;
    obj.carrier_residual(th.x(), &f);
    const Eigen::Vector2d pc(p.R * std::sin(th.x()), -p.R * std::cos(th.x()));
    const Eigen::Vector2d po(p.R * std::sin(th.y()), -p.R * std::cos(th.y()));
    const ContactSolution sol = assemble(br, f, pc, po);
    const double score = physicality_score(sol, p);
    const bool exact = res < 1e-6;
    const bool best_exact = best_res < 1e-6;
    const bool better = !have || (exact && !best_exact) ||
                        (exact && best_exact && score > best_score) ||
                        (!exact && !best_exact && res < best_res);
    if (better) {
      best_res = res;
      best_score = score;
      best_sol = sol;
      have = true;
    }
  }

  if (!have || best_res > 1e-6) {
    throw NoRealSolution("grid search found no contact configuration (best residual " +
                         std::to_string(best_res) + ")");
  }
  return best_sol;
}

}  // namespace cio
