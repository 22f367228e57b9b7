#include "cio/validation.hpp"

#include <cmath>

#include "cio/geometry.hpp"
#include "cio/wrench_estimator.hpp"

namespace cio::validation {

ContactSolution random_contact_solution(Rng& rng, const VehicleParams& p) {
  ContactSolution sol;
  const bool carrier_right = rng.uniform01() < 0.5;
  const double f_y = rng.uniform(0.3, 3.0) * (carrier_right ? 1.0 : -1.0);

  auto make_wheel = [&](bool carries) {
    const double theta = rng.uniform(-1.25, 1.25);
    const Vector3d pt(p.R * std::sin(theta), 0.0, -p.R * std::cos(theta));
    // Force opposing the contact point with bounded tangential jitter.
    const Vector3d inward = -pt.normalized();
    const Vector3d tangent(std::cos(theta), 0.0, std::sin(theta));
    const double mag = rng.uniform(3.0, 30.0);
    Vector3d f = mag * (inward + 0.3 * rng.uniform(-1.0, 1.0) * tangent).normalized();
    f.y() = carries ? f_y : 0.0;
    return std::make_pair(pt, f);
  };

  auto [pl, fl] = make_wheel(!carrier_right);
  auto [pr, fr] = make_wheel(carrier_right);
  sol.p_l = pl;
  sol.f_l = fl;
  sol.p_r = pr;
  sol.f_r = fr;
  return sol;
}

namespace {

double solution_mismatch(const ContactSolution& a, const ContactSolution& b) {
  double err = 0.0;
  err = std::max(err, (a.f_l - b.f_l).cwiseAbs().maxCoeff());
  err = std::max(err, (a.f_r - b.f_r).cwiseAbs().maxCoeff());
  err = std::max(err, (a.p_l - b.p_l).cwiseAbs().maxCoeff());
  err = std::max(err, (a.p_r - b.p_r).cwiseAbs().maxCoeff());
  return err;
}

double circle_residual(const ContactSolution& s, const VehicleParams& p) {
  const double r2 = p.R * p.R;
  const double rl = std::abs(s.p_l.x() * s.p_l.x() + s.p_l.z() * s.p_l.z() - r2);
  const double rr = std::abs(s.p_r.x() * s.p_r.x() + s.p_r.z() * s.p_r.z() - r2);
  return std::max(rl, rr);
}

}  // namespace

CheckResult contact_oracle_check(int n, uint64_t seed, const VehicleParams& p,
                                 double perturb_R) {
  VehicleParams p_analytic = p;
  p_analytic.R += perturb_R;

  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const ContactSolution truth = random_contact_solution(rng, p);
    const TotalWrench w = forward_wrench(truth, p);
    const ContactSolution analytic = estimate_contact(w, p_analytic);
    const ContactSolution brute = brute_force_contact(w, p);

    double err = solution_mismatch(analytic, brute);
    err = std::max(err, solution_mismatch(analytic, truth));
    err = std::max(err, circle_residual(analytic, p_analytic) / p.R);
    err = std::max(err, reconstruction_residual(analytic, w, p_analytic));
    worst = std::max(worst, err);
  }
  return {"contact_solver_oracle_equivalence", worst, 1e-6, worst < 1e-6};
}

CheckResult contact_box_check(const VehicleParams& p, double perturb_R) {
  VehicleParams p_analytic = p;
  p_analytic.R += perturb_R;

  // Frontal collision with a box of height 0.15 m: contact at the box top
  // edge on both wheels, weight carried evenly.
  const double box_height = 0.15;
  const double p_z = box_height - p.R;
  const double p_x = std::sqrt(p.R * p.R - p_z * p_z);

  ContactSolution truth;
  truth.p_l = Vector3d(p_x, 0.0, p_z);
  truth.p_r = truth.p_l;
  truth.f_l = Vector3d(-2.0, 0.0, 0.5 * p.m_t * p.g);
  truth.f_r = truth.f_l;

  const TotalWrench w = forward_wrench(truth, p);
  const ContactSolution sol = estimate_contact(w, p_analytic);

  double err = 0.0;
  err = std::max(err, std::abs(sol.p_l.z() - p_z));
  err = std::max(err, std::abs(sol.p_r.z() - p_z));
  err = std::max(err, std::abs(std::abs(sol.p_l.x()) - p_x));
  err = std::max(err, std::abs(std::abs(sol.p_r.x()) - p_x));
  return {"contact_solver_box_15cm", err, 1e-6, err < 1e-6};
}

CheckResult rodrigues_check(int n, uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector3d axis =
        Vector3d(rng.normal(), rng.normal(), rng.normal()).normalized();
    const double angle = rng.uniform(-M_PI, M_PI);
    const Vector3d v(rng.normal(), rng.normal(), rng.normal());
    const Vector3d got = rodrigues_rotate(v, axis, angle);
    const Vector3d want = Eigen::AngleAxisd(angle, axis).toRotationMatrix() * v;
    worst = std::max(worst, (got - want).cwiseAbs().maxCoeff());
  }
  return {"rodrigues_vs_rotation_matrix", worst, 1e-12, worst < 1e-12};
}

CheckResult filter_response_check(const VehicleParams& p) {
  const double dt = 1.0 / 200.0;
  double worst = 0.0;
  for (double K : {1.0, 10.0, 100.0}) {
    VehicleParams pk = p;
    pk.K_F = pk.K_M = pk.K_w = K;

    WrenchEstimate est;
    ImuSample imu;
    imu.a = Vector3d(1.0 / pk.m_t, 0.0, 0.0);  // constant 1 N force residual
    ControlWrench u;
    u.M_in = Vector3d(-1.0, 0.0, 0.0);  // constant 1 N m moment residual
    EncoderSample enc;
    enc.gamma_dot_l = enc.gamma_dot_r = 1.0 / pk.I_w;  // 1 N m wheel residual

    for (int k = 1; k <= 400; ++k) {
      est = update_flying(est, imu, enc, u, dt, pk);
      const double t = k * dt;
      const double want = 1.0 - std::exp(-K * t);
      worst = std::max(worst, std::abs(est.F_e_hat.x() - want));
      worst = std::max(worst, std::abs(est.M_e_hat.x() - want));
      worst = std::max(worst, std::abs(est.M_w_hat_l - want));
      worst = std::max(worst, std::abs(est.M_w_hat_r - want));
    }
  }
  return {"observer_step_response_closed_form", worst, 1e-6, worst < 1e-6};
}

std::vector<CheckResult> run_all(uint64_t seed, int contact_instances,
                                 const VehicleParams& p, double perturb_R) {
  std::vector<CheckResult> out;
  out.push_back(contact_oracle_check(contact_instances, seed, p, perturb_R));
  out.push_back(contact_box_check(p, perturb_R));
  out.push_back(rodrigues_check(1000, seed + 1));
  out.push_back(filter_response_check(p));
  return out;
}

}  // namespace cio::validation
