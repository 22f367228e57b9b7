#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cio/contact_solver.hpp"
#include "cio/rng.hpp"
#include "cio/vehicle_params.hpp"

namespace cio::validation {

struct CheckResult {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Random per-wheel contact configuration with lower-half contact points and
// inward-pointing forces (the family the solvers canonicalize to).
ContactSolution random_contact_solution(Rng& rng, const VehicleParams& p);

// Analytic vs brute-force solver agreement on n forward-generated wrenches,
// plus circle-constraint and round-trip residuals. perturb_R biases the wheel
// radius seen by the analytic solver only (fault-injection hook).
CheckResult contact_oracle_check(int n, uint64_t seed, const VehicleParams& p,
                                 double perturb_R = 0.0);

// The 15 cm box-collision geometry: both wheels pressed against a box edge.
CheckResult contact_box_check(const VehicleParams& p, double perturb_R = 0.0);

// Rodrigues rotation against rotation matrices on random inputs.
CheckResult rodrigues_check(int n, uint64_t seed);

// Observer step responses against the closed-form first-order response at
// gains 1, 10 and 100.
CheckResult filter_response_check(const VehicleParams& p);

std::vector<CheckResult> run_all(uint64_t seed, int contact_instances,
                                 const VehicleParams& p, double perturb_R = 0.0);

}  // namespace cio::validation
