#pragma once

#include <Eigen/Dense>

#include "cio/errors.hpp"

namespace cio {

// Physical constants of the hybrid rolling/flying platform. Defaults are the
// reference vehicle (4 kg class, two 0.53 m passive wheels, 8 rotors).
struct VehicleParams {
  double m_t = 4.036;    // total mass [kg]
  double m_w = 0.283;    // single wheel mass [kg]
  Eigen::Vector3d I_t{0.09, 0.074, 0.09};     // total inertia diagonal [kg m^2]
  Eigen::Vector3d I_b{0.035, 0.0545, 0.035};  // body inertia diagonal [kg m^2]
  double I_w = 0.00975;  // wheel spin inertia [kg m^2]
  double D = 0.2286;     // propeller diameter [m]
  double C_p = 0.11;     // thrust coefficient [-]
  double C_q = 0.008;    // torque coefficient [-]
  double rho = 1.18;     // air density [kg/m^3]
  double R = 0.2667;     // wheel radius [m]
  double l = 0.254;      // rotor arm length [m]
  double L = 0.3125;     // half shaft length [m]
  double K_F = 10.0;     // force observer gain [1/s]
  double K_M = 10.0;     // moment observer gain [1/s]
  double K_w = 10.0;     // wheel moment observer gain [1/s]
  double g = 9.81;       // gravity magnitude [m/s^2]

  double rotor_speed_max = 1500.0;  // saturation bound [rad/s]

  double thrust_coefficient() const { return rho * C_p * D * D * D * D; }
  double torque_coefficient() const { return rho * C_q * D * D * D * D * D; }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) throw ConfigError(std::string("vehicle parameter must be positive: ") + name);
    };
    positive(m_t, "m_t");
    if (m_w < 0.0) throw ConfigError("vehicle parameter must be nonnegative: m_w");
    for (int i = 0; i < 3; ++i) {
      positive(I_t[i], "I_t");
      positive(I_b[i], "I_b");
    }
    if (I_w < 0.0) throw ConfigError("vehicle parameter must be nonnegative: I_w");
    positive(D, "D");
    positive(C_p, "C_p");
    positive(C_q, "C_q");
    positive(rho, "rho");
    positive(R, "R");
    positive(l, "l");
    positive(L, "L");
    positive(K_F, "K_F");
    positive(K_M, "K_M");
    positive(K_w, "K_w");
    positive(g, "g");
    positive(thrust_coefficient(), "C_T");
    positive(torque_coefficient(), "C_Q");
  }
};

}  // namespace cio
