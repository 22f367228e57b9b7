#pragma once

#include <Eigen/Dense>
#include <optional>

#include "cio/vehicle_model.hpp"
#include "cio/vehicle_params.hpp"

namespace cio {

// Body-frame specific force + gyro rates.
struct ImuSample {
  Vector3d a = Vector3d::Zero();      // accelerometer, specific force [m/s^2]
  Vector3d omega = Vector3d::Zero();  // gyroscope [rad/s]
  double t = 0.0;
};

struct EncoderSample {
  double gamma_l = 0.0;
  double gamma_r = 0.0;
  double gamma_dot_l = 0.0;
  double gamma_dot_r = 0.0;
  double t = 0.0;
};

// First-order observer state. The filter outputs themselves carry the
// accumulated integrals; previous samples are kept for differentiating the
// gyro signal.
struct WrenchEstimate {
  Vector3d F_e_hat = Vector3d::Zero();
  Vector3d M_e_hat = Vector3d::Zero();
  double M_w_hat_l = 0.0;
  double M_w_hat_r = 0.0;

  Vector3d prev_omega = Vector3d::Zero();
  bool has_prev_omega = false;
};

struct CollisionWeights {
  double w_Fe = 1.0;
  double w_Me = 0.0;
  double w_Mw = 0.0;

  // Full weighting: moments normalized to force units by the vehicle geometry.
  static CollisionWeights full(const VehicleParams& p) {
    return {1.0, 1.0 / (p.L * p.L), 1.0 / (p.R * p.R)};
  }
  // Flight default: contact forces dominate, moment channels off.
  static CollisionWeights flying() { return {1.0, 0.0, 0.0}; }
};

enum class ContactMode { Flying, Rolling };

struct ContactEvent {
  double t = 0.0;
  Vector3d F_e = Vector3d::Zero();  // force estimate at detection
  double W = 0.0;
  ContactMode mode = ContactMode::Flying;
};

// Advances the flying-mode observer by one sample period. When no encoder
// data is available the wheel terms are evaluated with m_w = I_w = 0, which
// reduces the equations to the pure-quadrotor form.
WrenchEstimate update_flying(const WrenchEstimate& est, const ImuSample& imu,
                             const std::optional<EncoderSample>& enc, const ControlWrench& u,
                             double dt, const VehicleParams& p);

// Rolling-mode observer: estimates F_e^x, F_e^y and M_e^z from the
// constrained dynamics; all other wrench components are held at zero.
// f_in_x is the known longitudinal input force in the ground-aligned frame
// (tilted-thrust component; 0 when unpowered).
WrenchEstimate update_rolling(const WrenchEstimate& est, const EncoderSample& enc,
                              const Vector3d& omega, const ControlWrench& u, double f_in_x,
                              double dt, const VehicleParams& p);

double collision_metric(const WrenchEstimate& est, const CollisionWeights& w);

// Threshold detector with upward-crossing semantics and a refractory window.
// The threshold is expressed in force units (compared against sqrt(W)).
class CollisionDetector {
 public:
  CollisionDetector(double threshold, double refractory)
      : threshold_(threshold), refractory_(refractory) {}

  std::optional<ContactEvent> feed(double t, double W, const Vector3d& F_e_hat,
                                   ContactMode mode) {
    const double thr2 = threshold_ * threshold_;
    const bool above = W >= thr2;
    const bool crossed = above && !prev_above_;
    prev_above_ = above;
    if (!crossed) return std::nullopt;
    if (has_last_ && t - last_event_t_ < refractory_) return std::nullopt;
    last_event_t_ = t;
    has_last_ = true;
    return ContactEvent{t, F_e_hat, W, mode};
  }

  double threshold() const { return threshold_; }

 private:
  double threshold_;
  double refractory_;
  double last_event_t_ = 0.0;
  bool has_last_ = false;
  bool prev_above_ = false;
};

}  // namespace cio
