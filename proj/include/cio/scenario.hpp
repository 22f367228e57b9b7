#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cio/cio_filter.hpp"
#include "cio/environment.hpp"
#include "cio/maze.hpp"
#include "cio/reactive_planner.hpp"
#include "cio/sensors.hpp"
#include "cio/vehicle_params.hpp"
#include "cio/velocity_controller.hpp"
#include "cio/wrench_estimator.hpp"

namespace cio {

enum class ScenarioMode { Flying, Rolling, Bouncing };
enum class FeedbackSource { Estimate, Truth };

struct FilterConfig {
  double q_pos = 1e-8;     // per-step process variances (200 Hz)
  double q_att = 1e-9;
  double q_vel = 5e-4;
  double q_omega = 1e-5;
  double r_pseudo = 0.05;  // pseudo-measurement std [m/s]
  bool anisotropic = false;
  bool enable_contact_updates = true;

  Matrix12d process_covariance() const;
};

struct DetectorConfig {
  double threshold = 6.0;   // force-equivalent threshold on sqrt(W) [N]
  double refractory = 0.5;  // [s]
  bool full_weights = false;  // use the moment channels in W
};

struct HeightHoldConfig {
  bool enabled = true;
  double target = 1.0;  // [m]
  double kp = 1.5;      // [1/s]
};

struct RollingConfig {
  double v_ref = 0.8;              // [m/s]
  double yaw_rate_amplitude = 0.35;  // [rad/s]
  double yaw_rate_period = 15.0;   // [s]
  double resistance_force = 0.0;   // constant longitudinal external force [N]
  double kp_drive = 12.0;          // [N/(m/s)]
  double kp_yaw = 2.0;             // [N m/(rad/s)]
};

struct ScenarioConfig {
  int version = 1;
  ScenarioMode mode = ScenarioMode::Flying;
  double duration = 10.0;
  uint64_t seed = 0;
  bool comparison = false;

  VehicleParams vehicle;
  Environment environment;
  std::optional<MazeSpec> maze;

  SensorNoise noise;
  PlannerConfig planner;
  ControllerGains gains;
  FeedbackSource feedback = FeedbackSource::Estimate;
  FilterConfig filter;
  DetectorConfig detector;
  HeightHoldConfig height_hold;
  RollingConfig rolling;

  Vector3d start_position{0.0, 0.0, 1.0};
  double start_yaw = 0.0;
  double collision_radius = 0.2667;
  Vector3d external_force_world = Vector3d::Zero();  // constant applied force

  // Loop rates
  double dynamics_rate = 1000.0;
  double sensor_rate = 200.0;
  int velocity_loop_divisor = 4;  // velocity loop at sensor_rate / divisor

  // Collision force transient seen by the estimator path
  double pulse_duration = 0.05;  // [s]

  void validate() const;
};

// Parses a scenario file (JSON). Throws ConfigError naming the offending key.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& json_text, const std::string& origin);

// Applies seeds derived from cfg.seed to all random sub-components.
void apply_master_seed(ScenarioConfig& cfg);

}  // namespace cio
