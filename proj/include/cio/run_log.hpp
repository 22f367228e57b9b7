#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include <json.hpp>

#include "cio/vehicle_model.hpp"
#include "cio/wrench_estimator.hpp"

namespace cio {

// One record per estimation tick (sensor rate).
struct LogRecord {
  double t = 0.0;

  // Ground truth
  Vector3d r = Vector3d::Zero();
  Quaterniond q = Quaterniond::Identity();
  Vector3d v = Vector3d::Zero();      // body frame
  Vector3d omega = Vector3d::Zero();
  double gamma_l = 0.0, gamma_r = 0.0;
  Vector3d contact_force_body = Vector3d::Zero();

  // Sensors
  Vector3d imu_a = Vector3d::Zero();
  Vector3d imu_omega = Vector3d::Zero();

  // Wrench estimate
  Vector3d F_e_hat = Vector3d::Zero();
  Vector3d M_e_hat = Vector3d::Zero();
  double M_w_hat_l = 0.0, M_w_hat_r = 0.0;
  double W = 0.0;
  bool event = false;

  // Filters
  Vector3d cio_r = Vector3d::Zero();
  Vector3d cio_v = Vector3d::Zero();
  Vector3d cio_P_v_diag = Vector3d::Zero();
  Vector3d shadow_v = Vector3d::Zero();
  Vector3d shadow_P_v_diag = Vector3d::Zero();
  bool cio_updated = false;

  // Commands
  Vector3d v_ref = Vector3d::Zero();
  double thrust = 0.0;
  Vector3d M_in = Vector3d::Zero();
};

struct EventRecord {
  ContactEvent event;
  Vector3d truth_dir_world = Vector3d::Zero();
  Vector3d est_dir_world = Vector3d::Zero();
  double angle_error_deg = 0.0;
};

struct PulseRecord {
  double t0 = 0.0;
  Vector3d impulse = Vector3d::Zero();  // world frame [N s]
};

struct RunLog {
  std::vector<LogRecord> records;
  std::vector<EventRecord> events;
  std::vector<PulseRecord> pulses;
  nlohmann::json metrics;

  std::string to_jsonl() const;
  std::string to_csv() const;
  std::string metrics_text() const;
};

}  // namespace cio
