#include "cio/simulator.hpp"

#include <cmath>
#include <deque>
#include <optional>

#include "cio/errors.hpp"

namespace cio {

namespace {

using nlohmann::json;

struct Pulse {
  double t0 = 0.0;
  double duration = 0.05;
  Vector3d impulse = Vector3d::Zero();  // world frame

  Vector3d force_at(double t) const {
    const double tau = t - t0;
    if (tau < 0.0 || tau > duration) return Vector3d::Zero();
    return impulse * (M_PI / (2.0 * duration)) * std::sin(M_PI * tau / duration);
  }
};

FilterState init_filter(const RigidState& s) {
  FilterState fs;
  fs.r = s.r;
  fs.q = s.q;
  fs.v = s.v;
  fs.omega = s.omega;
  fs.P = Matrix12d::Zero();
  fs.P.diagonal().segment<3>(0).setConstant(1e-6);
  fs.P.diagonal().segment<3>(3).setConstant(1e-6);
  fs.P.diagonal().segment<3>(6).setConstant(1e-4);
  fs.P.diagonal().segment<3>(9).setConstant(1e-4);
  return fs;
}

void compute_flight_metrics(RunLog& log, const ScenarioConfig& cfg, int update_count,
                            bool cov_trace_decreased, double min_trace_drop) {
  json m;
  m["mode"] = cfg.mode == ScenarioMode::Bouncing ? "bouncing" : "flying";
  m["seed"] = cfg.seed;
  m["duration"] = cfg.duration;
  m["events"] = log.events.size();
  m["updates"] = update_count;
  m["cov_trace_strictly_decreased"] = cov_trace_decreased;
  m["cov_trace_min_drop"] = min_trace_drop;

  double cio_max = 0.0, shadow_max = 0.0, max_xy = 0.0;
  double shadow_exceeds_2_at = -1.0;
  const Vector3d start = log.records.empty() ? Vector3d::Zero() : log.records.front().r;
  for (const auto& rec : log.records) {
    const double ce = (rec.cio_v - rec.v).norm();
    const double se = (rec.shadow_v - rec.v).norm();
    cio_max = std::max(cio_max, ce);
    shadow_max = std::max(shadow_max, se);
    if (shadow_exceeds_2_at < 0.0 && se > 2.0) shadow_exceeds_2_at = rec.t;
    max_xy = std::max(max_xy, (rec.r - start).head<2>().norm());
  }
  m["cio_max_vel_error"] = cio_max;
  m["shadow_max_vel_error"] = shadow_max;
  m["shadow_error_exceeds_2_at"] = shadow_exceeds_2_at;
  m["max_xy_distance_from_start"] = max_xy;
  if (!log.records.empty()) {
    const auto& last = log.records.back();
    m["final_position"] = {last.r.x(), last.r.y(), last.r.z()};
    m["cio_final_vel_error"] = (last.cio_v - last.v).norm();
    m["shadow_final_vel_error"] = (last.shadow_v - last.v).norm();
  }

  // Force-direction fidelity at detections.
  double max_angle = 0.0;
  int within_15 = 0;
  for (const auto& ev : log.events) {
    max_angle = std::max(max_angle, ev.angle_error_deg);
    if (ev.angle_error_deg <= 15.0) ++within_15;
  }
  m["direction_max_error_deg"] = max_angle;
  m["direction_within_15deg"] = within_15;

  // Detection latency for impulsive contacts.
  double max_latency = -1.0;
  bool all_detected = true;
  bool single_event_each = true;
  for (const auto& pulse : log.pulses) {
    if (pulse.impulse.norm() < 2.0) continue;
    int matches = 0;
    double latency = -1.0;
    for (const auto& ev : log.events) {
      const double dt = ev.event.t - pulse.t0;
      if (dt >= 0.0 && dt <= 0.05) {
        ++matches;
        latency = dt;
      }
    }
    if (matches == 0) all_detected = false;
    if (matches > 1) single_event_each = false;
    if (latency > max_latency) max_latency = latency;
  }
  m["impulse_all_detected_within_50ms"] = all_detected;
  m["impulse_single_event_each"] = single_event_each;
  m["impulse_max_latency"] = max_latency;

  // Vertical-bounce improvement: z-velocity error before ground impact vs
  // just after the corresponding measurement update.
  int bounce_total = 0, bounce_improved = 0;
  for (const auto& ev : log.events) {
    if (ev.truth_dir_world.z() < 0.7) continue;
    const PulseRecord* pulse = nullptr;
    for (const auto& pr : log.pulses) {
      if (pr.t0 <= ev.event.t && ev.event.t - pr.t0 < 0.25 &&
          pr.impulse.normalized().z() > 0.7) {
        pulse = &pr;
      }
    }
    if (!pulse) continue;
    const LogRecord* before = nullptr;
    const LogRecord* after = nullptr;
    for (const auto& rec : log.records) {
      if (rec.t < pulse->t0) before = &rec;
      if (!after && rec.t >= ev.event.t) after = &rec;
    }
    if (!before || !after) continue;
    ++bounce_total;
    const double e_before = std::abs(before->cio_v.z() - before->v.z());
    const double e_after = std::abs(after->cio_v.z() - after->v.z());
    if (e_after < e_before) ++bounce_improved;
  }
  m["bounce_contacts"] = bounce_total;
  m["bounce_improved"] = bounce_improved;

  log.metrics = m;
}

RunLog run_flight(const ScenarioConfig& cfg) {
  const VehicleParams& p = cfg.vehicle;
  const bool bouncing = cfg.mode == ScenarioMode::Bouncing;

  const double dt_dyn = 1.0 / cfg.dynamics_rate;
  const int sensor_div = static_cast<int>(std::lround(cfg.dynamics_rate / cfg.sensor_rate));
  const double dt_sensor = sensor_div * dt_dyn;

  RigidState state;
  state.r = cfg.start_position;
  state.q = yaw_quat(cfg.start_yaw);

  ImuModel imu_model(cfg.noise, cfg.sensor_rate);
  WrenchEstimate est;
  CollisionDetector detector(cfg.detector.threshold, cfg.detector.refractory);
  const CollisionWeights weights =
      cfg.detector.full_weights ? CollisionWeights::full(p) : CollisionWeights::flying();
  ReactivePlanner planner(cfg.planner);

  FilterState cio = init_filter(state);
  FilterState shadow = cio;
  const Matrix12d Q = cfg.filter.process_covariance();

  ControlWrench u{p.m_t * p.g, Vector3d::Zero()};
  AttitudeThrust att_cmd{p.m_t * p.g, state.q};
  Vector3d v_ref_world(0.0, 0.0, 0.0);
  if (!bouncing) v_ref_world = planner.reference().v_ref;

  std::deque<Pulse> pulses;
  Vector3d sustained_impulse = Vector3d::Zero();
  Vector3d last_contact_normal = Vector3d::UnitZ();

  RunLog log;
  const int n_steps = static_cast<int>(std::lround(cfg.duration * cfg.dynamics_rate));
  log.records.reserve(n_steps / sensor_div + 1);

  int update_count = 0;
  bool cov_trace_decreased = true;
  double min_trace_drop = std::numeric_limits<double>::infinity();
  int sensor_tick = 0;

  for (int k = 1; k <= n_steps; ++k) {
    const double t = k * dt_dyn;

    ExternalWrench ext;
    ext.F_e = state.q.conjugate() * cfg.external_force_world;
    state = step(state, u, ext, dt_dyn, p, VehicleMode::Flying);

    const ContactResolution res =
        resolve_contacts(state, cfg.environment, cfg.collision_radius, p.m_t);
    state = res.state;
    if (res.contact && res.impulse.norm() > 0.0) {
      if (res.delta_v.norm() > 0.05) {
        pulses.push_back({t, cfg.pulse_duration, res.impulse});
        log.pulses.push_back({t, res.impulse});
        last_contact_normal = res.normal;
      } else {
        sustained_impulse += res.impulse;
      }
    }

    if (k % sensor_div != 0) continue;
    ++sensor_tick;

    // Synthetic contact force on the sensor path: half-sine transients for
    // impulsive hits plus the averaged sustained support force.
    Vector3d contact_force_world = sustained_impulse / dt_sensor;
    sustained_impulse.setZero();
    for (const auto& pulse : pulses) contact_force_world += pulse.force_at(t);
    while (!pulses.empty() && t - pulses.front().t0 > pulses.front().duration) {
      pulses.pop_front();
    }

    const Matrix3d R = state.q.toRotationMatrix();
    const Vector3d contact_force_body = R.transpose() * contact_force_world;
    const Vector3d F_in_body(0.0, 0.0, u.F_in_z);
    const Vector3d ext_body = R.transpose() * cfg.external_force_world;
    const Vector3d specific_force = (F_in_body + contact_force_body + ext_body) / p.m_t;

    const ImuSample imu = imu_model.sample(specific_force, state.omega, t);
    est = update_flying(est, imu, std::nullopt, u, dt_sensor, p);
    const double W = collision_metric(est, weights);

    cio = predict(cio, imu, Q, dt_sensor, p.g);
    shadow = predict(shadow, imu, Q, dt_sensor, p.g);

    bool updated = false;
    const auto event = detector.feed(t, W, est.F_e_hat, ContactMode::Flying);
    if (event) {
      EventRecord er;
      er.event = *event;
      er.est_dir_world = (R * est.F_e_hat).normalized();
      er.truth_dir_world = last_contact_normal;
      er.angle_error_deg =
          angle_between(er.est_dir_world, er.truth_dir_world) * 180.0 / M_PI;
      log.events.push_back(er);

      if (cfg.filter.enable_contact_updates) {
        const Matrix3d R_k = pseudo_measurement_covariance(cfg.filter.r_pseudo, est.F_e_hat,
                                                           cfg.filter.anisotropic);
        try {
          const double pre_trace = cio.P.block<3, 3>(6, 6).trace();
          cio = contact_update(cio, est.F_e_hat, R_k);
          const double post_trace = cio.P.block<3, 3>(6, 6).trace();
          if (!(post_trace < pre_trace)) cov_trace_decreased = false;
          min_trace_drop = std::min(min_trace_drop, pre_trace - post_trace);
          ++update_count;
          updated = true;
        } catch (const ZeroForce&) {
          // Moment-dominated detection with a negligible force estimate.
        }
      }
      if (!bouncing) {
        planner.on_collision(R * est.F_e_hat, t);
      }
    }

    // Velocity loop
    if (sensor_tick % cfg.velocity_loop_divisor == 1 || cfg.velocity_loop_divisor == 1) {
      const Vector3d v_body =
          cfg.feedback == FeedbackSource::Truth ? state.v : cio.v;
      const Vector3d v_est_world = R * v_body;
      if (bouncing) {
        v_ref_world.head<2>().setZero();
        v_ref_world.z() = vertical_bounce_reference(t, cfg.planner);
      } else {
        v_ref_world = planner.reference().v_ref;
        v_ref_world.z() = cfg.height_hold.enabled
                              ? cfg.height_hold.kp * (cfg.height_hold.target - state.r.z())
                              : 0.0;
      }
      const Vector3d a_des =
          velocity_to_acceleration(v_ref_world, v_est_world, cfg.gains, p.g);
      att_cmd = acceleration_to_attitude_thrust(a_des, cfg.gains.yaw_ref, p);
    }

    // Attitude loop (every sensor tick)
    const Vector3d M_in =
        attitude_rate_controller(att_cmd.q_des, state.q, imu.omega, cfg.gains, p);
    u.F_in_z = std::max(att_cmd.thrust, 0.0);
    u.M_in = M_in;

    LogRecord rec;
    rec.t = t;
    rec.r = state.r;
    rec.q = state.q;
    rec.v = state.v;
    rec.omega = state.omega;
    rec.contact_force_body = contact_force_body;
    rec.imu_a = imu.a;
    rec.imu_omega = imu.omega;
    rec.F_e_hat = est.F_e_hat;
    rec.M_e_hat = est.M_e_hat;
    rec.M_w_hat_l = est.M_w_hat_l;
    rec.M_w_hat_r = est.M_w_hat_r;
    rec.W = W;
    rec.event = event.has_value();
    rec.cio_r = cio.r;
    rec.cio_v = cio.v;
    rec.cio_P_v_diag = cio.P.diagonal().segment<3>(6);
    rec.shadow_v = shadow.v;
    rec.shadow_P_v_diag = shadow.P.diagonal().segment<3>(6);
    rec.cio_updated = updated;
    rec.v_ref = v_ref_world;
    rec.thrust = u.F_in_z;
    rec.M_in = u.M_in;
    log.records.push_back(rec);
  }

  compute_flight_metrics(log, cfg, update_count,
                         update_count > 0 ? cov_trace_decreased : true,
                         update_count > 0 ? min_trace_drop : 0.0);
  return log;
}

RunLog run_rolling(const ScenarioConfig& cfg) {
  const VehicleParams& p = cfg.vehicle;
  const RollingConfig& rc = cfg.rolling;

  const double dt_dyn = 1.0 / cfg.dynamics_rate;
  const int sensor_div = static_cast<int>(std::lround(cfg.dynamics_rate / cfg.sensor_rate));
  const double dt_sensor = sensor_div * dt_dyn;

  // Constraint-reduced coordinates: wheel rates + planar pose, body pitch
  // held level. Published coefficients of the constrained dynamics.
  const double c_x = 0.5 * p.m_t * p.R + 2.0 * p.I_w / p.R;
  const double c_z = 0.5 * p.R / p.L * p.I_t.z() + p.m_w * p.L * p.R + p.I_w * p.L / p.R;

  double gamma_l = 0.0, gamma_r = 0.0;
  double x = cfg.start_position.x(), y = cfg.start_position.y();
  double yaw = cfg.start_yaw;

  ImuModel imu_model(cfg.noise, cfg.sensor_rate);
  EncoderModel enc_model(cfg.noise, cfg.sensor_rate);
  WrenchEstimate est;
  CollisionDetector detector(cfg.detector.threshold, cfg.detector.refractory);
  const CollisionWeights weights = CollisionWeights::full(p);

  double F_drive = 0.0, M_drive = 0.0;

  RunLog log;
  const int n_steps = static_cast<int>(std::lround(cfg.duration * cfg.dynamics_rate));
  int sensor_tick = 0;

  for (int k = 1; k <= n_steps; ++k) {
    const double t = k * dt_dyn;

    const double v_x = 0.5 * p.R * (gamma_r + gamma_l);
    const double w_z = 0.5 * p.R / p.L * (gamma_r - gamma_l);

    // Drive servo (velocity-loop rate)
    if ((k - 1) % (sensor_div * cfg.velocity_loop_divisor) == 0) {
      const double w_ref =
          rc.yaw_rate_amplitude * std::sin(2.0 * M_PI * t / rc.yaw_rate_period);
      F_drive = rc.kp_drive * (rc.v_ref - v_x);
      M_drive = rc.kp_yaw * (w_ref - w_z);
    }

    // Longitudinal resistance engages smoothly with forward motion.
    const double F_res = rc.resistance_force * std::clamp(v_x / 0.02, -1.0, 1.0);

    const double gdot_sum = (F_drive + F_res) / c_x;
    const double gdot_diff = M_drive / c_z;
    gamma_l += 0.5 * (gdot_sum - gdot_diff) * dt_dyn;
    gamma_r += 0.5 * (gdot_sum + gdot_diff) * dt_dyn;

    const double v_mid = 0.5 * p.R * (gamma_r + gamma_l);
    const double w_mid = 0.5 * p.R / p.L * (gamma_r - gamma_l);
    x += v_mid * std::cos(yaw) * dt_dyn;
    y += v_mid * std::sin(yaw) * dt_dyn;
    yaw += w_mid * dt_dyn;

    if (k % sensor_div != 0) continue;
    ++sensor_tick;

    const double v_now = 0.5 * p.R * (gamma_r + gamma_l);
    const double w_now = 0.5 * p.R / p.L * (gamma_r - gamma_l);

    const EncoderSample enc = enc_model.sample(gamma_l, gamma_r, t);
    // Gyro only; the accelerometer is unused by the rolling observer.
    const ImuSample imu = imu_model.sample(Vector3d::Zero(), Vector3d(0.0, 0.0, w_now), t);

    ControlWrench u;
    u.M_in.z() = M_drive;
    est = update_rolling(est, enc, imu.omega, u, F_drive, dt_sensor, p);
    const double W = collision_metric(est, weights);
    const auto event = detector.feed(t, W, est.F_e_hat, ContactMode::Rolling);
    if (event) {
      EventRecord er;
      er.event = *event;
      er.est_dir_world = (yaw_quat(yaw) * est.F_e_hat).normalized();
      er.truth_dir_world = -Vector3d(std::cos(yaw), std::sin(yaw), 0.0);
      er.angle_error_deg = angle_between(er.est_dir_world, er.truth_dir_world) * 180.0 / M_PI;
      log.events.push_back(er);
    }

    LogRecord rec;
    rec.t = t;
    rec.r = Vector3d(x, y, p.R);
    rec.q = yaw_quat(yaw);
    rec.v = Vector3d(v_now, 0.0, 0.0);
    rec.omega = Vector3d(0.0, 0.0, w_now);
    rec.gamma_l = gamma_l;
    rec.gamma_r = gamma_r;
    rec.contact_force_body = Vector3d(F_res, p.m_t * v_now * w_now, 0.0);
    rec.imu_a = imu.a;
    rec.imu_omega = imu.omega;
    rec.F_e_hat = est.F_e_hat;
    rec.M_e_hat = est.M_e_hat;
    rec.W = W;
    rec.event = event.has_value();
    rec.v_ref = Vector3d(rc.v_ref, 0.0, 0.0);
    rec.thrust = F_drive;
    rec.M_in = u.M_in;
    log.records.push_back(rec);
  }

  json m;
  m["mode"] = "rolling";
  m["seed"] = cfg.seed;
  m["duration"] = cfg.duration;
  m["events"] = log.events.size();

  double max_res_v = 0.0, max_res_w = 0.0;
  for (const auto& rec : log.records) {
    const Vector3d c = rolling_constrained_velocity(rec.gamma_l, rec.gamma_r, rec.omega.y(), p);
    max_res_v = std::max(max_res_v, std::abs(rec.v.x() - c.x()));
    max_res_w = std::max(max_res_w, std::abs(rec.omega.z() - c.z()));
  }
  m["eq5_residual_vx_max"] = max_res_v;
  m["eq5_residual_wz_max"] = max_res_w;

  double f_sum = 0.0;
  int f_count = 0;
  for (const auto& rec : log.records) {
    if (rec.t > 2.0 * cfg.duration / 3.0) {
      f_sum += rec.F_e_hat.x();
      ++f_count;
    }
  }
  const double f_mean = f_count > 0 ? f_sum / f_count : 0.0;
  m["F_e_x_mean_last_third"] = f_mean;
  if (std::abs(rc.resistance_force) > 1e-9) {
    m["resistance_recovery_rel_err"] =
        std::abs(f_mean - rc.resistance_force) / std::abs(rc.resistance_force);
  }
  if (!log.records.empty()) {
    const auto& last = log.records.back();
    m["final_position"] = {last.r.x(), last.r.y(), last.r.z()};
  }
  log.metrics = m;
  return log;
}

}  // namespace

RunLog run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  if (cfg.mode == ScenarioMode::Rolling) return run_rolling(cfg);
  return run_flight(cfg);
}

}  // namespace cio
