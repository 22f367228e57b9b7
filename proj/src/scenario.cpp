#include "cio/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cio/errors.hpp"

namespace cio {

using nlohmann::json;

Matrix12d FilterConfig::process_covariance() const {
  Matrix12d Q = Matrix12d::Zero();
  Q.diagonal().segment<3>(0).setConstant(q_pos);
  Q.diagonal().segment<3>(3).setConstant(q_att);
  Q.diagonal().segment<3>(6).setConstant(q_vel);
  Q.diagonal().segment<3>(9).setConstant(q_omega);
  return Q;
}

void ScenarioConfig::validate() const {
  if (!(duration > 0.0)) throw ConfigError("duration must be positive");
  if (!(collision_radius > 0.0)) throw ConfigError("collision_radius must be positive");
  if (!(pulse_duration > 0.0)) throw ConfigError("pulse_duration must be positive");
  if (!(detector.threshold > 0.0)) throw ConfigError("detector.threshold must be positive");
  if (detector.refractory < 0.0) throw ConfigError("detector.refractory must be nonnegative");
  if (!(filter.r_pseudo > 0.0)) throw ConfigError("filter.r_pseudo must be positive");
  vehicle.validate();
  environment.validate();
  noise.validate();
  planner.validate();
  gains.validate();
}

namespace {

// Typed reads that name the offending key on failure.
template <typename T>
T get_field(const json& j, const std::string& path, const std::string& key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("invalid value for config key '" + path + key + "'");
  }
}

Vector3d get_vec3(const json& j, const std::string& path, const std::string& key,
                  const Vector3d& fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 3) {
    throw ConfigError("config key '" + path + key + "' must be a 3-element array");
  }
  try {
    return Vector3d(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
  } catch (const json::exception&) {
    throw ConfigError("invalid value for config key '" + path + key + "'");
  }
}

void parse_vehicle(const json& j, VehicleParams& p) {
  const std::string path = "vehicle.";
  p.m_t = get_field(j, path, "m_t", p.m_t);
  p.m_w = get_field(j, path, "m_w", p.m_w);
  p.I_t = get_vec3(j, path, "I_t", p.I_t);
  p.I_b = get_vec3(j, path, "I_b", p.I_b);
  p.I_w = get_field(j, path, "I_w", p.I_w);
  p.D = get_field(j, path, "D", p.D);
  p.C_p = get_field(j, path, "C_p", p.C_p);
  p.C_q = get_field(j, path, "C_q", p.C_q);
  p.rho = get_field(j, path, "rho", p.rho);
  p.R = get_field(j, path, "R", p.R);
  p.l = get_field(j, path, "l", p.l);
  p.L = get_field(j, path, "L", p.L);
  p.K_F = get_field(j, path, "K_F", p.K_F);
  p.K_M = get_field(j, path, "K_M", p.K_M);
  p.K_w = get_field(j, path, "K_w", p.K_w);
  p.g = get_field(j, path, "g", p.g);
  p.rotor_speed_max = get_field(j, path, "rotor_speed_max", p.rotor_speed_max);
}

void parse_environment(const json& j, ScenarioConfig& cfg) {
  const std::string path = "environment.";
  Environment& env = cfg.environment;
  env.ground = get_field(j, path, "ground", env.ground);
  env.restitution = get_field(j, path, "restitution", env.restitution);
  env.tangential_friction = get_field(j, path, "tangential_friction", env.tangential_friction);

  if (j.contains("maze")) {
    const json& m = j.at("maze");
    MazeSpec spec;
    spec.cells = get_field(m, path + "maze.", "cells", spec.cells);
    spec.cell_size = get_field(m, path + "maze.", "cell_size", spec.cell_size);
    spec.wall_thickness = get_field(m, path + "maze.", "wall_thickness", spec.wall_thickness);
    spec.wall_height = get_field(m, path + "maze.", "wall_height", spec.wall_height);
    spec.seed = get_field(m, path + "maze.", "seed", spec.seed);
    cfg.maze = spec;
  }
  if (j.contains("walls")) {
    for (const auto& w : j.at("walls")) {
      Wall wall;
      wall.point = get_vec3(w, path + "walls[].", "point", wall.point);
      wall.normal = get_vec3(w, path + "walls[].", "normal", wall.normal);
      env.walls.push_back(wall);
    }
  }
  if (j.contains("boxes")) {
    for (const auto& b : j.at("boxes")) {
      Box box;
      box.center = get_vec3(b, path + "boxes[].", "center", box.center);
      box.half = get_vec3(b, path + "boxes[].", "half_extents", box.half);
      env.boxes.push_back(box);
    }
  }
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text, const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError("failed to parse " + origin + ": " + e.what());
  }

  ScenarioConfig cfg;
  cfg.version = get_field(j, "", "version", 1);
  if (cfg.version != 1) throw ConfigError("unsupported config version");

  const std::string mode = get_field<std::string>(j, "", "mode", "flying");
  if (mode == "flying") {
    cfg.mode = ScenarioMode::Flying;
  } else if (mode == "rolling") {
    cfg.mode = ScenarioMode::Rolling;
  } else if (mode == "bouncing") {
    cfg.mode = ScenarioMode::Bouncing;
  } else {
    throw ConfigError("invalid value for config key 'mode' (flying|rolling|bouncing)");
  }

  cfg.duration = get_field(j, "", "duration", cfg.duration);
  cfg.seed = get_field(j, "", "seed", cfg.seed);
  cfg.comparison = get_field(j, "", "comparison", cfg.comparison);
  cfg.external_force_world = get_vec3(j, "", "external_force_world", cfg.external_force_world);
  cfg.pulse_duration = get_field(j, "", "pulse_duration", cfg.pulse_duration);

  if (j.contains("vehicle")) parse_vehicle(j.at("vehicle"), cfg.vehicle);
  cfg.collision_radius = get_field(j, "", "collision_radius", cfg.vehicle.R);
  if (j.contains("environment")) parse_environment(j.at("environment"), cfg);

  if (j.contains("noise")) {
    const json& n = j.at("noise");
    cfg.noise.accel_sigma = get_field(n, "noise.", "accel_sigma", cfg.noise.accel_sigma);
    cfg.noise.gyro_sigma = get_field(n, "noise.", "gyro_sigma", cfg.noise.gyro_sigma);
    cfg.noise.accel_bias = get_vec3(n, "noise.", "accel_bias", cfg.noise.accel_bias);
    cfg.noise.encoder_sigma = get_field(n, "noise.", "encoder_sigma", cfg.noise.encoder_sigma);
    cfg.noise.seed = get_field(n, "noise.", "seed", cfg.noise.seed);
  }
  if (j.contains("planner")) {
    const json& pl = j.at("planner");
    cfg.planner.v_nom = get_field(pl, "planner.", "v_nom", cfg.planner.v_nom);
    cfg.planner.dpsi_min =
        get_field(pl, "planner.", "dpsi_min_deg", cfg.planner.dpsi_min * 180.0 / M_PI) * M_PI /
        180.0;
    cfg.planner.dpsi_max =
        get_field(pl, "planner.", "dpsi_max_deg", cfg.planner.dpsi_max * 180.0 / M_PI) * M_PI /
        180.0;
    cfg.planner.bounce_period =
        get_field(pl, "planner.", "bounce_period", cfg.planner.bounce_period);
    cfg.planner.bounce_amplitude =
        get_field(pl, "planner.", "bounce_amplitude", cfg.planner.bounce_amplitude);
    cfg.planner.rng_seed = get_field(pl, "planner.", "seed", cfg.planner.rng_seed);
    const std::string policy = get_field<std::string>(pl, "planner.", "policy", "cone");
    if (policy == "cone") {
      cfg.planner.policy = BouncePolicy::Cone;
    } else if (policy == "specular") {
      cfg.planner.policy = BouncePolicy::Specular;
    } else {
      throw ConfigError("invalid value for config key 'planner.policy' (cone|specular)");
    }
    cfg.planner.planar = get_field(pl, "planner.", "planar", cfg.planner.planar);
  }
  if (j.contains("controller")) {
    const json& c = j.at("controller");
    cfg.gains.kp_vel = get_field(c, "controller.", "kp_vel", cfg.gains.kp_vel);
    cfg.gains.kp_att = get_field(c, "controller.", "kp_att", cfg.gains.kp_att);
    cfg.gains.kd_att = get_field(c, "controller.", "kd_att", cfg.gains.kd_att);
    cfg.gains.a_max = get_field(c, "controller.", "a_max", cfg.gains.a_max);
    const std::string fb = get_field<std::string>(c, "controller.", "feedback", "estimate");
    if (fb == "estimate") {
      cfg.feedback = FeedbackSource::Estimate;
    } else if (fb == "truth") {
      cfg.feedback = FeedbackSource::Truth;
    } else {
      throw ConfigError("invalid value for config key 'controller.feedback' (estimate|truth)");
    }
  }
  if (j.contains("filter")) {
    const json& f = j.at("filter");
    cfg.filter.q_pos = get_field(f, "filter.", "q_pos", cfg.filter.q_pos);
    cfg.filter.q_att = get_field(f, "filter.", "q_att", cfg.filter.q_att);
    cfg.filter.q_vel = get_field(f, "filter.", "q_vel", cfg.filter.q_vel);
    cfg.filter.q_omega = get_field(f, "filter.", "q_omega", cfg.filter.q_omega);
    cfg.filter.r_pseudo = get_field(f, "filter.", "r_pseudo", cfg.filter.r_pseudo);
    cfg.filter.anisotropic = get_field(f, "filter.", "anisotropic", cfg.filter.anisotropic);
    cfg.filter.enable_contact_updates =
        get_field(f, "filter.", "enable_contact_updates", cfg.filter.enable_contact_updates);
  }
  if (j.contains("detector")) {
    const json& d = j.at("detector");
    cfg.detector.threshold = get_field(d, "detector.", "threshold", cfg.detector.threshold);
    cfg.detector.refractory = get_field(d, "detector.", "refractory", cfg.detector.refractory);
    const std::string w = get_field<std::string>(d, "detector.", "weights", "flying");
    if (w == "flying") {
      cfg.detector.full_weights = false;
    } else if (w == "full") {
      cfg.detector.full_weights = true;
    } else {
      throw ConfigError("invalid value for config key 'detector.weights' (flying|full)");
    }
  }
  if (j.contains("start")) {
    const json& s = j.at("start");
    cfg.start_position = get_vec3(s, "start.", "position", cfg.start_position);
    cfg.start_yaw = get_field(s, "start.", "yaw", cfg.start_yaw);
  }
  if (j.contains("height_hold")) {
    const json& h = j.at("height_hold");
    cfg.height_hold.enabled = get_field(h, "height_hold.", "enabled", cfg.height_hold.enabled);
    cfg.height_hold.target = get_field(h, "height_hold.", "target", cfg.height_hold.target);
    cfg.height_hold.kp = get_field(h, "height_hold.", "kp", cfg.height_hold.kp);
  }
  if (j.contains("rolling")) {
    const json& r = j.at("rolling");
    cfg.rolling.v_ref = get_field(r, "rolling.", "v_ref", cfg.rolling.v_ref);
    cfg.rolling.yaw_rate_amplitude =
        get_field(r, "rolling.", "yaw_rate_amplitude", cfg.rolling.yaw_rate_amplitude);
    cfg.rolling.yaw_rate_period =
        get_field(r, "rolling.", "yaw_rate_period", cfg.rolling.yaw_rate_period);
    cfg.rolling.resistance_force =
        get_field(r, "rolling.", "resistance_force", cfg.rolling.resistance_force);
    cfg.rolling.kp_drive = get_field(r, "rolling.", "kp_drive", cfg.rolling.kp_drive);
    cfg.rolling.kp_yaw = get_field(r, "rolling.", "kp_yaw", cfg.rolling.kp_yaw);
  }

  apply_master_seed(cfg);
  if (cfg.maze) {
    const auto boxes = generate_maze(*cfg.maze);
    cfg.environment.boxes.insert(cfg.environment.boxes.end(), boxes.begin(), boxes.end());
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

void apply_master_seed(ScenarioConfig& cfg) {
  // Sub-seeds derive from the master seed unless set explicitly.
  if (cfg.noise.seed == 0) cfg.noise.seed = cfg.seed * 0x9e3779b97f4a7c15ULL + 1;
  if (cfg.planner.rng_seed == 0) cfg.planner.rng_seed = cfg.seed * 0x9e3779b97f4a7c15ULL + 2;
}

}  // namespace cio
