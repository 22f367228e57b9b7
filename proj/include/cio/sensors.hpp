#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "cio/rng.hpp"
#include "cio/wrench_estimator.hpp"

namespace cio {

struct SensorNoise {
  double accel_sigma = 0.002;   // white noise density [m/s^2/sqrt(Hz)]
  double gyro_sigma = 0.0002;   // [rad/s/sqrt(Hz)]
  Vector3d accel_bias = Vector3d::Zero();  // constant per run [m/s^2]
  double encoder_sigma = 0.0;   // per-sample rate noise [rad/s]
  uint64_t seed = 0;

  void validate() const;
};

// 200 Hz strapdown IMU: constant per-run bias plus white noise, deterministic
// under the seed.
class ImuModel {
 public:
  ImuModel(const SensorNoise& noise, double rate_hz);

  ImuSample sample(const Vector3d& specific_force, const Vector3d& omega, double t);

 private:
  SensorNoise noise_;
  double per_sample_accel_;
  double per_sample_gyro_;
  Rng rng_;
};

// Wheel encoder with rate noise; accelerations come from a first difference
// smoothed with a 2-sample moving average.
class EncoderModel {
 public:
  EncoderModel(const SensorNoise& noise, double rate_hz);

  EncoderSample sample(double gamma_l, double gamma_r, double t);

 private:
  double dt_;
  double sigma_;
  Rng rng_;
  bool has_prev_ = false;
  double prev_l_ = 0.0, prev_r_ = 0.0;
  double prev_dot_l_ = 0.0, prev_dot_r_ = 0.0;
};

}  // namespace cio
