#include "cio/sensors.hpp"

#include <cmath>

#include "cio/errors.hpp"

namespace cio {

void SensorNoise::validate() const {
  if (accel_sigma < 0.0 || gyro_sigma < 0.0 || encoder_sigma < 0.0) {
    throw ConfigError("sensor noise sigmas must be nonnegative");
  }
}

ImuModel::ImuModel(const SensorNoise& noise, double rate_hz)
    : noise_(noise),
      per_sample_accel_(noise.accel_sigma * std::sqrt(rate_hz)),
      per_sample_gyro_(noise.gyro_sigma * std::sqrt(rate_hz)),
      rng_(noise.seed ^ 0x494d55ULL) {}

ImuSample ImuModel::sample(const Vector3d& specific_force, const Vector3d& omega, double t) {
  ImuSample s;
  s.t = t;
  for (int i = 0; i < 3; ++i) {
    s.a[i] = specific_force[i] + noise_.accel_bias[i] + per_sample_accel_ * rng_.normal();
    s.omega[i] = omega[i] + per_sample_gyro_ * rng_.normal();
  }
  return s;
}

EncoderModel::EncoderModel(const SensorNoise& noise, double rate_hz)
    : dt_(1.0 / rate_hz), sigma_(noise.encoder_sigma), rng_(noise.seed ^ 0x454e43ULL) {}

EncoderSample EncoderModel::sample(double gamma_l, double gamma_r, double t) {
  EncoderSample s;
  s.t = t;
  s.gamma_l = gamma_l + sigma_ * rng_.normal();
  s.gamma_r = gamma_r + sigma_ * rng_.normal();
  if (has_prev_) {
    const double dot_l = (s.gamma_l - prev_l_) / dt_;
    const double dot_r = (s.gamma_r - prev_r_) / dt_;
    s.gamma_dot_l = 0.5 * (dot_l + prev_dot_l_);
    s.gamma_dot_r = 0.5 * (dot_r + prev_dot_r_);
    prev_dot_l_ = dot_l;
    prev_dot_r_ = dot_r;
  }
  prev_l_ = s.gamma_l;
  prev_r_ = s.gamma_r;
  has_prev_ = true;
  return s;
}

}  // namespace cio
