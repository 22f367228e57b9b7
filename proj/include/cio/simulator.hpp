#pragma once

#include "cio/run_log.hpp"
#include "cio/scenario.hpp"

namespace cio {

// Runs the closed loop: dynamics at cfg.dynamics_rate, sensors + estimator +
// filters at cfg.sensor_rate, velocity loop at sensor_rate / divisor, planner
// event-driven. A shadow prediction-only filter runs on the identical sensor
// stream. Deterministic for a fixed config.
RunLog run_scenario(const ScenarioConfig& cfg);

}  // namespace cio
