#pragma once

#include <stdexcept>
#include <string>

namespace cio {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleAllocation : SimError {
  using SimError::SimError;
};

struct SingularInertia : SimError {
  using SimError::SimError;
};

struct NonFiniteState : SimError {
  using SimError::SimError;
};

struct NoRealSolution : SimError {
  using SimError::SimError;
};

struct DegenerateWrench : SimError {
  using SimError::SimError;
};

struct ZeroForce : SimError {
  using SimError::SimError;
};

struct IllConditionedInnovation : SimError {
  using SimError::SimError;
};

struct TunnelingDetected : SimError {
  using SimError::SimError;
};

struct DegenerateAcceleration : SimError {
  using SimError::SimError;
};

struct ParallelDegenerate : SimError {
  using SimError::SimError;
};

}  // namespace cio
