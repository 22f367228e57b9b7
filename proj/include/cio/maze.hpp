#pragma once

#include <cstdint>
#include <vector>

#include "cio/environment.hpp"

namespace cio {

struct MazeSpec {
  int cells = 6;
  double cell_size = 1.5;       // corridor width [m]
  double wall_thickness = 0.1;  // [m]
  double wall_height = 3.0;     // [m]
  uint64_t seed = 7;
};

// Procedural wall maze (recursive backtracker) centered on the origin of its
// first cell at (0, 0); boxes returned in world coordinates.
std::vector<Box> generate_maze(const MazeSpec& spec);

}  // namespace cio
