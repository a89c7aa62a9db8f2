#pragma once

#include <vector>

#include "pushplan/physics2d.hpp"

namespace pushplan {

/// Snapshot of every body's state, in scene declaration order, plus time.
struct WorldState {
  std::vector<BodyState> bodies;
  double time = 0.0;

  friend bool operator==(const WorldState&, const WorldState&) = default;
};

WorldState capture_state(const World& world);

/// Throws std::invalid_argument when the body count differs.
void load_state(World& world, const WorldState& q);

}  // namespace pushplan
