#pragma once

#include <string>
#include <vector>

namespace etcl {

// Index bookkeeping for the stacked network state: N robots, d states each,
// robot r's block at [r*d, (r+1)*d). Robot ids are 0-based internally;
// file/CLI surfaces print them 1-based.
struct StateLayout {
  int robots = 0;
  int state_dim = 0;  // per robot: 1 (scalar position) or 3 (x, y, theta)

  int total() const { return robots * state_dim; }
  int index(int robot, int comp) const { return robot * state_dim + comp; }
  bool is_angle(int flat_index) const {
    return state_dim == 3 && flat_index % state_dim == 2;
  }
  // Label like "3.x" (1-based robot) for metric keys.
  std::string comp_label(int flat_index) const {
    static const char* kNames3[] = {"x", "y", "th"};
    const int robot = flat_index / state_dim + 1;
    if (state_dim == 1) return std::to_string(robot) + ".x";
    return std::to_string(robot) + "." + kNames3[flat_index % state_dim];
  }
};

}  // namespace etcl
