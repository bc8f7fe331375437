#pragma once

#include <array>
#include <cmath>

#include "relay/common.hpp"

namespace relay {

// Grid highway geometry and radio ranges.
struct RoadConfig {
  double roi_length_m = 1000.0;
  int n_lanes = 4;
  int n_cells_x = 200;
  double cell_dx_m = 5.0;  // roi_length_m / n_cells_x
  double lane_dy_m = 3.5;
  double rsu_interval_m = 1000.0;  // R_d
  double r_vv_m = 50.0;            // V2V range
  double r_vi_m = 100.0;           // V2I range

  void validate() const {
    if (roi_length_m <= 0 || cell_dx_m <= 0 || lane_dy_m <= 0 ||
        rsu_interval_m <= 0 || r_vv_m <= 0 || r_vi_m <= 0)
      throw config_error("road config: all lengths must be positive");
    if (n_lanes < 1) throw config_error("road config: n_lanes must be >= 1");
    if (n_cells_x < 1)
      throw config_error("road config: n_cells_x must be >= 1");
    if (std::abs(n_cells_x * cell_dx_m - roi_length_m) > 1e-9)
      throw config_error(
          "road config: n_cells_x * cell_dx_m must equal roi_length_m");
  }
};

enum class VehicleKind { NonMmWave, UncontrolledMmWave, ControlledMmWave };

inline bool is_mmwave(VehicleKind k) { return k != VehicleKind::NonMmWave; }
inline bool is_controllable(VehicleKind k) {
  return k == VehicleKind::ControlledMmWave;
}

// Cell coordinates; the vehicle sits at the cell center.
struct GridPos {
  int x = 0;
  int lane = 0;
  friend bool operator==(const GridPos&, const GridPos&) = default;
};

inline double center_x_m(const RoadConfig& cfg, int x) {
  return (x + 0.5) * cfg.cell_dx_m;
}
inline double center_y_m(const RoadConfig& cfg, int lane) {
  return (lane + 0.5) * cfg.lane_dy_m;
}

inline bool in_road(const RoadConfig& cfg, int x, int lane) {
  return x >= 0 && x < cfg.n_cells_x && lane >= 0 && lane < cfg.n_lanes;
}

inline double dist_m(const RoadConfig& cfg, GridPos a, GridPos b) {
  double dx = (a.x - b.x) * cfg.cell_dx_m;
  double dy = (a.lane - b.lane) * cfg.lane_dy_m;
  return std::sqrt(dx * dx + dy * dy);
}

enum class Action { Forward, Back, Right, Left, Stay };
inline constexpr int kNumActions = 5;

struct ActionDelta {
  int dx;
  int dlane;
};

inline ActionDelta action_delta(Action a) {
  switch (a) {
    case Action::Forward: return {+1, 0};
    case Action::Back: return {-1, 0};
    case Action::Right: return {0, +1};
    case Action::Left: return {0, -1};
    case Action::Stay: return {0, 0};
  }
  return {0, 0};
}

inline const char* action_name(Action a) {
  switch (a) {
    case Action::Forward: return "forward";
    case Action::Back: return "back";
    case Action::Right: return "right";
    case Action::Left: return "left";
    case Action::Stay: return "stay";
  }
  return "?";
}

// Small value-type set over the five actions.
class ActionSet {
 public:
  void insert(Action a) { bits_ |= 1u << static_cast<int>(a); }
  bool contains(Action a) const {
    return (bits_ >> static_cast<int>(a)) & 1u;
  }
  bool empty() const { return bits_ == 0; }
  int size() const { return __builtin_popcount(bits_); }

 private:
  unsigned bits_ = 0;
};

}  // namespace relay
