#pragma once

#include "relay/world.hpp"

namespace relay {

// Random-positions baseline: never moves.
Action stay_policy(const WorldState& world, int i);

// Saturating-exponential virtual force field. Attraction above D_th,
// repulsion below, zero exactly at D_th.
struct VfaParams {
  double w_a = 1;
  double w_r = 10000;
  double beta1 = 2;
  double beta2 = 2;
  double d_th_m = 50;
  double deadband = 0.01;
  int window_half_x = 20;   // neighbours considered, in cells
  int window_half_lanes = 3;
  void validate() const;
};

struct Force {
  double fx = 0;
  double fy = 0;
};

// Net force on i from the mmWave vehicles inside the observation window.
Force vfa_force(const WorldState& world, int i, const VfaParams& params);

// Move best aligned with the net force (dot product against the metric
// move vectors, ties Forward > Back > Right > Left); Stay when the force is
// inside the deadband or the best move is prohibited. Requires announced
// intents, like prohibited_directions.
Action vfa_action(const WorldState& world, int i, const VfaParams& params);

}  // namespace relay
