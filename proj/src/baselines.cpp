#include "relay/baselines.hpp"

#include <cmath>
#include <limits>

namespace relay {

Action stay_policy(const WorldState&, int) { return Action::Stay; }

void VfaParams::validate() const {
  if (w_a < 0 || w_r < 0) throw config_error("vfa weights must be >= 0");
  if (d_th_m <= 0) throw config_error("vfa threshold must be positive");
  if (deadband < 0) throw config_error("vfa deadband must be >= 0");
  if (window_half_x < 0 || window_half_lanes < 0)
    throw config_error("vfa window must be >= 0");
}

Force vfa_force(const WorldState& world, int i, const VfaParams& params) {
  const RoadConfig& cfg = world.config;
  const GridPos pi = world.vehicles[i].pos;
  Force f;
  for (const Vehicle& v : world.vehicles) {
    if (v.id == i || !is_mmwave(v.kind)) continue;
    if (std::abs(v.pos.x - pi.x) > params.window_half_x ||
        std::abs(v.pos.lane - pi.lane) > params.window_half_lanes)
      continue;
    const double dx = (v.pos.x - pi.x) * cfg.cell_dx_m;
    const double dy = (v.pos.lane - pi.lane) * cfg.lane_dy_m;
    const double d = std::sqrt(dx * dx + dy * dy);
    double mag;  // signed: positive pulls toward v
    if (d > params.d_th_m)
      mag = params.w_a * (1.0 - std::exp(-params.beta1 * (d - params.d_th_m)));
    else if (d < params.d_th_m)
      mag = -params.w_r *
            (1.0 - std::exp(-params.beta2 * (params.d_th_m - d)));
    else
      continue;
    f.fx += mag * dx / d;
    f.fy += mag * dy / d;
  }
  return f;
}

Action vfa_action(const WorldState& world, int i, const VfaParams& params) {
  const Force f = vfa_force(world, i, params);
  if (std::sqrt(f.fx * f.fx + f.fy * f.fy) < params.deadband)
    return Action::Stay;

  const RoadConfig& cfg = world.config;
  Action best = Action::Forward;
  double best_dot = -std::numeric_limits<double>::infinity();
  for (Action a :
       {Action::Forward, Action::Back, Action::Right, Action::Left}) {
    const ActionDelta d = action_delta(a);
    const double dot =
        f.fx * (d.dx * cfg.cell_dx_m) + f.fy * (d.dlane * cfg.lane_dy_m);
    if (dot > best_dot) {
      best_dot = dot;
      best = a;
    }
  }
  if (prohibited_directions(world, i).contains(best)) return Action::Stay;
  return best;
}

}  // namespace relay
