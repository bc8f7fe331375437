#include "relay/world.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace relay {

std::vector<int> WorldState::controlled_ids() const {
  std::vector<int> out;
  for (const Vehicle& v : vehicles)
    if (is_controllable(v.kind)) out.push_back(v.id);
  return out;
}

std::vector<int> WorldState::mmwave_ids() const {
  std::vector<int> out;
  for (const Vehicle& v : vehicles)
    if (is_mmwave(v.kind)) out.push_back(v.id);
  return out;
}

WorldState spawn_world(const RoadConfig& config, double lambda_per_m,
                       double r_mm, double r_ctrl, MobilityMode mobility,
                       uint64_t seed) {
  config.validate();
  Rng rng(seed);
  if (lambda_per_m < 0) throw config_error("lambda must be >= 0");
  if (r_mm < 0 || r_mm > 1) throw config_error("r_mm must be in [0,1]");
  if (r_ctrl < 0 || r_ctrl > 1) throw config_error("r_ctrl must be in [0,1]");

  const int per_lane =
      static_cast<int>(std::lround(lambda_per_m * config.roi_length_m));
  if (per_lane > config.n_cells_x)
    throw config_error("vehicle density exceeds cell count per lane");

  WorldState w;
  w.config = config;
  w.mobility = mobility;
  w.occupancy.assign(
      static_cast<size_t>(config.n_lanes) * config.n_cells_x, -1);

  std::vector<int> xs(config.n_cells_x);
  for (int lane = 0; lane < config.n_lanes; ++lane) {
    std::iota(xs.begin(), xs.end(), 0);
    // Partial Fisher-Yates: first per_lane entries become a uniform
    // distinct sample.
    for (int k = 0; k < per_lane; ++k) {
      const int j = k + rng.next_int(config.n_cells_x - k);
      std::swap(xs[k], xs[j]);
    }
    std::sort(xs.begin(), xs.begin() + per_lane);
    for (int k = 0; k < per_lane; ++k) {
      Vehicle v;
      v.id = static_cast<int>(w.vehicles.size());
      v.pos = GridPos{xs[k], lane};
      w.vehicles.push_back(v);
      w.occupancy[static_cast<size_t>(lane) * config.n_cells_x + xs[k]] = v.id;
    }
  }

  const int n_all = static_cast<int>(w.vehicles.size());
  const int n_mm = static_cast<int>(std::lround(r_mm * n_all));
  const int n_ctrl = static_cast<int>(std::lround(r_ctrl * n_mm));

  std::vector<int> perm(n_all);
  std::iota(perm.begin(), perm.end(), 0);
  for (int k = 0; k + 1 < n_all; ++k) {
    const int j = k + rng.next_int(n_all - k);
    std::swap(perm[k], perm[j]);
  }
  for (int k = 0; k < n_mm; ++k)
    w.vehicles[perm[k]].kind = k < n_ctrl ? VehicleKind::ControlledMmWave
                                          : VehicleKind::UncontrolledMmWave;

  w.intents.assign(n_all, std::nullopt);
  return w;
}

Action uncontrolled_action(const WorldState& world, int /*id*/, Rng& rng) {
  if (world.mobility == MobilityMode::ConstantVelocity) return Action::Stay;
  // Relative-frame random walk along the lane.
  switch (rng.next_int(3)) {
    case 0: return Action::Forward;
    case 1: return Action::Stay;
    default: return Action::Back;
  }
}

void announce_intents(WorldState& world, Rng& rng) {
  for (const Vehicle& v : world.vehicles)
    world.intents[v.id] = is_controllable(v.kind)
                              ? std::nullopt
                              : std::optional<Action>(
                                    uncontrolled_action(world, v.id, rng));
}

ActionSet prohibited_directions(const WorldState& world, int id) {
  if (id < 0 || id >= world.n_vehicles())
    throw std::out_of_range("prohibited_directions: unknown vehicle id");
  const Vehicle& self = world.vehicles[id];
  ActionSet out;
  for (Action a :
       {Action::Forward, Action::Back, Action::Right, Action::Left}) {
    const ActionDelta d = action_delta(a);
    const GridPos t{self.pos.x + d.dx, self.pos.lane + d.dlane};
    if (!in_road(world.config, t.x, t.lane)) {
      out.insert(a);
      continue;
    }
    if (world.occupant(t) >= 0) {
      out.insert(a);
      continue;
    }
    for (const Vehicle& v : world.vehicles) {
      if (v.id == id || is_controllable(v.kind)) continue;
      if (!world.intents[v.id])
        throw contract_error("prohibited_directions before announce_intents");
      const ActionDelta vd = action_delta(*world.intents[v.id]);
      if (GridPos{v.pos.x + vd.dx, v.pos.lane + vd.dlane} == t) {
        out.insert(a);
        break;
      }
    }
  }
  return out;
}

double reward(double relay_length_m, bool penalized, double alpha,
              double r_p) {
  return alpha * relay_length_m + (penalized ? r_p : 0.0);
}

namespace {

struct MoveReq {
  int id;
  GridPos target;
  bool controllable;
  int x;
  int lane;
};

}  // namespace

StepOutcome step(WorldState& world, const std::vector<Action>& actions,
                 Rng& rng, double alpha, double r_p) {
  const std::vector<int> ctrl = world.controlled_ids();
  if (actions.size() != ctrl.size())
    throw contract_error("step: one action per controllable vehicle");

  for (const Vehicle& v : world.vehicles)
    if (!is_controllable(v.kind) && !world.intents[v.id])
      world.intents[v.id] = uncontrolled_action(world, v.id, rng);
  for (size_t k = 0; k < ctrl.size(); ++k)
    world.intents[ctrl[k]] = actions[k];

  std::vector<ActionSet> prohibited(ctrl.size());
  for (size_t k = 0; k < ctrl.size(); ++k)
    prohibited[k] = prohibited_directions(world, ctrl[k]);

  // Simultaneous resolution: a move succeeds iff its target cell was empty
  // at step start and no higher-priority mover claims it. Priority:
  // non-controllable over controllable, then larger x, then smaller lane.
  std::vector<MoveReq> movers;
  for (const Vehicle& v : world.vehicles) {
    const Action a = *world.intents[v.id];
    if (a == Action::Stay) continue;
    const ActionDelta d = action_delta(a);
    movers.push_back(MoveReq{v.id,
                             GridPos{v.pos.x + d.dx, v.pos.lane + d.dlane},
                             is_controllable(v.kind), v.pos.x, v.pos.lane});
  }
  std::sort(movers.begin(), movers.end(),
            [](const MoveReq& a, const MoveReq& b) {
              if (a.controllable != b.controllable) return !a.controllable;
              if (a.x != b.x) return a.x > b.x;
              return a.lane < b.lane;
            });

  std::vector<signed char> moved(world.n_vehicles(), 0);
  std::vector<int> claimed(world.occupancy.size(), -1);
  for (const MoveReq& m : movers) {
    if (!in_road(world.config, m.target.x, m.target.lane)) continue;
    const size_t cell =
        static_cast<size_t>(m.target.lane) * world.config.n_cells_x +
        m.target.x;
    if (world.occupancy[cell] >= 0 || claimed[cell] >= 0) continue;
    claimed[cell] = m.id;
    moved[m.id] = 1;
  }

  for (const Vehicle& v : world.vehicles)
    if (moved[v.id])
      world.occupancy[static_cast<size_t>(v.pos.lane) *
                          world.config.n_cells_x +
                      v.pos.x] = -1;
  for (Vehicle& v : world.vehicles) {
    if (!moved[v.id]) continue;
    const ActionDelta d = action_delta(*world.intents[v.id]);
    v.pos.x += d.dx;
    v.pos.lane += d.dlane;
    world.occupancy[static_cast<size_t>(v.pos.lane) * world.config.n_cells_x +
                    v.pos.x] = v.id;
  }

  StepOutcome out;
  out.snap = snapshot(world);
  out.agents.resize(ctrl.size());
  for (size_t k = 0; k < ctrl.size(); ++k) {
    AgentStepResult& r = out.agents[k];
    r.id = ctrl[k];
    r.action = actions[k];
    r.moved = moved[ctrl[k]] != 0;
    const bool chose_prohibited = prohibited[k].contains(actions[k]);
    const bool lost_conflict =
        actions[k] != Action::Stay && !chose_prohibited && !r.moved;
    r.penalized = chose_prohibited || lost_conflict;
    r.relay_length_m = out.snap.relay_length_of(ctrl[k]);
    r.reward = reward(r.relay_length_m, r.penalized, alpha, r_p);
  }

  for (auto& in : world.intents) in.reset();
  return out;
}

std::string dump_world(const WorldState& world) {
  std::ostringstream os;
  os << "id,kind,x,lane\n";
  for (const Vehicle& v : world.vehicles)
    os << v.id << ',' << static_cast<int>(v.kind) << ',' << v.pos.x << ','
       << v.pos.lane << '\n';
  return os.str();
}

}  // namespace relay
