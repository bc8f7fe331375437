#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relay/common.hpp"
#include "relay/connectivity.hpp"
#include "relay/road.hpp"

namespace relay {

enum class MobilityMode { ConstantVelocity, RandomWalk };

struct Vehicle {
  int id = -1;
  VehicleKind kind = VehicleKind::NonMmWave;
  GridPos pos;
};

// Grid world over one RoI. Occupancy mirrors vehicle positions at all times;
// at most one vehicle per cell.
struct WorldState {
  RoadConfig config;
  MobilityMode mobility = MobilityMode::ConstantVelocity;
  std::vector<Vehicle> vehicles;  // indexed by id
  std::vector<int> occupancy;     // lane * n_cells_x + x -> id, -1 empty

  // Movement intents for the upcoming step, indexed by id. Populated for
  // every vehicle by announce_intents(), or lazily by step().
  std::vector<std::optional<Action>> intents;

  int occupant(int x, int lane) const {
    return occupancy[lane * config.n_cells_x + x];
  }
  int occupant(GridPos p) const { return occupant(p.x, p.lane); }
  bool empty_cell(GridPos p) const {
    return in_road(config, p.x, p.lane) && occupant(p) < 0;
  }
  int n_vehicles() const { return static_cast<int>(vehicles.size()); }
  std::vector<int> controlled_ids() const;
  std::vector<int> mmwave_ids() const;
};

// Builds a world with round(lambda * roi_length) vehicles per lane at
// distinct uniform cells, then assigns kinds by one global shuffle:
// N_mm = round(r_mm * N_all) mmWave of which N_ctrl = round(r_ctrl * N_mm)
// controllable.
WorldState spawn_world(const RoadConfig& config, double lambda_per_m,
                       double r_mm, double r_ctrl, MobilityMode mobility,
                       uint64_t seed);

// Intent draw for one non-controllable vehicle. ConstantVelocity pins every
// vehicle (frozen relative frame); RandomWalk draws uniformly from
// {Forward, Stay, Back}.
Action uncontrolled_action(const WorldState& world, int id, Rng& rng);

// Draws and stores intents for all non-controllable vehicles, in id order.
// Controllable vehicles keep unset intents until step() receives actions.
void announce_intents(WorldState& world, Rng& rng);

// Directions vehicle id must not select this step: off-road moves, cells
// occupied at step start, and announced targets of non-controllable
// vehicles. Stay is never prohibited. Requires announce_intents() first.
ActionSet prohibited_directions(const WorldState& world, int id);

// Per-step reward: alpha * relay_length + penalty if flagged.
double reward(double relay_length_m, bool penalized, double alpha,
              double r_p);

struct AgentStepResult {
  int id = -1;
  Action action = Action::Stay;
  bool moved = false;
  bool penalized = false;
  double relay_length_m = 0;  // after the move
  double reward = 0;
};

struct StepOutcome {
  ConnectivitySnapshot snap;  // post-move
  std::vector<AgentStepResult> agents;  // controllable, id order
};

// Advances one step. `actions` maps controllable id -> chosen action (ids in
// the order of controlled_ids()). Non-controllable intents are taken from
// the announced set (drawn here if absent). Moves resolve simultaneously:
// a move succeeds iff its target was empty at step start and no
// higher-priority vehicle claims it (non-controllable first, then larger x,
// then smaller lane). Controllable agents are penalized when they select a
// prohibited direction or lose a valid move to a conflict.
StepOutcome step(WorldState& world, const std::vector<Action>& actions,
                 Rng& rng, double alpha, double r_p);

// One line per vehicle, "id,kind,x,lane", ascending id. kind is 0/1/2.
std::string dump_world(const WorldState& world);

}  // namespace relay
