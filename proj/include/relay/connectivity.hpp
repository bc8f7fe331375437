#pragma once

#include <vector>

#include "relay/road.hpp"

namespace relay {

struct WorldState;

// mmWave link graph, relay components, per-vehicle relay length and
// coverage for one world configuration.
struct ConnectivitySnapshot {
  std::vector<int> mm_ids;  // mmWave vehicle ids, ascending
  std::vector<int> index_of_id;  // size n_all; -1 for non-mmWave
  std::vector<std::vector<int>> adj;  // per mm index, linked mm indices
  std::vector<int> component;         // per mm index
  int n_components = 0;
  std::vector<double> relay_length_m;  // per mm index, l_i
  std::vector<double> coverage;        // per mm index, C_ex,i

  int index_of(int vehicle_id) const { return index_of_id[vehicle_id]; }
  double relay_length_of(int vehicle_id) const {
    return relay_length_m[index_of_id[vehicle_id]];
  }
  double coverage_of(int vehicle_id) const {
    return coverage[index_of_id[vehicle_id]];
  }
};

// True iff no occupied cell blocks the open segment between the two cell
// centers. A cell blocks only when the segment crosses its interior;
// grazing a cell corner does not count. Endpoint cells are ignored.
bool los_clear(const WorldState& world, GridPos a, GridPos b);

// True iff i and j are within r_vv_m (inclusive) and the LOS path is clear.
bool v2v_linked(const WorldState& world, int i, int j);

// Coverage of one relay chain of length l (Eq.-style clamp against the RSU
// interval).
double coverage_of_length(const RoadConfig& cfg, double relay_length_m);

// Link graph, components, relay lengths and coverages for the whole world.
ConnectivitySnapshot snapshot(const WorldState& world);

// Arithmetic mean of coverage over mmWave vehicles; 0 for an empty set.
double mean_coverage(const ConnectivitySnapshot& snap);

// Relay length vehicle i would have if moved to `target`, all others
// unchanged. 0 when the target is off-road or occupied by another vehicle.
double achievable_relay_length(const WorldState& world, int i, GridPos target);

// Achievable relay lengths for every cell of the (2*half_x+1) x
// (2*half_lanes+1) window centered on vehicle i, row-major over
// (dx, dlane) offsets. The production kernel shares per-map link structure
// across targets and parallelizes over cells; results are exactly equal to
// calling achievable_relay_length per cell.
struct LengthMap {
  int half_x = 0;
  int half_lanes = 0;
  std::vector<double> v;  // (2*half_x+1) * (2*half_lanes+1)
  double at(int dx, int dlane) const {
    return v[(dx + half_x) * (2 * half_lanes + 1) + (dlane + half_lanes)];
  }
};
LengthMap achievable_length_map(const WorldState& world,
                                const ConnectivitySnapshot& snap, int i,
                                int half_x, int half_lanes,
                                bool parallel = true);

// Serial reference implementations: naive all-pairs link scan and
// full-recompute hypothetical moves. Kept for tests and benchmarks.
namespace ref {
ConnectivitySnapshot snapshot(const WorldState& world);
double achievable_relay_length(const WorldState& world, int i, GridPos target);
LengthMap achievable_length_map(const WorldState& world, int i, int half_x,
                                int half_lanes);
}  // namespace ref

}  // namespace relay
