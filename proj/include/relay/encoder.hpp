#pragma once

#include <string>
#include <vector>

#include "relay/connectivity.hpp"
#include "relay/world.hpp"

namespace relay {

// Observation designs. All start from three occupancy planes (mmWave,
// non-mmWave, empty road); the variants add relay-length information:
// PTCL one scaled-length plane, PTDL one-hot length-bucket planes.
enum class StateDesign { PT, PTCL, PTDL };

StateDesign parse_state_design(const std::string& name);
std::string state_design_name(StateDesign d);

struct EncoderConfig {
  int half_x = 20;      // window spans +-half_x cells along the road
  int half_lanes = 3;   // and +-half_lanes lanes
  double rho = 0.005;   // per-metre scale for the PTCL length plane
  std::vector<double> length_borders = {0, 25, 50, 100, 150};

  int window_x() const { return 2 * half_x + 1; }
  int window_y() const { return 2 * half_lanes + 1; }
  int n_buckets() const { return static_cast<int>(length_borders.size()) + 1; }
  void validate() const;
};

int num_planes(StateDesign d, const EncoderConfig& cfg);

// Bucket index for a relay length: 0 for l <= first border, then one bucket
// per half-open border interval, last bucket beyond the final border.
int length_bucket(const EncoderConfig& cfg, double relay_length_m);

// Dense [k][y][x] tensor, x contiguous.
struct StateTensor {
  int k = 0, y = 0, x = 0;
  std::vector<double> data;

  StateTensor() = default;
  StateTensor(int k_, int y_, int x_)
      : k(k_), y(y_), x(x_),
        data(static_cast<size_t>(k_) * y_ * x_, 0.0) {}
  double& at(int kk, int yy, int xx) {
    return data[(static_cast<size_t>(kk) * y + yy) * x + xx];
  }
  double at(int kk, int yy, int xx) const {
    return data[(static_cast<size_t>(kk) * y + yy) * x + xx];
  }
};

// Window centered on the agent; cells outside the road stay zero in every
// plane. PTCL/PTDL length features hold the achievable relay length the
// agent would reach by moving to each cell (0 for occupied or off-road
// targets). `snap` must describe `world`.
StateTensor encode(const WorldState& world, const ConnectivitySnapshot& snap,
                   int agent_id, StateDesign design, const EncoderConfig& cfg);
StateTensor encode_pt(const WorldState& world,
                      const ConnectivitySnapshot& snap, int agent_id,
                      const EncoderConfig& cfg);
StateTensor encode_ptcl(const WorldState& world,
                        const ConnectivitySnapshot& snap, int agent_id,
                        const EncoderConfig& cfg);
StateTensor encode_ptdl(const WorldState& world,
                        const ConnectivitySnapshot& snap, int agent_id,
                        const EncoderConfig& cfg);

// Plane-major debug dump.
std::string tensor_to_text(const StateTensor& t);

}  // namespace relay
