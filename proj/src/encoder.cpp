#include "relay/encoder.hpp"

#include <cstdio>
#include <sstream>

namespace relay {

StateDesign parse_state_design(const std::string& name) {
  if (name == "pt") return StateDesign::PT;
  if (name == "ptcl") return StateDesign::PTCL;
  if (name == "ptdl") return StateDesign::PTDL;
  throw config_error("unknown state design: " + name);
}

std::string state_design_name(StateDesign d) {
  switch (d) {
    case StateDesign::PT: return "pt";
    case StateDesign::PTCL: return "ptcl";
    default: return "ptdl";
  }
}

void EncoderConfig::validate() const {
  if (half_x < 1 || half_lanes < 0) throw config_error("bad window size");
  if (rho <= 0) throw config_error("rho must be positive");
  if (length_borders.empty())
    throw config_error("length_borders must not be empty");
  for (size_t i = 1; i < length_borders.size(); ++i)
    if (!(length_borders[i - 1] < length_borders[i]))
      throw config_error("length_borders must be strictly increasing");
}

int num_planes(StateDesign d, const EncoderConfig& cfg) {
  switch (d) {
    case StateDesign::PT: return 3;
    case StateDesign::PTCL: return 4;
    default: return 3 + cfg.n_buckets();
  }
}

int length_bucket(const EncoderConfig& cfg, double relay_length_m) {
  const auto& b = cfg.length_borders;
  for (size_t k = 0; k < b.size(); ++k)
    if (relay_length_m <= b[k]) return static_cast<int>(k);
  return static_cast<int>(b.size());
}

StateTensor encode(const WorldState& world, const ConnectivitySnapshot& snap,
                   int agent_id, StateDesign design,
                   const EncoderConfig& cfg) {
  const GridPos c = world.vehicles[agent_id].pos;
  StateTensor t(num_planes(design, cfg), cfg.window_y(), cfg.window_x());

  LengthMap lmap;
  if (design != StateDesign::PT)
    lmap = achievable_length_map(world, snap, agent_id, cfg.half_x,
                                 cfg.half_lanes);

  for (int dy = -cfg.half_lanes; dy <= cfg.half_lanes; ++dy) {
    const int lane = c.lane + dy;
    const int yy = dy + cfg.half_lanes;
    for (int dx = -cfg.half_x; dx <= cfg.half_x; ++dx) {
      const int x = c.x + dx;
      const int xx = dx + cfg.half_x;
      if (!in_road(world.config, x, lane)) continue;
      const int occ = world.occupant(x, lane);
      if (occ < 0) t.at(2, yy, xx) = 1;
      else if (!is_mmwave(world.vehicles[occ].kind)) t.at(1, yy, xx) = 1;
      else t.at(0, yy, xx) = 1;
      if (design == StateDesign::PTCL) {
        t.at(3, yy, xx) = cfg.rho * lmap.at(dx, dy);
      } else if (design == StateDesign::PTDL) {
        t.at(3 + length_bucket(cfg, lmap.at(dx, dy)), yy, xx) = 1;
      }
    }
  }
  return t;
}

StateTensor encode_pt(const WorldState& world,
                      const ConnectivitySnapshot& snap, int agent_id,
                      const EncoderConfig& cfg) {
  return encode(world, snap, agent_id, StateDesign::PT, cfg);
}

StateTensor encode_ptcl(const WorldState& world,
                        const ConnectivitySnapshot& snap, int agent_id,
                        const EncoderConfig& cfg) {
  return encode(world, snap, agent_id, StateDesign::PTCL, cfg);
}

StateTensor encode_ptdl(const WorldState& world,
                        const ConnectivitySnapshot& snap, int agent_id,
                        const EncoderConfig& cfg) {
  return encode(world, snap, agent_id, StateDesign::PTDL, cfg);
}

std::string tensor_to_text(const StateTensor& t) {
  std::ostringstream os;
  os << t.k << ' ' << t.y << ' ' << t.x << '\n';
  char buf[40];
  for (int k = 0; k < t.k; ++k) {
    os << "plane " << k << '\n';
    for (int y = 0; y < t.y; ++y) {
      for (int x = 0; x < t.x; ++x) {
        std::snprintf(buf, sizeof buf, "%.17g", t.at(k, y, x));
        os << (x ? " " : "") << buf;
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace relay
