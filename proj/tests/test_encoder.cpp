#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>

#include "doctest.h"
#include "relay/encoder.hpp"

using namespace relay;

namespace {

struct Placement {
  int id;
  VehicleKind kind;
  int x;
  int lane;
};

WorldState make_world(const std::vector<Placement>& placements,
                      RoadConfig cfg = {}) {
  WorldState w;
  w.config = cfg;
  w.occupancy.assign(static_cast<size_t>(cfg.n_lanes) * cfg.n_cells_x, -1);
  for (const Placement& p : placements) {
    REQUIRE(p.id == static_cast<int>(w.vehicles.size()));
    w.vehicles.push_back({p.id, p.kind, {p.x, p.lane}});
    REQUIRE(w.occupancy[p.lane * cfg.n_cells_x + p.x] == -1);
    w.occupancy[p.lane * cfg.n_cells_x + p.x] = p.id;
  }
  w.intents.assign(w.vehicles.size(), std::nullopt);
  return w;
}

// Window cell (yy,xx) -> road cell for an agent at `c`.
GridPos cell_of(const EncoderConfig& cfg, GridPos c, int yy, int xx) {
  return {c.x + xx - cfg.half_x, c.lane + yy - cfg.half_lanes};
}

void check_invariants(const WorldState& w, const StateTensor& t,
                      GridPos agent_pos, StateDesign design,
                      const EncoderConfig& cfg) {
  for (int yy = 0; yy < t.y; ++yy)
    for (int xx = 0; xx < t.x; ++xx) {
      const GridPos cell = cell_of(cfg, agent_pos, yy, xx);
      const bool in = in_road(w.config, cell.x, cell.lane);
      double occ_sum = t.at(0, yy, xx) + t.at(1, yy, xx) + t.at(2, yy, xx);
      if (!in) {
        for (int k = 0; k < t.k; ++k) REQUIRE(t.at(k, yy, xx) == 0.0);
        continue;
      }
      REQUIRE(occ_sum == 1.0);
      for (int k = 0; k < 3; ++k) {
        const double v = t.at(k, yy, xx);
        REQUIRE((v == 0.0 || v == 1.0));
      }
      if (design == StateDesign::PTDL) {
        double hot = 0;
        for (int k = 3; k < t.k; ++k) {
          const double v = t.at(k, yy, xx);
          REQUIRE((v == 0.0 || v == 1.0));
          hot += v;
        }
        REQUIRE(hot == 1.0);
      }
    }
}

}  // namespace

TEST_CASE("state design names round-trip") {
  for (StateDesign d :
       {StateDesign::PT, StateDesign::PTCL, StateDesign::PTDL})
    CHECK(parse_state_design(state_design_name(d)) == d);
  CHECK_THROWS_AS(parse_state_design("ptx"), config_error);
}

TEST_CASE("num_planes per design") {
  EncoderConfig cfg;
  CHECK(num_planes(StateDesign::PT, cfg) == 3);
  CHECK(num_planes(StateDesign::PTCL, cfg) == 4);
  CHECK(num_planes(StateDesign::PTDL, cfg) == 9);
  cfg.length_borders = {10, 20};
  CHECK(num_planes(StateDesign::PTDL, cfg) == 6);
}

TEST_CASE("encoder config validation") {
  EncoderConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.length_borders = {0, 25, 25};
  CHECK_THROWS_AS(cfg.validate(), config_error);
  cfg = {};
  cfg.rho = 0;
  CHECK_THROWS_AS(cfg.validate(), config_error);
}

TEST_CASE("length_bucket: right-closed intervals") {
  EncoderConfig cfg;  // borders 0, 25, 50, 100, 150
  CHECK(length_bucket(cfg, 0) == 0);
  CHECK(length_bucket(cfg, 0.1) == 1);
  CHECK(length_bucket(cfg, 25) == 1);
  CHECK(length_bucket(cfg, 25.01) == 2);
  CHECK(length_bucket(cfg, 50) == 2);
  CHECK(length_bucket(cfg, 100) == 3);
  CHECK(length_bucket(cfg, 150) == 4);
  CHECK(length_bucket(cfg, 151) == 5);
}

TEST_CASE("StateTensor: x-contiguous plane-major layout") {
  StateTensor t(2, 3, 4);
  CHECK(t.data.size() == 24);
  t.at(1, 2, 3) = 5;
  CHECK(t.data[23] == 5);
  t.at(0, 0, 1) = 7;
  CHECK(t.data[1] == 7);
}

TEST_CASE("PT: lone agent mid-road") {
  EncoderConfig cfg;
  WorldState w = make_world({{0, VehicleKind::ControlledMmWave, 100, 1}});
  StateTensor t = encode_pt(w, snapshot(w), 0, cfg);
  CHECK(t.k == 3);
  CHECK(t.y == 7);
  CHECK(t.x == 41);
  CHECK(t.at(0, cfg.half_lanes, cfg.half_x) == 1.0);  // agent at center
  int empties = 0, mms = 0;
  for (int yy = 0; yy < t.y; ++yy)
    for (int xx = 0; xx < t.x; ++xx) {
      mms += static_cast<int>(t.at(0, yy, xx));
      empties += static_cast<int>(t.at(2, yy, xx));
    }
  CHECK(mms == 1);
  CHECK(empties == 4 * 41 - 1);  // lanes 0..3 visible, minus the agent cell
  check_invariants(w, t, {100, 1}, StateDesign::PT, cfg);
}

TEST_CASE("PT: neighbour kinds land on their planes") {
  EncoderConfig cfg;
  WorldState w = make_world({{0, VehicleKind::ControlledMmWave, 100, 1},
                             {1, VehicleKind::NonMmWave, 101, 1},
                             {2, VehicleKind::UncontrolledMmWave, 98, 2}});
  StateTensor t = encode_pt(w, snapshot(w), 0, cfg);
  CHECK(t.at(1, cfg.half_lanes, cfg.half_x + 1) == 1.0);
  CHECK(t.at(0, cfg.half_lanes + 1, cfg.half_x - 2) == 1.0);
  CHECK(t.at(2, cfg.half_lanes, cfg.half_x + 1) == 0.0);
}

TEST_CASE("PT: lane-0 agent sees zero rows below the road") {
  EncoderConfig cfg;
  WorldState w = make_world({{0, VehicleKind::ControlledMmWave, 100, 0}});
  StateTensor t = encode_pt(w, snapshot(w), 0, cfg);
  for (int yy = 0; yy < cfg.half_lanes; ++yy)  // lanes -3..-1
    for (int xx = 0; xx < t.x; ++xx)
      for (int k = 0; k < t.k; ++k) CHECK(t.at(k, yy, xx) == 0.0);
}

TEST_CASE("PT: RoI edge clips the window columns") {
  EncoderConfig cfg;
  WorldState w = make_world({{0, VehicleKind::ControlledMmWave, 5, 1}});
  StateTensor t = encode_pt(w, snapshot(w), 0, cfg);
  for (int xx = 0; xx < cfg.half_x - 5; ++xx)  // x = -20..-1
    for (int yy = 0; yy < t.y; ++yy)
      for (int k = 0; k < t.k; ++k) CHECK(t.at(k, yy, xx) == 0.0);
  check_invariants(w, t, {5, 1}, StateDesign::PT, cfg);
}

TEST_CASE("PTCL: plane 4 is rho times the achievable length") {
  EncoderConfig cfg;
  // Chain 10-16-23-30 gives l_i = 100 at the center cell.
  WorldState w = make_world({{0, VehicleKind::ControlledMmWave, 10, 0},
                             {1, VehicleKind::UncontrolledMmWave, 16, 0},
                             {2, VehicleKind::UncontrolledMmWave, 23, 0},
                             {3, VehicleKind::UncontrolledMmWave, 30, 0}});
  ConnectivitySnapshot s = snapshot(w);
  REQUIRE(s.relay_length_of(0) == 100);
  StateTensor t = encode_ptcl(w, s, 0, cfg);
  CHECK(t.at(3, cfg.half_lanes, cfg.half_x) ==
        doctest::Approx(0.5).epsilon(1e-12));  // rho * 100
  // Occupied cells carry zero achievable length.
  CHECK(t.at(3, cfg.half_lanes, cfg.half_x + 6) == 0.0);
  // Every in-road cell matches the single-target query.
  for (int yy = 0; yy < t.y; ++yy)
    for (int xx = 0; xx < t.x; ++xx) {
      const GridPos cell = cell_of(cfg, {10, 0}, yy, xx);
      if (!in_road(w.config, cell.x, cell.lane)) continue;
      CHECK(t.at(3, yy, xx) ==
            doctest::Approx(cfg.rho * achievable_relay_length(w, 0, cell))
                .epsilon(1e-12));
    }
}

TEST_CASE("PTDL: one-hot length planes match the bucket of each target") {
  EncoderConfig cfg;
  WorldState w = make_world({{0, VehicleKind::ControlledMmWave, 10, 0},
                             {1, VehicleKind::UncontrolledMmWave, 16, 0},
                             {2, VehicleKind::UncontrolledMmWave, 23, 0},
                             {3, VehicleKind::UncontrolledMmWave, 30, 0}});
  ConnectivitySnapshot s = snapshot(w);
  StateTensor t = encode_ptdl(w, s, 0, cfg);
  CHECK(t.k == 9);
  for (int yy = 0; yy < t.y; ++yy)
    for (int xx = 0; xx < t.x; ++xx) {
      const GridPos cell = cell_of(cfg, {10, 0}, yy, xx);
      if (!in_road(w.config, cell.x, cell.lane)) continue;
      const double want = achievable_relay_length(w, 0, cell);
      CHECK(t.at(3 + length_bucket(cfg, want), yy, xx) == 1.0);
    }
  check_invariants(w, t, {10, 0}, StateDesign::PTDL, cfg);
}

TEST_CASE("PTDL: boundary lengths select the right-closed bucket") {
  EncoderConfig cfg;
  // Pair exactly 5 cells apart: l = 25 m, the edge of bucket (0,25].
  WorldState w = make_world({{0, VehicleKind::ControlledMmWave, 100, 1},
                             {1, VehicleKind::UncontrolledMmWave, 105, 1}});
  ConnectivitySnapshot s = snapshot(w);
  REQUIRE(s.relay_length_of(0) == 25);
  StateTensor t = encode_ptdl(w, s, 0, cfg);
  CHECK(t.at(3 + 1, cfg.half_lanes, cfg.half_x) == 1.0);
  CHECK(t.at(3 + 0, cfg.half_lanes, cfg.half_x) == 0.0);
}

TEST_CASE("invariants hold across random worlds and every design") {
  const struct {
    double lambda, r_mm;
  } cases[] = {{0.005, 1.0}, {0.02, 0.4}, {0.05, 0.7}};
  EncoderConfig cfg;
  for (const auto& c : cases)
    for (uint64_t seed = 0; seed < 7; ++seed) {
      WorldState w = spawn_world({}, c.lambda, c.r_mm, 0.5,
                                 MobilityMode::ConstantVelocity, seed);
      ConnectivitySnapshot s = snapshot(w);
      for (int id : w.controlled_ids())
        for (StateDesign d :
             {StateDesign::PT, StateDesign::PTCL, StateDesign::PTDL}) {
          StateTensor t = encode(w, s, id, d, cfg);
          check_invariants(w, t, w.vehicles[id].pos, d, cfg);
        }
    }
}

TEST_CASE("translation consistency: a shifted world encodes identically") {
  EncoderConfig cfg;
  // All occupants at least half_x + shift away from either RoI edge.
  WorldState a = make_world({{0, VehicleKind::ControlledMmWave, 60, 1},
                             {1, VehicleKind::UncontrolledMmWave, 65, 1},
                             {2, VehicleKind::NonMmWave, 58, 2},
                             {3, VehicleKind::UncontrolledMmWave, 72, 0}});
  std::vector<Placement> shifted;
  for (const Vehicle& v : a.vehicles)
    shifted.push_back({v.id, v.kind, v.pos.x + 7, v.pos.lane});
  WorldState b = make_world(shifted);
  for (StateDesign d :
       {StateDesign::PT, StateDesign::PTCL, StateDesign::PTDL}) {
    StateTensor ta = encode(a, snapshot(a), 0, d, cfg);
    StateTensor tb = encode(b, snapshot(b), 0, d, cfg);
    CHECK(ta.data == tb.data);
  }
}

TEST_CASE("encoding is deterministic") {
  EncoderConfig cfg;
  WorldState w =
      spawn_world({}, 0.02, 0.4, 0.5, MobilityMode::ConstantVelocity, 13);
  ConnectivitySnapshot s = snapshot(w);
  const int id = w.controlled_ids()[3];
  StateTensor t1 = encode_ptdl(w, s, id, cfg);
  StateTensor t2 = encode_ptdl(w, s, id, cfg);
  CHECK(t1.data == t2.data);
}

TEST_CASE("tensor_to_text: documented plane-major dump") {
  StateTensor t(1, 2, 2);
  t.at(0, 0, 0) = 1;
  t.at(0, 1, 1) = 0.5;
  CHECK(tensor_to_text(t) == "1 2 2\nplane 0\n1 0\n0 0.5\n");
}
