#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "relay/baselines.hpp"

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

// Constant-velocity announcements are deterministic; the seed is unused.
void announce(WorldState& w) {
  Rng rng(0);
  announce_intents(w, rng);
}

constexpr auto kCtl = VehicleKind::ControlledMmWave;
constexpr auto kUnc = VehicleKind::UncontrolledMmWave;
constexpr auto kNon = VehicleKind::NonMmWave;

}  // namespace

TEST_CASE("stay policy always stays") {
  WorldState w = make_world({{0, kCtl, 100, 1}, {1, kUnc, 105, 2}});
  CHECK(stay_policy(w, 0) == Action::Stay);
  CHECK(stay_policy(w, 1) == Action::Stay);
}

TEST_CASE("vfa params validation") {
  VfaParams p;
  CHECK_NOTHROW(p.validate());
  p.d_th_m = 0;
  CHECK_THROWS_AS(p.validate(), config_error);
  p = {};
  p.w_r = -1;
  CHECK_THROWS_AS(p.validate(), config_error);
  p = {};
  p.deadband = -0.1;
  CHECK_THROWS_AS(p.validate(), config_error);
}

TEST_CASE("attraction beyond the threshold: closed form and Forward move") {
  VfaParams p;
  // Neighbour 12 cells ahead, same lane: d = 60 m > 50 m.
  WorldState w = make_world({{0, kCtl, 100, 1}, {1, kUnc, 112, 1}});
  Force f = vfa_force(w, 0, p);
  CHECK(f.fx ==
        doctest::Approx(1.0 - std::exp(-2.0 * 10.0)).epsilon(1e-12));
  CHECK(f.fy == 0.0);
  announce(w);
  CHECK(vfa_action(w, 0, p) == Action::Forward);
}

TEST_CASE("repulsion inside the threshold pushes Back") {
  VfaParams p;
  // Neighbour 6 cells ahead: d = 30 m < 50 m.
  WorldState w = make_world({{0, kCtl, 100, 1}, {1, kUnc, 106, 1}});
  Force f = vfa_force(w, 0, p);
  CHECK(f.fx ==
        doctest::Approx(-1e4 * (1.0 - std::exp(-2.0 * 20.0))).epsilon(1e-12));
  announce(w);
  CHECK(vfa_action(w, 0, p) == Action::Back);
}

TEST_CASE("exactly at the threshold the pair contributes nothing") {
  VfaParams p;
  // 10 cells = 50 m = d_th.
  WorldState w = make_world({{0, kCtl, 100, 1}, {1, kUnc, 110, 1}});
  Force f = vfa_force(w, 0, p);
  CHECK(f.fx == 0.0);
  CHECK(f.fy == 0.0);
  CHECK(vfa_action(w, 0, p) == Action::Stay);
}

TEST_CASE("symmetric fore and aft neighbours cancel to Stay") {
  VfaParams p;
  WorldState w = make_world(
      {{0, kCtl, 100, 1}, {1, kUnc, 112, 1}, {2, kUnc, 88, 1}});
  Force f = vfa_force(w, 0, p);
  CHECK(f.fx == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f.fy == 0.0);
  CHECK(vfa_action(w, 0, p) == Action::Stay);
}

TEST_CASE("close lateral neighbour repels into a lane change") {
  VfaParams p;
  // Same x, one lane up: d = 3.5 m, strong repulsion downward.
  WorldState w = make_world({{0, kCtl, 100, 2}, {1, kUnc, 100, 3}});
  Force f = vfa_force(w, 0, p);
  CHECK(f.fx == 0.0);
  CHECK(f.fy < 0.0);
  announce(w);
  CHECK(vfa_action(w, 0, p) == Action::Left);
}

TEST_CASE("prohibited best move degrades to Stay") {
  VfaParams p;
  // Repulsion pushes up but the agent already sits on the top lane.
  WorldState w = make_world({{0, kCtl, 100, 3}, {1, kUnc, 100, 2}});
  Force f = vfa_force(w, 0, p);
  CHECK(f.fy > 0.0);
  announce(w);
  CHECK(vfa_action(w, 0, p) == Action::Stay);
}

TEST_CASE("non-mmWave vehicles exert no force") {
  VfaParams p;
  WorldState w = make_world({{0, kCtl, 100, 1}, {1, kNon, 112, 1}});
  Force f = vfa_force(w, 0, p);
  CHECK(f.fx == 0.0);
  CHECK(vfa_action(w, 0, p) == Action::Stay);
}

TEST_CASE("neighbours outside the window are invisible") {
  VfaParams p;  // window_half_x = 20 cells
  WorldState w = make_world({{0, kCtl, 100, 1}, {1, kUnc, 121, 1}});
  Force f = vfa_force(w, 0, p);
  CHECK(f.fx == 0.0);
  WorldState w2 = make_world({{0, kCtl, 100, 1}, {1, kUnc, 120, 1}});
  CHECK(vfa_force(w2, 0, p).fx > 0.0);
}

TEST_CASE("forces on a pair are antisymmetric") {
  VfaParams p;
  Rng rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    const int x0 = 50 + rng.next_int(100), l0 = rng.next_int(4);
    int x1 = x0, l1 = l0;
    while (x1 == x0 && l1 == l0) {
      x1 = x0 - 15 + rng.next_int(31);
      l1 = rng.next_int(4);
    }
    WorldState w = make_world({{0, kCtl, x0, l0}, {1, kUnc, x1, l1}});
    Force f0 = vfa_force(w, 0, p);
    Force f1 = vfa_force(w, 1, p);
    CHECK(f0.fx == doctest::Approx(-f1.fx).epsilon(1e-12));
    CHECK(f0.fy == doctest::Approx(-f1.fy).epsilon(1e-12));
  }
}

TEST_CASE("a wide deadband swallows weak attraction") {
  VfaParams p;
  p.deadband = 10;
  WorldState w = make_world({{0, kCtl, 100, 1}, {1, kUnc, 112, 1}});
  CHECK(vfa_action(w, 0, p) == Action::Stay);
}

TEST_CASE("vfa never returns a prohibited move on spawned worlds") {
  VfaParams p;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    WorldState w = spawn_world({}, 0.03, 0.6, 0.5,
                               MobilityMode::ConstantVelocity, seed);
    Rng rng(seed);
    announce_intents(w, rng);
    for (int id : w.controlled_ids()) {
      const Action a = vfa_action(w, id, p);
      if (a != Action::Stay) CHECK(!prohibited_directions(w, id).contains(a));
    }
  }
}
