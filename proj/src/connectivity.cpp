#include "relay/connectivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "relay/world.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace relay {

namespace {

// Exact rational in [0,1] bounds comparison; magnitudes stay far below
// 2^20 so the cross products cannot overflow.
struct Frac {
  long long n;
  long long d;  // > 0
};

bool frac_less(Frac a, Frac b) { return a.n * b.d < b.n * a.d; }

// True iff the segment between the two cell centers (doubled coordinates,
// so centers are odd lattice points) crosses the open interior of cell
// (cx, cy). A touch confined to the cell boundary does not count, so a
// segment passing exactly through a corner never blocks.
bool segment_crosses_cell(long long ax, long long ay, long long bx,
                          long long by, int cx, int cy) {
  Frac tlo{0, 1}, thi{1, 1};
  const long long d[2] = {bx - ax, by - ay};
  const long long a0[2] = {ax, ay};
  const long long lo[2] = {2LL * cx, 2LL * cy};
  for (int axis = 0; axis < 2; ++axis) {
    const long long hi = lo[axis] + 2;
    if (d[axis] == 0) {
      if (!(lo[axis] < a0[axis] && a0[axis] < hi)) return false;
      continue;
    }
    Frac enter, exit;
    if (d[axis] > 0) {
      enter = Frac{lo[axis] - a0[axis], d[axis]};
      exit = Frac{hi - a0[axis], d[axis]};
    } else {
      enter = Frac{a0[axis] - hi, -d[axis]};
      exit = Frac{a0[axis] - lo[axis], -d[axis]};
    }
    if (frac_less(tlo, enter)) tlo = enter;
    if (frac_less(exit, thi)) thi = exit;
  }
  return frac_less(tlo, thi);
}

template <typename OccupiedFn>
bool los_clear_impl(const RoadConfig& cfg, OccupiedFn occupied, GridPos a,
                    GridPos b) {
  (void)cfg;
  const long long ax = 2LL * a.x + 1, ay = 2LL * a.lane + 1;
  const long long bx = 2LL * b.x + 1, by = 2LL * b.lane + 1;
  const int x0 = std::min(a.x, b.x), x1 = std::max(a.x, b.x);
  const int l0 = std::min(a.lane, b.lane), l1 = std::max(a.lane, b.lane);
  for (int lane = l0; lane <= l1; ++lane)
    for (int x = x0; x <= x1; ++x) {
      if ((x == a.x && lane == a.lane) || (x == b.x && lane == b.lane))
        continue;
      if (!occupied(x, lane)) continue;
      if (segment_crosses_cell(ax, ay, bx, by, x, lane)) return false;
    }
  return true;
}

bool within_v2v_range(const RoadConfig& cfg, GridPos a, GridPos b) {
  const double dx = (a.x - b.x) * cfg.cell_dx_m;
  const double dy = (a.lane - b.lane) * cfg.lane_dy_m;
  return dx * dx + dy * dy <= cfg.r_vv_m * cfg.r_vv_m;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);  // smaller index stays root
    parent[a] = b;
  }
};

void collect_mm(const WorldState& w, std::vector<int>& mm_ids,
                std::vector<int>& index_of_id) {
  mm_ids.clear();
  index_of_id.assign(w.n_vehicles(), -1);
  for (const Vehicle& v : w.vehicles)
    if (is_mmwave(v.kind)) {
      index_of_id[v.id] = static_cast<int>(mm_ids.size());
      mm_ids.push_back(v.id);
    }
}

// Components, relay lengths and coverages from a finished adjacency list.
void finish_snapshot(const WorldState& w, ConnectivitySnapshot& s) {
  const int n = static_cast<int>(s.mm_ids.size());
  UnionFind uf(n);
  for (int i = 0; i < n; ++i)
    for (int j : s.adj[i])
      if (j > i) uf.unite(i, j);

  s.component.assign(n, -1);
  std::vector<int> root_label(n, -1);
  s.n_components = 0;
  for (int i = 0; i < n; ++i) {
    const int r = uf.find(i);
    if (root_label[r] < 0) root_label[r] = s.n_components++;
    s.component[i] = root_label[r];
  }

  std::vector<int> min_x(s.n_components, std::numeric_limits<int>::max());
  std::vector<int> max_x(s.n_components, std::numeric_limits<int>::min());
  for (int i = 0; i < n; ++i) {
    const int x = w.vehicles[s.mm_ids[i]].pos.x;
    min_x[s.component[i]] = std::min(min_x[s.component[i]], x);
    max_x[s.component[i]] = std::max(max_x[s.component[i]], x);
  }
  s.relay_length_m.resize(n);
  s.coverage.resize(n);
  for (int i = 0; i < n; ++i) {
    s.relay_length_m[i] =
        (max_x[s.component[i]] - min_x[s.component[i]]) * w.config.cell_dx_m;
    s.coverage[i] = coverage_of_length(w.config, s.relay_length_m[i]);
  }
}

}  // namespace

bool los_clear(const WorldState& world, GridPos a, GridPos b) {
  return los_clear_impl(
      world.config,
      [&](int x, int lane) { return world.occupant(x, lane) >= 0; }, a, b);
}

bool v2v_linked(const WorldState& world, int i, int j) {
  if (!is_mmwave(world.vehicles[i].kind) ||
      !is_mmwave(world.vehicles[j].kind))
    throw contract_error("v2v_linked requires mmWave vehicles");
  const GridPos a = world.vehicles[i].pos;
  const GridPos b = world.vehicles[j].pos;
  return i != j && within_v2v_range(world.config, a, b) &&
         los_clear(world, a, b);
}

double coverage_of_length(const RoadConfig& cfg, double relay_length_m) {
  return std::min((2.0 * cfg.r_vi_m + relay_length_m) / cfg.rsu_interval_m,
                  1.0);
}

ConnectivitySnapshot snapshot(const WorldState& world) {
  ConnectivitySnapshot s;
  collect_mm(world, s.mm_ids, s.index_of_id);
  const int n = static_cast<int>(s.mm_ids.size());
  s.adj.assign(n, {});

  // Each row is filled independently; the serial merge below runs in fixed
  // index order, so thread count never changes the result.
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i && v2v_linked(world, s.mm_ids[i], s.mm_ids[j]))
        s.adj[i].push_back(j);

  finish_snapshot(world, s);
  return s;
}

double mean_coverage(const ConnectivitySnapshot& snap) {
  if (snap.coverage.empty()) return 0;
  double sum = 0;
  for (double c : snap.coverage) sum += c;
  return sum / static_cast<double>(snap.coverage.size());
}

double achievable_relay_length(const WorldState& world, int i,
                               GridPos target) {
  if (!is_mmwave(world.vehicles[i].kind))
    throw contract_error("achievable_relay_length requires a mmWave vehicle");
  if (!in_road(world.config, target.x, target.lane)) return 0;
  const int occ = world.occupant(target);
  if (occ >= 0 && occ != i) return 0;

  const GridPos from = world.vehicles[i].pos;
  const auto occupied = [&](int x, int lane) {
    if (x == target.x && lane == target.lane) return true;
    if (x == from.x && lane == from.lane) return false;
    return world.occupant(x, lane) >= 0;
  };
  const auto pos_of = [&](int id) {
    return id == i ? target : world.vehicles[id].pos;
  };

  std::vector<int> mm_ids, index_of_id;
  collect_mm(world, mm_ids, index_of_id);
  const int n = static_cast<int>(mm_ids.size());
  const int src = index_of_id[i];

  // BFS from i over links evaluated against the hypothetical placement.
  std::vector<signed char> seen(n, 0);
  std::vector<int> queue{src};
  seen[src] = 1;
  int min_x = target.x, max_x = target.x;
  for (size_t q = 0; q < queue.size(); ++q) {
    const int u = queue[q];
    const GridPos pu = pos_of(mm_ids[u]);
    for (int v = 0; v < n; ++v) {
      if (seen[v]) continue;
      const GridPos pv = pos_of(mm_ids[v]);
      if (!within_v2v_range(world.config, pu, pv)) continue;
      if (!los_clear_impl(world.config, occupied, pu, pv)) continue;
      seen[v] = 1;
      queue.push_back(v);
      min_x = std::min(min_x, pv.x);
      max_x = std::max(max_x, pv.x);
    }
  }
  return (max_x - min_x) * world.config.cell_dx_m;
}

LengthMap achievable_length_map(const WorldState& world,
                                const ConnectivitySnapshot& snap, int i,
                                int half_x, int half_lanes, bool parallel) {
  if (!is_mmwave(world.vehicles[i].kind))
    throw contract_error("achievable_length_map requires a mmWave vehicle");
  const RoadConfig& cfg = world.config;
  const GridPos home = world.vehicles[i].pos;

  LengthMap m;
  m.half_x = half_x;
  m.half_lanes = half_lanes;
  const int nx = 2 * half_x + 1, nl = 2 * half_lanes + 1;
  m.v.assign(static_cast<size_t>(nx) * nl, 0);

  // The other mmWave vehicles; everything below treats i's cell as vacated.
  std::vector<int> ids;
  std::vector<GridPos> pos;
  std::vector<int> oidx(world.n_vehicles(), -1);
  for (int id : snap.mm_ids)
    if (id != i) {
      oidx[id] = static_cast<int>(ids.size());
      ids.push_back(id);
      pos.push_back(world.vehicles[id].pos);
    }
  const int n = static_cast<int>(ids.size());

  const auto occupied_wo_i = [&](int x, int lane) {
    return !(x == home.x && lane == home.lane) &&
           world.occupant(x, lane) >= 0;
  };

  // Links among the others once i's cell is empty. Existing links survive
  // (removing a blocker never cuts a link); in-range non-links need a
  // recheck only when the segment crosses i's cell.
  std::vector<char> linked_full(static_cast<size_t>(n) * n, 0);
  for (int id : snap.mm_ids) {
    if (id == i) continue;
    const int p = oidx[id];
    for (int j : snap.adj[snap.index_of(id)]) {
      const int jd = snap.mm_ids[j];
      if (jd != i) linked_full[static_cast<size_t>(p) * n + oidx[jd]] = 1;
    }
  }
  std::vector<std::pair<int, int>> edges;
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      if (!within_v2v_range(cfg, pos[p], pos[q])) continue;
      if (linked_full[static_cast<size_t>(p) * n + q]) {
        edges.emplace_back(p, q);
        continue;
      }
      if (!segment_crosses_cell(2LL * pos[p].x + 1, 2LL * pos[p].lane + 1,
                                2LL * pos[q].x + 1, 2LL * pos[q].lane + 1,
                                home.x, home.lane))
        continue;
      if (los_clear_impl(cfg, occupied_wo_i, pos[p], pos[q]))
        edges.emplace_back(p, q);
    }
  const int ne = static_cast<int>(edges.size());

  // Base components of the others and their x extents.
  std::vector<int> base_comp(n, -1), base_cmin, base_cmax;
  {
    UnionFind uf(n);
    for (const auto& [p, q] : edges) uf.unite(p, q);
    std::vector<int> label(n, -1);
    for (int p = 0; p < n; ++p) {
      const int r = uf.find(p);
      if (label[r] < 0) {
        label[r] = static_cast<int>(base_cmin.size());
        base_cmin.push_back(pos[p].x);
        base_cmax.push_back(pos[p].x);
      }
      base_comp[p] = label[r];
      base_cmin[label[r]] = std::min(base_cmin[label[r]], pos[p].x);
      base_cmax[label[r]] = std::max(base_cmax[label[r]], pos[p].x);
    }
  }

  // For each window cell, the edges a vehicle parked there would block.
  std::vector<std::vector<int>> blocked(static_cast<size_t>(nx) * nl);
  for (int e = 0; e < ne; ++e) {
    const GridPos a = pos[edges[e].first], b = pos[edges[e].second];
    const int x0 = std::max(std::min(a.x, b.x), home.x - half_x);
    const int x1 = std::min(std::max(a.x, b.x), home.x + half_x);
    const int l0 = std::max(std::min(a.lane, b.lane), home.lane - half_lanes);
    const int l1 = std::min(std::max(a.lane, b.lane), home.lane + half_lanes);
    for (int lane = l0; lane <= l1; ++lane)
      for (int x = x0; x <= x1; ++x) {
        if ((x == a.x && lane == a.lane) || (x == b.x && lane == b.lane))
          continue;
        if (segment_crosses_cell(2LL * a.x + 1, 2LL * a.lane + 1,
                                 2LL * b.x + 1, 2LL * b.lane + 1, x, lane))
          blocked[static_cast<size_t>(x - (home.x - half_x)) * nl +
                  (lane - (home.lane - half_lanes))]
              .push_back(e);
      }
  }

#ifdef _OPENMP
#pragma omp parallel if (parallel)
#else
  (void)parallel;
#endif
  {
    // Per-thread scratch for targets that cut edges.
    std::vector<int> parent(n), comp_of(n), cmin(n), cmax(n);
    std::vector<char> edge_off(ne);
    const auto find = [&](int a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };

#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (int w = 0; w < nx * nl; ++w) {
      const int dx = w / nl - half_x;
      const int dl = w % nl - half_lanes;
      const GridPos t{home.x + dx, home.lane + dl};
      if (!in_road(cfg, t.x, t.lane)) continue;
      const int occ = world.occupant(t);
      if (occ >= 0 && occ != i) continue;

      const int* comp = base_comp.data();
      const int* lo = base_cmin.data();
      const int* hi = base_cmax.data();
      if (!blocked[w].empty()) {
        for (int e = 0; e < ne; ++e) edge_off[e] = 0;
        for (int e : blocked[w]) edge_off[e] = 1;
        for (int p = 0; p < n; ++p) parent[p] = p;
        for (int e = 0; e < ne; ++e) {
          if (edge_off[e]) continue;
          int a = find(edges[e].first), b = find(edges[e].second);
          if (a == b) continue;
          if (a < b) std::swap(a, b);
          parent[a] = b;
        }
        for (int p = 0; p < n; ++p) {
          const int r = find(p);
          comp_of[p] = r;
          if (r == p) {
            cmin[r] = pos[p].x;
            cmax[r] = pos[p].x;
          }
        }
        for (int p = 0; p < n; ++p) {
          const int r = comp_of[p];
          cmin[r] = std::min(cmin[r], pos[p].x);
          cmax[r] = std::max(cmax[r], pos[p].x);
        }
        comp = comp_of.data();
        lo = cmin.data();
        hi = cmax.data();
      }

      // Join i at t with every component it can link to; extents are
      // min/max folds, so repeated components cost nothing.
      int tmin = t.x, tmax = t.x;
      for (int p = 0; p < n; ++p) {
        if (!within_v2v_range(cfg, t, pos[p])) continue;
        if (!los_clear_impl(cfg, occupied_wo_i, t, pos[p])) continue;
        tmin = std::min(tmin, lo[comp[p]]);
        tmax = std::max(tmax, hi[comp[p]]);
      }
      m.v[w] = (tmax - tmin) * cfg.cell_dx_m;
    }
  }
  return m;
}

namespace ref {

ConnectivitySnapshot snapshot(const WorldState& world) {
  ConnectivitySnapshot s;
  collect_mm(world, s.mm_ids, s.index_of_id);
  const int n = static_cast<int>(s.mm_ids.size());
  s.adj.assign(n, {});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (v2v_linked(world, s.mm_ids[i], s.mm_ids[j])) {
        s.adj[i].push_back(j);
        s.adj[j].push_back(i);
      }
  finish_snapshot(world, s);
  return s;
}

double achievable_relay_length(const WorldState& world, int i,
                               GridPos target) {
  if (!in_road(world.config, target.x, target.lane)) return 0;
  const int occ = world.occupant(target);
  if (occ >= 0 && occ != i) return 0;

  WorldState moved = world;
  const GridPos from = moved.vehicles[i].pos;
  moved.occupancy[static_cast<size_t>(from.lane) * moved.config.n_cells_x +
                  from.x] = -1;
  moved.occupancy[static_cast<size_t>(target.lane) * moved.config.n_cells_x +
                  target.x] = i;
  moved.vehicles[i].pos = target;
  const ConnectivitySnapshot s = ref::snapshot(moved);
  return s.relay_length_of(i);
}

LengthMap achievable_length_map(const WorldState& world, int i, int half_x,
                                int half_lanes) {
  LengthMap m;
  m.half_x = half_x;
  m.half_lanes = half_lanes;
  const int nx = 2 * half_x + 1, nl = 2 * half_lanes + 1;
  m.v.assign(static_cast<size_t>(nx) * nl, 0);
  const GridPos c = world.vehicles[i].pos;
  for (int dx = -half_x; dx <= half_x; ++dx)
    for (int dl = -half_lanes; dl <= half_lanes; ++dl)
      m.v[static_cast<size_t>(dx + half_x) * nl + (dl + half_lanes)] =
          ref::achievable_relay_length(world, i,
                                       GridPos{c.x + dx, c.lane + dl});
  return m;
}

}  // namespace ref

}  // namespace relay
