// Timing harness for the hot kernels, comparing the OpenMP implementations
// against their serial reference counterparts on a production-sized world.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "relay/a3c.hpp"
#include "relay/connectivity.hpp"
#include "relay/encoder.hpp"
#include "relay/policy_net.hpp"
#include "relay/world.hpp"

using namespace relay;

namespace {

double time_ms(int reps, const std::function<void()>& fn) {
  fn();  // warm up
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void row(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s %10.3f ms %10.3f ms %7.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
  RoadConfig road;
  WorldState world = spawn_world(road, 0.02, 0.4, 0.5,
                                 MobilityMode::ConstantVelocity, 42);
  const ConnectivitySnapshot snap = snapshot(world);
  const int agent = world.controlled_ids().front();
  EncoderConfig enc;

  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("vehicles: %d mmWave: %zu agents: %zu\n", world.n_vehicles(),
              world.mmwave_ids().size(), world.controlled_ids().size());
  std::printf("%-28s %13s %13s %8s\n", "kernel", "serial", "parallel",
              "speedup");

  row("snapshot",
      time_ms(20, [&] { (void)ref::snapshot(world); }),
      time_ms(20, [&] { (void)snapshot(world); }));

  row("achievable_length_map",
      time_ms(3, [&] {
        (void)achievable_length_map(world, snap, agent, enc.half_x,
                                    enc.half_lanes, false);
      }),
      time_ms(3, [&] {
        (void)achievable_length_map(world, snap, agent, enc.half_x,
                                    enc.half_lanes, true);
      }));

  const double naive_ms = time_ms(1, [&] {
    (void)ref::achievable_length_map(world, agent, enc.half_x,
                                     enc.half_lanes);
  });
  std::printf("%-28s %10.3f ms (per-cell rebuild reference)\n",
              "achievable_map naive", naive_ms);

  const double enc_ms = time_ms(3, [&] {
    (void)encode(world, snap, agent, StateDesign::PTDL, enc);
  });
  std::printf("%-28s %10.3f ms\n", "encode ptdl", enc_ms);

  Rng rng(7);
  ModelParams params =
      ModelParams::init(net_config_for(enc, StateDesign::PTDL), rng);
  StateTensor s = encode(world, snap, agent, StateDesign::PTDL, enc);
  const double fwd_ms = time_ms(10, [&] { (void)forward(params, s); });
  std::printf("%-28s %10.3f ms\n", "net forward", fwd_ms);

  RolloutEntry e{s, 1, 0.5, 1.0};
  ModelParams grads = ModelParams::zeros(params.cfg);
  const double bwd_ms = time_ms(5, [&] {
    grads.scale(0.0);
    (void)backward(params, {e, e}, 0.01, 0.5, grads);
  });
  std::printf("%-28s %10.3f ms (t_max=2 segment)\n", "net backward", bwd_ms);
  return 0;
}
