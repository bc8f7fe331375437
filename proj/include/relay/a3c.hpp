#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <vector>

#include "relay/baselines.hpp"
#include "relay/encoder.hpp"
#include "relay/metrics.hpp"
#include "relay/policy_net.hpp"
#include "relay/world.hpp"

namespace relay {

struct LearnerConfig {
  double gamma = 0.1;
  int t_max = 2;            // steps per update segment
  int steps_per_episode = 100;
  int episodes_learn = 300;
  int episodes_test = 100;
  double alpha = 0.5;       // reward per metre of relay length
  double r_p = -2;          // penalty
  double beta = 0.01;       // entropy weight
  double c_v = 0.5;         // value-loss coefficient
  double lr = 7e-4;
  double rms_decay = 0.99;
  double rms_eps = 0.1;
  StateDesign state = StateDesign::PTCL;
  bool eval_argmax = false;
  void validate() const;
};

// Backward n-step recursion R <- r + gamma*R seeded with the bootstrap;
// advantages are R - value.
struct Targets {
  std::vector<double> returns;
  std::vector<double> advantages;
};
Targets advantage(const std::vector<double>& rewards,
                  const std::vector<double>& values, double bootstrap,
                  double gamma);

// Global model plus shared RMSProp statistics. Gradient application is one
// atomic read-modify-write across all tensors.
class ParameterServer {
 public:
  ParameterServer(ModelParams initial, double lr, double decay, double eps);
  ModelParams copy() const;
  void apply_gradients(const ModelParams& grads);
  uint64_t update_count() const;

 private:
  mutable std::mutex mu_;
  ModelParams params_;
  ModelParams ms_;  // per-parameter squared-gradient accumulators
  double lr_, decay_, eps_;
  uint64_t count_ = 0;
};

enum class PolicyKind { RL, Stay, VFA };
PolicyKind parse_policy(const std::string& name);
std::string policy_name(PolicyKind p);

// Environment side of a run; the road, population and seeds.
struct EnvConfig {
  RoadConfig road;
  double lambda = 0.02;
  double r_mm = 0.4;
  double r_ctrl = 0.5;
  MobilityMode mobility = MobilityMode::ConstantVelocity;
  EncoderConfig enc;
  uint64_t seed_world = 1;
  uint64_t seed_model = 2;
  uint64_t seed_rollout = 3;
};

struct LearnResult {
  ModelParams params;
  MetricsLog log;
};

// Net input dims implied by a window and state design.
NetConfig net_config_for(const EncoderConfig& enc, StateDesign design);

using EpisodeCallback = std::function<void(const EpisodeRecord&)>;

// One update segment for a single agent against its local parameter copy:
// t_max steps (fewer at the episode end), V(s_end) bootstrap, gradients of
// the combined objective. Other controllable vehicles hold Stay.
ModelParams worker_rollout(WorldState& world, int agent_id,
                           const ModelParams& local, const LearnerConfig& lc,
                           const EncoderConfig& enc, int steps_left,
                           Rng& act_rng, Rng& world_rng);

// Learning phase: every controllable vehicle is a worker against one
// ParameterServer; all agents act each step, updates commit in agent order
// every t_max steps.
LearnResult run_learning(const EnvConfig& env, const LearnerConfig& lc,
                         const EpisodeCallback& on_episode = {});

// Test phase with frozen parameters. `model` may be null for Stay/VFA.
MetricsLog run_eval(const ModelParams* model, PolicyKind policy,
                    const VfaParams& vfa, const EnvConfig& env,
                    const LearnerConfig& lc,
                    const EpisodeCallback& on_episode = {});

}  // namespace relay
