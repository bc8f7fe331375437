#include "relay/a3c.hpp"

#include <cmath>

namespace relay {

void LearnerConfig::validate() const {
  if (gamma < 0 || gamma >= 1) throw config_error("gamma must be in [0,1)");
  if (t_max < 1) throw config_error("t_max must be >= 1");
  if (steps_per_episode < t_max)
    throw config_error("steps_per_episode must be >= t_max");
  if (episodes_learn < 0 || episodes_test < 0)
    throw config_error("episode counts must be >= 0");
  if (alpha <= 0) throw config_error("alpha must be positive");
  if (r_p >= 0) throw config_error("r_p must be negative");
  if (beta < 0 || c_v < 0)
    throw config_error("beta and c_v must be >= 0");
  if (lr <= 0) throw config_error("learning rate must be positive");
  if (rms_decay < 0 || rms_decay >= 1)
    throw config_error("rms_decay must be in [0,1)");
  if (rms_eps <= 0) throw config_error("rms_eps must be positive");
}

Targets advantage(const std::vector<double>& rewards,
                  const std::vector<double>& values, double bootstrap,
                  double gamma) {
  if (rewards.empty() || rewards.size() != values.size())
    throw contract_error("advantage: rewards and values must match, n >= 1");
  const size_t n = rewards.size();
  Targets t;
  t.returns.resize(n);
  t.advantages.resize(n);
  double r = bootstrap;
  for (size_t k = n; k-- > 0;) {
    r = rewards[k] + gamma * r;
    t.returns[k] = r;
    t.advantages[k] = r - values[k];
  }
  return t;
}

ParameterServer::ParameterServer(ModelParams initial, double lr, double decay,
                                 double eps)
    : params_(std::move(initial)),
      ms_(ModelParams::zeros(params_.cfg)),
      lr_(lr),
      decay_(decay),
      eps_(eps) {}

ModelParams ParameterServer::copy() const {
  std::lock_guard<std::mutex> lock(mu_);
  return params_;
}

void ParameterServer::apply_gradients(const ModelParams& grads) {
  std::lock_guard<std::mutex> lock(mu_);
  auto pt = params_.tensors();
  auto mt = ms_.tensors();
  auto gt = grads.tensors();
  for (int i = 0; i < ModelParams::kNumTensors; ++i) {
    if (gt[i]->size() != pt[i]->size())
      throw contract_error("apply_gradients: shape mismatch");
    for (size_t j = 0; j < pt[i]->size(); ++j) {
      const double g = gt[i]->v[j];
      double& m = mt[i]->v[j];
      m = decay_ * m + (1.0 - decay_) * g * g;
      pt[i]->v[j] -= lr_ * g / std::sqrt(m + eps_);
    }
  }
  ++count_;
}

uint64_t ParameterServer::update_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return count_;
}

PolicyKind parse_policy(const std::string& name) {
  if (name == "rl") return PolicyKind::RL;
  if (name == "stay") return PolicyKind::Stay;
  if (name == "vfa") return PolicyKind::VFA;
  throw config_error("unknown policy: " + name);
}

std::string policy_name(PolicyKind p) {
  switch (p) {
    case PolicyKind::RL: return "rl";
    case PolicyKind::Stay: return "stay";
    default: return "vfa";
  }
}

NetConfig net_config_for(const EncoderConfig& enc, StateDesign design) {
  NetConfig nc;
  nc.k = num_planes(design, enc);
  nc.y = enc.window_y();
  nc.x = enc.window_x();
  return nc;
}

namespace {

int sample_action(const ForwardOut& out, Rng& rng, bool argmax) {
  if (argmax) {
    int best = 0;
    for (size_t j = 1; j < out.policy.size(); ++j)
      if (out.policy[j] > out.policy[best]) best = static_cast<int>(j);
    return best;
  }
  return static_cast<int>(
      rng.sample(std::span<const double>(out.policy)));
}

// Per-agent learner state within one episode.
struct Worker {
  int id = -1;
  ModelParams local;
  ModelParams grads;
  std::vector<RolloutEntry> seg;
  std::vector<double> rewards;
  std::vector<double> values;
  StateTensor pending;  // post-step state cached from the bootstrap encode
  bool has_pending = false;
  Rng rng{0};
  double accum_reward = 0;
  int penalties = 0;
};

}  // namespace

ModelParams worker_rollout(WorldState& world, int agent_id,
                           const ModelParams& local, const LearnerConfig& lc,
                           const EncoderConfig& enc, int steps_left,
                           Rng& act_rng, Rng& world_rng) {
  const std::vector<int> ctrl = world.controlled_ids();
  std::vector<RolloutEntry> seg;
  std::vector<double> rewards, values;
  const int n_steps = std::min(lc.t_max, steps_left);
  if (n_steps < 1) throw contract_error("worker_rollout: no steps left");

  for (int t = 0; t < n_steps; ++t) {
    announce_intents(world, world_rng);
    const ConnectivitySnapshot snap = snapshot(world);
    const StateTensor s = encode(world, snap, agent_id, lc.state, enc);
    const ForwardOut out = forward(local, s);
    const int a = sample_action(out, act_rng, false);
    values.push_back(out.value);
    seg.push_back(RolloutEntry{s, a, 0, 0});

    std::vector<Action> actions(ctrl.size(), Action::Stay);
    size_t me = ctrl.size();
    for (size_t k = 0; k < ctrl.size(); ++k)
      if (ctrl[k] == agent_id) me = k;
    if (me == ctrl.size())
      throw contract_error("worker_rollout: agent is not controllable");
    actions[me] = static_cast<Action>(a);
    const StepOutcome outcome =
        step(world, actions, world_rng, lc.alpha, lc.r_p);
    rewards.push_back(outcome.agents[me].reward);
  }

  const ConnectivitySnapshot end_snap = snapshot(world);
  const StateTensor s_end = encode(world, end_snap, agent_id, lc.state, enc);
  const double bootstrap = forward(local, s_end).value;
  const Targets tg = advantage(rewards, values, bootstrap, lc.gamma);
  for (size_t k = 0; k < seg.size(); ++k) {
    seg[k].advantage = tg.advantages[k];
    seg[k].ret = tg.returns[k];
  }
  ModelParams grads = ModelParams::zeros(local.cfg);
  backward(local, seg, lc.beta, lc.c_v, grads);
  return grads;
}

LearnResult run_learning(const EnvConfig& env, const LearnerConfig& lc,
                         const EpisodeCallback& on_episode) {
  env.road.validate();
  env.enc.validate();
  lc.validate();

  const NetConfig nc = net_config_for(env.enc, lc.state);
  Rng model_rng(env.seed_model);
  ParameterServer server(ModelParams::init(nc, model_rng), lc.lr,
                         lc.rms_decay, lc.rms_eps);

  MetricsLog log;
  for (int ep = 0; ep < lc.episodes_learn; ++ep) {
    WorldState world =
        spawn_world(env.road, env.lambda, env.r_mm, env.r_ctrl, env.mobility,
                    mix_seed(env.seed_world, ep, 0));
    Rng world_rng(mix_seed(env.seed_world, ep, 1));
    const std::vector<int> ctrl = world.controlled_ids();
    const int na = static_cast<int>(ctrl.size());

    std::vector<Worker> workers(na);
    for (int k = 0; k < na; ++k) {
      workers[k].id = ctrl[k];
      workers[k].local = server.copy();
      workers[k].grads = ModelParams::zeros(nc);
      workers[k].rng = Rng(mix_seed(env.seed_rollout, ep, k));
    }

    std::vector<Action> actions(na, Action::Stay);
    double coverage_sum = 0, last_coverage = 0;

    for (int t = 0; t < lc.steps_per_episode; ++t) {
      announce_intents(world, world_rng);
      const ConnectivitySnapshot snap = snapshot(world);

      // Act: every agent observes the same pre-step world.
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
      for (int k = 0; k < na; ++k) {
        Worker& w = workers[k];
        StateTensor s = w.has_pending
                            ? std::move(w.pending)
                            : encode(world, snap, w.id, lc.state, env.enc);
        w.has_pending = false;
        const ForwardOut out = forward(w.local, s);
        const int a = sample_action(out, w.rng, false);
        w.values.push_back(out.value);
        w.seg.push_back(RolloutEntry{std::move(s), a, 0, 0});
        actions[k] = static_cast<Action>(a);
      }

      const StepOutcome outcome =
          step(world, actions, world_rng, lc.alpha, lc.r_p);

      int step_penalties = 0;
      double reward_sum = 0;
      for (int k = 0; k < na; ++k) {
        Worker& w = workers[k];
        const AgentStepResult& ar = outcome.agents[k];
        w.rewards.push_back(ar.reward);
        w.accum_reward += ar.reward;
        reward_sum += ar.reward;
        if (ar.penalized) {
          ++w.penalties;
          ++step_penalties;
        }
      }

      const bool boundary = (static_cast<int>(workers.empty()
                                                  ? 0
                                                  : workers[0].seg.size()) >=
                             lc.t_max) ||
                            t + 1 == lc.steps_per_episode;
      if (boundary && na > 0) {
        // Close the segment: V(s_end) bootstrap under the pre-update local
        // copy (episode ends are truncations of a continuing task).
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int k = 0; k < na; ++k) {
          Worker& w = workers[k];
          w.pending = encode(world, outcome.snap, w.id, lc.state, env.enc);
          w.has_pending = true;
          const double bootstrap = forward(w.local, w.pending).value;
          const Targets tg =
              advantage(w.rewards, w.values, bootstrap, lc.gamma);
          for (size_t j = 0; j < w.seg.size(); ++j) {
            w.seg[j].advantage = tg.advantages[j];
            w.seg[j].ret = tg.returns[j];
          }
          for (Tensor* g : w.grads.tensors())
            std::fill(g->v.begin(), g->v.end(), 0.0);
          backward(w.local, w.seg, lc.beta, lc.c_v, w.grads);
          w.seg.clear();
          w.rewards.clear();
          w.values.clear();
        }
        // Commit in agent order so the trajectory is thread-independent.
        for (int k = 0; k < na; ++k) server.apply_gradients(workers[k].grads);
        for (int k = 0; k < na; ++k) workers[k].local = server.copy();
      }

      const double cov = mean_coverage(outcome.snap);
      coverage_sum += cov;
      last_coverage = cov;
      log.steps.push_back(StepRecord{ep + 1, t + 1, cov,
                                     na ? reward_sum / na : 0.0, reward_sum,
                                     step_penalties});
    }

    EpisodeRecord er;
    er.episode = ep + 1;
    er.final_coverage = last_coverage;
    er.mean_step_coverage = coverage_sum / lc.steps_per_episode;
    double accum = 0;
    int pens = 0;
    for (const Worker& w : workers) {
      accum += w.accum_reward;
      pens += w.penalties;
    }
    er.accum_reward_mean = na ? accum / na : 0.0;
    er.penalties = pens;
    log.episodes.push_back(er);
    if (on_episode) on_episode(er);
  }

  return LearnResult{server.copy(), std::move(log)};
}

MetricsLog run_eval(const ModelParams* model, PolicyKind policy,
                    const VfaParams& vfa, const EnvConfig& env,
                    const LearnerConfig& lc,
                    const EpisodeCallback& on_episode) {
  env.road.validate();
  env.enc.validate();
  lc.validate();
  vfa.validate();

  if (policy == PolicyKind::RL) {
    if (!model) throw contract_error("run_eval: rl policy requires a model");
    const NetConfig want = net_config_for(env.enc, lc.state);
    if (model->cfg.k != want.k || model->cfg.x != want.x ||
        model->cfg.y != want.y)
      throw contract_error(
          "run_eval: model shape (k=" + std::to_string(model->cfg.k) +
          ",x=" + std::to_string(model->cfg.x) +
          ",y=" + std::to_string(model->cfg.y) + ") does not match run (k=" +
          std::to_string(want.k) + ",x=" + std::to_string(want.x) + ",y=" +
          std::to_string(want.y) + ")");
  }

  MetricsLog log;
  for (int ep = 0; ep < lc.episodes_test; ++ep) {
    WorldState world =
        spawn_world(env.road, env.lambda, env.r_mm, env.r_ctrl, env.mobility,
                    mix_seed(env.seed_world, ep, 0));
    Rng world_rng(mix_seed(env.seed_world, ep, 1));
    const std::vector<int> ctrl = world.controlled_ids();
    const int na = static_cast<int>(ctrl.size());

    std::vector<Rng> agent_rng;
    for (int k = 0; k < na; ++k)
      agent_rng.emplace_back(mix_seed(env.seed_rollout, ep, k));

    std::vector<Action> actions(na, Action::Stay);
    std::vector<double> accum(na, 0.0);
    std::vector<int> pens(na, 0);
    double coverage_sum = 0, last_coverage = 0;

    for (int t = 0; t < lc.steps_per_episode; ++t) {
      announce_intents(world, world_rng);
      ConnectivitySnapshot snap;
      if (policy == PolicyKind::RL) snap = snapshot(world);

      if (policy == PolicyKind::Stay) {
        for (int k = 0; k < na; ++k)
          actions[k] = stay_policy(world, ctrl[k]);
      } else if (policy == PolicyKind::VFA) {
        for (int k = 0; k < na; ++k)
          actions[k] = vfa_action(world, ctrl[k], vfa);
      } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int k = 0; k < na; ++k) {
          const StateTensor s =
              encode(world, snap, ctrl[k], lc.state, env.enc);
          const ForwardOut out = forward(*model, s);
          actions[k] = static_cast<Action>(
              sample_action(out, agent_rng[k], lc.eval_argmax));
        }
      }

      const StepOutcome outcome =
          step(world, actions, world_rng, lc.alpha, lc.r_p);

      int step_penalties = 0;
      double reward_sum = 0;
      for (int k = 0; k < na; ++k) {
        const AgentStepResult& ar = outcome.agents[k];
        accum[k] += ar.reward;
        reward_sum += ar.reward;
        if (ar.penalized) {
          ++pens[k];
          ++step_penalties;
        }
      }
      const double cov = mean_coverage(outcome.snap);
      coverage_sum += cov;
      last_coverage = cov;
      log.steps.push_back(StepRecord{ep + 1, t + 1, cov,
                                     na ? reward_sum / na : 0.0, reward_sum,
                                     step_penalties});
    }

    EpisodeRecord er;
    er.episode = ep + 1;
    er.final_coverage = last_coverage;
    er.mean_step_coverage = coverage_sum / lc.steps_per_episode;
    er.accum_reward_mean = na ? mean_of(accum) : 0.0;
    int ptotal = 0;
    for (int p : pens) ptotal += p;
    er.penalties = ptotal;
    log.episodes.push_back(er);
    if (on_episode) on_episode(er);
  }
  return log;
}

}  // namespace relay
