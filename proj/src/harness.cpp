#include "relay/harness.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "relay/a3c.hpp"
#include "relay/metrics.hpp"
#include "relay/svg.hpp"

namespace relay {

namespace {

constexpr int kMaWindow = 50;

std::string hex64(uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::filesystem::path out_path(const ExperimentConfig& cfg,
                               const std::string& name) {
  return std::filesystem::path(cfg.out_dir) / name;
}

void prepare_out_dir(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
}

void apply_thread_mode(const ExperimentConfig& cfg) {
  if (cfg.serial) omp_set_num_threads(1);
}

// Post-run record of what produced a model: enough to re-derive every rng
// stream (streams are pure functions of seed and episode index).
std::string manifest_text(const ExperimentConfig& cfg, int episodes_done) {
  std::ostringstream os;
  os << "episodes_completed = " << episodes_done << '\n';
  os << "next_episode = " << episodes_done << '\n';
  os << "seed_world = " << cfg.env.seed_world << '\n';
  os << "seed_model = " << cfg.env.seed_model << '\n';
  os << "seed_rollout = " << cfg.env.seed_rollout << '\n';
  os << "state = " << state_design_name(cfg.learner.state) << '\n';
  os << "config_hash = " << hex64(config_hash(cfg)) << '\n';
  return os.str();
}

std::vector<std::pair<std::string, std::string>> model_meta(
    const ExperimentConfig& cfg, int episodes_done) {
  return {
      {"state", state_design_name(cfg.learner.state)},
      {"episodes", std::to_string(episodes_done)},
      {"seed_world", std::to_string(cfg.env.seed_world)},
      {"seed_model", std::to_string(cfg.env.seed_model)},
      {"seed_rollout", std::to_string(cfg.env.seed_rollout)},
      {"config_hash", hex64(config_hash(cfg))},
  };
}

void write_learn_svgs(const ExperimentConfig& cfg, const MetricsLog& log) {
  std::vector<double> ep, reward, cov;
  for (const EpisodeRecord& e : log.episodes) {
    ep.push_back(e.episode);
    reward.push_back(e.accum_reward_mean);
    cov.push_back(e.final_coverage);
  }
  Series r{"ma50 accum reward", ep, moving_average(reward, kMaWindow),
           "#d62728"};
  Series c{"ma50 final coverage", ep, moving_average(cov, kMaWindow),
           "#1f77b4"};
  write_text_file(out_path(cfg, "learn_reward.svg").string(),
                  line_chart("Accumulated reward (moving average)", "episode",
                             "reward", {r}));
  write_text_file(out_path(cfg, "learn_coverage.svg").string(),
                  line_chart("Final coverage (moving average)", "episode",
                             "coverage", {c}));
}

void write_eval_svg(const ExperimentConfig& cfg, const MetricsLog& log,
                    int steps_per_episode) {
  std::vector<double> sum(steps_per_episode, 0.0);
  std::vector<int> cnt(steps_per_episode, 0);
  for (const StepRecord& s : log.steps) {
    if (s.step >= 1 && s.step <= steps_per_episode) {
      sum[s.step - 1] += s.mean_coverage;
      ++cnt[s.step - 1];
    }
  }
  std::vector<double> xs, ys;
  for (int t = 0; t < steps_per_episode; ++t) {
    if (cnt[t] == 0) continue;
    xs.push_back(t + 1);
    ys.push_back(sum[t] / cnt[t]);
  }
  Series s{"mean coverage", xs, ys, "#2ca02c"};
  write_text_file(
      out_path(cfg, "eval_coverage.svg").string(),
      line_chart("Coverage vs step (mean over episodes)", "step", "coverage",
                 {s}));
}

}  // namespace

int cli_learn(const ExperimentConfig& cfg) {
  try {
    cfg.validate();
    if (cfg.policy != PolicyKind::RL)
      throw config_error("learn requires policy = rl");
    prepare_out_dir(cfg);
    apply_thread_mode(cfg);

    const auto t0 = std::chrono::steady_clock::now();
    const int total = cfg.learner.episodes_learn;
    LearnResult res = run_learning(cfg.env, cfg.learner,
                                   [&](const EpisodeRecord& e) {
      if (e.episode % 10 == 0 || e.episode == total) {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
        std::fprintf(stderr,
                     "episode %d/%d  coverage %.4f  accum_reward %.2f  "
                     "(%.0fs)\n",
                     e.episode, total, e.final_coverage, e.accum_reward_mean,
                     secs);
      }
    });

    write_text_file(out_path(cfg, "learn_metrics.csv").string(),
                    episodes_csv(res.log, kMaWindow));
    write_text_file(out_path(cfg, "learn_steps.csv").string(),
                    steps_csv(res.log));

    const std::string model_path =
        cfg.model_out.empty() ? out_path(cfg, "model.bin").string()
                              : cfg.model_out;
    const int done = static_cast<int>(res.log.episodes.size());
    save_model(model_path, res.params, model_meta(cfg, done));
    write_text_file(model_path + ".manifest", manifest_text(cfg, done));
    write_text_file(out_path(cfg, "config_used.txt").string(),
                    emit_config(cfg));
    if (cfg.svg) write_learn_svgs(cfg, res.log);

    std::vector<double> rewards, covs;
    for (const EpisodeRecord& e : res.log.episodes) {
      rewards.push_back(e.accum_reward_mean);
      covs.push_back(e.final_coverage);
    }
    std::printf("learn done: episodes=%d mean_final_coverage=%.12g "
                "mean_accum_reward=%.12g model=%s\n",
                done, mean_of(covs), mean_of(rewards), model_path.c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cli_eval(const ExperimentConfig& cfg) {
  try {
    cfg.validate();
    prepare_out_dir(cfg);
    apply_thread_mode(cfg);

    ModelParams model;
    const ModelParams* model_ptr = nullptr;
    if (cfg.policy == PolicyKind::RL) {
      if (cfg.model_in.empty())
        throw config_error("policy rl requires model_in");
      model = load_model(cfg.model_in);
      const NetConfig want = net_config_for(cfg.env.enc, cfg.learner.state);
      if (model.cfg.k != want.k || model.cfg.y != want.y ||
          model.cfg.x != want.x)
        throw config_error(
            "model shape mismatch: expected planes x height x width " +
            std::to_string(want.k) + "x" + std::to_string(want.y) + "x" +
            std::to_string(want.x) + ", found " + std::to_string(model.cfg.k) +
            "x" + std::to_string(model.cfg.y) + "x" +
            std::to_string(model.cfg.x));
      model_ptr = &model;
    }

    MetricsLog log = run_eval(model_ptr, cfg.policy, cfg.vfa, cfg.env,
                              cfg.learner);

    write_text_file(out_path(cfg, "eval_metrics.csv").string(),
                    episodes_csv(log, kMaWindow));
    write_text_file(out_path(cfg, "eval_steps.csv").string(), steps_csv(log));

    std::vector<double> finals, rewards;
    long long penalties = 0;
    for (const EpisodeRecord& e : log.episodes) {
      finals.push_back(e.final_coverage);
      rewards.push_back(e.accum_reward_mean);
      penalties += e.penalties;
    }
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%lld\n",
                  static_cast<int>(log.episodes.size()), mean_of(finals),
                  mean_of(rewards), penalties);
    write_text_file(
        out_path(cfg, "eval_summary.csv").string(),
        std::string(
            "episodes,mean_final_coverage,mean_accum_reward,penalties\n") +
            buf);
    write_text_file(out_path(cfg, "config_used.txt").string(),
                    emit_config(cfg));
    if (cfg.svg) write_eval_svg(cfg, log, cfg.learner.steps_per_episode);

    std::printf("eval done: policy=%s episodes=%d mean_final_coverage=%.12g "
                "mean_accum_reward=%.12g penalties=%lld\n",
                policy_name(cfg.policy).c_str(),
                static_cast<int>(log.episodes.size()), mean_of(finals),
                mean_of(rewards), penalties);
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

ModelParams model_roundtrip(const std::string& path) {
  std::vector<std::pair<std::string, std::string>> meta;
  ModelParams p = load_model(path, &meta);
  const std::string tmp = path + ".roundtrip";
  save_model(tmp, p, meta);
  const std::string a = read_text_file(path);
  const std::string b = read_text_file(tmp);
  std::filesystem::remove(tmp);
  if (a != b)
    throw model_format_error("roundtrip of " + path +
                             " did not reproduce the original bytes");
  return p;
}

}  // namespace relay
