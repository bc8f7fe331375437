#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "relay/harness.hpp"
#include "relay/model_io.hpp"

namespace {

struct CliFlags {
  std::string config;
  double lambda = 0, rmm = 0, rctrl = 0;
  std::string state, policy, mobility;
  int episodes = 0, steps = 0;
  uint64_t seed_world = 0, seed_model = 0, seed_rollout = 0;
  std::string model_in, model_out, out_dir;
  bool serial = false, svg = false;
};

void add_common(CLI::App* cmd, CliFlags& f) {
  cmd->add_option("--config", f.config, "key = value config file");
  cmd->add_option("--lambda", f.lambda, "vehicle density per meter per lane");
  cmd->add_option("--rmm", f.rmm, "mmWave fraction of all vehicles");
  cmd->add_option("--rctrl", f.rctrl, "controllable fraction of mmWave");
  cmd->add_option("--state", f.state, "state design: pt|ptcl|ptdl");
  cmd->add_option("--policy", f.policy, "policy: rl|stay|vfa");
  cmd->add_option("--mobility", f.mobility,
                  "uncontrolled motion: constant|random");
  cmd->add_option("--episodes", f.episodes, "episode count");
  cmd->add_option("--steps", f.steps, "steps per episode");
  cmd->add_option("--seed-world", f.seed_world, "world/spawn seed");
  cmd->add_option("--seed-model", f.seed_model, "parameter init seed");
  cmd->add_option("--seed-rollout", f.seed_rollout, "action sampling seed");
  cmd->add_option("--model-in", f.model_in, "model file to load");
  cmd->add_option("--model-out", f.model_out, "model file to write");
  cmd->add_option("--out-dir", f.out_dir, "output directory");
  cmd->add_flag("--serial", f.serial, "single-threaded deterministic mode");
  cmd->add_flag("--svg", f.svg, "also write SVG charts");
}

// Flag > config file > built-in default.
relay::ExperimentConfig resolve(const CLI::App* cmd, const CliFlags& f,
                                bool learn_phase) {
  relay::ExperimentConfig cfg;
  if (!f.config.empty())
    cfg = relay::parse_config_text(relay::read_text_file(f.config));

  auto set = [&](const char* name, auto fn) {
    if (cmd->count(name) > 0) fn();
  };
  set("--lambda", [&] { cfg.env.lambda = f.lambda; });
  set("--rmm", [&] { cfg.env.r_mm = f.rmm; });
  set("--rctrl", [&] { cfg.env.r_ctrl = f.rctrl; });
  set("--state",
      [&] { cfg.learner.state = relay::parse_state_design(f.state); });
  set("--policy", [&] { cfg.policy = relay::parse_policy(f.policy); });
  set("--mobility",
      [&] { cfg.env.mobility = relay::parse_mobility(f.mobility); });
  set("--episodes", [&] {
    if (learn_phase)
      cfg.learner.episodes_learn = f.episodes;
    else
      cfg.learner.episodes_test = f.episodes;
  });
  set("--steps", [&] { cfg.learner.steps_per_episode = f.steps; });
  set("--seed-world", [&] { cfg.env.seed_world = f.seed_world; });
  set("--seed-model", [&] { cfg.env.seed_model = f.seed_model; });
  set("--seed-rollout", [&] { cfg.env.seed_rollout = f.seed_rollout; });
  set("--model-in", [&] { cfg.model_in = f.model_in; });
  set("--model-out", [&] { cfg.model_out = f.model_out; });
  set("--out-dir", [&] { cfg.out_dir = f.out_dir; });
  if (f.serial) cfg.serial = true;
  if (f.svg) cfg.svg = true;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid-road mmWave relay simulator"};
  app.require_subcommand(1);

  CliFlags lf, ef;
  CLI::App* learn = app.add_subcommand("learn", "run the learning phase");
  add_common(learn, lf);
  CLI::App* eval = app.add_subcommand("eval", "run the test phase");
  add_common(eval, ef);

  CLI11_PARSE(app, argc, argv);

  try {
    if (learn->parsed()) return relay::cli_learn(resolve(learn, lf, true));
    return relay::cli_eval(resolve(eval, ef, false));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
