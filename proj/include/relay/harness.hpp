#pragma once

#include <string>

#include "relay/config.hpp"
#include "relay/model_io.hpp"

namespace relay {

// Run a learning phase: trains per cfg, writes learn_metrics.csv,
// learn_steps.csv, the model file and its .manifest sidecar into out_dir.
// Returns a process exit code (0 on success) and prints diagnostics to
// stderr on failure.
int cli_learn(const ExperimentConfig& cfg);

// Run an evaluation phase: writes eval_metrics.csv, eval_steps.csv and
// eval_summary.csv into out_dir. Loads cfg.model_in when policy is rl.
int cli_eval(const ExperimentConfig& cfg);

// Load a model file, re-serialize it, and verify the bytes match the
// original file exactly. Throws the model_io error types on any mismatch.
ModelParams model_roundtrip(const std::string& path);

}  // namespace relay
