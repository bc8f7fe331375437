#pragma once

#include <cstdint>
#include <string>

#include "relay/a3c.hpp"

namespace relay {

MobilityMode parse_mobility(const std::string& name);
std::string mobility_name(MobilityMode m);

// Full run description: environment, learner, baseline parameters, policy,
// seeds and output locations. Serializes to a flat key=value text file.
struct ExperimentConfig {
  EnvConfig env;
  LearnerConfig learner;
  VfaParams vfa;
  PolicyKind policy = PolicyKind::RL;
  bool serial = false;
  bool svg = false;
  std::string out_dir = ".";
  std::string model_in;
  std::string model_out;

  void validate() const;
};

// One "key = value" assignment; throws config_error for unknown keys or
// unparsable values.
void apply_config_kv(ExperimentConfig& cfg, const std::string& key,
                     const std::string& value);

// Parses a config file body: key = value lines, blank lines and
// #-comments ignored.
ExperimentConfig parse_config_text(const std::string& text);

// Canonical emission: every key, fixed order; parsing it reproduces the
// config.
std::string emit_config(const ExperimentConfig& cfg);

// Hash of the canonical emission; recorded in run manifests.
uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace relay
