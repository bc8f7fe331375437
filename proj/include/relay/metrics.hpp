#pragma once

#include <string>
#include <vector>

namespace relay {

struct StepRecord {
  int episode = 0;
  int step = 0;
  double mean_coverage = 0;  // over mmWave vehicles, after the step
  double reward_mean = 0;    // over controllable agents
  double reward_sum = 0;
  int penalties = 0;
};

struct EpisodeRecord {
  int episode = 0;
  double final_coverage = 0;      // mean coverage after the last step
  double mean_step_coverage = 0;  // averaged over steps
  double accum_reward_mean = 0;   // per-agent accumulated reward
  int penalties = 0;
};

struct MetricsLog {
  std::vector<StepRecord> steps;
  std::vector<EpisodeRecord> episodes;
};

// Trailing mean over `window` entries; NaN until the window is filled.
std::vector<double> moving_average(const std::vector<double>& xs, int window);

double mean_of(const std::vector<double>& xs);

// CSV emitters; numbers are formatted with %.12g so identical runs produce
// identical bytes. NaN moving-average cells are left blank.
std::string steps_csv(const MetricsLog& log);
std::string episodes_csv(const MetricsLog& log, int ma_window = 50);

}  // namespace relay
