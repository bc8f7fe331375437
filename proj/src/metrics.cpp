#include "relay/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace relay {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::vector<double> moving_average(const std::vector<double>& xs,
                                   int window) {
  std::vector<double> out(xs.size(),
                          std::numeric_limits<double>::quiet_NaN());
  if (window < 1) return out;
  double sum = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sum += xs[i];
    if (i >= static_cast<size_t>(window)) sum -= xs[i - window];
    if (i + 1 >= static_cast<size_t>(window)) out[i] = sum / window;
  }
  return out;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0;
  double sum = 0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

std::string steps_csv(const MetricsLog& log) {
  std::ostringstream os;
  os << "episode,step,mean_coverage,reward_mean,reward_sum,penalties\n";
  for (const StepRecord& r : log.steps)
    os << r.episode << ',' << r.step << ',' << num(r.mean_coverage) << ','
       << num(r.reward_mean) << ',' << num(r.reward_sum) << ',' << r.penalties
       << '\n';
  return os.str();
}

std::string episodes_csv(const MetricsLog& log, int ma_window) {
  std::vector<double> reward(log.episodes.size());
  std::vector<double> fcov(log.episodes.size());
  for (size_t i = 0; i < log.episodes.size(); ++i) {
    reward[i] = log.episodes[i].accum_reward_mean;
    fcov[i] = log.episodes[i].final_coverage;
  }
  const std::vector<double> ma_r = moving_average(reward, ma_window);
  const std::vector<double> ma_c = moving_average(fcov, ma_window);

  std::ostringstream os;
  os << "episode,final_coverage,mean_step_coverage,accum_reward_mean,"
        "penalties,ma"
     << ma_window << "_accum_reward,ma" << ma_window << "_final_coverage\n";
  for (size_t i = 0; i < log.episodes.size(); ++i) {
    const EpisodeRecord& r = log.episodes[i];
    os << r.episode << ',' << num(r.final_coverage) << ','
       << num(r.mean_step_coverage) << ',' << num(r.accum_reward_mean) << ','
       << r.penalties << ',';
    if (!std::isnan(ma_r[i])) os << num(ma_r[i]);
    os << ',';
    if (!std::isnan(ma_c[i])) os << num(ma_c[i]);
    os << '\n';
  }
  return os.str();
}

}  // namespace relay
