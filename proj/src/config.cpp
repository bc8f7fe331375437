#include "relay/config.hpp"

#include <cstdio>
#include <sstream>

namespace relay {

MobilityMode parse_mobility(const std::string& name) {
  if (name == "constant") return MobilityMode::ConstantVelocity;
  if (name == "random") return MobilityMode::RandomWalk;
  throw config_error("unknown mobility mode: " + name);
}

std::string mobility_name(MobilityMode m) {
  return m == MobilityMode::ConstantVelocity ? "constant" : "random";
}

void ExperimentConfig::validate() const {
  env.road.validate();
  env.enc.validate();
  learner.validate();
  vfa.validate();
  if (env.lambda < 0) throw config_error("lambda must be >= 0");
  if (env.r_mm < 0 || env.r_mm > 1) throw config_error("r_mm must be in [0,1]");
  if (env.r_ctrl < 0 || env.r_ctrl > 1)
    throw config_error("r_ctrl must be in [0,1]");
  if (out_dir.empty()) throw config_error("out_dir must not be empty");
}

namespace {

double to_double(const std::string& key, const std::string& v) {
  size_t pos = 0;
  double d;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw config_error("bad number for " + key + ": " + v);
  }
  if (pos != v.size()) throw config_error("bad number for " + key + ": " + v);
  return d;
}

int to_int(const std::string& key, const std::string& v) {
  size_t pos = 0;
  long d;
  try {
    d = std::stol(v, &pos);
  } catch (const std::exception&) {
    throw config_error("bad integer for " + key + ": " + v);
  }
  if (pos != v.size())
    throw config_error("bad integer for " + key + ": " + v);
  return static_cast<int>(d);
}

uint64_t to_u64(const std::string& key, const std::string& v) {
  size_t pos = 0;
  unsigned long long d;
  try {
    d = std::stoull(v, &pos);
  } catch (const std::exception&) {
    throw config_error("bad seed for " + key + ": " + v);
  }
  if (pos != v.size()) throw config_error("bad seed for " + key + ": " + v);
  return d;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw config_error("bad flag for " + key + ": " + v + " (use 0/1)");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ','))
    out.push_back(to_double(key, item));
  return out;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void apply_config_kv(ExperimentConfig& c, const std::string& key,
                     const std::string& value) {
  RoadConfig& r = c.env.road;
  EncoderConfig& e = c.env.enc;
  LearnerConfig& l = c.learner;
  VfaParams& v = c.vfa;

  if (key == "roi_length_m") r.roi_length_m = to_double(key, value);
  else if (key == "n_lanes") r.n_lanes = to_int(key, value);
  else if (key == "n_cells_x") r.n_cells_x = to_int(key, value);
  else if (key == "cell_dx_m") r.cell_dx_m = to_double(key, value);
  else if (key == "lane_dy_m") r.lane_dy_m = to_double(key, value);
  else if (key == "rsu_interval_m") r.rsu_interval_m = to_double(key, value);
  else if (key == "r_vv_m") r.r_vv_m = to_double(key, value);
  else if (key == "r_vi_m") r.r_vi_m = to_double(key, value);
  else if (key == "lambda") c.env.lambda = to_double(key, value);
  else if (key == "r_mm") c.env.r_mm = to_double(key, value);
  else if (key == "r_ctrl") c.env.r_ctrl = to_double(key, value);
  else if (key == "mobility") c.env.mobility = parse_mobility(value);
  else if (key == "half_x") e.half_x = to_int(key, value);
  else if (key == "half_lanes") e.half_lanes = to_int(key, value);
  else if (key == "rho") e.rho = to_double(key, value);
  else if (key == "length_borders") e.length_borders = to_list(key, value);
  else if (key == "state") l.state = parse_state_design(value);
  else if (key == "gamma") l.gamma = to_double(key, value);
  else if (key == "t_max") l.t_max = to_int(key, value);
  else if (key == "steps") l.steps_per_episode = to_int(key, value);
  else if (key == "episodes_learn") l.episodes_learn = to_int(key, value);
  else if (key == "episodes_test") l.episodes_test = to_int(key, value);
  else if (key == "alpha") l.alpha = to_double(key, value);
  else if (key == "r_p") l.r_p = to_double(key, value);
  else if (key == "beta") l.beta = to_double(key, value);
  else if (key == "c_v") l.c_v = to_double(key, value);
  else if (key == "lr") l.lr = to_double(key, value);
  else if (key == "rms_decay") l.rms_decay = to_double(key, value);
  else if (key == "rms_eps") l.rms_eps = to_double(key, value);
  else if (key == "eval_argmax") l.eval_argmax = to_bool(key, value);
  else if (key == "vfa_w_a") v.w_a = to_double(key, value);
  else if (key == "vfa_w_r") v.w_r = to_double(key, value);
  else if (key == "vfa_beta1") v.beta1 = to_double(key, value);
  else if (key == "vfa_beta2") v.beta2 = to_double(key, value);
  else if (key == "vfa_d_th") v.d_th_m = to_double(key, value);
  else if (key == "vfa_deadband") v.deadband = to_double(key, value);
  else if (key == "vfa_window_half_x") v.window_half_x = to_int(key, value);
  else if (key == "vfa_window_half_lanes")
    v.window_half_lanes = to_int(key, value);
  else if (key == "policy") c.policy = parse_policy(value);
  else if (key == "seed_world") c.env.seed_world = to_u64(key, value);
  else if (key == "seed_model") c.env.seed_model = to_u64(key, value);
  else if (key == "seed_rollout") c.env.seed_rollout = to_u64(key, value);
  else if (key == "serial") c.serial = to_bool(key, value);
  else if (key == "svg") c.svg = to_bool(key, value);
  else if (key == "out_dir") c.out_dir = value;
  else if (key == "model_in") c.model_in = value;
  else if (key == "model_out") c.model_out = value;
  else throw config_error("unknown config key: " + key);
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(lineno) +
                         ": expected key = value");
    apply_config_kv(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

std::string emit_config(const ExperimentConfig& c) {
  const RoadConfig& r = c.env.road;
  const EncoderConfig& e = c.env.enc;
  const LearnerConfig& l = c.learner;
  const VfaParams& v = c.vfa;
  std::ostringstream os;
  os << "roi_length_m = " << num(r.roi_length_m) << '\n';
  os << "n_lanes = " << r.n_lanes << '\n';
  os << "n_cells_x = " << r.n_cells_x << '\n';
  os << "cell_dx_m = " << num(r.cell_dx_m) << '\n';
  os << "lane_dy_m = " << num(r.lane_dy_m) << '\n';
  os << "rsu_interval_m = " << num(r.rsu_interval_m) << '\n';
  os << "r_vv_m = " << num(r.r_vv_m) << '\n';
  os << "r_vi_m = " << num(r.r_vi_m) << '\n';
  os << "lambda = " << num(c.env.lambda) << '\n';
  os << "r_mm = " << num(c.env.r_mm) << '\n';
  os << "r_ctrl = " << num(c.env.r_ctrl) << '\n';
  os << "mobility = " << mobility_name(c.env.mobility) << '\n';
  os << "half_x = " << e.half_x << '\n';
  os << "half_lanes = " << e.half_lanes << '\n';
  os << "rho = " << num(e.rho) << '\n';
  os << "length_borders = ";
  for (size_t i = 0; i < e.length_borders.size(); ++i)
    os << (i ? "," : "") << num(e.length_borders[i]);
  os << '\n';
  os << "state = " << state_design_name(l.state) << '\n';
  os << "gamma = " << num(l.gamma) << '\n';
  os << "t_max = " << l.t_max << '\n';
  os << "steps = " << l.steps_per_episode << '\n';
  os << "episodes_learn = " << l.episodes_learn << '\n';
  os << "episodes_test = " << l.episodes_test << '\n';
  os << "alpha = " << num(l.alpha) << '\n';
  os << "r_p = " << num(l.r_p) << '\n';
  os << "beta = " << num(l.beta) << '\n';
  os << "c_v = " << num(l.c_v) << '\n';
  os << "lr = " << num(l.lr) << '\n';
  os << "rms_decay = " << num(l.rms_decay) << '\n';
  os << "rms_eps = " << num(l.rms_eps) << '\n';
  os << "eval_argmax = " << (l.eval_argmax ? 1 : 0) << '\n';
  os << "vfa_w_a = " << num(v.w_a) << '\n';
  os << "vfa_w_r = " << num(v.w_r) << '\n';
  os << "vfa_beta1 = " << num(v.beta1) << '\n';
  os << "vfa_beta2 = " << num(v.beta2) << '\n';
  os << "vfa_d_th = " << num(v.d_th_m) << '\n';
  os << "vfa_deadband = " << num(v.deadband) << '\n';
  os << "vfa_window_half_x = " << v.window_half_x << '\n';
  os << "vfa_window_half_lanes = " << v.window_half_lanes << '\n';
  os << "policy = " << policy_name(c.policy) << '\n';
  os << "seed_world = " << c.env.seed_world << '\n';
  os << "seed_model = " << c.env.seed_model << '\n';
  os << "seed_rollout = " << c.env.seed_rollout << '\n';
  os << "serial = " << (c.serial ? 1 : 0) << '\n';
  os << "svg = " << (c.svg ? 1 : 0) << '\n';
  os << "out_dir = " << c.out_dir << '\n';
  os << "model_in = " << c.model_in << '\n';
  os << "model_out = " << c.model_out << '\n';
  return os.str();
}

// Identifies the experiment: file locations and presentation flags do not
// change results, so they are left out of the hash.
uint64_t config_hash(const ExperimentConfig& cfg) {
  std::istringstream is(emit_config(cfg));
  std::string line, kept;
  while (std::getline(is, line)) {
    const std::string key = line.substr(0, line.find(' '));
    if (key == "out_dir" || key == "model_in" || key == "model_out" ||
        key == "svg" || key == "serial")
      continue;
    kept += line;
    kept += '\n';
  }
  return fnv1a(kept.data(), kept.size());
}

}  // namespace relay
