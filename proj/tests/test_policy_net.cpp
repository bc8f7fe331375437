#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "relay/policy_net.hpp"

using namespace relay;

namespace {

// Small dims keep full finite differencing affordable.
NetConfig tiny_config() {
  NetConfig nc;
  nc.k = 2;
  nc.y = 3;
  nc.x = 4;
  nc.c1 = 3;
  nc.c2 = 2;
  nc.fc = 5;
  nc.n_actions = 5;
  return nc;
}

StateTensor random_state(const NetConfig& nc, Rng& rng) {
  StateTensor s(nc.k, nc.y, nc.x);
  for (double& v : s.data) v = 2.0 * rng.next_unit() - 1.0;
  return s;
}

std::vector<RolloutEntry> random_entries(const NetConfig& nc, Rng& rng,
                                         int n) {
  std::vector<RolloutEntry> es;
  for (int i = 0; i < n; ++i) {
    RolloutEntry e;
    e.state = random_state(nc, rng);
    e.action = rng.next_int(nc.n_actions);
    e.advantage = 4.0 * rng.next_unit() - 2.0;
    e.ret = 4.0 * rng.next_unit() - 2.0;
    es.push_back(std::move(e));
  }
  return es;
}

double max_component(const ModelParams& g) {
  double m = 0;
  for (const Tensor* t : g.tensors())
    for (double v : t->v) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace

TEST_CASE("parameter count at production dims") {
  ModelParams p = ModelParams::zeros(NetConfig{});
  CHECK(p.n_parameters() == 1182022);
}

TEST_CASE("config validation rejects non-positive dims") {
  NetConfig nc;
  nc.c1 = 0;
  CHECK_THROWS_AS(nc.validate(), config_error);
}

TEST_CASE("softmax is a distribution and log_policy matches") {
  NetConfig nc = tiny_config();
  Rng rng(7);
  ModelParams p = ModelParams::init(nc, rng);
  for (int trial = 0; trial < 20; ++trial) {
    ForwardOut out = forward(p, random_state(nc, rng));
    double sum = 0;
    for (int a = 0; a < nc.n_actions; ++a) {
      CHECK(out.policy[a] > 0.0);
      CHECK(out.log_policy[a] ==
            doctest::Approx(std::log(out.policy[a])).epsilon(1e-12));
      sum += out.policy[a];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("zero parameters give the uniform policy and zero value") {
  NetConfig nc = tiny_config();
  ModelParams p = ModelParams::zeros(nc);
  Rng rng(3);
  ForwardOut out = forward(p, random_state(nc, rng));
  for (int a = 0; a < nc.n_actions; ++a)
    CHECK(out.policy[a] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(out.value == 0.0);
  CHECK(entropy(out.policy) == doctest::Approx(std::log(5.0)).epsilon(1e-12));
}

TEST_CASE("forward is a pure function") {
  NetConfig nc = tiny_config();
  Rng rng(11);
  ModelParams p = ModelParams::init(nc, rng);
  StateTensor s = random_state(nc, rng);
  ForwardOut a = forward(p, s);
  ForwardOut b = forward(p, s);
  CHECK(a.policy == b.policy);
  CHECK(a.value == b.value);
}

TEST_CASE("forward rejects a state whose shape disagrees with the net") {
  NetConfig nc = tiny_config();
  Rng rng(1);
  ModelParams p = ModelParams::init(nc, rng);
  CHECK_THROWS_AS(forward(p, StateTensor(nc.k, nc.y, nc.x + 1)),
                  contract_error);
  CHECK_THROWS_AS(forward(p, StateTensor(nc.k + 1, nc.y, nc.x)),
                  contract_error);
}

TEST_CASE("init: biases zero, weights inside +-1/sqrt(fan_in), seeded") {
  NetConfig nc = tiny_config();
  Rng rng1(42), rng2(42), rng3(43);
  ModelParams a = ModelParams::init(nc, rng1);
  ModelParams b = ModelParams::init(nc, rng2);
  ModelParams c = ModelParams::init(nc, rng3);
  for (double v : a.conv1_b.v) CHECK(v == 0.0);
  for (double v : a.pi_b.v) CHECK(v == 0.0);
  const double bound1 = 1.0 / std::sqrt(9.0 * nc.k);
  for (double v : a.conv1_w.v) CHECK(std::fabs(v) <= bound1);
  const double bound_pi = 1.0 / std::sqrt(static_cast<double>(nc.fc));
  for (double v : a.pi_w.v) CHECK(std::fabs(v) <= bound_pi);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < ModelParams::kNumTensors; ++i) {
    all_equal = all_equal && a.tensors()[i]->v == b.tensors()[i]->v;
    any_diff = any_diff || a.tensors()[i]->v != c.tensors()[i]->v;
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("backward matches central finite differences everywhere") {
  NetConfig nc = tiny_config();
  Rng rng(5);
  ModelParams p = ModelParams::init(nc, rng);
  std::vector<RolloutEntry> es = random_entries(nc, rng, 2);
  const double beta = 0.01, c_v = 0.5;

  ModelParams grads = ModelParams::zeros(nc);
  const double loss = backward(p, es, beta, c_v, grads);
  CHECK(loss == doctest::Approx(rollout_loss(p, es, beta, c_v)).epsilon(1e-12));

  ModelParams fd = finite_diff_grad(p, es, beta, c_v, 1e-5);
  for (int i = 0; i < ModelParams::kNumTensors; ++i) {
    const Tensor* ga = grads.tensors()[i];
    const Tensor* gb = fd.tensors()[i];
    REQUIRE(ga->size() == gb->size());
    for (size_t j = 0; j < ga->size(); ++j) {
      const double a = ga->v[j], b = gb->v[j];
      const double scale = std::max({std::fabs(a), std::fabs(b), 1e-2});
      CHECK(std::fabs(a - b) / scale < 1e-6);
    }
  }
}

TEST_CASE("finite-difference error shrinks like eps^2") {
  NetConfig nc = tiny_config();
  Rng rng(9);
  ModelParams p = ModelParams::init(nc, rng);
  std::vector<RolloutEntry> es = random_entries(nc, rng, 1);
  ModelParams grads = ModelParams::zeros(nc);
  backward(p, es, 0.01, 0.5, grads);

  // Probe the softmax layer at step sizes big enough that truncation
  // error dominates roundoff; quartering eps should shrink it ~16x.
  const int tensor_idx = 8;  // pi_w
  REQUIRE(std::string(ModelParams::tensor_names()[tensor_idx]) == "pi_w");
  double err_big = 0, err_small = 0;
  for (size_t j = 0; j < std::min<size_t>(grads.pi_w.size(), 16); ++j) {
    const double exact = grads.pi_w.v[j];
    err_big +=
        std::fabs(finite_diff_at(p, es, 0.01, 0.5, tensor_idx, j, 0.2) - exact);
    err_small += std::fabs(
        finite_diff_at(p, es, 0.01, 0.5, tensor_idx, j, 0.05) - exact);
  }
  if (err_big > 1e-9) CHECK(err_small < 0.5 * err_big);
}

TEST_CASE("zero advantage and beta leave the policy head untouched") {
  NetConfig nc = tiny_config();
  Rng rng(21);
  ModelParams p = ModelParams::init(nc, rng);
  std::vector<RolloutEntry> es = random_entries(nc, rng, 2);
  for (RolloutEntry& e : es) e.advantage = 0;
  ModelParams grads = ModelParams::zeros(nc);
  backward(p, es, 0.0, 0.5, grads);
  for (double v : grads.pi_w.v) CHECK(v == 0.0);
  for (double v : grads.pi_b.v) CHECK(v == 0.0);
  for (double v : grads.fc_pi_w.v) CHECK(v == 0.0);
  CHECK(max_component(grads) > 0.0);  // the value head still learns
}

TEST_CASE("gradients accumulate additively across entries") {
  NetConfig nc = tiny_config();
  Rng rng(31);
  ModelParams p = ModelParams::init(nc, rng);
  std::vector<RolloutEntry> es = random_entries(nc, rng, 2);

  ModelParams joint = ModelParams::zeros(nc);
  const double loss_joint = backward(p, es, 0.01, 0.5, joint);

  ModelParams split = ModelParams::zeros(nc);
  double loss_split = backward(p, {es[0]}, 0.01, 0.5, split);
  loss_split += backward(p, {es[1]}, 0.01, 0.5, split);

  CHECK(loss_joint == doctest::Approx(loss_split).epsilon(1e-12));
  for (int i = 0; i < ModelParams::kNumTensors; ++i)
    for (size_t j = 0; j < joint.tensors()[i]->size(); ++j)
      CHECK(joint.tensors()[i]->v[j] ==
            doctest::Approx(split.tensors()[i]->v[j]).epsilon(1e-12));
}

TEST_CASE("scale and add_scaled are elementwise") {
  NetConfig nc = tiny_config();
  Rng rng(2);
  ModelParams a = ModelParams::init(nc, rng);
  ModelParams b = ModelParams::init(nc, rng);
  const double a0 = a.conv2_w.v[5], b0 = b.conv2_w.v[5];
  a.add_scaled(b, -0.5);
  CHECK(a.conv2_w.v[5] == doctest::Approx(a0 - 0.5 * b0).epsilon(1e-15));
  a.scale(0.0);
  CHECK(max_component(a) == 0.0);
}

TEST_CASE("descending the loss lowers it") {
  NetConfig nc = tiny_config();
  Rng rng(17);
  ModelParams p = ModelParams::init(nc, rng);
  std::vector<RolloutEntry> es = random_entries(nc, rng, 3);
  ModelParams grads = ModelParams::zeros(nc);
  const double before = backward(p, es, 0.01, 0.5, grads);
  p.add_scaled(grads, -1e-3);
  CHECK(rollout_loss(p, es, 0.01, 0.5) < before);
}
