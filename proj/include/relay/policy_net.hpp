#pragma once

#include <array>
#include <string>
#include <vector>

#include "relay/common.hpp"
#include "relay/encoder.hpp"

namespace relay {

struct Tensor {
  std::vector<int> shape;
  std::vector<double> v;

  static Tensor of(std::vector<int> shape);
  size_t size() const { return v.size(); }
};

// conv(3x3, c1) - ReLU - conv(3x3, c2) - ReLU - flatten, then one
// FC(fc)-ReLU head per output: softmax policy over n_actions, linear value.
// Both convolutions use stride 1 and zero padding, keeping the y*x grid.
struct NetConfig {
  int k = 9;   // input planes
  int y = 7;
  int x = 41;
  int c1 = 16;
  int c2 = 32;
  int fc = 64;
  int n_actions = 5;

  int plane() const { return y * x; }
  int flat() const { return c2 * y * x; }
  void validate() const;
};

// Parameter block, also used for gradients and optimizer state. Tensor
// order is fixed; init draws weights row-major in this order, so one seed
// pins the whole initialisation.
struct ModelParams {
  NetConfig cfg;
  Tensor conv1_w, conv1_b;
  Tensor conv2_w, conv2_b;
  Tensor fc_pi_w, fc_pi_b;
  Tensor fc_v_w, fc_v_b;
  Tensor pi_w, pi_b;
  Tensor v_w, v_b;

  static constexpr int kNumTensors = 12;
  static const std::array<const char*, kNumTensors>& tensor_names();
  std::array<Tensor*, kNumTensors> tensors();
  std::array<const Tensor*, kNumTensors> tensors() const;
  size_t n_parameters() const;

  // Weights uniform in +-1/sqrt(fan_in), biases zero.
  [[nodiscard]] static ModelParams init(const NetConfig& cfg, Rng& rng);
  [[nodiscard]] static ModelParams zeros(const NetConfig& cfg);
  void scale(double s);
  void add_scaled(const ModelParams& other, double s);
};

struct ForwardOut {
  std::vector<double> policy;   // softmax probabilities
  std::vector<double> log_policy;
  double value = 0;
};

ForwardOut forward(const ModelParams& p, const StateTensor& s);

double entropy(const std::vector<double>& policy);

// One step of an n-step return segment: advantage and return are treated
// as constants by the gradient.
struct RolloutEntry {
  StateTensor state;
  int action = 0;
  double advantage = 0;
  double ret = 0;
};

// Scalar objective whose descent direction equals the combined update:
// sum over entries of -log pi(a) * A - beta * H(pi) + c_v * (ret - V)^2.
double rollout_loss(const ModelParams& p,
                    const std::vector<RolloutEntry>& entries, double beta,
                    double c_v);

// Accumulates d rollout_loss / d params into `grads` (caller zeroes).
// Returns the loss value.
double backward(const ModelParams& p, const std::vector<RolloutEntry>& entries,
                double beta, double c_v, ModelParams& grads);

// Central finite differences of rollout_loss, for gradient verification.
ModelParams finite_diff_grad(const ModelParams& p,
                             const std::vector<RolloutEntry>& entries,
                             double beta, double c_v, double eps);
double finite_diff_at(const ModelParams& p,
                      const std::vector<RolloutEntry>& entries, double beta,
                      double c_v, int tensor_idx, size_t flat_idx, double eps);

}  // namespace relay
