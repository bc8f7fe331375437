#include "relay/policy_net.hpp"

#include <algorithm>
#include <cmath>

namespace relay {

Tensor Tensor::of(std::vector<int> shape) {
  size_t n = 1;
  for (int d : shape) n *= static_cast<size_t>(d);
  Tensor t;
  t.shape = std::move(shape);
  t.v.assign(n, 0.0);
  return t;
}

void NetConfig::validate() const {
  if (k < 1 || y < 1 || x < 1 || c1 < 1 || c2 < 1 || fc < 1 || n_actions < 2)
    throw config_error("bad net config");
}

const std::array<const char*, ModelParams::kNumTensors>&
ModelParams::tensor_names() {
  static const std::array<const char*, kNumTensors> names = {
      "conv1_w", "conv1_b", "conv2_w", "conv2_b", "fc_pi_w", "fc_pi_b",
      "fc_v_w",  "fc_v_b",  "pi_w",    "pi_b",    "v_w",     "v_b"};
  return names;
}

std::array<Tensor*, ModelParams::kNumTensors> ModelParams::tensors() {
  return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &fc_pi_w, &fc_pi_b,
          &fc_v_w,  &fc_v_b,  &pi_w,    &pi_b,    &v_w,     &v_b};
}

std::array<const Tensor*, ModelParams::kNumTensors> ModelParams::tensors()
    const {
  return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &fc_pi_w, &fc_pi_b,
          &fc_v_w,  &fc_v_b,  &pi_w,    &pi_b,    &v_w,     &v_b};
}

size_t ModelParams::n_parameters() const {
  size_t n = 0;
  for (const Tensor* t : tensors()) n += t->size();
  return n;
}

ModelParams ModelParams::zeros(const NetConfig& cfg) {
  cfg.validate();
  ModelParams p;
  p.cfg = cfg;
  p.conv1_w = Tensor::of({cfg.c1, cfg.k, 3, 3});
  p.conv1_b = Tensor::of({cfg.c1});
  p.conv2_w = Tensor::of({cfg.c2, cfg.c1, 3, 3});
  p.conv2_b = Tensor::of({cfg.c2});
  p.fc_pi_w = Tensor::of({cfg.fc, cfg.flat()});
  p.fc_pi_b = Tensor::of({cfg.fc});
  p.fc_v_w = Tensor::of({cfg.fc, cfg.flat()});
  p.fc_v_b = Tensor::of({cfg.fc});
  p.pi_w = Tensor::of({cfg.n_actions, cfg.fc});
  p.pi_b = Tensor::of({cfg.n_actions});
  p.v_w = Tensor::of({1, cfg.fc});
  p.v_b = Tensor::of({1});
  return p;
}

ModelParams ModelParams::init(const NetConfig& cfg, Rng& rng) {
  ModelParams p = zeros(cfg);
  const auto fill = [&](Tensor& t, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& w : t.v) w = (2.0 * rng.next_unit() - 1.0) * bound;
  };
  fill(p.conv1_w, cfg.k * 9);
  fill(p.conv2_w, cfg.c1 * 9);
  fill(p.fc_pi_w, cfg.flat());
  fill(p.fc_v_w, cfg.flat());
  fill(p.pi_w, cfg.fc);
  fill(p.v_w, cfg.fc);
  return p;
}

void ModelParams::scale(double s) {
  for (Tensor* t : tensors())
    for (double& w : t->v) w *= s;
}

void ModelParams::add_scaled(const ModelParams& other, double s) {
  auto mine = tensors();
  auto theirs = other.tensors();
  for (int i = 0; i < kNumTensors; ++i) {
    if (mine[i]->size() != theirs[i]->size())
      throw contract_error("parameter shape mismatch");
    for (size_t j = 0; j < mine[i]->size(); ++j)
      mine[i]->v[j] += s * theirs[i]->v[j];
  }
}

namespace {

void relu(std::vector<double>& a) {
  for (double& x : a)
    if (x < 0) x = 0;
}

// out[co][y][x] = b[co] + sum_{ci,ky,kx} w[co][ci][ky][kx] *
// in[ci][y+ky-1][x+kx-1], zero outside the grid. Inner loops run over
// contiguous x.
void conv3x3(const double* in, int ci_n, const double* w, const double* b,
             double* out, int co_n, int Y, int X) {
  for (int co = 0; co < co_n; ++co) {
    double* op = out + static_cast<size_t>(co) * Y * X;
    std::fill(op, op + static_cast<size_t>(Y) * X, b[co]);
    for (int ci = 0; ci < ci_n; ++ci) {
      const double* ip = in + static_cast<size_t>(ci) * Y * X;
      const double* wp = w + (static_cast<size_t>(co) * ci_n + ci) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        const int y0 = std::max(0, 1 - ky), y1 = std::min(Y, Y + 1 - ky);
        for (int kx = 0; kx < 3; ++kx) {
          const double wv = wp[ky * 3 + kx];
          const int x0 = std::max(0, 1 - kx), x1 = std::min(X, X + 1 - kx);
          for (int y = y0; y < y1; ++y) {
            double* orow = op + static_cast<size_t>(y) * X;
            const double* irow =
                ip + static_cast<size_t>(y + ky - 1) * X + (kx - 1);
            for (int x = x0; x < x1; ++x) orow[x] += wv * irow[x];
          }
        }
      }
    }
  }
}

void conv3x3_backward(const double* in, int ci_n, const double* w,
                      const double* dout, int co_n, int Y, int X, double* dw,
                      double* db, double* din) {
  for (int co = 0; co < co_n; ++co) {
    const double* dop = dout + static_cast<size_t>(co) * Y * X;
    double bsum = 0;
    for (int i = 0; i < Y * X; ++i) bsum += dop[i];
    db[co] += bsum;
    for (int ci = 0; ci < ci_n; ++ci) {
      const double* ip = in + static_cast<size_t>(ci) * Y * X;
      double* dip = din ? din + static_cast<size_t>(ci) * Y * X : nullptr;
      const double* wp = w + (static_cast<size_t>(co) * ci_n + ci) * 9;
      double* dwp = dw + (static_cast<size_t>(co) * ci_n + ci) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        const int y0 = std::max(0, 1 - ky), y1 = std::min(Y, Y + 1 - ky);
        for (int kx = 0; kx < 3; ++kx) {
          const int x0 = std::max(0, 1 - kx), x1 = std::min(X, X + 1 - kx);
          double acc = 0;
          for (int y = y0; y < y1; ++y) {
            const double* dorow = dop + static_cast<size_t>(y) * X;
            const double* irow =
                ip + static_cast<size_t>(y + ky - 1) * X + (kx - 1);
            for (int x = x0; x < x1; ++x) acc += dorow[x] * irow[x];
          }
          dwp[ky * 3 + kx] += acc;
          if (dip) {
            const double wv = wp[ky * 3 + kx];
            for (int y = y0; y < y1; ++y) {
              const double* dorow = dop + static_cast<size_t>(y) * X;
              double* dirow =
                  dip + static_cast<size_t>(y + ky - 1) * X + (kx - 1);
              for (int x = x0; x < x1; ++x) dirow[x] += wv * dorow[x];
            }
          }
        }
      }
    }
  }
}

void fc_forward(const double* in, int in_n, const double* w, const double* b,
                double* out, int out_n) {
  for (int j = 0; j < out_n; ++j) {
    const double* row = w + static_cast<size_t>(j) * in_n;
    double acc = b[j];
    for (int i = 0; i < in_n; ++i) acc += row[i] * in[i];
    out[j] = acc;
  }
}

void fc_backward(const double* in, int in_n, const double* w,
                 const double* dout, int out_n, double* dw, double* db,
                 double* din) {
  for (int j = 0; j < out_n; ++j) {
    const double g = dout[j];
    db[j] += g;
    double* dwrow = dw + static_cast<size_t>(j) * in_n;
    for (int i = 0; i < in_n; ++i) dwrow[i] += g * in[i];
    if (din) {
      const double* wrow = w + static_cast<size_t>(j) * in_n;
      for (int i = 0; i < in_n; ++i) din[i] += g * wrow[i];
    }
  }
}

struct Trace {
  std::vector<double> a1, a2, hpi, hv;  // post-ReLU activations
  std::vector<double> policy, logpi;
  double value = 0;
};

void run_forward(const ModelParams& p, const StateTensor& s, Trace& t) {
  const NetConfig& c = p.cfg;
  if (s.k != c.k || s.y != c.y || s.x != c.x)
    throw contract_error("state tensor shape does not match the network");

  t.a1.resize(static_cast<size_t>(c.c1) * c.plane());
  conv3x3(s.data.data(), c.k, p.conv1_w.v.data(), p.conv1_b.v.data(),
          t.a1.data(), c.c1, c.y, c.x);
  relu(t.a1);

  t.a2.resize(static_cast<size_t>(c.c2) * c.plane());
  conv3x3(t.a1.data(), c.c1, p.conv2_w.v.data(), p.conv2_b.v.data(),
          t.a2.data(), c.c2, c.y, c.x);
  relu(t.a2);

  t.hpi.resize(c.fc);
  fc_forward(t.a2.data(), c.flat(), p.fc_pi_w.v.data(), p.fc_pi_b.v.data(),
             t.hpi.data(), c.fc);
  relu(t.hpi);
  t.hv.resize(c.fc);
  fc_forward(t.a2.data(), c.flat(), p.fc_v_w.v.data(), p.fc_v_b.v.data(),
             t.hv.data(), c.fc);
  relu(t.hv);

  std::vector<double> logits(c.n_actions);
  fc_forward(t.hpi.data(), c.fc, p.pi_w.v.data(), p.pi_b.v.data(),
             logits.data(), c.n_actions);
  double vout = 0;
  fc_forward(t.hv.data(), c.fc, p.v_w.v.data(), p.v_b.v.data(), &vout, 1);
  t.value = vout;

  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0;
  for (double z : logits) sum += std::exp(z - m);
  const double lse = std::log(sum);
  t.logpi.resize(c.n_actions);
  t.policy.resize(c.n_actions);
  for (int j = 0; j < c.n_actions; ++j) {
    t.logpi[j] = logits[j] - m - lse;
    t.policy[j] = std::exp(t.logpi[j]);
  }
}

double entry_loss(const Trace& t, const RolloutEntry& e, double beta,
                  double c_v) {
  const double dv = e.ret - t.value;
  return -t.logpi[e.action] * e.advantage - beta * entropy(t.policy) +
         c_v * dv * dv;
}

}  // namespace

ForwardOut forward(const ModelParams& p, const StateTensor& s) {
  Trace t;
  run_forward(p, s, t);
  return ForwardOut{std::move(t.policy), std::move(t.logpi), t.value};
}

double entropy(const std::vector<double>& policy) {
  double h = 0;
  for (double q : policy)
    if (q > 0) h -= q * std::log(q);
  return h;
}

double rollout_loss(const ModelParams& p,
                    const std::vector<RolloutEntry>& entries, double beta,
                    double c_v) {
  Trace t;
  double loss = 0;
  for (const RolloutEntry& e : entries) {
    run_forward(p, e.state, t);
    loss += entry_loss(t, e, beta, c_v);
  }
  return loss;
}

double backward(const ModelParams& p, const std::vector<RolloutEntry>& entries,
                double beta, double c_v, ModelParams& grads) {
  const NetConfig& c = p.cfg;
  Trace t;
  double loss = 0;
  std::vector<double> dlogits(c.n_actions), dhpi(c.fc), dhv(c.fc);
  std::vector<double> da2(static_cast<size_t>(c.c2) * c.plane());
  std::vector<double> da1(static_cast<size_t>(c.c1) * c.plane());

  for (const RolloutEntry& e : entries) {
    run_forward(p, e.state, t);
    loss += entry_loss(t, e, beta, c_v);

    const double h = entropy(t.policy);
    for (int j = 0; j < c.n_actions; ++j)
      dlogits[j] = e.advantage * (t.policy[j] - (j == e.action ? 1.0 : 0.0)) +
                   beta * t.policy[j] * (t.logpi[j] + h);
    const double dvalue = -2.0 * c_v * (e.ret - t.value);

    std::fill(dhpi.begin(), dhpi.end(), 0.0);
    fc_backward(t.hpi.data(), c.fc, p.pi_w.v.data(), dlogits.data(),
                c.n_actions, grads.pi_w.v.data(), grads.pi_b.v.data(),
                dhpi.data());
    std::fill(dhv.begin(), dhv.end(), 0.0);
    fc_backward(t.hv.data(), c.fc, p.v_w.v.data(), &dvalue, 1,
                grads.v_w.v.data(), grads.v_b.v.data(), dhv.data());
    for (int i = 0; i < c.fc; ++i) {
      if (t.hpi[i] <= 0) dhpi[i] = 0;
      if (t.hv[i] <= 0) dhv[i] = 0;
    }

    std::fill(da2.begin(), da2.end(), 0.0);
    fc_backward(t.a2.data(), c.flat(), p.fc_pi_w.v.data(), dhpi.data(), c.fc,
                grads.fc_pi_w.v.data(), grads.fc_pi_b.v.data(), da2.data());
    fc_backward(t.a2.data(), c.flat(), p.fc_v_w.v.data(), dhv.data(), c.fc,
                grads.fc_v_w.v.data(), grads.fc_v_b.v.data(), da2.data());
    for (size_t i = 0; i < da2.size(); ++i)
      if (t.a2[i] <= 0) da2[i] = 0;

    std::fill(da1.begin(), da1.end(), 0.0);
    conv3x3_backward(t.a1.data(), c.c1, p.conv2_w.v.data(), da2.data(), c.c2,
                     c.y, c.x, grads.conv2_w.v.data(), grads.conv2_b.v.data(),
                     da1.data());
    for (size_t i = 0; i < da1.size(); ++i)
      if (t.a1[i] <= 0) da1[i] = 0;
    conv3x3_backward(e.state.data.data(), c.k, p.conv1_w.v.data(), da1.data(),
                     c.c1, c.y, c.x, grads.conv1_w.v.data(),
                     grads.conv1_b.v.data(), nullptr);
  }
  return loss;
}

ModelParams finite_diff_grad(const ModelParams& p,
                             const std::vector<RolloutEntry>& entries,
                             double beta, double c_v, double eps) {
  ModelParams g = ModelParams::zeros(p.cfg);
  ModelParams work = p;
  auto wt = work.tensors();
  auto gt = g.tensors();
  for (int ti = 0; ti < ModelParams::kNumTensors; ++ti) {
    for (size_t i = 0; i < wt[ti]->size(); ++i) {
      const double saved = wt[ti]->v[i];
      wt[ti]->v[i] = saved + eps;
      const double up = rollout_loss(work, entries, beta, c_v);
      wt[ti]->v[i] = saved - eps;
      const double dn = rollout_loss(work, entries, beta, c_v);
      wt[ti]->v[i] = saved;
      gt[ti]->v[i] = (up - dn) / (2.0 * eps);
    }
  }
  return g;
}

double finite_diff_at(const ModelParams& p,
                      const std::vector<RolloutEntry>& entries, double beta,
                      double c_v, int tensor_idx, size_t flat_idx,
                      double eps) {
  ModelParams work = p;
  Tensor* t = work.tensors()[tensor_idx];
  const double saved = t->v[flat_idx];
  t->v[flat_idx] = saved + eps;
  const double up = rollout_loss(work, entries, beta, c_v);
  t->v[flat_idx] = saved - eps;
  const double dn = rollout_loss(work, entries, beta, c_v);
  t->v[flat_idx] = saved;
  return (up - dn) / (2.0 * eps);
}

}  // namespace relay
