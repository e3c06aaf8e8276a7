#include "greenport/model/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "greenport/numeric/activation.hpp"
#include "greenport/numeric/kernels.hpp"

namespace greenport {

void ModelConfig::validate() const {
  if (input_dim < 1 || hidden_dim < 1 || dense_dim < 1 || output_dim < 1 || window_len < 1) {
    throw ModelError("model config: all dimensions must be >= 1");
  }
  if (!(learning_rate > 0.0)) throw ModelError("model config: learning_rate must be > 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ModelError("model config: adam betas must be in [0, 1)");
  }
  if (!(adam_epsilon > 0.0)) throw ModelError("model config: adam_epsilon must be > 0");
  if (!(clip_norm >= 0.0)) throw ModelError("model config: clip_norm must be >= 0");
}

LstmTensors LstmTensors::zeros(const ModelConfig& cfg) {
  LstmTensors t;
  for (std::size_t g = 0; g < kGateCount; ++g) {
    t.w[g] = Matrix(cfg.hidden_dim, cfg.input_dim);
    t.u[g] = Matrix(cfg.hidden_dim, cfg.hidden_dim);
    t.b[g] = Matrix(cfg.hidden_dim, 1);
  }
  t.dense_w = Matrix(cfg.dense_dim, cfg.hidden_dim);
  t.dense_b = Matrix(cfg.dense_dim, 1);
  t.out_w = Matrix(cfg.output_dim, cfg.dense_dim);
  t.out_b = Matrix(cfg.output_dim, 1);
  return t;
}

std::array<Matrix*, LstmTensors::kTensorCount> LstmTensors::tensors() {
  return {&w[0], &w[1], &w[2], &w[3], &u[0], &u[1], &u[2], &u[3],
          &b[0], &b[1], &b[2], &b[3], &dense_w, &dense_b, &out_w, &out_b};
}

std::array<const Matrix*, LstmTensors::kTensorCount> LstmTensors::tensors() const {
  return {&w[0], &w[1], &w[2], &w[3], &u[0], &u[1], &u[2], &u[3],
          &b[0], &b[1], &b[2], &b[3], &dense_w, &dense_b, &out_w, &out_b};
}

std::string_view LstmTensors::tensor_name(std::size_t index) {
  static constexpr std::array<std::string_view, kTensorCount> names{
      "W_i", "W_f", "W_o", "W_g", "U_i", "U_f", "U_o", "U_g",
      "b_i", "b_f", "b_o", "b_g", "W_1", "b_1", "W_2", "b_2"};
  return names.at(index);
}

std::size_t LstmTensors::parameter_count() const {
  std::size_t n = 0;
  for (const Matrix* m : tensors()) n += m->size();
  return n;
}

bool LstmTensors::shapes_match(const ModelConfig& cfg) const {
  const LstmTensors ref = zeros(cfg);
  const auto a = tensors();
  const auto b = ref.tensors();
  for (std::size_t i = 0; i < kTensorCount; ++i) {
    if (!a[i]->same_shape(*b[i])) return false;
  }
  return true;
}

AdamState AdamState::zeros(const ModelConfig& cfg) { return {LstmTensors::zeros(cfg), LstmTensors::zeros(cfg), 0}; }

ModelParams init_model(const ModelConfig& cfg, SeededRng& rng) {
  cfg.validate();
  ModelParams p{LstmTensors::zeros(cfg)};
  for (std::size_t g = 0; g < kGateCount; ++g) {
    p.w[g] = glorot_init(cfg.hidden_dim, cfg.input_dim, rng);
    p.u[g] = glorot_init(cfg.hidden_dim, cfg.hidden_dim, rng);
  }
  p.b[kForgetGate].fill(1.0);
  p.dense_w = glorot_init(cfg.dense_dim, cfg.hidden_dim, rng);
  p.out_w = glorot_init(cfg.output_dim, cfg.dense_dim, rng);
  return p;
}

namespace {

struct Dims {
  std::size_t in, hid, dense, out;
};

Dims dims_of(const ModelParams& p) {
  return {p.w[0].cols(), p.w[0].rows(), p.dense_w.rows(), p.out_w.rows()};
}

void check_window(const Dims& d, const Matrix& window) {
  if (window.cols() != d.in || window.rows() == 0) {
    throw ModelError("forward: window shape " + window.shape_string() + " incompatible with input_dim " +
                     std::to_string(d.in));
  }
}

}  // namespace

std::vector<double> forward(const ModelParams& params, const Matrix& window, ForwardCache* cache) {
  const Dims d = dims_of(params);
  check_window(d, window);
  const auto& k = kernels::active();
  const std::size_t steps = window.rows();

  if (cache != nullptr) {
    for (auto& g : cache->gates) g = Matrix(steps, d.hid);
    cache->cell = Matrix(steps, d.hid);
    cache->cell_tanh = Matrix(steps, d.hid);
    cache->hidden = Matrix(steps, d.hid);
  }

  std::vector<double> h(d.hid, 0.0), c(d.hid, 0.0);
  std::array<std::vector<double>, kGateCount> z;
  for (auto& v : z) v.resize(d.hid);

  for (std::size_t t = 0; t < steps; ++t) {
    const double* x = window.row(t).data();
    for (std::size_t g = 0; g < kGateCount; ++g) {
      std::copy(params.b[g].values().begin(), params.b[g].values().end(), z[g].begin());
      k.gemv(params.w[g].values().data(), d.hid, d.in, x, z[g].data());
      k.gemv(params.u[g].values().data(), d.hid, d.hid, h.data(), z[g].data());
    }
    activate_inplace(Activation::Sigmoid, z[kInputGate]);
    activate_inplace(Activation::Sigmoid, z[kForgetGate]);
    activate_inplace(Activation::Sigmoid, z[kOutputGate]);
    activate_inplace(Activation::Tanh, z[kCandidate]);
    for (std::size_t j = 0; j < d.hid; ++j) {
      c[j] = z[kForgetGate][j] * c[j] + z[kInputGate][j] * z[kCandidate][j];
      const double tc = std::tanh(c[j]);
      h[j] = z[kOutputGate][j] * tc;
      if (cache != nullptr) {
        cache->cell(t, j) = c[j];
        cache->cell_tanh(t, j) = tc;
        cache->hidden(t, j) = h[j];
      }
    }
    if (cache != nullptr) {
      for (std::size_t g = 0; g < kGateCount; ++g) std::copy(z[g].begin(), z[g].end(), cache->gates[g].row(t).begin());
    }
  }

  std::vector<double> dense(params.dense_b.values().begin(), params.dense_b.values().end());
  k.gemv(params.dense_w.values().data(), d.dense, d.hid, h.data(), dense.data());
  activate_inplace(Activation::Tanh, dense);

  std::vector<double> out(params.out_b.values().begin(), params.out_b.values().end());
  k.gemv(params.out_w.values().data(), d.out, d.dense, dense.data(), out.data());

  if (cache != nullptr) {
    cache->dense = dense;
    cache->output = out;
  }
  return out;
}

Matrix predict_batch(const ModelParams& params, std::span<const SamplePtr> windows) {
  Matrix out(windows.size(), params.out_w.rows());
  for (std::size_t n = 0; n < windows.size(); ++n) {
    const auto y = forward(params, windows[n]->inputs);
    std::copy(y.begin(), y.end(), out.row(n).begin());
  }
  return out;
}

MseResult mse_loss(const Matrix& predictions, const Matrix& targets) {
  if (!predictions.same_shape(targets)) {
    throw ModelError("mse_loss: shape mismatch " + predictions.shape_string() + " vs " + targets.shape_string());
  }
  if (predictions.rows() == 0) throw ModelError("mse_loss: empty batch");
  MseResult r;
  r.per_output.assign(predictions.cols(), 0.0);
  for (std::size_t n = 0; n < predictions.rows(); ++n) {
    for (std::size_t j = 0; j < predictions.cols(); ++j) {
      const double e = predictions(n, j) - targets(n, j);
      r.per_output[j] += e * e;
    }
  }
  for (double& v : r.per_output) v /= static_cast<double>(predictions.rows());
  for (double v : r.per_output) r.total += v;
  r.total /= static_cast<double>(predictions.cols());
  return r;
}

Matrix target_matrix(std::span<const SamplePtr> samples) {
  const std::size_t cols = samples.empty() ? kTargetCount : samples.front()->targets.size();
  Matrix t(samples.size(), cols);
  for (std::size_t n = 0; n < samples.size(); ++n) std::copy_n(samples[n]->targets.begin(), cols, t.row(n).begin());
  return t;
}

BackwardResult backward(const ModelParams& params, std::span<const SamplePtr> batch) {
  if (batch.empty()) throw ModelError("backward: empty batch");
  const Dims d = dims_of(params);
  if (d.out != kTargetCount) throw ModelError("backward: output_dim must match the target count");
  const auto& k = kernels::active();

  BackwardResult result{0.0, Gradients{LstmTensors::zeros({d.in, d.hid, d.dense, d.out})}};
  Gradients& gr = result.grads;
  const double n = static_cast<double>(batch.size());
  const double scale = 2.0 / (n * static_cast<double>(d.out));  // d(mean sq err)/dy

  ForwardCache cache;
  std::vector<double> dy(d.out), da(d.dense), dz1(d.dense);
  std::vector<double> dh(d.hid), dc(d.hid), dh_prev(d.hid);
  std::array<std::vector<double>, kGateCount> dz;
  for (auto& v : dz) v.resize(d.hid);
  const std::vector<double> zeros(d.hid, 0.0);

  for (const SamplePtr& sample : batch) {
    const Matrix& x = sample->inputs;
    const auto y = forward(params, x, &cache);
    const std::size_t steps = x.rows();

    double sample_loss = 0.0;
    for (std::size_t j = 0; j < d.out; ++j) {
      const double e = y[j] - sample->targets[j];
      sample_loss += e * e;
      dy[j] = scale * e;
    }
    if (!std::isfinite(sample_loss)) {
      throw ModelError("backward: non-finite loss for sample " + sample->origin.label + "@" +
                       std::to_string(sample->origin.end_timestamp));
    }
    result.loss += sample_loss;

    // Linear head and tanh dense layer.
    const double* h_last = cache.hidden.row(steps - 1).data();
    k.ger(gr.out_w.values().data(), d.out, d.dense, dy.data(), cache.dense.data());
    k.axpy(1.0, dy.data(), gr.out_b.values().data(), d.out);
    std::fill(da.begin(), da.end(), 0.0);
    k.gemv_t(params.out_w.values().data(), d.out, d.dense, dy.data(), da.data());
    for (std::size_t j = 0; j < d.dense; ++j) dz1[j] = da[j] * activate_grad(Activation::Tanh, cache.dense[j]);
    k.ger(gr.dense_w.values().data(), d.dense, d.hid, dz1.data(), h_last);
    k.axpy(1.0, dz1.data(), gr.dense_b.values().data(), d.dense);
    std::fill(dh.begin(), dh.end(), 0.0);
    k.gemv_t(params.dense_w.values().data(), d.dense, d.hid, dz1.data(), dh.data());
    std::fill(dc.begin(), dc.end(), 0.0);

    // Backpropagation through time.
    for (std::size_t t = steps; t-- > 0;) {
      const double* ig = cache.gates[kInputGate].row(t).data();
      const double* fg = cache.gates[kForgetGate].row(t).data();
      const double* og = cache.gates[kOutputGate].row(t).data();
      const double* gg = cache.gates[kCandidate].row(t).data();
      const double* tc = cache.cell_tanh.row(t).data();
      const double* c_prev = t > 0 ? cache.cell.row(t - 1).data() : zeros.data();
      const double* h_prev = t > 0 ? cache.hidden.row(t - 1).data() : zeros.data();

      for (std::size_t j = 0; j < d.hid; ++j) {
        dc[j] += dh[j] * og[j] * (1.0 - tc[j] * tc[j]);
        dz[kOutputGate][j] = dh[j] * tc[j] * og[j] * (1.0 - og[j]);
        dz[kInputGate][j] = dc[j] * gg[j] * ig[j] * (1.0 - ig[j]);
        dz[kForgetGate][j] = dc[j] * c_prev[j] * fg[j] * (1.0 - fg[j]);
        dz[kCandidate][j] = dc[j] * ig[j] * (1.0 - gg[j] * gg[j]);
        dc[j] *= fg[j];
      }

      std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
      const double* xt = x.row(t).data();
      for (std::size_t g = 0; g < kGateCount; ++g) {
        k.ger(gr.w[g].values().data(), d.hid, d.in, dz[g].data(), xt);
        if (t > 0) k.ger(gr.u[g].values().data(), d.hid, d.hid, dz[g].data(), h_prev);
        k.axpy(1.0, dz[g].data(), gr.b[g].values().data(), d.hid);
        k.gemv_t(params.u[g].values().data(), d.hid, d.hid, dz[g].data(), dh_prev.data());
      }
      dh.swap(dh_prev);
    }
  }

  result.loss /= n * static_cast<double>(d.out);
  for (Matrix* m : gr.tensors()) {
    if (!m->all_finite()) throw ModelError("backward: non-finite gradient");
  }
  return result;
}

double clip_gradients(Gradients& grads, double max_norm) {
  double sq = 0.0;
  for (const Matrix* m : std::as_const(grads).tensors())
    for (double v : m->values()) sq += v * v;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (Matrix* m : grads.tensors())
      for (double& v : m->values()) v *= s;
  }
  return norm;
}

void adam_step(ModelParams& params, const Gradients& grads, AdamState& adam, const ModelConfig& cfg) {
  auto p = params.tensors();
  const auto g = grads.tensors();
  auto m = adam.m.tensors();
  auto v = adam.v.tensors();
  for (std::size_t i = 0; i < LstmTensors::kTensorCount; ++i) {
    if (!p[i]->same_shape(*g[i]) || !p[i]->same_shape(*m[i]) || !p[i]->same_shape(*v[i])) {
      throw ModelError("adam_step: shape mismatch on " + std::string(LstmTensors::tensor_name(i)));
    }
  }

  adam.step += 1;
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double t = static_cast<double>(adam.step);
  const double corr1 = 1.0 - std::pow(b1, t);
  const double corr2 = 1.0 - std::pow(b2, t);

  for (std::size_t i = 0; i < LstmTensors::kTensorCount; ++i) {
    auto pv = p[i]->values();
    const auto gv = g[i]->values();
    auto mv = m[i]->values();
    auto vv = v[i]->values();
    for (std::size_t j = 0; j < pv.size(); ++j) {
      mv[j] = b1 * mv[j] + (1.0 - b1) * gv[j];
      vv[j] = b2 * vv[j] + (1.0 - b2) * gv[j] * gv[j];
      const double m_hat = mv[j] / corr1;
      const double v_hat = vv[j] / corr2;
      pv[j] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_epsilon);
    }
  }
}

}  // namespace greenport
