#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "greenport/data/window.hpp"
#include "greenport/numeric/matrix.hpp"
#include "greenport/numeric/rng.hpp"

namespace greenport {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  std::size_t input_dim = kInputCount;
  std::size_t hidden_dim = 32;
  std::size_t dense_dim = 32;
  std::size_t output_dim = kTargetCount;
  std::size_t window_len = 250;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double clip_norm = 0.0;  // global L2 max-norm; 0 disables clipping

  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

enum Gate : std::size_t { kInputGate = 0, kForgetGate = 1, kOutputGate = 2, kCandidate = 3 };
inline constexpr std::size_t kGateCount = 4;

// Every trainable tensor of the network:
//   one LSTM layer  (gate input weights, recurrent weights, biases)
//   -> tanh dense   (dense_w: dense x hidden, dense_b)
//   -> linear head  (out_w: output x dense, out_b)
// Biases are column matrices.
struct LstmTensors {
  std::array<Matrix, kGateCount> w;  // hidden x input
  std::array<Matrix, kGateCount> u;  // hidden x hidden
  std::array<Matrix, kGateCount> b;  // hidden x 1
  Matrix dense_w;
  Matrix dense_b;
  Matrix out_w;
  Matrix out_b;

  static constexpr std::size_t kTensorCount = 3 * kGateCount + 4;

  static LstmTensors zeros(const ModelConfig& cfg);

  std::array<Matrix*, kTensorCount> tensors();
  std::array<const Matrix*, kTensorCount> tensors() const;
  static std::string_view tensor_name(std::size_t index);

  std::size_t parameter_count() const;
  bool shapes_match(const ModelConfig& cfg) const;

  friend bool operator==(const LstmTensors&, const LstmTensors&) = default;
};

struct ModelParams : LstmTensors {};
struct Gradients : LstmTensors {};

struct AdamState {
  LstmTensors m;
  LstmTensors v;
  std::uint64_t step = 0;

  static AdamState zeros(const ModelConfig& cfg);
  friend bool operator==(const AdamState&, const AdamState&) = default;
};

// Per-timestep activations retained for backpropagation through time.
struct ForwardCache {
  std::array<Matrix, kGateCount> gates;  // window_len x hidden, post-activation
  Matrix cell;                           // window_len x hidden
  Matrix cell_tanh;                      // window_len x hidden
  Matrix hidden;                         // window_len x hidden
  std::vector<double> dense;             // tanh output of the dense layer
  std::vector<double> output;
};

// Glorot weights; all biases zero except the forget gate, which starts at 1.
ModelParams init_model(const ModelConfig& cfg, SeededRng& rng);

std::vector<double> forward(const ModelParams& params, const Matrix& window, ForwardCache* cache = nullptr);

// n x output_dim; row k is forward(windows[k]).
Matrix predict_batch(const ModelParams& params, std::span<const SamplePtr> windows);

struct MseResult {
  double total = 0.0;
  std::vector<double> per_output;
};

// total = mean over all entries = mean(per_output).
MseResult mse_loss(const Matrix& predictions, const Matrix& targets);

Matrix target_matrix(std::span<const SamplePtr> samples);

struct BackwardResult {
  double loss = 0.0;
  Gradients grads;
};

// Exact gradients of the batch-mean MSE by full BPTT over each window.
BackwardResult backward(const ModelParams& params, std::span<const SamplePtr> batch);

// Rescales to the max norm when above it. Returns the norm before clipping.
double clip_gradients(Gradients& grads, double max_norm);

void adam_step(ModelParams& params, const Gradients& grads, AdamState& adam, const ModelConfig& cfg);

}  // namespace greenport
