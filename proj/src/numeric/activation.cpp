#include "greenport/numeric/activation.hpp"

#include <cmath>

namespace greenport {

double activate(Activation kind, double x) noexcept {
  switch (kind) {
    case Activation::Sigmoid: return sigmoid(x);
    case Activation::Tanh: return std::tanh(x);
    case Activation::Linear: return x;
  }
  return x;
}

double activate_grad(Activation kind, double y) noexcept {
  switch (kind) {
    case Activation::Sigmoid: return y * (1.0 - y);
    case Activation::Tanh: return 1.0 - y * y;
    case Activation::Linear: return 1.0;
  }
  return 1.0;
}

void activate_inplace(Activation kind, std::span<double> x) noexcept {
  switch (kind) {
    case Activation::Sigmoid:
      for (double& v : x) v = sigmoid(v);
      break;
    case Activation::Tanh:
      for (double& v : x) v = std::tanh(v);
      break;
    case Activation::Linear:
      break;
  }
}

Matrix activation(Activation kind, const Matrix& x) {
  require_finite(x, "activation input");
  Matrix y = x;
  activate_inplace(kind, y.values());
  return y;
}

Matrix activation_grad(Activation kind, const Matrix& y) {
  Matrix d(y.rows(), y.cols());
  for (std::size_t i = 0; i < y.size(); ++i) d[i] = activate_grad(kind, y[i]);
  return d;
}

Matrix glorot_init(std::size_t rows, std::size_t cols, SeededRng& rng) {
  if (rows == 0 || cols == 0) throw NumericError("glorot_init: rows and cols must be >= 1");
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.uniform(-bound, bound);
  return m;
}

}  // namespace greenport
