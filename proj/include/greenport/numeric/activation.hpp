#pragma once

#include <cmath>
#include <span>

#include "greenport/numeric/matrix.hpp"
#include "greenport/numeric/rng.hpp"

namespace greenport {

enum class Activation { Sigmoid, Tanh, Linear };

// Stable logistic: exp is only ever taken of a non-positive argument.
inline double sigmoid(double x) noexcept {
  if (x >= 0.0) {
    const double z = std::exp(-x);
    return 1.0 / (1.0 + z);
  }
  const double z = std::exp(x);
  return z / (1.0 + z);
}

double activate(Activation kind, double x) noexcept;
// Derivative in terms of the activation output y.
double activate_grad(Activation kind, double y) noexcept;

void activate_inplace(Activation kind, std::span<double> x) noexcept;

Matrix activation(Activation kind, const Matrix& x);
Matrix activation_grad(Activation kind, const Matrix& y);

// Uniform in +-sqrt(6 / (rows + cols)).
Matrix glorot_init(std::size_t rows, std::size_t cols, SeededRng& rng);

}  // namespace greenport
