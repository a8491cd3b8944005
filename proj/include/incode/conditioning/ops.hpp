#pragma once

#include <cmath>

#include "incode/common.hpp"

namespace incode::cond {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// x * sigmoid(x)
inline double silu(double x) { return x * sigmoid(x); }

/// d/dx silu(x) = sigmoid(x) * (1 + x * (1 - sigmoid(x)))
inline double silu_grad(double x) {
  const double s = sigmoid(x);
  return s * (1.0 + x * (1.0 - s));
}

/// (v - mean) / sqrt(var + eps) * gamma + beta, population variance over v.
Vector layer_norm(const Vector& v, const Vector& gamma, const Vector& beta, double eps = 1e-5);

struct LayerNormBackward {
  Vector input;
  Vector gamma;
  Vector beta;
};

/// Gradients of layer_norm with respect to its input, gamma and beta.
LayerNormBackward layer_norm_backward(const Vector& v, const Vector& gamma, double eps,
                                      const Vector& out_grad);

}  // namespace incode::cond
