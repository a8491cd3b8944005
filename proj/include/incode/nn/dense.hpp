#pragma once

#include "incode/common.hpp"

namespace incode::nn {

/// Affine map y = W x + b with W stored [fan_out x fan_in].
struct DenseLayer {
  Matrix weights;
  Vector bias;

  DenseLayer() = default;
  DenseLayer(Eigen::Index fan_in, Eigen::Index fan_out)
      : weights(Matrix::Zero(fan_out, fan_in)), bias(Vector::Zero(fan_out)) {}

  Eigen::Index fan_in() const { return weights.cols(); }
  Eigen::Index fan_out() const { return weights.rows(); }
  bool all_finite() const { return weights.allFinite() && bias.allFinite(); }
};

/// SIREN initialization. The first layer draws from U(-1/fan_in, 1/fan_in),
/// later layers from U(-sqrt(6/fan_in)/omega0, +sqrt(6/fan_in)/omega0).
/// Biases start at zero.
DenseLayer siren_init(Eigen::Index fan_in, Eigen::Index fan_out, bool is_first,
                      double omega0, Rng& rng);

/// Half-width of the uniform range siren_init samples from.
double siren_init_bound(Eigen::Index fan_in, bool is_first, double omega0);

}  // namespace incode::nn
