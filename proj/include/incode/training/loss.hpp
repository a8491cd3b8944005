#pragma once

#include "incode/common.hpp"
#include "incode/nn/activation.hpp"

namespace incode::train {

/// Weights of the squared-hinge penalties on a >= 1, b >= 1, c >= 0, d >= 0.
struct LossConfig {
  double lambda1 = 0.1993;
  double lambda2 = 0.0196;
  double lambda3 = 0.0588;
  double lambda4 = 0.0269;

  void validate() const;
};

struct MseResult {
  double value = 0.0;
  Matrix grad;  ///< d(value)/d(pred)
};

/// Mean of squared differences over every element.
MseResult mse_loss(const Matrix& pred, const Matrix& target);

struct PenaltyResult {
  double value = 0.0;
  nn::ParamQuad grad;  ///< with respect to the effective parameters
};

/// lambda1*max(0,1-a)^2 + lambda2*max(0,1-b)^2 + lambda3*max(0,-c)^2 + lambda4*max(0,-d)^2
PenaltyResult constraint_penalty(const nn::ParamQuad& effective, const LossConfig& config);

}  // namespace incode::train
