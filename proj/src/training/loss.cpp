#include "incode/training/loss.hpp"

#include <algorithm>
#include <cmath>

namespace incode::train {

void LossConfig::validate() const {
  for (double l : {lambda1, lambda2, lambda3, lambda4})
    if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("loss: penalty weights must be finite and >= 0");
}

MseResult mse_loss(const Matrix& pred, const Matrix& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw ShapeError("mse_loss: prediction and target shapes differ");
  if (pred.size() == 0) throw ShapeError("mse_loss: empty input");
  const auto n = static_cast<double>(pred.size());
  MseResult r;
  r.grad = pred - target;
  r.value = r.grad.squaredNorm() / n;
  r.grad *= 2.0 / n;
  return r;
}

PenaltyResult constraint_penalty(const nn::ParamQuad& p, const LossConfig& cfg) {
  const double ha = std::max(0.0, 1.0 - p.a);
  const double hb = std::max(0.0, 1.0 - p.b);
  const double hc = std::max(0.0, -p.c);
  const double hd = std::max(0.0, -p.d);
  PenaltyResult r;
  r.value = cfg.lambda1 * ha * ha + cfg.lambda2 * hb * hb + cfg.lambda3 * hc * hc + cfg.lambda4 * hd * hd;
  r.grad = {-2.0 * cfg.lambda1 * ha, -2.0 * cfg.lambda2 * hb, -2.0 * cfg.lambda3 * hc, -2.0 * cfg.lambda4 * hd};
  return r;
}

}  // namespace incode::train
