#include "incode/conditioning/ops.hpp"

namespace incode::cond {

namespace {

void check(const Vector& v, const Vector& gamma, const Vector& beta) {
  if (v.size() < 2) throw ShapeError("layer_norm: need at least two features");
  if (gamma.size() != v.size() || beta.size() != v.size())
    throw ShapeError("layer_norm: gamma/beta length does not match input");
}

}  // namespace

Vector layer_norm(const Vector& v, const Vector& gamma, const Vector& beta, double eps) {
  check(v, gamma, beta);
  const double mean = v.mean();
  const Vector centered = v.array() - mean;
  const double var = centered.squaredNorm() / static_cast<double>(v.size());
  const double inv_std = 1.0 / std::sqrt(var + eps);
  return (centered.array() * inv_std * gamma.array() + beta.array()).matrix();
}

LayerNormBackward layer_norm_backward(const Vector& v, const Vector& gamma, double eps,
                                      const Vector& out_grad) {
  check(v, gamma, gamma);
  if (out_grad.size() != v.size()) throw ShapeError("layer_norm_backward: gradient length");
  const double n = static_cast<double>(v.size());
  const double mean = v.mean();
  const Vector centered = v.array() - mean;
  const double var = centered.squaredNorm() / n;
  const double inv_std = 1.0 / std::sqrt(var + eps);
  const Vector xhat = centered * inv_std;

  LayerNormBackward g;
  g.gamma = (out_grad.array() * xhat.array()).matrix();
  g.beta = out_grad;
  const Vector dxhat = (out_grad.array() * gamma.array()).matrix();
  const double mean_dxhat = dxhat.mean();
  const double mean_dxhat_xhat = dxhat.dot(xhat) / n;
  g.input = ((dxhat.array() - mean_dxhat - xhat.array() * mean_dxhat_xhat) * inv_std).matrix();
  return g;
}

}  // namespace incode::cond
