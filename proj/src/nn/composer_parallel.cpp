// OpenMP composer kernels: each fixed row group runs dense GEMMs through
// Eigen; backward partials are reduced in group order.

#include <vector>

#include "kernels.hpp"

namespace incode::nn::detail {

void forward_parallel(const ComposerNetwork& net, const ActivationParams& params,
                      ForwardTrace& trace) {
  const auto& p = params.effective();
  const auto& layers = net.layers();
  const int depth = net.hidden_layers();
  const Eigen::Index batch = trace.batch();
  const RowGroups groups(batch);

#pragma omp parallel for schedule(static)
  for (Eigen::Index g = 0; g < groups.count; ++g) {
    const Eigen::Index r0 = groups.begin(g);
    const Eigen::Index n = groups.size(g, batch);
    if (n == 0) continue;
    Matrix y = trace.inputs.middleRows(r0, n);
    for (int l = 0; l < depth; ++l) {
      auto z = trace.pre[l].middleRows(r0, n);
      auto s = trace.sin_u[l].middleRows(r0, n);
      auto c = trace.cos_u[l].middleRows(r0, n);
      z.noalias() = y * layers[l].weights.transpose();
      z.rowwise() += layers[l].bias.transpose();
      sincos_affine(z.data(), static_cast<std::size_t>(z.size()), p.b * net.omega0(l), p.c,
                    s.data(), c.data());
      y = (p.a * s.array() + p.d).matrix();
    }
    auto out = trace.output.middleRows(r0, n);
    out.noalias() = y * layers.back().weights.transpose();
    out.rowwise() += layers.back().bias.transpose();
  }
}

ComposerGradients backward_parallel(const ForwardTrace& trace, const ComposerNetwork& net,
                                    const ActivationParams& params, const Matrix& output_grad,
                                    bool want_coord_grad) {
  const auto& p = params.effective();
  const auto& layers = net.layers();
  const int depth = net.hidden_layers();
  const Eigen::Index batch = trace.batch();
  const RowGroups groups(batch);
  std::vector<ComposerGradients> partial(groups.count);
  Matrix coord_grad;
  if (want_coord_grad) coord_grad = Matrix::Zero(batch, trace.inputs.cols());

#pragma omp parallel for schedule(static)
  for (Eigen::Index gi = 0; gi < groups.count; ++gi) {
    ComposerGradients& g = partial[gi];
    g = ComposerGradients::zeros_like(net);
    const Eigen::Index r0 = groups.begin(gi);
    const Eigen::Index n = groups.size(gi, batch);
    if (n == 0) continue;

    Matrix dy = output_grad.middleRows(r0, n);
    {
      const Matrix y_last = (p.a * trace.sin_u[depth - 1].middleRows(r0, n).array() + p.d).matrix();
      g.layers.back().weights.noalias() = dy.transpose() * y_last;
      g.layers.back().bias = dy.colwise().sum().transpose();
      dy = dy * layers.back().weights;
    }
    Matrix dz;
    for (int l = depth - 1; l >= 0; --l) {
      const auto s = trace.sin_u[l].middleRows(r0, n).array();
      const auto c = trace.cos_u[l].middleRows(r0, n).array();
      const auto z = trace.pre[l].middleRows(r0, n).array();
      const double omega0 = net.omega0(l);
      g.effective.a += (dy.array() * s).sum();
      g.effective.d += dy.sum();
      dz = (dy.array() * c * p.a).matrix();  // dL/du
      g.effective.c += dz.sum();
      g.effective.b += omega0 * (dz.array() * z).sum();
      dz *= p.b * omega0;  // dL/dz
      if (l > 0) {
        const Matrix y_prev = (p.a * trace.sin_u[l - 1].middleRows(r0, n).array() + p.d).matrix();
        g.layers[l].weights.noalias() = dz.transpose() * y_prev;
      } else {
        g.layers[l].weights.noalias() = dz.transpose() * trace.inputs.middleRows(r0, n);
      }
      g.layers[l].bias = dz.colwise().sum().transpose();
      if (l > 0 || want_coord_grad) dy = dz * layers[l].weights;
    }
    if (want_coord_grad) coord_grad.middleRows(r0, n) = dy;
  }

  ComposerGradients total = std::move(partial.front());
  for (std::size_t gi = 1; gi < partial.size(); ++gi) total += partial[gi];
  total.coords = std::move(coord_grad);
  return total;
}

}  // namespace incode::nn::detail
