// Reference composer kernels: one sample at a time, plain loops, std::sin.

#include <cmath>

#include "kernels.hpp"

namespace incode::nn::detail {

void forward_serial(const ComposerNetwork& net, const ActivationParams& params, ForwardTrace& trace) {
  const auto& p = params.effective();
  const auto& layers = net.layers();
  const int depth = net.hidden_layers();
  const Eigen::Index width = net.config().width;
  std::vector<double> prev, cur(width);

  for (Eigen::Index i = 0; i < trace.batch(); ++i) {
    prev.assign(trace.inputs.row(i).data(), trace.inputs.row(i).data() + trace.inputs.cols());
    for (int l = 0; l < depth; ++l) {
      const DenseLayer& layer = layers[l];
      const double freq = p.b * net.omega0(l);
      for (Eigen::Index j = 0; j < width; ++j) {
        double z = 0.0;
        for (Eigen::Index k = 0; k < layer.fan_in(); ++k) z += layer.weights(j, k) * prev[k];
        z += layer.bias(j);
        const double u = freq * z + p.c;
        const double s = std::sin(u);
        trace.pre[l](i, j) = z;
        trace.sin_u[l](i, j) = s;
        trace.cos_u[l](i, j) = std::cos(u);
        cur[j] = p.a * s + p.d;
      }
      prev = cur;
    }
    const DenseLayer& head = layers.back();
    for (Eigen::Index j = 0; j < head.fan_out(); ++j) {
      double o = 0.0;
      for (Eigen::Index k = 0; k < head.fan_in(); ++k) o += head.weights(j, k) * prev[k];
      trace.output(i, j) = o + head.bias(j);
    }
  }
}

ComposerGradients backward_serial(const ForwardTrace& trace, const ComposerNetwork& net,
                                  const ActivationParams& params, const Matrix& output_grad,
                                  bool want_coord_grad) {
  const auto& p = params.effective();
  const auto& layers = net.layers();
  const int depth = net.hidden_layers();
  ComposerGradients g = ComposerGradients::zeros_like(net);
  if (want_coord_grad) g.coords = Matrix::Zero(trace.batch(), trace.inputs.cols());

  std::vector<double> dy, dz;
  for (Eigen::Index i = 0; i < trace.batch(); ++i) {
    // Linear head.
    const DenseLayer& head = layers.back();
    LayerGradient& gh = g.layers.back();
    dy.assign(head.fan_in(), 0.0);
    for (Eigen::Index j = 0; j < head.fan_out(); ++j) {
      const double go = output_grad(i, j);
      gh.bias(j) += go;
      for (Eigen::Index k = 0; k < head.fan_in(); ++k) {
        gh.weights(j, k) += go * (p.a * trace.sin_u[depth - 1](i, k) + p.d);
        dy[k] += go * head.weights(j, k);
      }
    }
    for (int l = depth - 1; l >= 0; --l) {
      const DenseLayer& layer = layers[l];
      LayerGradient& gl = g.layers[l];
      const double omega0 = net.omega0(l);
      const double freq = p.b * omega0;
      dz.assign(layer.fan_out(), 0.0);
      for (Eigen::Index j = 0; j < layer.fan_out(); ++j) {
        const double s = trace.sin_u[l](i, j);
        const double c = trace.cos_u[l](i, j);
        const double z = trace.pre[l](i, j);
        g.effective.a += dy[j] * s;
        g.effective.b += dy[j] * p.a * c * omega0 * z;
        g.effective.c += dy[j] * p.a * c;
        g.effective.d += dy[j];
        dz[j] = dy[j] * p.a * c * freq;
      }
      std::vector<double> dprev(layer.fan_in(), 0.0);
      for (Eigen::Index j = 0; j < layer.fan_out(); ++j) {
        gl.bias(j) += dz[j];
        for (Eigen::Index k = 0; k < layer.fan_in(); ++k) {
          const double yk = l == 0 ? trace.inputs(i, k) : p.a * trace.sin_u[l - 1](i, k) + p.d;
          gl.weights(j, k) += dz[j] * yk;
          dprev[k] += dz[j] * layer.weights(j, k);
        }
      }
      if (l == 0 && want_coord_grad)
        for (Eigen::Index k = 0; k < layer.fan_in(); ++k) g.coords(i, k) = dprev[k];
      dy = std::move(dprev);
    }
  }
  return g;
}

}  // namespace incode::nn::detail
