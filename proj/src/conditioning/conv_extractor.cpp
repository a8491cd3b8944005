#include "incode/conditioning/conv_extractor.hpp"

#include <cmath>
#include <string>

namespace incode::cond {

void ConvExtractorConfig::validate() const {
  if (channels.empty() || channels.size() != kernels.size())
    throw ConfigError("conv extractor: channels and kernels must be non-empty and equal length");
  for (std::size_t i = 0; i < channels.size(); ++i)
    if (channels[i] < 1 || kernels[i] < 1)
      throw ConfigError("conv extractor: channel counts and kernel widths must be >= 1");
}

Eigen::Index ConvExtractorConfig::min_length() const {
  // Walk backwards: the final conv needs >= 1 output sample.
  Eigen::Index need = 1;
  for (std::size_t i = kernels.size(); i-- > 0;) {
    need += kernels[i] - 1;           // conv input length
    if (i > 0) need *= 2;             // previous pooling halves the length
  }
  return need;
}

ConvExtractor::ConvExtractor(const ConvExtractorConfig& config, Rng& rng) : config_(config) {
  config_.validate();
  int in = 1;
  for (std::size_t i = 0; i < config_.channels.size(); ++i) {
    Conv1dLayer layer;
    layer.in_channels = in;
    layer.out_channels = config_.channels[i];
    layer.kernel = config_.kernels[i];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in * layer.kernel));
    std::uniform_real_distribution<double> u(-bound, bound);
    layer.weights.resize(layer.out_channels, in * layer.kernel);
    for (Eigen::Index k = 0; k < layer.weights.size(); ++k) layer.weights.data()[k] = u(rng);
    layer.bias.resize(layer.out_channels);
    for (Eigen::Index k = 0; k < layer.bias.size(); ++k) layer.bias(k) = u(rng);
    layers_.push_back(std::move(layer));
    in = config_.channels[i];
  }
}

namespace {

// Column matrix [(in * k) x out_len] so that conv = W * cols + b.
Matrix im2col(const Matrix& x, int kernel) {
  const Eigen::Index out_len = x.cols() - kernel + 1;
  Matrix cols(x.rows() * kernel, out_len);
  for (Eigen::Index c = 0; c < x.rows(); ++c)
    for (int t = 0; t < kernel; ++t) cols.row(c * kernel + t) = x.row(c).segment(t, out_len);
  return cols;
}

Matrix col2im(const Matrix& cols, Eigen::Index channels, int kernel, Eigen::Index length) {
  Matrix x = Matrix::Zero(channels, length);
  const Eigen::Index out_len = cols.cols();
  for (Eigen::Index c = 0; c < channels; ++c)
    for (int t = 0; t < kernel; ++t) x.row(c).segment(t, out_len) += cols.row(c * kernel + t);
  return x;
}

}  // namespace

Vector conv_extract(const ConvExtractor& extractor, std::span<const double> signal,
                    ConvTrace* trace) {
  const auto& cfg = extractor.config();
  if (static_cast<Eigen::Index>(signal.size()) < cfg.min_length())
    throw ConfigError("conv extractor: signal of length " + std::to_string(signal.size()) +
                      " is shorter than the receptive field (" + std::to_string(cfg.min_length()) +
                      ")");
  if (trace) *trace = ConvTrace{};
  Matrix x = Eigen::Map<const Matrix>(signal.data(), 1, static_cast<Eigen::Index>(signal.size()));
  const auto& layers = extractor.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& layer = layers[i];
    Matrix conv = layer.weights * im2col(x, layer.kernel);
    conv.colwise() += layer.bias;
    if (trace) {
      trace->inputs.push_back(x);
      trace->conv.push_back(conv);
    }
    if (i + 1 == layers.size()) return conv.rowwise().mean();

    // ReLU then max-pool(2, 2); max(relu(a), relu(b)) == relu(max(a, b)).
    const Eigen::Index pooled_len = conv.cols() / 2;
    Matrix pooled(conv.rows(), pooled_len);
    std::vector<Eigen::Index> winners(static_cast<std::size_t>(conv.rows() * pooled_len));
    for (Eigen::Index c = 0; c < conv.rows(); ++c)
      for (Eigen::Index t = 0; t < pooled_len; ++t) {
        const Eigen::Index j = conv(c, 2 * t + 1) > conv(c, 2 * t) ? 2 * t + 1 : 2 * t;
        pooled(c, t) = std::max(conv(c, j), 0.0);
        winners[c * pooled_len + t] = j;
      }
    if (trace) trace->argmax.push_back(std::move(winners));
    x = std::move(pooled);
  }
  return {};  // unreachable: config validation guarantees at least one layer
}

ConvGradients conv_backward(const ConvExtractor& extractor, const ConvTrace& trace,
                            const Vector& latent_grad) {
  const auto& layers = extractor.layers();
  if (trace.conv.size() != layers.size())
    throw ContractError("conv_backward: trace does not belong to this extractor");
  if (latent_grad.size() != extractor.output_dim())
    throw ShapeError("conv_backward: latent gradient length");
  ConvGradients g;
  g.weights.resize(layers.size());
  g.bias.resize(layers.size());

  const Matrix& last = trace.conv.back();
  Matrix dconv = (latent_grad / static_cast<double>(last.cols())).replicate(1, last.cols());
  for (std::size_t i = layers.size(); i-- > 0;) {
    const auto& layer = layers[i];
    const Matrix& input = trace.inputs[i];
    g.weights[i] = dconv * im2col(input, layer.kernel).transpose();
    g.bias[i] = dconv.rowwise().sum();
    if (i == 0) break;
    const Matrix dinput = col2im(layer.weights.transpose() * dconv, input.rows(), layer.kernel,
                                 input.cols());
    // Through pooling + ReLU of the previous stage.
    const Matrix& prev_conv = trace.conv[i - 1];
    const auto& winners = trace.argmax[i - 1];
    const Eigen::Index pooled_len = dinput.cols();
    dconv = Matrix::Zero(prev_conv.rows(), prev_conv.cols());
    for (Eigen::Index c = 0; c < prev_conv.rows(); ++c)
      for (Eigen::Index t = 0; t < pooled_len; ++t) {
        const Eigen::Index j = winners[c * pooled_len + t];
        if (prev_conv(c, j) > 0.0) dconv(c, j) = dinput(c, t);
      }
  }
  return g;
}

}  // namespace incode::cond
