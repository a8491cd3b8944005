#include "incode/nn/composer.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "kernels.hpp"

namespace incode::nn {

void ComposerConfig::validate() const {
  if (input_dim < 1 || output_dim < 1) throw ConfigError("composer: dimensions must be >= 1");
  if (hidden_layers < 1) throw ConfigError("composer: need at least one hidden layer");
  if (width < 1) throw ConfigError("composer: width must be >= 1");
  if (!(first_omega0 > 0.0) || !(hidden_omega0 > 0.0))
    throw ConfigError("composer: omega0 must be positive");
}

ComposerNetwork::ComposerNetwork(const ComposerConfig& config, Rng& rng) : config_(config) {
  config_.validate();
  layers_.reserve(config_.hidden_layers + 1);
  Eigen::Index fan_in = config_.input_dim;
  for (int l = 0; l < config_.hidden_layers; ++l) {
    layers_.push_back(siren_init(fan_in, config_.width, l == 0, omega0(l), rng));
    fan_in = config_.width;
  }
  layers_.push_back(siren_init(fan_in, config_.output_dim, false, config_.hidden_omega0, rng));
}

ComposerNetwork::ComposerNetwork(const ComposerConfig& config, std::vector<DenseLayer> layers)
    : config_(config), layers_(std::move(layers)) {
  config_.validate();
  if (static_cast<int>(layers_.size()) != config_.hidden_layers + 1)
    throw ShapeError("composer: expected " + std::to_string(config_.hidden_layers + 1) +
                     " layers, got " + std::to_string(layers_.size()));
  Eigen::Index fan_in = config_.input_dim;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const bool last = l + 1 == layers_.size();
    const Eigen::Index fan_out = last ? config_.output_dim : config_.width;
    if (layers_[l].fan_in() != fan_in || layers_[l].fan_out() != fan_out ||
        layers_[l].bias.size() != fan_out)
      throw ShapeError("composer: layer " + std::to_string(l) + " has wrong shape");
    fan_in = fan_out;
  }
}

std::uint64_t ComposerNetwork::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const double* data, Eigen::Index n) {
    for (Eigen::Index i = 0; i < n; ++i) {
      std::uint64_t bits;
      std::memcpy(&bits, data + i, sizeof bits);
      h = (h ^ bits) * 0x100000001b3ULL;
    }
  };
  for (const auto& layer : layers_) {
    mix(layer.weights.data(), layer.weights.size());
    mix(layer.bias.data(), layer.bias.size());
  }
  return h;
}

Matrix ForwardTrace::post(int l) const {
  const auto& p = params.effective();
  return ((p.a * sin_u[l].array()) + p.d).matrix();
}

ComposerGradients ComposerGradients::zeros_like(const ComposerNetwork& net) {
  ComposerGradients g;
  g.layers.reserve(net.layers().size());
  for (const auto& layer : net.layers())
    g.layers.push_back({Matrix::Zero(layer.fan_out(), layer.fan_in()), Vector::Zero(layer.fan_out())});
  return g;
}

ComposerGradients& ComposerGradients::operator+=(const ComposerGradients& other) {
  if (layers.size() != other.layers.size()) throw ShapeError("gradient layer count mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].weights += other.layers[l].weights;
    layers[l].bias += other.layers[l].bias;
  }
  effective += other.effective;
  raw += other.raw;
  if (other.coords.size() > 0) {
    if (coords.size() == 0)
      coords = other.coords;
    else
      coords += other.coords;
  }
  return *this;
}

namespace {

void check_inputs(const ComposerNetwork& net, const Matrix& coords) {
  if (coords.cols() != net.config().input_dim)
    throw ShapeError("composer: coordinates have " + std::to_string(coords.cols()) +
                     " columns, network expects " + std::to_string(net.config().input_dim));
  if (net.layers().empty()) throw ContractError("composer: network has no layers");
}

}  // namespace

ForwardTrace composer_forward(const ComposerNetwork& net, const Matrix& coords,
                              const ActivationParams& params, Exec exec) {
  ForwardTrace trace;
  composer_forward(net, coords, params, trace, exec);
  return trace;
}

void composer_forward(const ComposerNetwork& net, const Matrix& coords,
                      const ActivationParams& params, ForwardTrace& trace, Exec exec) {
  check_inputs(net, coords);
  trace.inputs = coords;
  trace.params = params;
  trace.fingerprint = net.fingerprint();
  const int depth = net.hidden_layers();
  const Eigen::Index batch = coords.rows();
  const Eigen::Index width = net.config().width;
  for (auto* buffers : {&trace.pre, &trace.sin_u, &trace.cos_u}) {
    buffers->resize(depth);
    for (auto& m : *buffers) m.resize(batch, width);
  }
  trace.output.resize(batch, net.config().output_dim);
  if (exec == Exec::serial)
    detail::forward_serial(net, params, trace);
  else
    detail::forward_parallel(net, params, trace);
}

ComposerGradients composer_backward(const ForwardTrace& trace, const ComposerNetwork& net,
                                    const ActivationParams& params, const Matrix& output_grad,
                                    bool want_coord_grad, Exec exec) {
  if (!(trace.params == params) || trace.fingerprint != net.fingerprint() ||
      static_cast<int>(trace.pre.size()) != net.hidden_layers())
    throw ContractError("composer_backward: trace was produced by a different network or params");
  if (output_grad.rows() != trace.batch() || output_grad.cols() != net.config().output_dim)
    throw ShapeError("composer_backward: output gradient shape does not match the trace");
  ComposerGradients grads =
      exec == Exec::serial
          ? detail::backward_serial(trace, net, params, output_grad, want_coord_grad)
          : detail::backward_parallel(trace, net, params, output_grad, want_coord_grad);
  grads.raw = params.raw_gradient(grads.effective);
  return grads;
}

Matrix composer_predict(const ComposerNetwork& net, const Matrix& coords,
                        const ActivationParams& params, Eigen::Index chunk) {
  check_inputs(net, coords);
  if (chunk < 1) throw ConfigError("composer_predict: chunk must be >= 1");
  Matrix out(coords.rows(), net.config().output_dim);
  for (Eigen::Index r0 = 0; r0 < coords.rows(); r0 += chunk) {
    const Eigen::Index n = std::min(chunk, coords.rows() - r0);
    out.middleRows(r0, n) = composer_forward(net, coords.middleRows(r0, n), params).output;
  }
  return out;
}

Matrix composer_hidden_output(const ComposerNetwork& net, const Matrix& coords,
                              const ActivationParams& params, int layer) {
  if (layer < 0 || layer >= net.hidden_layers())
    throw ConfigError("composer_hidden_output: layer index out of range");
  return composer_forward(net, coords, params).post(layer);
}

namespace detail {

RowGroups::RowGroups(Eigen::Index batch) {
  constexpr Eigen::Index kMinRows = 128;
  constexpr Eigen::Index kMaxGroups = 16;
  count = std::clamp<Eigen::Index>((batch + kMinRows - 1) / kMinRows, 1, kMaxGroups);
  rows_per_group = std::max<Eigen::Index>(1, (batch + count - 1) / count);
}

Eigen::Index RowGroups::size(Eigen::Index g, Eigen::Index batch) const {
  const Eigen::Index b = begin(g);
  return b >= batch ? 0 : std::min(rows_per_group, batch - b);
}

}  // namespace detail

}  // namespace incode::nn
