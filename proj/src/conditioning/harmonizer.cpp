#include "incode/conditioning/harmonizer.hpp"

#include <string>

#include "incode/conditioning/ops.hpp"

namespace incode::cond {

HarmonizerConfig HarmonizerConfig::image_profile(int input_dim) {
  HarmonizerConfig c;
  c.input_dim = input_dim;
  c.widths = {64, 32, 4};
  c.layer_norm = false;
  c.bias_value = 0.31;
  return c;
}

HarmonizerConfig HarmonizerConfig::denoise_profile(int input_dim) {
  HarmonizerConfig c;
  c.input_dim = input_dim;
  c.widths = {32, 16, 8, 4};
  c.layer_norm = true;
  c.bias_value = 0.0005;
  return c;
}

void HarmonizerConfig::validate() const {
  if (input_dim < 1) throw ConfigError("harmonizer: input_dim must be >= 1");
  if (widths.empty() || widths.back() != 4)
    throw ConfigError("harmonizer: the last layer must have 4 outputs");
  for (int w : widths)
    if (w < 1) throw ConfigError("harmonizer: layer widths must be >= 1");
  if (layer_norm)
    for (std::size_t i = 0; i + 1 < widths.size(); ++i)
      if (widths[i] < 2) throw ConfigError("harmonizer: normalized layers need >= 2 features");
  if (!(weight_std >= 0.0)) throw ConfigError("harmonizer: weight_std must be non-negative");
}

HarmonizerNetwork::HarmonizerNetwork(const HarmonizerConfig& config) : config_(config) {
  config_.validate();
  int fan_in = config_.input_dim;
  for (std::size_t i = 0; i < config_.widths.size(); ++i) {
    const int fan_out = config_.widths[i];
    layers_.emplace_back(fan_in, fan_out);
    if (config_.layer_norm && i + 1 < config_.widths.size())
      norms_.push_back({Vector::Ones(fan_out), Vector::Zero(fan_out)});
    fan_in = fan_out;
  }
}

void harmonizer_init(HarmonizerNetwork& net, double bias_value, Rng& rng) {
  if (!std::isfinite(bias_value)) throw ConfigError("harmonizer_init: bias must be finite");
  std::normal_distribution<double> normal(0.0, net.config().weight_std);
  for (auto& layer : net.layers()) {
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = normal(rng);
    layer.bias.setConstant(bias_value);
  }
  for (auto& norm : net.norms()) {
    norm.gamma.setOnes();
    norm.beta.setZero();
  }
}

HarmonizerNetwork make_harmonizer(const HarmonizerConfig& config, Rng& rng) {
  HarmonizerNetwork net(config);
  harmonizer_init(net, config.bias_value, rng);
  return net;
}

nn::ParamQuad harmonizer_forward(const HarmonizerNetwork& net, const Vector& z,
                                 HarmonizerTrace* trace) {
  if (z.size() != net.config().input_dim)
    throw ShapeError("harmonizer: latent has " + std::to_string(z.size()) + " entries, expected " +
                     std::to_string(net.config().input_dim));
  const auto& layers = net.layers();
  if (trace) {
    trace->input = z;
    trace->pre.clear();
    trace->normed.clear();
  }
  Vector x = z;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Vector h = layers[i].weights * x + layers[i].bias;
    if (trace) trace->pre.push_back(h);
    if (i + 1 == layers.size()) {
      x = std::move(h);
      break;
    }
    if (net.config().layer_norm)
      h = layer_norm(h, net.norms()[i].gamma, net.norms()[i].beta, net.config().norm_eps);
    if (trace) trace->normed.push_back(h);
    x = h.unaryExpr([](double v) { return silu(v); });
  }
  const nn::ParamQuad out{x(0), x(1), x(2), x(3)};
  if (trace) trace->output = out;
  return out;
}

HarmonizerGradients harmonizer_backward(const HarmonizerNetwork& net, const HarmonizerTrace& trace,
                                        const nn::ParamQuad& output_grad) {
  const auto& layers = net.layers();
  if (trace.pre.size() != layers.size() || trace.input.size() != net.config().input_dim)
    throw ContractError("harmonizer_backward: trace does not belong to this network");
  HarmonizerGradients g;
  g.layers.resize(layers.size());
  if (net.config().layer_norm) g.norms.resize(net.norms().size());

  Vector grad(4);
  grad << output_grad.a, output_grad.b, output_grad.c, output_grad.d;
  for (std::size_t i = layers.size(); i-- > 0;) {
    if (i + 1 < layers.size()) {
      // grad is d/d(silu output); go back through SiLU and the optional norm.
      const Vector& normed = trace.normed[i];
      for (Eigen::Index k = 0; k < grad.size(); ++k) grad(k) *= silu_grad(normed(k));
      if (net.config().layer_norm) {
        auto ln = layer_norm_backward(trace.pre[i], net.norms()[i].gamma, net.config().norm_eps, grad);
        g.norms[i] = {std::move(ln.gamma), std::move(ln.beta)};
        grad = std::move(ln.input);
      }
    }
    const Vector& x = i == 0 ? trace.input : trace.normed[i - 1].unaryExpr([](double v) {
      return silu(v);
    }).eval();
    g.layers[i].weights = grad * x.transpose();
    g.layers[i].bias = grad;
    grad = layers[i].weights.transpose() * grad;
  }
  g.input = std::move(grad);
  return g;
}

}  // namespace incode::cond
