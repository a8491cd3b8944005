#include "incode/training/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace incode::train {
namespace {

std::span<double> span_of(Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<double> span_of(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<const double> span_of(const Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<const double> span_of(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace

void BundleConfig::validate() const {
  composer.validate();
  if (!conditioned) {
    if (!(frozen.a > 0.0 && frozen.b > 0.0) || !frozen.all_finite())
      throw ConfigError("frozen activation parameters need finite values with a > 0 and b > 0");
    return;
  }
  harmonizer.validate();
  if (latent == LatentSource::conv) {
    extractor.validate();
    if (extractor.output_dim() != harmonizer.input_dim)
      throw ConfigError("extractor output size " + std::to_string(extractor.output_dim()) +
                        " differs from harmonizer input size " + std::to_string(harmonizer.input_dim));
  }
}

ModelBundle ModelBundle::create(const BundleConfig& config, std::uint64_t seed) {
  config.validate();
  ModelBundle m;
  m.config = config;
  Rng composer_rng = make_rng(seed, "composer");
  m.composer = nn::ComposerNetwork(config.composer, composer_rng);
  if (config.conditioned) {
    Rng harmonizer_rng = make_rng(seed, "harmonizer");
    m.harmonizer = cond::make_harmonizer(config.harmonizer, harmonizer_rng);
    if (config.latent == LatentSource::conv) {
      Rng extractor_rng = make_rng(seed, "extractor");
      m.extractor = cond::ConvExtractor(config.extractor, extractor_rng);
    }
  }
  return m;
}

void Dataset::validate(const ModelBundle& model) const {
  const auto& cc = model.composer.config();
  if (coords.rows() == 0) throw ConfigError("dataset is empty");
  if (coords.cols() != cc.input_dim)
    throw ShapeError("dataset coordinates have " + std::to_string(coords.cols()) + " columns, composer expects " +
                     std::to_string(cc.input_dim));
  if (targets.rows() != 0 && (targets.rows() != coords.rows() || targets.cols() != cc.output_dim))
    throw ShapeError("dataset targets do not match coordinates/composer output");
  if (!mask.empty() && static_cast<Eigen::Index>(mask.size()) != coords.rows())
    throw ShapeError("dataset mask length differs from the number of coordinates");
  if (model.config.conditioned && model.config.latent == LatentSource::conv &&
      static_cast<Eigen::Index>(conditioning.size()) < model.config.extractor.min_length())
    throw ConfigError("conditioning signal shorter than the extractor's minimum length " +
                      std::to_string(model.config.extractor.min_length()));
  if (model.config.conditioned && model.config.latent == LatentSource::fixed &&
      model.fixed_latent.size() != model.config.harmonizer.input_dim)
    throw ShapeError("fixed latent size differs from the harmonizer input size");
}

nn::ActivationParams activation_params(const ModelBundle& model, const Dataset& data, ConditioningTrace* trace) {
  if (!model.config.conditioned) return nn::ActivationParams::from_effective(model.config.frozen);
  Vector latent;
  if (model.config.latent == LatentSource::conv)
    latent = cond::conv_extract(*model.extractor, data.conditioning, trace ? &trace->conv : nullptr);
  else
    latent = model.fixed_latent;
  return nn::ActivationParams::from_raw(
      cond::harmonizer_forward(*model.harmonizer, latent, trace ? &trace->harmonizer : nullptr));
}

Evaluation evaluate_objective(const ModelBundle& model, const Dataset& data, const LossConfig& loss,
                              const ObjectiveOptions& options) {
  data.validate(model);
  if (!options.custom_loss && data.targets.rows() == 0) throw ConfigError("dataset has no targets");
  const Eigen::Index rows = data.coords.rows();
  const Eigen::Index chunk = std::max<Eigen::Index>(1, options.chunk);
  const int out_dim = model.composer.config().output_dim;

  ConditioningTrace ctrace;
  Evaluation ev;
  ev.params = activation_params(model, data, &ctrace);
  ev.prediction.resize(rows, out_dim);
  // Non-finite parameters give a non-finite loss; there is nothing to backpropagate.
  const auto raw = ev.params.raw().to_array(), eff = ev.params.effective().to_array();
  const bool backward = options.want_gradients &&
                        std::all_of(raw.begin(), raw.end(), [](double v) { return std::isfinite(v); }) &&
                        std::all_of(eff.begin(), eff.end(), [](double v) { return std::isfinite(v); });
  if (options.want_gradients) ev.grads.composer = nn::ComposerGradients::zeros_like(model.composer);

  nn::ForwardTrace trace;
  auto forward_chunk = [&](Eigen::Index begin, Eigen::Index n) {
    if (n == rows)
      nn::composer_forward(model.composer, data.coords, ev.params, trace);
    else
      nn::composer_forward(model.composer, data.coords.middleRows(begin, n), ev.params, trace);
    ev.prediction.middleRows(begin, n) = trace.output;
  };

  if (!options.custom_loss) {
    Eigen::Index supervised = rows;
    if (!data.mask.empty()) supervised = std::count(data.mask.begin(), data.mask.end(), std::uint8_t{1});
    if (supervised == 0) throw ConfigError("mask selects no samples");
    const double scale = 1.0 / (static_cast<double>(supervised) * out_dim);
    double sum = 0.0;
    Matrix grad;
    for (Eigen::Index begin = 0; begin < rows; begin += chunk) {
      const Eigen::Index n = std::min(chunk, rows - begin);
      forward_chunk(begin, n);
      grad = trace.output - data.targets.middleRows(begin, n);
      if (!data.mask.empty())
        for (Eigen::Index i = 0; i < n; ++i)
          if (!data.mask[begin + i]) grad.row(i).setZero();
      sum += grad.squaredNorm();
      if (backward) {
        grad *= 2.0 * scale;
        ev.grads.composer += nn::composer_backward(trace, model.composer, ev.params, grad);
      }
    }
    ev.data_loss = sum * scale;
  } else {
    const bool single = rows <= chunk;
    for (Eigen::Index begin = 0; begin < rows; begin += chunk) forward_chunk(begin, std::min(chunk, rows - begin));
    Matrix grad;
    ev.data_loss = options.custom_loss(ev.prediction, options.want_gradients ? &grad : nullptr);
    if (backward && std::isfinite(ev.data_loss)) {
      if (grad.rows() != rows || grad.cols() != out_dim) throw ShapeError("custom loss gradient has the wrong shape");
      for (Eigen::Index begin = 0; begin < rows; begin += chunk) {
        const Eigen::Index n = std::min(chunk, rows - begin);
        if (!single) nn::composer_forward(model.composer, data.coords.middleRows(begin, n), ev.params, trace);
        ev.grads.composer += nn::composer_backward(trace, model.composer, ev.params, grad.middleRows(begin, n));
      }
    }
  }

  const PenaltyResult pen = constraint_penalty(ev.params.effective(), loss);
  ev.penalty = pen.value;
  if (backward && model.config.conditioned && std::isfinite(ev.data_loss)) {
    nn::ParamQuad eff = ev.grads.composer.effective;
    eff += pen.grad;
    const nn::ParamQuad raw = ev.params.raw_gradient(eff);
    ev.grads.harmonizer = cond::harmonizer_backward(*model.harmonizer, ctrace.harmonizer, raw);
    if (model.config.latent == LatentSource::conv)
      ev.grads.extractor = cond::conv_backward(*model.extractor, ctrace.conv, ev.grads.harmonizer->input);
  }
  return ev;
}

std::vector<ParamBlock> parameter_blocks(ModelBundle& model, const BundleGradients& grads) {
  std::vector<ParamBlock> blocks;
  auto& layers = model.composer.layers();
  if (grads.composer.layers.size() != layers.size()) throw ContractError("composer gradients missing");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string prefix = "composer." + std::to_string(l);
    blocks.push_back({prefix + ".weights", span_of(layers[l].weights), span_of(grads.composer.layers[l].weights)});
    blocks.push_back({prefix + ".bias", span_of(layers[l].bias), span_of(grads.composer.layers[l].bias)});
  }
  if (!model.config.conditioned) return blocks;
  if (!grads.harmonizer) throw ContractError("harmonizer gradients missing");
  auto& h = *model.harmonizer;
  for (std::size_t l = 0; l < h.layers().size(); ++l) {
    const std::string prefix = "harmonizer." + std::to_string(l);
    blocks.push_back({prefix + ".weights", span_of(h.layers()[l].weights), span_of(grads.harmonizer->layers[l].weights)});
    blocks.push_back({prefix + ".bias", span_of(h.layers()[l].bias), span_of(grads.harmonizer->layers[l].bias)});
  }
  for (std::size_t l = 0; l < h.norms().size(); ++l) {
    const std::string prefix = "harmonizer.norm" + std::to_string(l);
    blocks.push_back({prefix + ".gamma", span_of(h.norms()[l].gamma), span_of(grads.harmonizer->norms[l].gamma)});
    blocks.push_back({prefix + ".beta", span_of(h.norms()[l].beta), span_of(grads.harmonizer->norms[l].beta)});
  }
  if (model.extractor) {
    if (!grads.extractor) throw ContractError("extractor gradients missing");
    auto& conv = model.extractor->layers();
    for (std::size_t l = 0; l < conv.size(); ++l) {
      const std::string prefix = "extractor." + std::to_string(l);
      blocks.push_back({prefix + ".weights", span_of(conv[l].weights), span_of(grads.extractor->weights[l])});
      blocks.push_back({prefix + ".bias", span_of(conv[l].bias), span_of(grads.extractor->bias[l])});
    }
  }
  return blocks;
}

}  // namespace incode::train
