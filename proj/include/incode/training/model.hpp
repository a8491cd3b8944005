#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "incode/common.hpp"
#include "incode/conditioning/conv_extractor.hpp"
#include "incode/conditioning/harmonizer.hpp"
#include "incode/nn/composer.hpp"
#include "incode/training/adam.hpp"
#include "incode/training/loss.hpp"

namespace incode::train {

/// Where the harmonizer's latent code comes from.
enum class LatentSource {
  conv,   ///< trainable 1-D conv extractor over Dataset::conditioning
  fixed,  ///< precomputed vector (e.g. MFCC), not trained
};

struct BundleConfig {
  nn::ComposerConfig composer;
  /// false: activation parameters are pinned to `frozen` and only the
  /// composer trains (SIREN when frozen is (1, 1, 0, 0)).
  bool conditioned = true;
  nn::ParamQuad frozen{1.0, 1.0, 0.0, 0.0};
  cond::HarmonizerConfig harmonizer;
  LatentSource latent = LatentSource::conv;
  cond::ConvExtractorConfig extractor;

  void validate() const;
};

/// Composer plus, when conditioned, the harmonizer and latent extractor.
struct ModelBundle {
  BundleConfig config;
  nn::ComposerNetwork composer;
  std::optional<cond::HarmonizerNetwork> harmonizer;
  std::optional<cond::ConvExtractor> extractor;
  Vector fixed_latent;

  /// Each network draws from its own seed stream, so the composer starts
  /// identically with or without conditioning.
  static ModelBundle create(const BundleConfig& config, std::uint64_t seed);
};

struct Dataset {
  Matrix coords;
  Matrix targets;
  /// Optional per-row supervision mask (1 = supervised).
  std::vector<std::uint8_t> mask;
  /// Input to the conv extractor.
  std::vector<double> conditioning;

  void validate(const ModelBundle& model) const;
};

/// Cached intermediate values of latent -> harmonizer -> params.
struct ConditioningTrace {
  cond::ConvTrace conv;
  cond::HarmonizerTrace harmonizer;
};

/// Activation parameters for the current weights.
nn::ActivationParams activation_params(const ModelBundle& model, const Dataset& data,
                                       ConditioningTrace* trace = nullptr);

struct BundleGradients {
  nn::ComposerGradients composer;
  std::optional<cond::HarmonizerGradients> harmonizer;
  std::optional<cond::ConvGradients> extractor;
};

/// Replacement for the masked MSE data term. Receives the full prediction
/// and, when `grad` is non-null, writes d(loss)/d(prediction) into it.
using CustomLoss = std::function<double(const Matrix& prediction, Matrix* grad)>;

struct ObjectiveOptions {
  Eigen::Index chunk = 65536;
  bool want_gradients = true;
  CustomLoss custom_loss;
};

struct Evaluation {
  double data_loss = 0.0;
  double penalty = 0.0;
  nn::ActivationParams params;
  Matrix prediction;
  BundleGradients grads;  ///< filled when requested

  double total() const { return data_loss + penalty; }
};

/// Data loss + constraint penalty and, optionally, the gradient of their
/// sum with respect to every trainable parameter.
Evaluation evaluate_objective(const ModelBundle& model, const Dataset& data, const LossConfig& loss,
                              const ObjectiveOptions& options);

/// Trainable parameters as named blocks in a fixed order: composer layers,
/// then harmonizer layers and norms, then extractor layers. Frozen
/// conditioning contributes nothing.
std::vector<ParamBlock> parameter_blocks(ModelBundle& model, const BundleGradients& grads);

}  // namespace incode::train
