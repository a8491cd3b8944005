#pragma once

#include <vector>

#include "incode/common.hpp"
#include "incode/nn/activation.hpp"
#include "incode/nn/composer.hpp"
#include "incode/nn/dense.hpp"

namespace incode::cond {

struct HarmonizerConfig {
  int input_dim = 64;
  /// Output features of every layer; the last entry must be 4.
  std::vector<int> widths{64, 32, 4};
  /// LayerNorm after every layer except the linear head.
  bool layer_norm = false;
  double bias_value = 0.31;
  double weight_std = 0.001;
  double norm_eps = 1e-5;

  /// 64-32-4 SiLU MLP, biases 0.31 (representation tasks).
  static HarmonizerConfig image_profile(int input_dim = 64);
  /// 32-16-8-4 MLP with LayerNorm + SiLU, biases 0.0005 (denoising).
  static HarmonizerConfig denoise_profile(int input_dim = 64);

  void validate() const;
};

struct NormParams {
  Vector gamma;
  Vector beta;
};

/// Maps a latent code to the raw (a, b, c, d) quadruple.
class HarmonizerNetwork {
 public:
  HarmonizerNetwork() = default;
  /// Unbiased layers; call harmonizer_init to initialize.
  explicit HarmonizerNetwork(const HarmonizerConfig& config);

  const HarmonizerConfig& config() const { return config_; }
  std::vector<nn::DenseLayer>& layers() { return layers_; }
  const std::vector<nn::DenseLayer>& layers() const { return layers_; }
  std::vector<NormParams>& norms() { return norms_; }
  const std::vector<NormParams>& norms() const { return norms_; }

 private:
  HarmonizerConfig config_;
  std::vector<nn::DenseLayer> layers_;
  std::vector<NormParams> norms_;  // empty when config.layer_norm is false
};

/// Weights ~ Normal(0, config.weight_std), every bias = bias_value, norm
/// gains 1 and shifts 0.
void harmonizer_init(HarmonizerNetwork& net, double bias_value, Rng& rng);
HarmonizerNetwork make_harmonizer(const HarmonizerConfig& config, Rng& rng);

struct HarmonizerTrace {
  Vector input;
  std::vector<Vector> pre;     ///< affine outputs
  std::vector<Vector> normed;  ///< after LayerNorm (equal to pre without norm)
  nn::ParamQuad output;
};

nn::ParamQuad harmonizer_forward(const HarmonizerNetwork& net, const Vector& z,
                                 HarmonizerTrace* trace = nullptr);

struct HarmonizerGradients {
  std::vector<nn::LayerGradient> layers;
  std::vector<NormParams> norms;
  Vector input;
};

HarmonizerGradients harmonizer_backward(const HarmonizerNetwork& net, const HarmonizerTrace& trace,
                                        const nn::ParamQuad& output_grad);

}  // namespace incode::cond
