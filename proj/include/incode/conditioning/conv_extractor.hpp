#pragma once

#include <span>
#include <vector>

#include "incode/common.hpp"

namespace incode::cond {

/// Trainable 1-D convolutional latent extractor:
/// [Conv1D, ReLU, MaxPool(2)] x (n-1), a final Conv1D, then the mean over time.
struct ConvExtractorConfig {
  std::vector<int> channels{16, 32, 64};
  std::vector<int> kernels{7, 5, 3};

  void validate() const;
  int output_dim() const { return channels.empty() ? 0 : channels.back(); }
  /// Shortest input for which every stage has a non-empty output.
  Eigen::Index min_length() const;
};

/// Valid (unpadded) 1-D convolution. weights is [out x (in * kernel)] with
/// column index in_channel * kernel + tap.
struct Conv1dLayer {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 0;
  Matrix weights;
  Vector bias;
};

class ConvExtractor {
 public:
  ConvExtractor() = default;
  /// PyTorch-style init: weights and biases ~ U(-1/sqrt(in*k), 1/sqrt(in*k)).
  ConvExtractor(const ConvExtractorConfig& config, Rng& rng);

  const ConvExtractorConfig& config() const { return config_; }
  int output_dim() const { return config_.output_dim(); }
  std::vector<Conv1dLayer>& layers() { return layers_; }
  const std::vector<Conv1dLayer>& layers() const { return layers_; }

 private:
  ConvExtractorConfig config_;
  std::vector<Conv1dLayer> layers_;
};

/// Per-stage activations kept for the backward pass. Signals are stored as
/// [channels x length].
struct ConvTrace {
  std::vector<Matrix> inputs;   ///< input of each conv
  std::vector<Matrix> conv;     ///< raw conv output of each stage
  std::vector<std::vector<Eigen::Index>> argmax;  ///< pooling winners (absolute index)
};

Vector conv_extract(const ConvExtractor& extractor, std::span<const double> signal,
                    ConvTrace* trace = nullptr);

struct ConvGradients {
  std::vector<Matrix> weights;
  std::vector<Vector> bias;
};

ConvGradients conv_backward(const ConvExtractor& extractor, const ConvTrace& trace,
                            const Vector& latent_grad);

}  // namespace incode::cond
