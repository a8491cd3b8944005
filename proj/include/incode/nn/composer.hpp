#pragma once

#include <cstdint>
#include <vector>

#include "incode/common.hpp"
#include "incode/nn/activation.hpp"
#include "incode/nn/dense.hpp"

namespace incode::nn {

/// Which implementation evaluates a kernel. `serial` is the straight-loop
/// reference kept for testing and benchmarking; `parallel` splits the batch
/// into a fixed set of row groups, runs them under OpenMP and reduces the
/// group partials in group order, so results do not depend on thread count.
enum class Exec { serial, parallel };

struct ComposerConfig {
  int input_dim = 2;
  int output_dim = 3;
  int hidden_layers = 5;
  int width = 256;
  double first_omega0 = 30.0;
  double hidden_omega0 = 30.0;

  void validate() const;
};

/// Coordinate MLP: `hidden_layers` generalized-sine layers then a linear head.
class ComposerNetwork {
 public:
  ComposerNetwork() = default;
  /// SIREN-initialized network.
  ComposerNetwork(const ComposerConfig& config, Rng& rng);
  /// Network with caller-supplied layers (validated against config).
  ComposerNetwork(const ComposerConfig& config, std::vector<DenseLayer> layers);

  const ComposerConfig& config() const { return config_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  int hidden_layers() const { return config_.hidden_layers; }
  /// Frequency scale of hidden layer `l` (0-based).
  double omega0(int l) const { return l == 0 ? config_.first_omega0 : config_.hidden_omega0; }

  /// Hash of every weight and bias; ties a ForwardTrace to the exact weights
  /// it was computed with.
  std::uint64_t fingerprint() const;

 private:
  ComposerConfig config_;
  std::vector<DenseLayer> layers_;
};

/// Backprop cache for one batch. For hidden layer l, pre[l] holds the affine
/// pre-activation z, and sin_u/cos_u hold sin/cos of u = b*omega0*z + c.
struct ForwardTrace {
  Matrix inputs;
  std::vector<Matrix> pre;
  std::vector<Matrix> sin_u;
  std::vector<Matrix> cos_u;
  Matrix output;
  ActivationParams params;
  std::uint64_t fingerprint = 0;

  /// Post-activation y_l = a*sin(u) + d of hidden layer l.
  Matrix post(int l) const;
  Eigen::Index batch() const { return inputs.rows(); }
};

struct LayerGradient {
  Matrix weights;
  Vector bias;
};

struct ComposerGradients {
  std::vector<LayerGradient> layers;
  ParamQuad effective;  ///< d/d(a, b, c, d), summed over layers and batch
  ParamQuad raw;        ///< same, through the exp transform of a and b
  Matrix coords;        ///< d/d(inputs); empty unless requested

  static ComposerGradients zeros_like(const ComposerNetwork& net);
  ComposerGradients& operator+=(const ComposerGradients& other);
};

ForwardTrace composer_forward(const ComposerNetwork& net, const Matrix& coords,
                              const ActivationParams& params, Exec exec = Exec::parallel);

/// Same as above but reuses the buffers of `trace`; avoids re-faulting fresh
/// pages every step in training loops.
void composer_forward(const ComposerNetwork& net, const Matrix& coords,
                      const ActivationParams& params, ForwardTrace& trace,
                      Exec exec = Exec::parallel);

/// Gradients for `output_grad` = dLoss/dOutput. Throws ContractError when the
/// trace was produced with different weights or params.
ComposerGradients composer_backward(const ForwardTrace& trace, const ComposerNetwork& net,
                                    const ActivationParams& params, const Matrix& output_grad,
                                    bool want_coord_grad = false, Exec exec = Exec::parallel);

/// Output-only evaluation in chunks of at most `chunk` rows.
Matrix composer_predict(const ComposerNetwork& net, const Matrix& coords,
                        const ActivationParams& params, Eigen::Index chunk = 65536);

/// Outputs of hidden layer `layer` (0-based) without keeping the trace.
Matrix composer_hidden_output(const ComposerNetwork& net, const Matrix& coords,
                              const ActivationParams& params, int layer);

}  // namespace incode::nn
