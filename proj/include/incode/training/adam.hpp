#pragma once

#include <span>
#include <string>
#include <vector>

#include "incode/common.hpp"

namespace incode::train {

/// A named, contiguous run of trainable parameters and its gradient.
struct ParamBlock {
  std::string name;
  std::span<double> values;
  std::span<const double> grads;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class AdamState {
 public:
  explicit AdamState(AdamConfig config = {}) : config_(config) {}

  const AdamConfig& config() const { return config_; }
  long step_count() const { return t_; }
  const std::vector<std::vector<double>>& first_moments() const { return m_; }
  const std::vector<std::vector<double>>& second_moments() const { return v_; }

  /// Bias-corrected Adam update of every block. Blocks must keep the same
  /// order and sizes across calls. A non-finite gradient throws
  /// DivergenceError naming the block before anything is modified.
  void step(std::span<const ParamBlock> blocks, double lr);

 private:
  AdamConfig config_;
  long t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace incode::train
