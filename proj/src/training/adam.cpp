#include "incode/training/adam.hpp"

#include <cmath>

namespace incode::train {

void AdamState::step(std::span<const ParamBlock> blocks, double lr) {
  for (const ParamBlock& b : blocks) {
    if (b.values.size() != b.grads.size())
      throw ShapeError("adam: block '" + b.name + "' has mismatched gradient size");
    for (std::size_t i = 0; i < b.grads.size(); ++i)
      if (!std::isfinite(b.grads[i]))
        throw DivergenceError("adam: non-finite gradient in parameter block '" + b.name + "' at index " +
                              std::to_string(i));
  }
  if (t_ == 0) {
    for (const ParamBlock& b : blocks) {
      m_.emplace_back(b.values.size(), 0.0);
      v_.emplace_back(b.values.size(), 0.0);
    }
  } else {
    if (m_.size() != blocks.size()) throw ContractError("adam: parameter block count changed");
    for (std::size_t k = 0; k < blocks.size(); ++k)
      if (m_[k].size() != blocks[k].values.size())
        throw ContractError("adam: size of block '" + blocks[k].name + "' changed");
  }
  ++t_;
  const auto& c = config_;
  const double correct1 = 1.0 - std::pow(c.beta1, static_cast<double>(t_));
  const double correct2 = 1.0 - std::pow(c.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    auto& m = m_[k];
    auto& v = v_[k];
    const ParamBlock& b = blocks[k];
    for (std::size_t i = 0; i < b.values.size(); ++i) {
      const double g = b.grads[i];
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
      const double mhat = m[i] / correct1;
      const double vhat = v[i] / correct2;
      b.values[i] -= lr * mhat / (std::sqrt(vhat) + c.eps);
    }
  }
}

}  // namespace incode::train
