#include "incode/training/schedule.hpp"

#include <cmath>
#include <string>

namespace incode::train {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (!(lr0 > 0.0) || !std::isfinite(lr0)) throw ConfigError("train: learning rate must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("train: alpha must be in (0, 1]");
  if (chunk < 1) throw ConfigError("train: chunk size must be >= 1");
}

double lr_at(int epoch, const TrainConfig& config) {
  if (epoch < 0 || epoch > config.epochs)
    throw ConfigError("lr_at: epoch " + std::to_string(epoch) + " outside [0, epochs]");
  return config.lr0 * std::pow(config.alpha, static_cast<double>(epoch) / config.epochs);
}

}  // namespace incode::train
