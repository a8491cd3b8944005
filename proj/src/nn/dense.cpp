#include "incode/nn/dense.hpp"

#include <cmath>

namespace incode::nn {

double siren_init_bound(Eigen::Index fan_in, bool is_first, double omega0) {
  if (fan_in < 1) throw ConfigError("siren_init: fan_in must be >= 1");
  if (!(omega0 > 0.0)) throw ConfigError("siren_init: omega0 must be positive");
  const double n = static_cast<double>(fan_in);
  return is_first ? 1.0 / n : std::sqrt(6.0 / n) / omega0;
}

DenseLayer siren_init(Eigen::Index fan_in, Eigen::Index fan_out, bool is_first, double omega0,
                      Rng& rng) {
  const double bound = siren_init_bound(fan_in, is_first, omega0);
  if (fan_out < 1) throw ConfigError("siren_init: fan_out must be >= 1");
  DenseLayer layer(fan_in, fan_out);
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index r = 0; r < fan_out; ++r)
    for (Eigen::Index c = 0; c < fan_in; ++c) layer.weights(r, c) = dist(rng);
  return layer;
}

}  // namespace incode::nn
