#pragma once

#include <cstdint>

#include "incode/common.hpp"

namespace incode::train {

struct TrainConfig {
  int epochs = 500;
  double lr0 = 9e-4;
  /// Learning-rate multiplier reached at the final epoch.
  double alpha = 0.1;
  std::uint64_t seed = 0;
  Eigen::Index chunk = 65536;
  /// Fill the `seconds` log column with wall time; off keeps logs byte-reproducible.
  bool record_time = false;

  void validate() const;
};

/// lr0 * alpha^(epoch / epochs).
double lr_at(int epoch, const TrainConfig& config);

}  // namespace incode::train
