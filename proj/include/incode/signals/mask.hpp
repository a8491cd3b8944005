#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "incode/common.hpp"

namespace incode::signals {

/// Boolean raster congruent with a signal, in the same row-major order.
struct SampleMask {
  std::vector<int> dims;
  std::vector<std::uint8_t> keep;

  std::size_t count() const;
  double fraction() const;
};

/// Each cell is kept independently with probability `fraction` in (0, 1].
SampleMask random_mask(const std::vector<int>& dims, double fraction, Rng& rng);

/// 2-D masks only; stored as 8-bit gray with 0/255.
void save_mask_png(const SampleMask& mask, const std::filesystem::path& path);
SampleMask load_mask_png(const std::filesystem::path& path);

}  // namespace incode::signals
