#pragma once

#include <filesystem>

#include "incode/common.hpp"

namespace incode::signals {

struct AudioSignal {
  double sample_rate = 0.0;
  Vector samples;  ///< in [-1, 1]
};

/// Reads a 16-bit PCM mono WAV file; samples are scaled by 1/32767 and clamped.
AudioSignal load_wav(const std::filesystem::path& path);
void save_wav(const AudioSignal& audio, const std::filesystem::path& path);

}  // namespace incode::signals
