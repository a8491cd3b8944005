#pragma once

#include <span>

#include "incode/common.hpp"

namespace incode::cond {

struct MfccConfig {
  int frame_length = 2048;
  int hop_length = 512;
  int mel_bands = 40;
  int coefficients = 20;
  double log_floor = 1e-10;
  /// Length of the returned latent (zero-padded or truncated).
  int output_dim = 64;

  void validate() const;
};

/// Triangular mel filterbank [mel_bands x (frame_length/2 + 1)] spanning
/// 0 .. sample_rate/2 on the HTK mel scale.
Matrix mel_filterbank(double sample_rate, const MfccConfig& config);

/// Per-frame coefficients [frames x coefficients]: Hann window, power
/// spectrum, mel filterbank, log (floored), orthonormal DCT-II. Frames start at
/// multiples of the hop; audio shorter than a frame is zero-padded to one frame.
Matrix mfcc_frames(std::span<const double> audio, double sample_rate, const MfccConfig& config);

/// Mean of mfcc_frames over time, zero-padded/truncated to output_dim.
Vector mfcc_extract(std::span<const double> audio, double sample_rate,
                    const MfccConfig& config = {});

}  // namespace incode::cond
