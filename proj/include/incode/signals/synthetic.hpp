#pragma once

#include "incode/common.hpp"
#include "incode/signals/audio.hpp"
#include "incode/signals/image.hpp"

namespace incode::signals {

/// Modified Shepp-Logan ellipse phantom on an n x n grid, values in [0, 1].
/// Each pixel averages `supersample`^2 sub-samples.
ImageSignal ellipse_phantom(int n, int supersample = 4);

/// Centered disk of `radius` pixels with anti-aliased edge.
ImageSignal disk_image(int n, double radius, int supersample = 8);

/// Linear chirp sin(2*pi*(f0*t + (f1 - f0)*t^2/2)) over t in [0, 1) with
/// `samples` points; f0 and f1 in cycles per unit interval.
Vector chirp(int samples, double f0, double f1);

/// Sum of three harmonically unrelated tones with a slow amplitude envelope,
/// peak amplitude 0.9.
AudioSignal test_tone(double sample_rate, double seconds);

}  // namespace incode::signals
