#pragma once

#include <filesystem>

#include "incode/common.hpp"

namespace incode::signals {

/// Raster image with values in [0, 1]. Pixel (r, c) lives in row r*width + c
/// of `values`, one column per channel.
struct ImageSignal {
  int height = 0;
  int width = 0;
  int channels = 0;
  Matrix values;

  ImageSignal() = default;
  ImageSignal(int h, int w, int c) : height(h), width(w), channels(c), values(Matrix::Zero(h * w, c)) {}

  Eigen::Index pixels() const { return values.rows(); }
  double& at(int r, int c, int ch) { return values(static_cast<Eigen::Index>(r) * width + c, ch); }
  double at(int r, int c, int ch) const { return values(static_cast<Eigen::Index>(r) * width + c, ch); }
  /// One channel as an [height x width] plane.
  Matrix plane(int ch) const;
  /// Throws ShapeError unless both images have identical geometry.
  void require_same_shape(const ImageSignal& other) const;
};

/// Reads an 8-bit grayscale or RGB PNG (palette images are expanded to RGB).
/// Values are scaled to [0, 1]. Alpha channels and 16-bit data are rejected.
ImageSignal load_png(const std::filesystem::path& path);
/// Writes 8-bit gray (1 channel) or RGB (3 channels); values are clamped.
void save_png(const ImageSignal& image, const std::filesystem::path& path);

ImageSignal clamp_unit(ImageSignal image);

/// Photon + readout sensor noise: y = (Poisson(tau*x) + Poisson(ro)) / tau,
/// clamped below at 0.
ImageSignal add_sensor_noise(const ImageSignal& image, double tau, double ro, Rng& rng);

/// Non-overlapping k x k box average. The image is first cropped to the
/// largest region whose sides are multiples of k.
ImageSignal downsample(const ImageSignal& image, int factor);
/// Pixel replication (nearest neighbour) by an integer factor.
ImageSignal upsample_nearest(const ImageSignal& image, int factor);
/// Top-left crop.
ImageSignal crop(const ImageSignal& image, int top, int left, int height, int width);
/// Mean over channels.
ImageSignal to_gray(const ImageSignal& image);

}  // namespace incode::signals
