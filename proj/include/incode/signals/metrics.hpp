#pragma once

#include <span>

#include "incode/common.hpp"
#include "incode/signals/image.hpp"
#include "incode/signals/volume.hpp"

namespace incode::signals {

double mse(std::span<const double> pred, std::span<const double> gt);
inline double mse(const Matrix& pred, const Matrix& gt) {
  if (pred.rows() != gt.rows() || pred.cols() != gt.cols()) throw ShapeError("mse: shapes differ");
  return mse(std::span<const double>(pred.data(), pred.size()), std::span<const double>(gt.data(), gt.size()));
}

/// 10*log10(max_val^2 / MSE); +infinity when the inputs are identical.
double psnr(std::span<const double> pred, std::span<const double> gt, double max_val = 1.0);
inline double psnr(const Matrix& pred, const Matrix& gt, double max_val = 1.0) {
  if (pred.rows() != gt.rows() || pred.cols() != gt.cols()) throw ShapeError("psnr: shapes differ");
  return psnr(std::span<const double>(pred.data(), pred.size()), std::span<const double>(gt.data(), gt.size()),
              max_val);
}
inline double psnr(const ImageSignal& pred, const ImageSignal& gt, double max_val = 1.0) {
  pred.require_same_shape(gt);
  return psnr(pred.values, gt.values, max_val);
}

/// Single-scale SSIM of two planes: 11x11 Gaussian window (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, dynamic range 1, mean over valid window positions.
double ssim_plane(const Matrix& pred, const Matrix& gt);
/// Mean of the per-channel SSIM.
double ssim(const ImageSignal& pred, const ImageSignal& gt);

/// pred is binarized at `threshold` (>=), gt at 0.5. Both empty gives 1.
double iou(const Vector& pred, const Vector& gt, double threshold = 0.5);
inline double iou(const OccupancyVolume& pred, const OccupancyVolume& gt, double threshold = 0.5) {
  if (pred.dims != gt.dims) throw ShapeError("iou: volume resolutions differ");
  return iou(pred.values, gt.values, threshold);
}

}  // namespace incode::signals
