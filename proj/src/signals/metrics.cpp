#include "incode/signals/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace incode::signals {
namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

std::array<double, kWindow> gaussian_window() {
  std::array<double, kWindow> g{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double x = i - kWindow / 2;
    g[i] = std::exp(-x * x / (2.0 * kSigma * kSigma));
    sum += g[i];
  }
  for (double& v : g) v /= sum;
  return g;
}

// Valid-mode separable Gaussian filter.
Matrix filter_valid(const Matrix& x, const std::array<double, kWindow>& g) {
  const Eigen::Index h = x.rows(), w = x.cols();
  const Eigen::Index ow = w - kWindow + 1, oh = h - kWindow + 1;
  Matrix rows(h, ow);
#pragma omp parallel for schedule(static)
  for (Eigen::Index r = 0; r < h; ++r)
    for (Eigen::Index c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += g[k] * x(r, c + k);
      rows(r, c) = acc;
    }
  Matrix out(oh, ow);
#pragma omp parallel for schedule(static)
  for (Eigen::Index r = 0; r < oh; ++r)
    for (Eigen::Index c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += g[k] * rows(r + k, c);
      out(r, c) = acc;
    }
  return out;
}

}  // namespace

double mse(std::span<const double> pred, std::span<const double> gt) {
  if (pred.size() != gt.size()) throw ShapeError("mse: sizes differ");
  if (pred.empty()) throw ShapeError("mse: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - gt[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

double psnr(std::span<const double> pred, std::span<const double> gt, double max_val) {
  const double err = mse(pred, gt);
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_val * max_val / err);
}

double ssim_plane(const Matrix& pred, const Matrix& gt) {
  if (pred.rows() != gt.rows() || pred.cols() != gt.cols()) throw ShapeError("ssim: shapes differ");
  if (pred.rows() < kWindow || pred.cols() < kWindow)
    throw ShapeError("ssim: image smaller than the 11x11 window");
  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const auto g = gaussian_window();
  const Matrix mx = filter_valid(pred, g);
  const Matrix my = filter_valid(gt, g);
  const Matrix xx = filter_valid(pred.cwiseProduct(pred), g);
  const Matrix yy = filter_valid(gt.cwiseProduct(gt), g);
  const Matrix xy = filter_valid(pred.cwiseProduct(gt), g);
  double total = 0.0;
  for (Eigen::Index i = 0; i < mx.size(); ++i) {
    const double ux = mx.data()[i], uy = my.data()[i];
    const double vx = xx.data()[i] - ux * ux, vy = yy.data()[i] - uy * uy;
    const double cxy = xy.data()[i] - ux * uy;
    total += ((2.0 * ux * uy + c1) * (2.0 * cxy + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(mx.size());
}

double ssim(const ImageSignal& pred, const ImageSignal& gt) {
  pred.require_same_shape(gt);
  double sum = 0.0;
  for (int ch = 0; ch < pred.channels; ++ch) sum += ssim_plane(pred.plane(ch), gt.plane(ch));
  return sum / pred.channels;
}

double iou(const Vector& pred, const Vector& gt, double threshold) {
  if (pred.size() != gt.size()) throw ShapeError("iou: sizes differ");
  Eigen::Index inter = 0, uni = 0;
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    const bool p = pred(i) >= threshold, q = gt(i) >= 0.5;
    inter += p && q;
    uni += p || q;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace incode::signals
