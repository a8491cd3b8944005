#include "incode/signals/mask.hpp"

#include <algorithm>
#include <numeric>

#include "incode/signals/image.hpp"

namespace incode::signals {

std::size_t SampleMask::count() const {
  return static_cast<std::size_t>(std::count(keep.begin(), keep.end(), std::uint8_t{1}));
}

double SampleMask::fraction() const {
  return keep.empty() ? 0.0 : static_cast<double>(count()) / static_cast<double>(keep.size());
}

SampleMask random_mask(const std::vector<int>& dims, double fraction, Rng& rng) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("random_mask: fraction must be in (0, 1]");
  std::size_t total = 1;
  for (int n : dims) {
    if (n < 1) throw ConfigError("random_mask: dimensions must be positive");
    total *= static_cast<std::size_t>(n);
  }
  SampleMask mask{dims, std::vector<std::uint8_t>(total, 1)};
  if (fraction == 1.0) return mask;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& k : mask.keep) k = u(rng) < fraction ? 1 : 0;
  return mask;
}

void save_mask_png(const SampleMask& mask, const std::filesystem::path& path) {
  if (mask.dims.size() != 2) throw ShapeError("save_mask_png: mask must be 2-D");
  ImageSignal image(mask.dims[0], mask.dims[1], 1);
  for (std::size_t i = 0; i < mask.keep.size(); ++i) image.values(static_cast<Eigen::Index>(i), 0) = mask.keep[i];
  save_png(image, path);
}

SampleMask load_mask_png(const std::filesystem::path& path) {
  const ImageSignal image = to_gray(load_png(path));
  SampleMask mask{{image.height, image.width}, std::vector<std::uint8_t>(image.pixels())};
  for (Eigen::Index i = 0; i < image.pixels(); ++i) mask.keep[i] = image.values(i, 0) >= 0.5 ? 1 : 0;
  return mask;
}

}  // namespace incode::signals
