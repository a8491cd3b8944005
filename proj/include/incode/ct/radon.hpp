#pragma once

#include <filesystem>
#include <vector>

#include "incode/common.hpp"
#include "incode/nn/composer.hpp"

namespace incode::ct {

using nn::Exec;

/// Parallel-beam sinogram: one row per projection angle.
struct Sinogram {
  std::vector<double> angles;  ///< radians, strictly increasing in [0, pi)
  int bins = 0;
  Matrix values;  ///< [angles x bins]

  void validate() const;
};

/// count angles k*pi/count, k = 0..count-1.
std::vector<double> uniform_angles(int count);

/// ceil(n * sqrt(2)): every ray through the n x n image hits the detector.
int default_bins(int n);

/// Line integrals of a square image. Detector offset s and ray position t
/// both run over (k - (bins-1)/2) for k = 0..bins-1 in pixel units, centered
/// on the image center; the ray for angle theta is
/// s*(cos theta, sin theta) + t*(-sin theta, cos theta) with y pointing up.
/// The image is sampled bilinearly (zero outside) at unit steps of t.
Matrix radon(const Matrix& image, const std::vector<double>& angles, int bins = 0, Exec exec = Exec::parallel);
/// Exact transpose of `radon` for an n x n image.
Matrix radon_adjoint(const Matrix& sinogram, const std::vector<double>& angles, int n, Exec exec = Exec::parallel);

/// Zero-pads a non-square plane to square (extra row/column at the end when
/// the difference is odd), then applies radon.
Sinogram radon_transform(const Matrix& image, const std::vector<double>& angles, int bins = 0);

/// CSV rows of the sinogram after a `# angles=<comma list> bins=<n>` header.
void save_sinogram(const Sinogram& sino, const std::filesystem::path& path);
Sinogram load_sinogram(const std::filesystem::path& path);

/// Adds N(0, sigma^2) to every detector reading.
Sinogram add_detector_noise(const Sinogram& sino, double sigma, Rng& rng);

}  // namespace incode::ct
