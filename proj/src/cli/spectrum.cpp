#include "incode/cli/spectrum.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include <fftw3.h>

namespace incode::cli {

Vector amplitude_spectrum(std::span<const double> signal) {
  const int n = static_cast<int>(signal.size());
  if (n < 2) throw ShapeError("spectrum: need at least 2 samples");
  std::vector<double> in(signal.begin(), signal.end());
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  Vector mag(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) mag(k) = std::abs(out[k]);
  return mag;
}

Vector mean_unit_spectrum(const Matrix& responses) {
  if (responses.rows() < 2 || responses.cols() < 1) throw ShapeError("spectrum: empty response matrix");
  Vector total = Vector::Zero(responses.rows() / 2 + 1);
  std::vector<double> column(responses.rows());
  for (Eigen::Index j = 0; j < responses.cols(); ++j) {
    const double mean = responses.col(j).mean();
    for (Eigen::Index i = 0; i < responses.rows(); ++i) column[i] = responses(i, j) - mean;
    total += amplitude_spectrum(column);
  }
  return total / static_cast<double>(responses.cols());
}

double energy_fraction_above(const Vector& spectrum, double cutoff) {
  if (spectrum.size() < 2) throw ShapeError("spectrum: need at least 2 bins");
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw ConfigError("spectrum: cutoff must be in (0, 1)");
  const Eigen::Index nyquist = spectrum.size() - 1;
  const auto first = static_cast<Eigen::Index>(std::ceil(cutoff * static_cast<double>(nyquist)));
  double above = 0.0, total = 0.0;
  for (Eigen::Index k = 1; k <= nyquist; ++k) {
    const double e = spectrum(k) * spectrum(k);
    total += e;
    if (k >= first) above += e;
  }
  return total > 0.0 ? above / total : 0.0;
}

}  // namespace incode::cli
