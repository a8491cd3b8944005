#include "incode/conditioning/mfcc.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

namespace incode::cond {

void MfccConfig::validate() const {
  if (frame_length < 2 || hop_length < 1 || mel_bands < 1 || coefficients < 1 || output_dim < 1)
    throw ConfigError("mfcc: frame, hop, band, coefficient and output sizes must be positive");
  if (coefficients > mel_bands) throw ConfigError("mfcc: more coefficients than mel bands");
  if (!(log_floor > 0.0)) throw ConfigError("mfcc: log floor must be positive");
}

namespace {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

struct FftwPlan {
  fftw_plan plan;
  ~FftwPlan() { fftw_destroy_plan(plan); }
};

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

Matrix mel_filterbank(double sample_rate, const MfccConfig& config) {
  if (!(sample_rate > 0.0)) throw ConfigError("mfcc: sample rate must be positive");
  config.validate();
  const int bins = config.frame_length / 2 + 1;
  const double mel_max = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(config.mel_bands + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(mel_max * static_cast<double>(i) / (config.mel_bands + 1));

  Matrix bank = Matrix::Zero(config.mel_bands, bins);
  for (int m = 0; m < config.mel_bands; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = k * sample_rate / config.frame_length;
      if (f > lo && f < hi)
        bank(m, k) = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
    }
  }
  return bank;
}

Matrix mfcc_frames(std::span<const double> audio, double sample_rate, const MfccConfig& config) {
  if (!(sample_rate > 0.0)) throw ConfigError("mfcc: sample rate must be positive");
  if (audio.empty()) throw ConfigError("mfcc: audio is empty");
  config.validate();
  const int n = config.frame_length;
  const int bins = n / 2 + 1;
  const Eigen::Index total = static_cast<Eigen::Index>(audio.size());
  const Eigen::Index frames = total <= n ? 1 : 1 + (total - n) / config.hop_length;

  std::vector<double> window(n);
  for (int i = 0; i < n; ++i)
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);  // periodic Hann

  std::unique_ptr<double, FftwDeleter> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  std::unique_ptr<fftw_complex, FftwDeleter> out(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
  const FftwPlan plan{fftw_plan_dft_r2c_1d(n, in.get(), out.get(), FFTW_ESTIMATE)};

  const Matrix bank = mel_filterbank(sample_rate, config);
  const int mels = config.mel_bands;
  // Orthonormal DCT-II basis [coefficients x mels].
  Matrix dct(config.coefficients, mels);
  for (int k = 0; k < config.coefficients; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / mels);
    for (int m = 0; m < mels; ++m)
      dct(k, m) = scale * std::cos(std::numbers::pi * k * (2.0 * m + 1.0) / (2.0 * mels));
  }

  Matrix result(frames, config.coefficients);
  Vector power(bins);
  for (Eigen::Index f = 0; f < frames; ++f) {
    const Eigen::Index start = f * config.hop_length;
    for (int i = 0; i < n; ++i) {
      const Eigen::Index idx = start + i;
      in.get()[i] = idx < total ? audio[static_cast<std::size_t>(idx)] * window[i] : 0.0;
    }
    fftw_execute(plan.plan);
    for (int k = 0; k < bins; ++k)
      power(k) = out.get()[k][0] * out.get()[k][0] + out.get()[k][1] * out.get()[k][1];
    const Vector mel = bank * power;
    const Vector log_mel = mel.unaryExpr([&](double v) { return std::log(std::max(v, config.log_floor)); });
    result.row(f) = (dct * log_mel).transpose();
  }
  return result;
}

Vector mfcc_extract(std::span<const double> audio, double sample_rate, const MfccConfig& config) {
  const Matrix frames = mfcc_frames(audio, sample_rate, config);
  Vector latent = Vector::Zero(config.output_dim);
  const Vector mean = frames.colwise().mean().transpose();
  const Eigen::Index keep = std::min<Eigen::Index>(mean.size(), config.output_dim);
  latent.head(keep) = mean.head(keep);
  return latent;
}

}  // namespace incode::cond
