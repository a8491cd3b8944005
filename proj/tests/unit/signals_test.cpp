#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "incode/signals/audio.hpp"
#include "incode/signals/grid.hpp"
#include "incode/signals/image.hpp"
#include "incode/signals/mask.hpp"
#include "incode/signals/metrics.hpp"
#include "incode/signals/synthetic.hpp"
#include "incode/signals/volume.hpp"

namespace fs = std::filesystem;
using namespace incode;
using namespace incode::signals;

namespace {

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "incode_signals_test";
  fs::create_directories(dir);
  return dir / name;
}

ImageSignal random_image(int h, int w, int c, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ImageSignal img(h, w, c);
  for (Eigen::Index i = 0; i < img.values.size(); ++i) img.values.data()[i] = u(rng);
  return img;
}

// Brute-force SSIM: full 2-D Gaussian window at every valid position.
double ssim_reference(const Matrix& x, const Matrix& y) {
  double w[11][11];
  double sum = 0.0;
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 11; ++j) {
      w[i][j] = std::exp(-((i - 5.0) * (i - 5.0) + (j - 5.0) * (j - 5.0)) / (2.0 * 1.5 * 1.5));
      sum += w[i][j];
    }
  const double c1 = 1e-4, c2 = 9e-4;
  double total = 0.0;
  int count = 0;
  for (Eigen::Index r = 0; r + 11 <= x.rows(); ++r)
    for (Eigen::Index c = 0; c + 11 <= x.cols(); ++c) {
      double mx = 0, my = 0;
      for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
          mx += w[i][j] / sum * x(r + i, c + j);
          my += w[i][j] / sum * y(r + i, c + j);
        }
      double vx = 0, vy = 0, cxy = 0;
      for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
          const double dx = x(r + i, c + j) - mx, dy = y(r + i, c + j) - my;
          vx += w[i][j] / sum * dx * dx;
          vy += w[i][j] / sum * dy * dy;
          cxy += w[i][j] / sum * dx * dy;
        }
      total += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++count;
    }
  return total / count;
}

}  // namespace

TEST(MakeGrid, Endpoints) {
  EXPECT_EQ(make_grid({2}).coords, (Matrix(2, 1) << -1, 1).finished());
  EXPECT_EQ(make_grid({3}).coords, (Matrix(3, 1) << -1, 0, 1).finished());
}

TEST(MakeGrid, RowMajorOrder) {
  const auto g = make_grid({2, 2});
  ASSERT_EQ(g.points(), 4);
  EXPECT_EQ(g.coords.row(0), (Eigen::RowVector2d(-1, -1)));
  EXPECT_EQ(g.coords.row(1), (Eigen::RowVector2d(-1, 1)));
  EXPECT_EQ(g.coords.row(3), (Eigen::RowVector2d(1, 1)));
}

TEST(MakeGrid, SymmetricUnderNegationAndReversal) {
  const auto g = make_grid({5, 4, 3});
  const Eigen::Index n = g.points();
  for (Eigen::Index p = 0; p < n; ++p)
    for (Eigen::Index a = 0; a < 3; ++a) EXPECT_NEAR(g.coords(p, a), -g.coords(n - 1 - p, a), 1e-15);
}

TEST(MakeGrid, RejectsShortAxis) { EXPECT_THROW(make_grid({4, 1}), ConfigError); }

TEST(SensorNoise, ZeroSignalNoReadoutIsZero) {
  ImageSignal img(4, 4, 1);
  Rng rng(1);
  EXPECT_EQ(add_sensor_noise(img, 40, 0, rng).values, img.values);
}

TEST(SensorNoise, MeanAndVarianceMatchPoissonModel) {
  const double x = 0.37, tau = 40, ro = 2;
  const int n = 100000;
  ImageSignal img(1, n, 1);
  img.values.setConstant(x);
  Rng rng(7);
  const ImageSignal y = add_sensor_noise(img, tau, ro, rng);
  const double mean = y.values.mean();
  const double var = (y.values.array() - mean).square().sum() / (n - 1);
  const double expected_mean = x + ro / tau;
  const double expected_var = (tau * x + ro) / (tau * tau);
  EXPECT_NEAR(mean, expected_mean, 3.0 * std::sqrt(expected_var / n));
  // tau*y has variance tau*x + ro; the sample variance has relative SE ~ sqrt(2/n).
  EXPECT_NEAR(tau * tau * var, tau * x + ro, 4.0 * (tau * x + ro) * std::sqrt(2.0 / n) * 1.5);
}

TEST(SensorNoise, DeterministicAndValidated) {
  const ImageSignal img = random_image(8, 8, 3, 3);
  Rng a(5), b(5);
  EXPECT_EQ(add_sensor_noise(img, 10, 2, a).values, add_sensor_noise(img, 10, 2, b).values);
  EXPECT_THROW(add_sensor_noise(img, 0, 2, a), ConfigError);
}

TEST(Downsample, IdentityConstantAndBlockMean) {
  const ImageSignal img = random_image(6, 6, 3, 9);
  EXPECT_EQ(downsample(img, 1).values, img.values);
  ImageSignal flat(8, 8, 1);
  flat.values.setConstant(0.25);
  EXPECT_EQ(downsample(flat, 4).values, Matrix::Constant(4, 1, 0.25));
  ImageSignal block(2, 2, 1);
  block.values << 0, 0, 1, 1;
  EXPECT_EQ(downsample(block, 2).values(0, 0), 0.5);
}

TEST(Downsample, CropsToDivisibleRegion) {
  const ImageSignal img = random_image(7, 9, 1, 2);
  const ImageSignal d = downsample(img, 2);
  EXPECT_EQ(d.height, 3);
  EXPECT_EQ(d.width, 4);
  EXPECT_DOUBLE_EQ(d.at(2, 3, 0), (img.at(4, 6, 0) + img.at(4, 7, 0) + img.at(5, 6, 0) + img.at(5, 7, 0)) / 4);
}

TEST(Downsample, ReplicationNeverWidensRange) {
  const ImageSignal img = random_image(16, 16, 1, 4);
  const ImageSignal round = upsample_nearest(downsample(img, 4), 4);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c) {
      EXPECT_LE(round.at(r, c, 0), img.values.maxCoeff());
      EXPECT_GE(round.at(r, c, 0), img.values.minCoeff());
    }
}

TEST(RandomMask, FullFractionAndDeterminism) {
  Rng rng(1);
  EXPECT_EQ(random_mask({10, 10}, 1.0, rng).count(), 100u);
  Rng a(3), b(3);
  EXPECT_EQ(random_mask({32, 32}, 0.2, a).keep, random_mask({32, 32}, 0.2, b).keep);
  EXPECT_THROW(random_mask({4}, 0.0, rng), ConfigError);
  EXPECT_THROW(random_mask({4}, 1.5, rng), ConfigError);
}

TEST(RandomMask, BinomialBound) {
  Rng rng(11);
  const auto mask = random_mask({1000, 1000}, 0.2, rng);
  EXPECT_NEAR(static_cast<double>(mask.count()), 0.2e6, 3.0 * std::sqrt(0.16e6));
}

TEST(Psnr, KnownValues) {
  Matrix gt = Matrix::Constant(4, 3, 0.5);
  EXPECT_EQ(psnr(gt, gt), std::numeric_limits<double>::infinity());
  EXPECT_NEAR(psnr(Matrix(gt.array() + 0.1), gt), 20.0, 1e-12);
  EXPECT_NEAR(psnr(Matrix(gt.array() - 0.01), gt), 40.0, 1e-12);
  EXPECT_THROW(psnr(Matrix(2, 2), Matrix(2, 3)), ShapeError);
}

TEST(Psnr, MseDuality) {
  const ImageSignal a = random_image(9, 9, 1, 1), b = random_image(9, 9, 1, 2);
  EXPECT_DOUBLE_EQ(psnr(a, b), -10.0 * std::log10(mse(a.values, b.values)));
}

TEST(Ssim, IdenticalIsOne) {
  const ImageSignal img = random_image(20, 24, 3, 5);
  EXPECT_NEAR(ssim(img, img), 1.0, 1e-12);
}

TEST(Ssim, InvertedBinaryIsNegative) {
  ImageSignal img(24, 24, 1);
  for (int r = 0; r < 24; ++r)
    for (int c = 0; c < 24; ++c) img.at(r, c, 0) = ((r / 3 + c / 3) % 2) ? 1.0 : 0.0;
  ImageSignal inv = img;
  inv.values = (1.0 - img.values.array()).matrix();
  EXPECT_LT(ssim(inv, img), 0.0);
}

TEST(Ssim, MatchesBruteForceReference) {
  const ImageSignal a = random_image(23, 19, 1, 8);
  ImageSignal b = a;
  Rng rng(2);
  std::normal_distribution<double> n(0.0, 0.1);
  for (Eigen::Index i = 0; i < b.values.size(); ++i) b.values.data()[i] += n(rng);
  EXPECT_NEAR(ssim_plane(a.plane(0), b.plane(0)), ssim_reference(a.plane(0), b.plane(0)), 1e-6);
}

TEST(Ssim, RejectsSmallImage) {
  const ImageSignal img = random_image(10, 30, 1, 1);
  EXPECT_THROW(ssim(img, img), ShapeError);
}

TEST(Iou, Cases) {
  Vector a = Vector::Zero(4), b = Vector::Zero(4);
  EXPECT_EQ(iou(a, b), 1.0);
  a << 1, 1, 0, 0;
  b << 0, 0, 1, 1;
  EXPECT_EQ(iou(a, b), 0.0);
  EXPECT_EQ(iou(a, a), 1.0);
  b << 0, 1, 1, 0;
  EXPECT_DOUBLE_EQ(iou(a, b), 1.0 / 3.0);
  EXPECT_THROW(iou(Vector(3), Vector(4)), ShapeError);
}

TEST(ImageIo, PngRoundTripWithinQuantization) {
  for (int channels : {1, 3}) {
    const ImageSignal img = random_image(13, 17, channels, 21);
    const auto path = temp_path("round_trip.png");
    save_png(img, path);
    const ImageSignal back = load_png(path);
    back.require_same_shape(img);
    EXPECT_LE((back.values - img.values).cwiseAbs().maxCoeff(), 1.0 / 255.0);
  }
}

TEST(ImageIo, MissingFileIsIoError) { EXPECT_THROW(load_png(temp_path("missing.png")), IoError); }

TEST(ImageIo, BundledFixturesLoad) {
  const ImageSignal img = load_png(fs::path(INCODE_DATA_DIR) / "astronaut_64.png");
  EXPECT_EQ(img.height, 64);
  EXPECT_EQ(img.width, 64);
  EXPECT_EQ(img.channels, 3);
}

TEST(AudioIo, WavRoundTripWithinQuantization) {
  AudioSignal audio = test_tone(8000, 0.25);
  audio.samples(0) = -1.0;
  audio.samples(1) = 1.0;
  const auto path = temp_path("round_trip.wav");
  save_wav(audio, path);
  const AudioSignal back = load_wav(path);
  EXPECT_EQ(back.sample_rate, 8000);
  ASSERT_EQ(back.samples.size(), audio.samples.size());
  EXPECT_LE((back.samples - audio.samples).cwiseAbs().maxCoeff(), 1.0 / 32767.0);
}

TEST(AudioIo, RejectsGarbage) {
  const auto path = temp_path("garbage.wav");
  std::ofstream(path) << "not a wav file at all";
  EXPECT_THROW(load_wav(path), FormatError);
}

TEST(VolumeIo, RoundTripExact) {
  const OccupancyVolume v = torus_volume(12, 0.5, 0.2);
  const auto path = temp_path("torus.raw");
  save_volume(v, path);
  const OccupancyVolume back = load_volume(path);
  EXPECT_EQ(back.dims, v.dims);
  EXPECT_EQ(back.values, v.values);
}

TEST(Synthetic, SphereVolumeFraction) {
  const OccupancyVolume v = sphere_volume(32, 0.6);
  const double fraction = v.values.mean();
  const double h = 2.0 / 31.0;  // voxel pitch of a 32-point linspace over [-1, 1]
  const double expected = 4.0 / 3.0 * M_PI * 0.6 * 0.6 * 0.6 / std::pow(32 * h, 3);
  EXPECT_NEAR(fraction, expected, 0.03 * expected);
}

TEST(Synthetic, PhantomInsideInscribedCircle) {
  const ImageSignal p = ellipse_phantom(64);
  EXPECT_GE(p.values.minCoeff(), 0.0);
  EXPECT_LE(p.values.maxCoeff(), 1.0);
  EXPECT_GT(p.values.maxCoeff(), 0.9);
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c) {
      const double y = (r - 31.5) / 32, x = (c - 31.5) / 32;
      if (x * x + y * y > 1.0) {
        EXPECT_EQ(p.at(r, c, 0), 0.0);
      }
    }
}

TEST(Synthetic, ChirpStartsSlow) {
  const Vector s = chirp(1024, 2, 100);
  EXPECT_EQ(s(0), 0.0);
  EXPECT_LE(s.cwiseAbs().maxCoeff(), 1.0);
}
