#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "incode/ct/ct_fit.hpp"
#include "incode/ct/radon.hpp"
#include "incode/signals/synthetic.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace incode;
using namespace incode::ct;

namespace {

Matrix random_plane(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

double dot(const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); }

}  // namespace

TEST(Radon, DefaultBinsCoverDiagonal) {
  EXPECT_EQ(default_bins(64), 91);
  EXPECT_EQ(default_bins(32), 46);
  EXPECT_EQ(uniform_angles(4)[2], std::numbers::pi / 2);
}

TEST(Radon, ZeroImageGivesZeroSinogram) {
  EXPECT_TRUE(radon(Matrix::Zero(16, 16), uniform_angles(7)).isZero(0.0));
}

TEST(Radon, DiskRowsAgreeAcrossAngles) {
  const Matrix disk = signals::disk_image(48, 15.0).plane(0);
  const std::vector<double> grid_angles{0.0, std::numbers::pi / 2};
  const Matrix axis = radon(disk, grid_angles);
  EXPECT_LT((axis.row(0) - axis.row(1)).cwiseAbs().maxCoeff(), 1e-6);

  // Mirror symmetry of the disk: row(theta) is row(pi - theta) reversed.
  const Matrix pair = radon(disk, {0.3, std::numbers::pi - 0.3});
  EXPECT_LT((pair.row(0) - pair.row(1).reverse()).cwiseAbs().maxCoeff(), 1e-9);

  // At off-grid angles bilinear resampling blurs the rim differently, so rows
  // agree only approximately; inside the disk they stay within 3%.
  const Matrix any = radon(disk, uniform_angles(12));
  const int bins = static_cast<int>(any.cols());
  for (Eigen::Index a = 1; a < any.rows(); ++a)
    for (int b = 0; b < bins; ++b)
      if (std::abs(b - 0.5 * (bins - 1)) <= 0.9 * 15.0) {
        EXPECT_NEAR(any(a, b), any(0, b), 0.03 * any(0, b));
      }
}

TEST(Radon, DiskProfileMatchesChordLength) {
  // Near-unit disk on a 64 grid; the rim band (outer 10% of the radius) is
  // excluded because bilinear sampling smears the edge there.
  const int n = 64;
  const double r = 30.0;
  const Matrix sino = radon(signals::disk_image(n, r).plane(0), uniform_angles(6));
  const int bins = static_cast<int>(sino.cols());
  for (Eigen::Index a = 0; a < sino.rows(); ++a)
    for (int b = 0; b < bins; ++b) {
      const double s = b - 0.5 * (bins - 1);
      if (std::abs(s) > 0.9 * r) continue;
      const double chord = 2.0 * std::sqrt(r * r - s * s);
      EXPECT_LT(std::abs(sino(a, b) - chord) / chord, 0.02) << "angle " << a << " s " << s;
    }
}

TEST(Radon, AdjointDotProductTest) {
  const auto angles = uniform_angles(17);
  for (Exec exec : {Exec::serial, Exec::parallel}) {
    const Matrix x = random_plane(21, 21, 1);
    const Matrix y = random_plane(17, default_bins(21), 2);
    const double lhs = dot(radon(x, angles, 0, exec), y);
    const double rhs = dot(x, radon_adjoint(y, angles, 21, exec));
    EXPECT_LT(std::abs(lhs - rhs) / std::abs(lhs), 1e-12);
  }
}

TEST(Radon, AdjointOfZeroAndSingleCell) {
  const auto angles = uniform_angles(5);
  const int n = 24, bins = default_bins(n);
  EXPECT_TRUE(radon_adjoint(Matrix::Zero(5, bins), angles, n).isZero(0.0));

  Matrix one = Matrix::Zero(5, bins);
  const int a = 2, b = 20;
  one(a, b) = 1.0;
  const Matrix img = radon_adjoint(one, angles, n);
  const double s = b - 0.5 * (bins - 1), c = 0.5 * (n - 1);
  int support = 0;
  for (int r = 0; r < n; ++r)
    for (int col = 0; col < n; ++col) {
      if (img(r, col) == 0.0) continue;
      ++support;
      const double x = col - c, y = c - r;
      const double distance = std::abs(x * std::cos(angles[a]) + y * std::sin(angles[a]) - s);
      EXPECT_LT(distance, std::numbers::sqrt2);
    }
  EXPECT_GT(support, 0);
  EXPECT_LE(support, 4 * bins);
}

TEST(Radon, Linearity) {
  const auto angles = uniform_angles(9);
  const Matrix x = random_plane(20, 20, 3), y = random_plane(20, 20, 4);
  const Matrix lhs = radon(Matrix(1.7 * x - 0.6 * y), angles);
  const Matrix rhs = 1.7 * radon(x, angles) - 0.6 * radon(y, angles);
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Radon, MassConsistencyInsideInscribedCircle) {
  const Matrix phantom = signals::ellipse_phantom(64).plane(0);
  const double mass = phantom.sum();
  const Matrix sino = radon(phantom, uniform_angles(30));
  for (Eigen::Index a = 0; a < sino.rows(); ++a) EXPECT_NEAR(sino.row(a).sum(), mass, 0.005 * mass);
}

TEST(Radon, SerialAndParallelAgree) {
  const auto angles = uniform_angles(40);
  const Matrix x = random_plane(30, 30, 5);
  EXPECT_EQ(radon(x, angles, 0, Exec::serial), radon(x, angles, 0, Exec::parallel));
  const Matrix y = random_plane(40, default_bins(30), 6);
  EXPECT_LT((radon_adjoint(y, angles, 30, Exec::serial) - radon_adjoint(y, angles, 30, Exec::parallel))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(Radon, NonSquareIsZeroPadded) {
  Matrix wide = Matrix::Zero(10, 14);
  wide(5, 7) = 1.0;
  const Sinogram s = radon_transform(wide, uniform_angles(3));
  Matrix square = Matrix::Zero(14, 14);
  square(7, 7) = 1.0;
  EXPECT_EQ(s.values, radon(square, uniform_angles(3)));
  EXPECT_THROW(radon(wide, uniform_angles(3)), ShapeError);
}

TEST(Sinogram, CsvRoundTrip) {
  const Sinogram s = radon_transform(random_plane(12, 12, 7), uniform_angles(5));
  const fs::path path = fs::temp_directory_path() / "incode_ct_test.csv";
  save_sinogram(s, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("# angles=0,", 0), 0u);
  EXPECT_NE(header.find(" bins=17"), std::string::npos);
  const Sinogram back = load_sinogram(path);
  EXPECT_EQ(back.angles, s.angles);
  EXPECT_EQ(back.values, s.values);
}

TEST(Sinogram, ValidationAndBadFiles) {
  Sinogram s{{0.5, 0.2}, 3, Matrix::Zero(2, 3)};
  EXPECT_THROW(s.validate(), ShapeError);
  const fs::path path = fs::temp_directory_path() / "incode_ct_bad.csv";
  std::ofstream(path) << "0,1,2\n";
  EXPECT_THROW(load_sinogram(path), FormatError);
}

TEST(SinogramLoss, GradientMatchesFiniteDifferences) {
  CtProblem problem{radon_transform(random_plane(8, 8, 8), uniform_angles(6)), 8, {}};
  const train::CustomLoss loss = sinogram_loss(problem);
  Matrix pred = random_plane(64, 1, 9);
  Matrix grad;
  loss(pred, &grad);
  for (Eigen::Index i = 0; i < pred.size(); i += 5) {
    const double fd = incode::testing::central_difference([&] { return loss(pred, nullptr); }, &pred(i, 0));
    EXPECT_LT(incode::testing::relative_error(grad(i, 0), fd), 1e-6);
  }
}

TEST(SinogramLoss, InvariantToAnglePermutation) {
  const Matrix image = random_plane(16, 16, 10), truth = random_plane(16, 16, 11);
  std::vector<double> angles = uniform_angles(8);
  const double base = (radon(image, angles) - radon(truth, angles)).squaredNorm();
  std::reverse(angles.begin(), angles.end());
  std::swap(angles[1], angles[5]);
  const double permuted = (radon(image, angles) - radon(truth, angles)).squaredNorm();
  EXPECT_NEAR(permuted, base, 1e-12 * base);
}

TEST(CtFit, ConstantImageConverges) {
  signals::ImageSignal constant(32, 32, 1);
  constant.values.setConstant(0.6);
  CtProblem problem{radon_transform(constant.plane(0), uniform_angles(30)), 32, constant};
  train::BundleConfig cfg;
  cfg.composer = {2, 1, 3, 64, 30.0, 30.0};
  cfg.harmonizer = cond::HarmonizerConfig::image_profile();
  train::ModelBundle model = train::ModelBundle::create(cfg, 4);
  const double initial = train::evaluate_objective(model, ct_dataset(problem), {}, {65536, false, sinogram_loss(problem)})
                             .data_loss;
  train::TrainConfig t = ct_train_defaults();
  t.epochs = 300;
  t.lr0 = 1e-3;
  const CtResult r = ct_fit(problem, model, t);
  EXPECT_LT(r.log.back().loss, 1e-4 * initial);
  EXPECT_EQ(r.reconstruction.height, 32);
  EXPECT_GT(r.log.back().psnr, 20.0);
}

TEST(CtFit, DefaultsFromTask) {
  const auto t = ct_train_defaults();
  EXPECT_EQ(t.epochs, 2000);
  EXPECT_EQ(t.lr0, 2e-4);
  EXPECT_EQ(t.alpha, 0.4);
}
