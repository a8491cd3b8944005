#include "incode/ct/radon.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "incode/training/fit.hpp"

namespace incode::ct {
namespace {

// Calls f(pixel_index, weight) for every bilinear tap along one ray. Both
// radon and its adjoint use this walk, which makes them exact transposes.
template <class F>
inline void walk_ray(int n, int bins, double cos_t, double sin_t, int bin, F&& f) {
  const double half = 0.5 * (bins - 1);
  const double center = 0.5 * (n - 1);
  const double s = bin - half;
  // Taps can only land on pixels when the sample is within this radius of
  // the center; skipping the rest does not change the result.
  const double reach = (n - 1) * std::numbers::sqrt2 / 2 + 1.5;
  if (std::abs(s) > reach) return;
  const double t_max = std::sqrt(reach * reach - s * s);
  const int j_begin = std::max(0, static_cast<int>(std::ceil(half - t_max)));
  const int j_end = std::min(bins - 1, static_cast<int>(std::floor(half + t_max)));
  for (int j = j_begin; j <= j_end; ++j) {
    const double t = j - half;
    const double col = s * cos_t - t * sin_t + center;
    const double row = center - (s * sin_t + t * cos_t);
    const double c0f = std::floor(col), r0f = std::floor(row);
    if (c0f < -1.0 || r0f < -1.0 || c0f >= n || r0f >= n) continue;
    const int c0 = static_cast<int>(c0f), r0 = static_cast<int>(r0f);
    const double fc = col - c0f, fr = row - r0f;
    const double w[4] = {(1 - fr) * (1 - fc), (1 - fr) * fc, fr * (1 - fc), fr * fc};
    if (c0 >= 0 && r0 >= 0 && c0 < n - 1 && r0 < n - 1) {
      const Eigen::Index i = static_cast<Eigen::Index>(r0) * n + c0;
      f(i, w[0]);
      f(i + 1, w[1]);
      f(i + n, w[2]);
      f(i + n + 1, w[3]);
      continue;
    }
    const int rr[4] = {r0, r0, r0 + 1, r0 + 1};
    const int cc[4] = {c0, c0 + 1, c0, c0 + 1};
    for (int k = 0; k < 4; ++k)
      if (rr[k] >= 0 && rr[k] < n && cc[k] >= 0 && cc[k] < n)
        f(static_cast<Eigen::Index>(rr[k]) * n + cc[k], w[k]);
  }
}

void project_angle(const Matrix& image, int bins, double theta, double* row_out) {
  const int n = static_cast<int>(image.rows());
  const double* px = image.data();
  const double c = std::cos(theta), s = std::sin(theta);
  for (int b = 0; b < bins; ++b) {
    double acc = 0.0;
    walk_ray(n, bins, c, s, b, [&](Eigen::Index i, double w) { acc += w * px[i]; });
    row_out[b] = acc;
  }
}

void backproject_angle(const double* row, int bins, double theta, int n, double* image) {
  const double c = std::cos(theta), s = std::sin(theta);
  for (int b = 0; b < bins; ++b) {
    const double v = row[b];
    if (v == 0.0) continue;
    walk_ray(n, bins, c, s, b, [&](Eigen::Index i, double w) { image[i] += w * v; });
  }
}

// Angle groups depend only on the number of angles, so the reduction order
// (and the result) is independent of the thread count.
int angle_groups(std::size_t angles) { return static_cast<int>(std::clamp<std::size_t>(angles / 4, 1, 16)); }

}  // namespace

void Sinogram::validate() const {
  if (angles.empty()) throw ShapeError("sinogram: no angles");
  if (bins < 1) throw ShapeError("sinogram: bins must be >= 1");
  if (values.rows() != static_cast<Eigen::Index>(angles.size()) || values.cols() != bins)
    throw ShapeError("sinogram: values do not match angles x bins");
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (!(angles[i] >= 0.0 && angles[i] < std::numbers::pi)) throw ShapeError("sinogram: angle outside [0, pi)");
    if (i > 0 && !(angles[i] > angles[i - 1])) throw ShapeError("sinogram: angles must be strictly increasing");
  }
}

std::vector<double> uniform_angles(int count) {
  if (count < 1) throw ConfigError("uniform_angles: need at least one angle");
  std::vector<double> a(count);
  for (int k = 0; k < count; ++k) a[k] = k * std::numbers::pi / count;
  return a;
}

int default_bins(int n) { return static_cast<int>(std::ceil(n * std::numbers::sqrt2 - 1e-9)); }

Matrix radon(const Matrix& image, const std::vector<double>& angles, int bins, Exec exec) {
  if (image.rows() != image.cols() || image.rows() < 1) throw ShapeError("radon: image must be square");
  const int n = static_cast<int>(image.rows());
  if (bins <= 0) bins = default_bins(n);
  Matrix sino(static_cast<Eigen::Index>(angles.size()), bins);
  const auto count = static_cast<long>(angles.size());
  if (exec == Exec::serial) {
    for (long a = 0; a < count; ++a) project_angle(image, bins, angles[a], sino.row(a).data());
  } else {
#pragma omp parallel for schedule(static)
    for (long a = 0; a < count; ++a) project_angle(image, bins, angles[a], sino.row(a).data());
  }
  return sino;
}

Matrix radon_adjoint(const Matrix& sinogram, const std::vector<double>& angles, int n, Exec exec) {
  if (sinogram.rows() != static_cast<Eigen::Index>(angles.size()))
    throw ShapeError("radon_adjoint: sinogram rows differ from the number of angles");
  if (n < 1) throw ShapeError("radon_adjoint: image size must be >= 1");
  const int bins = static_cast<int>(sinogram.cols());
  const auto count = angles.size();
  if (exec == Exec::serial) {
    Matrix image = Matrix::Zero(n, n);
    for (std::size_t a = 0; a < count; ++a) backproject_angle(sinogram.row(a).data(), bins, angles[a], n, image.data());
    return image;
  }
  const int groups = angle_groups(count);
  std::vector<Matrix> partial(groups);
#pragma omp parallel for schedule(static)
  for (int g = 0; g < groups; ++g) {
    partial[g] = Matrix::Zero(n, n);
    const std::size_t begin = count * g / groups, end = count * (g + 1) / groups;
    for (std::size_t a = begin; a < end; ++a)
      backproject_angle(sinogram.row(a).data(), bins, angles[a], n, partial[g].data());
  }
  for (int g = 1; g < groups; ++g) partial[0] += partial[g];
  return std::move(partial[0]);
}

Sinogram radon_transform(const Matrix& image, const std::vector<double>& angles, int bins) {
  const Eigen::Index n = std::max(image.rows(), image.cols());
  Matrix square = Matrix::Zero(n, n);
  const Eigen::Index top = (n - image.rows()) / 2, left = (n - image.cols()) / 2;
  square.block(top, left, image.rows(), image.cols()) = image;
  Sinogram s{angles, bins > 0 ? bins : default_bins(static_cast<int>(n)), {}};
  s.values = radon(square, angles, s.bins);
  s.validate();
  return s;
}

void save_sinogram(const Sinogram& sino, const std::filesystem::path& path) {
  sino.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write sinogram " + path.string());
  out << "# angles=";
  for (std::size_t i = 0; i < sino.angles.size(); ++i) out << (i ? "," : "") << train::format_real(sino.angles[i]);
  out << " bins=" << sino.bins << '\n';
  for (Eigen::Index r = 0; r < sino.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < sino.values.cols(); ++c)
      out << (c ? "," : "") << train::format_real(sino.values(r, c));
    out << '\n';
  }
  if (!out) throw IoError("cannot write sinogram " + path.string());
}

Sinogram load_sinogram(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sinogram " + path.string());
  auto number = [&path](const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw FormatError(path.string() + ": bad number '" + s + "'");
    return v;
  };
  std::string header;
  std::getline(in, header);
  const auto apos = header.find("# angles="), bpos = header.find(" bins=");
  if (apos != 0 || bpos == std::string::npos) throw FormatError(path.string() + ": missing '# angles=... bins=...' header");
  Sinogram s;
  std::stringstream angles(header.substr(9, bpos - 9));
  for (std::string cell; std::getline(angles, cell, ',');) s.angles.push_back(number(cell));
  s.bins = static_cast<int>(number(header.substr(bpos + 6)));
  s.values.resize(static_cast<Eigen::Index>(s.angles.size()), s.bins);
  std::string line;
  Eigen::Index r = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (r >= s.values.rows()) throw FormatError(path.string() + ": more rows than angles");
    std::stringstream row(line);
    Eigen::Index c = 0;
    for (std::string cell; std::getline(row, cell, ',');) {
      if (c >= s.bins) throw FormatError(path.string() + ": row longer than bins");
      s.values(r, c++) = number(cell);
    }
    if (c != s.bins) throw FormatError(path.string() + ": row shorter than bins");
    ++r;
  }
  if (r != s.values.rows()) throw FormatError(path.string() + ": fewer rows than angles");
  try {
    s.validate();
  } catch (const ShapeError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return s;
}

Sinogram add_detector_noise(const Sinogram& sino, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw ConfigError("detector noise: sigma must be >= 0");
  Sinogram out = sino;
  if (sigma == 0.0) return out;
  std::normal_distribution<double> noise(0.0, sigma);
  for (Eigen::Index i = 0; i < out.values.size(); ++i) out.values.data()[i] += noise(rng);
  return out;
}

}  // namespace incode::ct
