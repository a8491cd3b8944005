#include "incode/signals/volume.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "json.hpp"

namespace incode::signals {
namespace {

std::filesystem::path sidecar(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

template <class F>
OccupancyVolume voxelize(int n, F inside) {
  if (n < 2) throw ConfigError("volume: resolution must be >= 2");
  OccupancyVolume v{{n, n, n}, Vector::Zero(static_cast<Eigen::Index>(n) * n * n)};
  const Vector axis = Vector::LinSpaced(n, -1.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (inside(axis(i), axis(j), axis(k))) v.values((static_cast<Eigen::Index>(i) * n + j) * n + k) = 1.0;
  return v;
}

}  // namespace

void save_volume(const OccupancyVolume& volume, const std::filesystem::path& path) {
  static_assert(std::endian::native == std::endian::little, "volume IO assumes a little-endian host");
  std::vector<float> data(static_cast<std::size_t>(volume.values.size()));
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(volume.values(i));
  std::ofstream out(path, std::ios::binary);
  if (!out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * 4)))
    throw IoError("cannot write volume " + path.string());
  std::ofstream meta(sidecar(path));
  meta << nlohmann::json{{"dims", volume.dims}}.dump() << "\n";
  if (!meta) throw IoError("cannot write volume sidecar for " + path.string());
}

OccupancyVolume load_volume(const std::filesystem::path& path) {
  std::ifstream meta(sidecar(path));
  if (!meta) throw IoError("missing volume sidecar " + sidecar(path).string());
  OccupancyVolume volume;
  try {
    const auto dims = nlohmann::json::parse(meta).at("dims").get<std::vector<int>>();
    if (dims.size() != 3) throw FormatError("volume sidecar: dims must have 3 entries");
    for (int a = 0; a < 3; ++a) {
      if (dims[a] < 1) throw FormatError("volume sidecar: non-positive dimension");
      volume.dims[a] = dims[a];
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("volume sidecar " + sidecar(path).string() + ": " + e.what());
  }
  const auto count = static_cast<std::size_t>(volume.dims[0]) * volume.dims[1] * volume.dims[2];
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open volume " + path.string());
  if (static_cast<std::size_t>(in.tellg()) != count * 4)
    throw FormatError(path.string() + ": size does not match sidecar dims");
  in.seekg(0);
  std::vector<float> data(count);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(count * 4));
  volume.values.resize(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) volume.values(i) = data[i];
  return volume;
}

OccupancyVolume sphere_volume(int n, double radius) {
  return voxelize(n, [r2 = radius * radius](double x, double y, double z) {
    return x * x + y * y + z * z <= r2;
  });
}

OccupancyVolume torus_volume(int n, double major, double minor) {
  return voxelize(n, [=](double x, double y, double z) {
    const double q = std::hypot(x, y) - major;
    return q * q + z * z <= minor * minor;
  });
}

}  // namespace incode::signals
