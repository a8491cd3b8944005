#pragma once

#include <array>
#include <filesystem>

#include "incode/common.hpp"

namespace incode::signals {

/// Binary occupancy grid. Voxel (i, j, k) is values((i*ny + j)*nz + k).
struct OccupancyVolume {
  std::array<int, 3> dims{0, 0, 0};
  Vector values;

  Eigen::Index voxels() const { return values.size(); }
};

/// Raw little-endian f32 at `path` plus `path`.json holding {"dims":[nx,ny,nz]}.
void save_volume(const OccupancyVolume& volume, const std::filesystem::path& path);
OccupancyVolume load_volume(const std::filesystem::path& path);

/// Voxel-center test of |x| <= radius in [-1,1]^3 coordinates.
OccupancyVolume sphere_volume(int n, double radius);
/// Solid torus around the z axis: (sqrt(x^2+y^2) - major)^2 + z^2 <= minor^2.
OccupancyVolume torus_volume(int n, double major, double minor);

}  // namespace incode::signals
