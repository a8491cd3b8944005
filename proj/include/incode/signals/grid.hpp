#pragma once

#include <vector>

#include "incode/common.hpp"

namespace incode::signals {

/// Row-major lattice of coordinates in [-1, 1]^M; the last axis varies
/// fastest, matching the raster order of the signal containers.
struct CoordinateGrid {
  std::vector<int> dims;
  Matrix coords;  ///< [prod(dims) x dims.size()]

  Eigen::Index points() const { return coords.rows(); }
};

/// Every axis is linspace(-1, 1, n) inclusive; throws ConfigError for n < 2.
CoordinateGrid make_grid(const std::vector<int>& dims);

}  // namespace incode::signals
