#include "incode/signals/grid.hpp"

#include <string>

namespace incode::signals {

CoordinateGrid make_grid(const std::vector<int>& dims) {
  if (dims.empty()) throw ConfigError("make_grid: need at least one axis");
  Eigen::Index total = 1;
  for (int n : dims) {
    if (n < 2) throw ConfigError("make_grid: every axis needs >= 2 points, got " + std::to_string(n));
    total *= n;
  }
  CoordinateGrid grid{dims, Matrix(total, static_cast<Eigen::Index>(dims.size()))};
  const auto m = static_cast<Eigen::Index>(dims.size());
  std::vector<Vector> axes;
  for (int n : dims) axes.push_back(Vector::LinSpaced(n, -1.0, 1.0));

  std::vector<int> index(dims.size(), 0);
  for (Eigen::Index p = 0; p < total; ++p) {
    for (Eigen::Index a = 0; a < m; ++a) grid.coords(p, a) = axes[a](index[a]);
    for (Eigen::Index a = m; a-- > 0;) {
      if (++index[a] < dims[a]) break;
      index[a] = 0;
    }
  }
  return grid;
}

}  // namespace incode::signals
