// Compiled with -ffast-math (see src/CMakeLists.txt) so the loops below map
// onto the glibc vector math library. Keep this file to this one kernel.
// Separate sin and cos loops: GCC fuses a shared loop into scalar sincos().

#include <cmath>

#include "kernels.hpp"

namespace incode::nn::detail {

void sincos_affine(const double* z, std::size_t n, double freq, double phase, double* __restrict s,
                   double* __restrict c) {
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) s[i] = std::sin(freq * z[i] + phase);
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) c[i] = std::cos(freq * z[i] + phase);
}

}  // namespace incode::nn::detail
