#pragma once

// Internal kernel entry points behind composer_forward/composer_backward.

#include <cstddef>

#include "incode/nn/composer.hpp"

namespace incode::nn::detail {

/// s[i] = sin(freq*z[i] + phase), c[i] = cos(freq*z[i] + phase).
/// Lives in its own translation unit so it can use the vector math library.
void sincos_affine(const double* z, std::size_t n, double freq, double phase, double* s,
                   double* c);

void forward_serial(const ComposerNetwork& net, const ActivationParams& params, ForwardTrace& trace);
void forward_parallel(const ComposerNetwork& net, const ActivationParams& params,
                      ForwardTrace& trace);

ComposerGradients backward_serial(const ForwardTrace& trace, const ComposerNetwork& net,
                                  const ActivationParams& params, const Matrix& output_grad,
                                  bool want_coord_grad);
ComposerGradients backward_parallel(const ForwardTrace& trace, const ComposerNetwork& net,
                                    const ActivationParams& params, const Matrix& output_grad,
                                    bool want_coord_grad);

/// Fixed row partition used by the parallel kernels. Depends only on the
/// batch size so that reductions happen in the same order on any machine.
struct RowGroups {
  Eigen::Index count;
  Eigen::Index rows_per_group;

  explicit RowGroups(Eigen::Index batch);
  Eigen::Index begin(Eigen::Index g) const { return g * rows_per_group; }
  Eigen::Index size(Eigen::Index g, Eigen::Index batch) const;
};

}  // namespace incode::nn::detail
