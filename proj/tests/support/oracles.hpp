#pragma once

// Independent test-only oracles. Nothing here calls into the kernels under
// test; these are straight transcriptions of the defining formulas.

#include <cmath>
#include <functional>
#include <vector>

#include "incode/nn/composer.hpp"

namespace incode::testing {

/// Direct evaluation of y_l = a*sin(b*omega0_l*(W_l y_{l-1} + b_l) + c) + d with
/// a linear head, one sample at a time.
inline std::vector<double> direct_incode(const nn::ComposerNetwork& net,
                                         const std::vector<double>& x, double a, double b,
                                         double c, double d) {
  std::vector<double> y = x;
  const auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& L = layers[l];
    std::vector<double> next(L.fan_out());
    for (Eigen::Index j = 0; j < L.fan_out(); ++j) {
      double acc = L.bias(j);
      for (Eigen::Index k = 0; k < L.fan_in(); ++k) acc += L.weights(j, k) * y[k];
      if (l + 1 < layers.size()) {
        const double w0 = net.omega0(static_cast<int>(l));
        acc = a * std::sin(b * (w0 * acc) + c) + d;
      }
      next[j] = acc;
    }
    y = std::move(next);
  }
  return y;
}

/// Plain SIREN: y_l = sin(omega0_l * (W_l y_{l-1} + b_l)), linear head.
inline std::vector<double> direct_siren(const nn::ComposerNetwork& net, const std::vector<double>& x) {
  std::vector<double> y = x;
  const auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& L = layers[l];
    std::vector<double> next(L.fan_out());
    for (Eigen::Index j = 0; j < L.fan_out(); ++j) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < L.fan_in(); ++k) acc += L.weights(j, k) * y[k];
      acc += L.bias(j);
      next[j] = l + 1 < layers.size() ? std::sin(net.omega0(static_cast<int>(l)) * acc) : acc;
    }
    y = std::move(next);
  }
  return y;
}

/// Central difference of f at *slot with step h; restores *slot.
inline double central_difference(const std::function<double()>& f, double* slot, double h = 1e-5) {
  const double saved = *slot;
  *slot = saved + h;
  const double up = f();
  *slot = saved - h;
  const double down = f();
  *slot = saved;
  return (up - down) / (2.0 * h);
}

/// Relative error with an absolute floor so that gradients that are zero up
/// to round-off do not dominate.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), floor});
}

}  // namespace incode::testing
