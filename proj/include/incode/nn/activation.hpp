#pragma once

#include <array>
#include <cmath>

namespace incode::nn {

struct ParamQuad {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  std::array<double, 4> to_array() const { return {a, b, c, d}; }
  static ParamQuad from_array(const std::array<double, 4>& v) {
    return {v[0], v[1], v[2], v[3]};
  }
  ParamQuad& operator+=(const ParamQuad& o) {
    a += o.a;
    b += o.b;
    c += o.c;
    d += o.d;
    return *this;
  }
  bool operator==(const ParamQuad&) const = default;
  bool all_finite() const {
    return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
  }
};

/// The (a, b, c, d) quadruple shared by every hidden layer of a composer.
///
/// The harmonizer predicts raw values; amplitude and frequency pass through
/// exp so they stay strictly positive, phase and offset are used as-is.
class ActivationParams {
 public:
  ActivationParams() : ActivationParams(from_raw({0.0, 0.0, 0.0, 0.0})) {}

  static ActivationParams from_raw(const ParamQuad& raw);
  /// Requires a > 0 and b > 0. The effective values are stored exactly as
  /// given so that (1, 1, 0, 0) reproduces a plain sine layer bit for bit.
  static ActivationParams from_effective(const ParamQuad& effective);
  static ActivationParams identity() { return from_effective({1.0, 1.0, 0.0, 0.0}); }

  const ParamQuad& raw() const { return raw_; }
  const ParamQuad& effective() const { return effective_; }

  /// Chain rule from effective-parameter gradients to raw-parameter gradients.
  ParamQuad raw_gradient(const ParamQuad& effective_grad) const {
    return {effective_grad.a * effective_.a, effective_grad.b * effective_.b, effective_grad.c,
            effective_grad.d};
  }

  bool operator==(const ActivationParams&) const = default;

 private:
  ActivationParams(const ParamQuad& raw, const ParamQuad& effective)
      : raw_(raw), effective_(effective) {}

  ParamQuad raw_;
  ParamQuad effective_;
};

/// a * sin(b * omega0 * z + c) + d
inline double incode_activation(double z, const ParamQuad& p, double omega0) {
  return p.a * std::sin(p.b * omega0 * z + p.c) + p.d;
}

}  // namespace incode::nn
