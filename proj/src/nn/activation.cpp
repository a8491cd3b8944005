#include "incode/nn/activation.hpp"

#include "incode/common.hpp"

namespace incode::nn {

ActivationParams ActivationParams::from_raw(const ParamQuad& raw) {
  return ActivationParams(raw, {std::exp(raw.a), std::exp(raw.b), raw.c, raw.d});
}

ActivationParams ActivationParams::from_effective(const ParamQuad& effective) {
  if (!(effective.a > 0.0) || !(effective.b > 0.0))
    throw ConfigError("activation amplitude and frequency scale must be positive");
  return ActivationParams({std::log(effective.a), std::log(effective.b), effective.c, effective.d},
                          effective);
}

}  // namespace incode::nn
