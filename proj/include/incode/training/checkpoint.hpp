#pragma once

#include <filesystem>

#include "json.hpp"

#include "incode/training/model.hpp"

namespace incode::train {

nlohmann::json to_json(const BundleConfig& config);
/// Missing keys keep their defaults; wrong types raise ConfigError.
BundleConfig bundle_config_from_json(const nlohmann::json& j);

struct Checkpoint {
  ModelBundle model;
  nn::ActivationParams params;
  nlohmann::json metadata;
};

/// Binary layout (little-endian): "INC1", u32 M, N, D, width, composer layers
/// (row-major f64 weights then biases, in layer order), 4 f64 raw activation
/// parameters, then optional tagged sections "HRM1" (harmonizer), "CNV1"
/// (conv extractor), "LAT1" (fixed latent) each with its own u32 dims
/// header, then "END1". `path`.json holds the bundle config and `metadata`.
void save_checkpoint(const std::filesystem::path& path, const ModelBundle& model,
                     const nn::ActivationParams& params, const nlohmann::json& metadata = nlohmann::json::object());
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace incode::train
