#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "incode/nn/activation.hpp"
#include "incode/training/loss.hpp"
#include "incode/training/schedule.hpp"

namespace incode::cli {

enum class Task { fit_image, fit_audio, fit_occupancy, denoise, superres, inpaint, ct_recon, spectrum, sweep };

Task parse_task(const std::string& name);
std::string task_name(Task task);
const std::vector<std::string>& task_names();

/// Fully resolved settings of one run. JSON keys (config files and the
/// checkpoint sidecar) are the flag names without leading dashes.
struct RunConfig {
  Task task = Task::fit_image;
  std::string model = "incode";  ///< incode | siren
  std::string input;             ///< empty: built-in fixture
  std::string out = "out";
  train::TrainConfig train;
  train::LossConfig loss;
  double omega0_first = 30.0;
  double omega0_hidden = 30.0;
  int width = 256;
  int depth = 5;
  std::string profile = "image";  ///< harmonizer profile: image | denoise
  std::optional<nn::ParamQuad> freeze_params;
  bool quiet = false;

  // denoise
  double tau = 40.0;
  double ro = 2.0;
  // superres
  int factor = 2;
  // inpaint
  double mask_fraction = 0.2;
  // ct-recon
  int angles = 100;
  int ct_size = 64;
  double detector_noise = 0.0;
  // fit-occupancy
  int resolution = 32;
  double radius = 0.6;
  // fit-audio (synthesized input)
  double sample_rate = 8000.0;
  double seconds = 1.0;
  // spectrum
  int samples = 512;
  double chirp_f0 = 4.0;
  double chirp_f1 = 96.0;
  double cutoff = 0.25;  ///< fraction of the Nyquist frequency
  // sweep
  std::string sweep_axis = "both";  ///< depth | width | both
  std::vector<int> depths{2, 3, 4, 5, 6};
  std::vector<int> widths{64, 128, 192, 256, 320};
  int sweep_depth_width = 256;
  int sweep_width_depth = 5;

  bool conditioned() const { return model == "incode" && !freeze_params; }
  void validate() const;
};

/// Paper settings for each task.
RunConfig task_defaults(Task task);

/// Applies flat JSON keys onto `config`; unknown keys and wrong types raise
/// ConfigError.
void apply_json(RunConfig& config, const nlohmann::json& values);

/// Task defaults, then the config file values, then the flag values.
RunConfig resolve_config(Task task, const nlohmann::json& file_values, const nlohmann::json& flag_values);

nlohmann::json to_json(const RunConfig& config);

/// "a,b,c,d" -> quadruple.
nn::ParamQuad parse_quad(const std::string& text);

}  // namespace incode::cli
