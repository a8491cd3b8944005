#include "incode/cli/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "incode/common.hpp"

namespace incode::cli {
namespace {

const std::vector<std::pair<Task, std::string>>& task_table() {
  static const std::vector<std::pair<Task, std::string>> table{
      {Task::fit_image, "fit-image"}, {Task::fit_audio, "fit-audio"}, {Task::fit_occupancy, "fit-occupancy"},
      {Task::denoise, "denoise"},     {Task::superres, "superres"},   {Task::inpaint, "inpaint"},
      {Task::ct_recon, "ct-recon"},   {Task::spectrum, "spectrum"},   {Task::sweep, "sweep"},
  };
  return table;
}

using Setter = std::function<void(RunConfig&, const nlohmann::json&)>;

template <class T>
Setter set(T RunConfig::*field) {
  return [field](RunConfig& c, const nlohmann::json& v) { c.*field = v.get<T>(); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"model", set(&RunConfig::model)},
      {"input", set(&RunConfig::input)},
      {"out", set(&RunConfig::out)},
      {"epochs", [](RunConfig& c, const nlohmann::json& v) { c.train.epochs = v.get<int>(); }},
      {"lr", [](RunConfig& c, const nlohmann::json& v) { c.train.lr0 = v.get<double>(); }},
      {"alpha", [](RunConfig& c, const nlohmann::json& v) { c.train.alpha = v.get<double>(); }},
      {"seed", [](RunConfig& c, const nlohmann::json& v) { c.train.seed = v.get<std::uint64_t>(); }},
      {"chunk", [](RunConfig& c, const nlohmann::json& v) { c.train.chunk = v.get<Eigen::Index>(); }},
      {"record-time", [](RunConfig& c, const nlohmann::json& v) { c.train.record_time = v.get<bool>(); }},
      {"lambda1", [](RunConfig& c, const nlohmann::json& v) { c.loss.lambda1 = v.get<double>(); }},
      {"lambda2", [](RunConfig& c, const nlohmann::json& v) { c.loss.lambda2 = v.get<double>(); }},
      {"lambda3", [](RunConfig& c, const nlohmann::json& v) { c.loss.lambda3 = v.get<double>(); }},
      {"lambda4", [](RunConfig& c, const nlohmann::json& v) { c.loss.lambda4 = v.get<double>(); }},
      {"omega0-first", set(&RunConfig::omega0_first)},
      {"omega0-hidden", set(&RunConfig::omega0_hidden)},
      {"width", set(&RunConfig::width)},
      {"depth", set(&RunConfig::depth)},
      {"profile", set(&RunConfig::profile)},
      {"freeze-params",
       [](RunConfig& c, const nlohmann::json& v) {
         if (v.is_null())
           c.freeze_params.reset();
         else if (v.is_string())
           c.freeze_params = parse_quad(v.get<std::string>());
         else
           c.freeze_params = nn::ParamQuad::from_array(v.get<std::array<double, 4>>());
       }},
      {"quiet", set(&RunConfig::quiet)},
      {"tau", set(&RunConfig::tau)},
      {"ro", set(&RunConfig::ro)},
      {"factor", set(&RunConfig::factor)},
      {"mask-fraction", set(&RunConfig::mask_fraction)},
      {"angles", set(&RunConfig::angles)},
      {"ct-size", set(&RunConfig::ct_size)},
      {"detector-noise", set(&RunConfig::detector_noise)},
      {"resolution", set(&RunConfig::resolution)},
      {"radius", set(&RunConfig::radius)},
      {"sample-rate", set(&RunConfig::sample_rate)},
      {"seconds", set(&RunConfig::seconds)},
      {"samples", set(&RunConfig::samples)},
      {"chirp-f0", set(&RunConfig::chirp_f0)},
      {"chirp-f1", set(&RunConfig::chirp_f1)},
      {"cutoff", set(&RunConfig::cutoff)},
      {"sweep-axis", set(&RunConfig::sweep_axis)},
      {"depths", set(&RunConfig::depths)},
      {"widths", set(&RunConfig::widths)},
      {"sweep-depth-width", set(&RunConfig::sweep_depth_width)},
      {"sweep-width-depth", set(&RunConfig::sweep_width_depth)},
  };
  return table;
}

}  // namespace

Task parse_task(const std::string& name) {
  for (const auto& [task, n] : task_table())
    if (n == name) return task;
  throw ConfigError("unknown task '" + name + "'");
}

std::string task_name(Task task) {
  for (const auto& [t, n] : task_table())
    if (t == task) return n;
  throw ConfigError("unknown task");
}

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& entry : task_table()) v.push_back(entry.second);
    return v;
  }();
  return names;
}

nn::ParamQuad parse_quad(const std::string& text) {
  std::array<double, 4> v{};
  std::stringstream ss(text);
  std::string cell;
  int i = 0;
  while (std::getline(ss, cell, ',')) {
    if (i >= 4) throw ConfigError("expected 4 comma-separated values, got '" + text + "'");
    cell.erase(0, cell.find_first_not_of(' '));
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v[i]);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) throw ConfigError("bad number '" + cell + "'");
    ++i;
  }
  if (i != 4) throw ConfigError("expected 4 comma-separated values, got '" + text + "'");
  return nn::ParamQuad::from_array(v);
}

void RunConfig::validate() const {
  if (model != "incode" && model != "siren") throw ConfigError("model must be 'incode' or 'siren'");
  if (freeze_params && model == "siren") throw ConfigError("--freeze-params applies to the incode model only");
  if (profile != "image" && profile != "denoise") throw ConfigError("profile must be 'image' or 'denoise'");
  train.validate();
  loss.validate();
  if (width < 1 || depth < 1) throw ConfigError("width and depth must be >= 1");
  if (!(omega0_first > 0.0) || !(omega0_hidden > 0.0)) throw ConfigError("omega0 values must be positive");
  if (!(tau > 0.0) || !(ro >= 0.0)) throw ConfigError("noise needs tau > 0 and ro >= 0");
  if (factor < 1) throw ConfigError("factor must be >= 1");
  if (!(mask_fraction > 0.0 && mask_fraction <= 1.0)) throw ConfigError("mask-fraction must be in (0, 1]");
  if (angles < 1) throw ConfigError("angles must be >= 1");
  if (ct_size < 2) throw ConfigError("ct-size must be >= 2");
  if (!(detector_noise >= 0.0)) throw ConfigError("detector-noise must be >= 0");
  if (resolution < 2 || !(radius > 0.0)) throw ConfigError("occupancy needs resolution >= 2 and radius > 0");
  if (!(sample_rate > 0.0) || !(seconds > 0.0)) throw ConfigError("audio needs positive sample-rate and seconds");
  if (samples < 16) throw ConfigError("spectrum needs samples >= 16");
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw ConfigError("cutoff must be in (0, 1)");
  if (sweep_axis != "depth" && sweep_axis != "width" && sweep_axis != "both")
    throw ConfigError("sweep-axis must be depth, width or both");
  for (int v : depths)
    if (v < 1) throw ConfigError("sweep depths must be >= 1");
  for (int v : widths)
    if (v < 1) throw ConfigError("sweep widths must be >= 1");
}

RunConfig task_defaults(Task task) {
  RunConfig c;
  c.task = task;
  c.train.epochs = 500;
  c.train.lr0 = 9e-4;
  c.train.alpha = 0.1;
  switch (task) {
    case Task::fit_image:
    case Task::superres:
    case Task::sweep:
      break;
    case Task::fit_audio:
      c.omega0_first = 3000.0;
      c.train.epochs = 1000;
      c.train.lr0 = 9e-5;
      c.train.alpha = 0.2;
      break;
    case Task::fit_occupancy:
      c.train.epochs = 200;
      break;
    case Task::denoise:
      c.omega0_first = 10.0;
      c.train.lr0 = 1.5e-4;
      c.profile = "denoise";
      break;
    case Task::inpaint:
      c.train.lr0 = 1.5e-4;
      c.train.alpha = 0.25;
      break;
    case Task::ct_recon:
      c.train.epochs = 2000;
      c.train.lr0 = 2e-4;
      c.train.alpha = 0.4;
      break;
    case Task::spectrum:
      c.width = 64;
      c.depth = 3;
      c.train.epochs = 300;
      c.train.lr0 = 1e-3;
      break;
  }
  return c;
}

void apply_json(RunConfig& config, const nlohmann::json& values) {
  if (values.is_null()) return;
  if (!values.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : values.items()) {
    if (key == "task") continue;
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
    try {
      it->second(config, value);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
}

RunConfig resolve_config(Task task, const nlohmann::json& file_values, const nlohmann::json& flag_values) {
  if (file_values.is_object() && file_values.contains("task") && file_values.at("task") != task_name(task))
    throw ConfigError("config file is for task '" + file_values.at("task").dump() + "'");
  RunConfig c = task_defaults(task);
  apply_json(c, file_values);
  apply_json(c, flag_values);
  c.validate();
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j{
      {"task", task_name(c.task)},
      {"model", c.model},
      {"input", c.input},
      {"out", c.out},
      {"epochs", c.train.epochs},
      {"lr", c.train.lr0},
      {"alpha", c.train.alpha},
      {"seed", c.train.seed},
      {"chunk", c.train.chunk},
      {"record-time", c.train.record_time},
      {"lambda1", c.loss.lambda1},
      {"lambda2", c.loss.lambda2},
      {"lambda3", c.loss.lambda3},
      {"lambda4", c.loss.lambda4},
      {"omega0-first", c.omega0_first},
      {"omega0-hidden", c.omega0_hidden},
      {"width", c.width},
      {"depth", c.depth},
      {"profile", c.profile},
      {"freeze-params", c.freeze_params ? nlohmann::json(c.freeze_params->to_array()) : nlohmann::json()},
      {"quiet", c.quiet},
      {"tau", c.tau},
      {"ro", c.ro},
      {"factor", c.factor},
      {"mask-fraction", c.mask_fraction},
      {"angles", c.angles},
      {"ct-size", c.ct_size},
      {"detector-noise", c.detector_noise},
      {"resolution", c.resolution},
      {"radius", c.radius},
      {"sample-rate", c.sample_rate},
      {"seconds", c.seconds},
      {"samples", c.samples},
      {"chirp-f0", c.chirp_f0},
      {"chirp-f1", c.chirp_f1},
      {"cutoff", c.cutoff},
      {"sweep-axis", c.sweep_axis},
      {"depths", c.depths},
      {"widths", c.widths},
      {"sweep-depth-width", c.sweep_depth_width},
      {"sweep-width-depth", c.sweep_width_depth},
  };
  return j;
}

}  // namespace incode::cli
