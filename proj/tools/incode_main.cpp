#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "incode/cli/run_config.hpp"
#include "incode/cli/tasks.hpp"
#include "incode/common.hpp"

namespace {

using incode::ConfigError;

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("--" + key + ": bad value '" + text + "'");
  return v;
}

/// Converts a flag string to the JSON type of the key's default value.
nlohmann::json flag_value(const std::string& key, const std::string& text, const nlohmann::json& like) {
  if (like.is_number_unsigned()) return parse_number<std::uint64_t>(key, text);
  if (like.is_number_integer()) return parse_number<long long>(key, text);
  if (like.is_number_float()) return parse_number<double>(key, text);
  if (like.is_array()) {
    nlohmann::json list = nlohmann::json::array();
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) list.push_back(parse_number<int>(key, cell));
    return list;
  }
  return text;
}

nlohmann::json read_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw incode::IoError("cannot open config " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  incode::cli::tune_allocator();
  CLI::App app{"Fit implicit neural representations with INCODE or SIREN."};
  app.set_help_flag("-h,--help");
  std::string task_text, config_path;
  app.add_option("task", task_text, "Task to run")
      ->required()
      ->check(CLI::IsMember(incode::cli::task_names()));
  app.add_option("--config", config_path, "JSON file with flat keys mirroring the flags");

  const nlohmann::json defaults = incode::cli::to_json(incode::cli::RunConfig{});
  std::map<std::string, std::string> text_values;
  std::map<std::string, bool> bool_values;
  for (const auto& [key, value] : defaults.items()) {
    if (key == "task") continue;
    if (value.is_boolean())
      app.add_flag("--" + key, bool_values[key]);
    else
      app.add_option("--" + key, text_values[key]);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    incode::cli::apply_thread_limit();
    const incode::cli::Task task = incode::cli::parse_task(task_text);
    nlohmann::json flags = nlohmann::json::object();
    for (const auto& [key, text] : text_values)
      if (app.count("--" + key)) flags[key] = flag_value(key, text, defaults.at(key));
    for (const auto& [key, on] : bool_values)
      if (app.count("--" + key)) flags[key] = on;
    const incode::cli::RunConfig config = incode::cli::resolve_config(task, read_config(config_path), flags);

    const auto start = std::chrono::steady_clock::now();
    const nlohmann::json metrics = incode::cli::run_task(config);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s\n", metrics.dump(2).c_str());
    std::fprintf(stderr, "finished in %.1f s, artifacts in %s\n", seconds, config.out.c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return incode::cli::exit_code_for(e);
  }
}
