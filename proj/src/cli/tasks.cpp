#include "incode/cli/tasks.hpp"

#include <malloc.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>

#include "incode/cli/spectrum.hpp"
#include "incode/conditioning/mfcc.hpp"
#include "incode/ct/ct_fit.hpp"
#include "incode/signals/audio.hpp"
#include "incode/signals/grid.hpp"
#include "incode/signals/image.hpp"
#include "incode/signals/mask.hpp"
#include "incode/signals/metrics.hpp"
#include "incode/signals/synthetic.hpp"
#include "incode/signals/volume.hpp"
#include "incode/training/checkpoint.hpp"
#include "incode/training/fit.hpp"

#ifndef INCODE_DATA_DIR
#define INCODE_DATA_DIR "data"
#endif

namespace incode::cli {
namespace fs = std::filesystem;
using signals::ImageSignal;
using train::EpochLog;
using train::ModelBundle;

namespace {

nlohmann::json real(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(train::format_real(v));
}

/// Run settings stored with a checkpoint. Where the artifacts went and how
/// chatty the run was do not belong to the experiment.
nlohmann::json run_record(const RunConfig& c) {
  nlohmann::json j = to_json(c);
  j.erase("out");
  j.erase("quiet");
  return j;
}

std::vector<double> flatten(const Matrix& m) { return {m.data(), m.data() + m.size()}; }

std::function<void(const EpochLog&)> progress(const RunConfig& c, const std::string& label) {
  if (c.quiet) return {};
  const int total = c.train.epochs;
  const int every = std::max(1, total / 10);
  return [label, total, every](const EpochLog& row) {
    if (row.epoch % every != 0 && row.epoch != total) return;
    std::fprintf(stderr, "%s epoch %d/%d loss %.6g penalty %.3g psnr %.3f\n", label.c_str(), row.epoch, total,
                 row.loss, row.penalty, row.psnr);
  };
}

nlohmann::json row_metrics(const EpochLog& last) {
  return {{"epochs", last.epoch},     {"psnr", real(last.psnr)},    {"loss", real(last.loss)},
          {"penalty", real(last.penalty)}, {"a", real(last.params.a)}, {"b", real(last.params.b)},
          {"c", real(last.params.c)}, {"d", real(last.params.d)}};
}

nlohmann::json base_metrics(const RunConfig& c, const std::vector<EpochLog>& log) {
  nlohmann::json j{{"task", task_name(c.task)}, {"model", c.model}, {"seed", c.train.seed}};
  j.update(row_metrics(log.back()));
  return j;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

fs::path prepare_out(const RunConfig& c) {
  const fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

fs::path input_path(const RunConfig& c, const char* fixture) {
  return c.input.empty() ? data_dir() / fixture : fs::path(c.input);
}

struct Fitted {
  std::vector<EpochLog> log;
  train::Evaluation final;
};

/// Fits and, on divergence, leaves the last good state in `dir` (when set).
Fitted fit_or_save(ModelBundle& model, const train::Dataset& data, const RunConfig& c, const train::FitHooks& hooks,
                   const fs::path& dir, const std::string& suffix = "") {
  try {
    train::FitResult r = train::fit(model, data, c.train, c.loss, hooks);
    return {std::move(r.log), std::move(r.final)};
  } catch (const train::FitDiverged& e) {
    if (!dir.empty()) {
      train::save_checkpoint(dir / ("model" + suffix + ".inc"), e.last_good,
                             train::activation_params(e.last_good, data), run_record(c));
      train::write_epoch_csv(dir / ("log" + suffix + ".csv"), e.log);
    }
    throw;
  }
}

void write_run(const fs::path& dir, const RunConfig& c, const ModelBundle& model, const Fitted& fitted,
               const nlohmann::json& metrics) {
  train::save_checkpoint(dir / "model.inc", model, fitted.final.params, run_record(c));
  train::write_epoch_csv(dir / "log.csv", fitted.log);
  write_json(dir / "metrics.json", metrics);
}

ImageSignal as_image(const Matrix& values, int height, int width) {
  ImageSignal img(height, width, static_cast<int>(values.cols()));
  img.values = values;
  return img;
}

struct ImageFit {
  ModelBundle model;
  Fitted fitted;
  ImageSignal reconstruction;
};

/// Fits `target` on its own grid; the log's psnr compares against `reference`.
ImageFit fit_image_signal(const RunConfig& c, const ImageSignal& target, const ImageSignal& reference,
                          const fs::path& dir, const std::string& label) {
  train::Dataset data;
  data.coords = signals::make_grid({target.height, target.width}).coords;
  data.targets = target.values;
  data.conditioning = flatten(target.values);
  ModelBundle model = ModelBundle::create(bundle_config(c, 2, target.channels), c.train.seed);
  train::FitHooks hooks;
  hooks.evaluate = [&reference](const train::Evaluation& ev, const ModelBundle&) {
    return signals::psnr(ev.prediction, reference.values);
  };
  hooks.on_epoch = progress(c, label);
  Fitted fitted = fit_or_save(model, data, c, hooks, dir);
  ImageSignal recon = as_image(fitted.final.prediction, target.height, target.width);
  return {std::move(model), std::move(fitted), std::move(recon)};
}

nlohmann::json run_fit_image(const RunConfig& c) {
  const ImageSignal img = signals::load_png(input_path(c, "astronaut_64.png"));
  const fs::path dir = prepare_out(c);
  ImageFit fit = fit_image_signal(c, img, img, dir, c.model);
  nlohmann::json metrics = base_metrics(c, fit.fitted.log);
  metrics["ssim"] = real(signals::ssim(fit.reconstruction, img));
  signals::save_png(fit.reconstruction, dir / "reconstruction.png");
  write_run(dir, c, fit.model, fit.fitted, metrics);
  return metrics;
}

nlohmann::json run_denoise(const RunConfig& c) {
  const ImageSignal clean = signals::load_png(input_path(c, "astronaut_64.png"));
  Rng rng = make_rng(c.train.seed, "noise");
  const ImageSignal noisy = signals::add_sensor_noise(clean, c.tau, c.ro, rng);
  const fs::path dir = prepare_out(c);
  ImageFit fit = fit_image_signal(c, noisy, clean, dir, c.model);
  nlohmann::json metrics = base_metrics(c, fit.fitted.log);
  metrics["ssim"] = real(signals::ssim(fit.reconstruction, clean));
  metrics["noisy_psnr"] = real(signals::psnr(noisy, clean));
  metrics["noisy_ssim"] = real(signals::ssim(noisy, clean));
  signals::save_png(noisy, dir / "noisy.png");
  signals::save_png(fit.reconstruction, dir / "reconstruction.png");
  write_run(dir, c, fit.model, fit.fitted, metrics);
  return metrics;
}

/// Positions of the low-resolution pixel centers on the full-resolution grid.
Matrix cell_center_grid(int low_h, int low_w, int factor, int high_h, int high_w) {
  auto axis = [factor](int i, int high) { return -1.0 + 2.0 * (factor * i + 0.5 * (factor - 1)) / (high - 1); };
  Matrix coords(static_cast<Eigen::Index>(low_h) * low_w, 2);
  for (int r = 0; r < low_h; ++r)
    for (int col = 0; col < low_w; ++col) {
      const Eigen::Index p = static_cast<Eigen::Index>(r) * low_w + col;
      coords(p, 0) = axis(r, high_h);
      coords(p, 1) = axis(col, high_w);
    }
  return coords;
}

nlohmann::json run_superres(const RunConfig& c) {
  const ImageSignal full = signals::load_png(input_path(c, "astronaut_128.png"));
  const ImageSignal low = signals::downsample(full, c.factor);
  if (low.height < 2 || low.width < 2) throw ConfigError("superres: factor leaves fewer than 2 pixels per axis");
  const int high_h = low.height * c.factor, high_w = low.width * c.factor;
  const ImageSignal high = signals::crop(full, 0, 0, high_h, high_w);

  train::Dataset data;
  data.coords = cell_center_grid(low.height, low.width, c.factor, high_h, high_w);
  data.targets = low.values;
  data.conditioning = flatten(low.values);
  const Matrix eval_coords = signals::make_grid({high_h, high_w}).coords;

  ModelBundle model = ModelBundle::create(bundle_config(c, 2, full.channels), c.train.seed);
  train::FitHooks hooks;
  hooks.evaluate = [&](const train::Evaluation& ev, const ModelBundle& m) {
    return signals::psnr(nn::composer_predict(m.composer, eval_coords, ev.params, c.train.chunk), high.values);
  };
  hooks.on_epoch = progress(c, c.model);
  const fs::path dir = prepare_out(c);
  Fitted fitted = fit_or_save(model, data, c, hooks, dir);

  const ImageSignal recon =
      as_image(nn::composer_predict(model.composer, eval_coords, fitted.final.params, c.train.chunk), high_h, high_w);
  nlohmann::json metrics = base_metrics(c, fitted.log);
  metrics["train_psnr"] = real(signals::psnr(fitted.final.prediction, low.values));
  metrics["ssim"] = real(signals::ssim(recon, high));
  metrics["factor"] = c.factor;
  signals::save_png(low, dir / "lowres.png");
  signals::save_png(recon, dir / "reconstruction.png");
  write_run(dir, c, model, fitted, metrics);
  return metrics;
}

nlohmann::json run_inpaint(const RunConfig& c) {
  const ImageSignal img = signals::load_png(input_path(c, "astronaut_64.png"));
  Rng rng = make_rng(c.train.seed, "mask");
  const signals::SampleMask mask = signals::random_mask({img.height, img.width}, c.mask_fraction, rng);

  train::Dataset data;
  data.coords = signals::make_grid({img.height, img.width}).coords;
  data.targets = img.values;
  data.mask = mask.keep;
  for (Eigen::Index p = 0; p < img.values.rows(); ++p)
    if (mask.keep[p])
      for (Eigen::Index ch = 0; ch < img.values.cols(); ++ch) data.conditioning.push_back(img.values(p, ch));

  ModelBundle model = ModelBundle::create(bundle_config(c, 2, img.channels), c.train.seed);
  train::FitHooks hooks;
  hooks.evaluate = [&img](const train::Evaluation& ev, const ModelBundle&) {
    return signals::psnr(ev.prediction, img.values);
  };
  hooks.on_epoch = progress(c, c.model);
  const fs::path dir = prepare_out(c);
  Fitted fitted = fit_or_save(model, data, c, hooks, dir);

  const ImageSignal recon = as_image(fitted.final.prediction, img.height, img.width);
  nlohmann::json metrics = base_metrics(c, fitted.log);
  metrics["ssim"] = real(signals::ssim(recon, img));
  metrics["mask_fraction"] = mask.fraction();
  signals::save_mask_png(mask, dir / "mask.png");
  signals::save_png(recon, dir / "reconstruction.png");
  write_run(dir, c, model, fitted, metrics);
  return metrics;
}

nlohmann::json run_fit_audio(const RunConfig& c) {
  const signals::AudioSignal audio =
      c.input.empty() ? signals::test_tone(c.sample_rate, c.seconds) : signals::load_wav(c.input);
  const auto n = static_cast<int>(audio.samples.size());

  train::Dataset data;
  data.coords = signals::make_grid({n}).coords;
  data.targets = audio.samples;
  ModelBundle model = ModelBundle::create(bundle_config(c, 1, 1, train::LatentSource::fixed), c.train.seed);
  if (model.config.conditioned) {
    cond::MfccConfig mfcc;
    mfcc.output_dim = model.config.harmonizer.input_dim;
    model.fixed_latent = cond::mfcc_extract(
        {audio.samples.data(), static_cast<std::size_t>(audio.samples.size())}, audio.sample_rate, mfcc);
  }
  train::FitHooks hooks;
  hooks.evaluate = [&audio](const train::Evaluation& ev, const ModelBundle&) {
    return signals::psnr(ev.prediction, audio.samples);
  };
  hooks.on_epoch = progress(c, c.model);
  const fs::path dir = prepare_out(c);
  Fitted fitted = fit_or_save(model, data, c, hooks, dir);

  nlohmann::json metrics = base_metrics(c, fitted.log);
  signals::save_wav({audio.sample_rate, fitted.final.prediction.col(0)}, dir / "reconstruction.wav");
  write_run(dir, c, model, fitted, metrics);
  return metrics;
}

nlohmann::json run_fit_occupancy(const RunConfig& c) {
  const signals::OccupancyVolume gt =
      c.input.empty() ? signals::sphere_volume(c.resolution, c.radius) : signals::load_volume(c.input);

  train::Dataset data;
  data.coords = signals::make_grid({gt.dims[0], gt.dims[1], gt.dims[2]}).coords;
  data.targets = gt.values;
  data.conditioning.assign(gt.values.data(), gt.values.data() + gt.values.size());
  ModelBundle model = ModelBundle::create(bundle_config(c, 3, 1), c.train.seed);
  train::FitHooks hooks;
  hooks.evaluate = [&gt](const train::Evaluation& ev, const ModelBundle&) {
    return signals::psnr(ev.prediction, gt.values);
  };
  hooks.on_epoch = progress(c, c.model);
  const fs::path dir = prepare_out(c);
  Fitted fitted = fit_or_save(model, data, c, hooks, dir);

  const signals::OccupancyVolume pred{gt.dims, fitted.final.prediction.col(0)};
  nlohmann::json metrics = base_metrics(c, fitted.log);
  metrics["iou"] = real(signals::iou(pred, gt));
  signals::save_volume(pred, dir / "occupancy.raw");
  write_run(dir, c, model, fitted, metrics);
  return metrics;
}

nlohmann::json run_ct_recon(const RunConfig& c) {
  ImageSignal gt;
  if (c.input.empty()) {
    gt = signals::ellipse_phantom(c.ct_size);
  } else {
    gt = signals::to_gray(signals::load_png(c.input));
    if (gt.height != gt.width) throw ShapeError("ct-recon: input image must be square");
  }
  const int n = gt.height;
  ct::CtProblem problem;
  problem.image_size = n;
  problem.measured =
      ct::radon_transform(Eigen::Map<const Matrix>(gt.values.data(), n, n), ct::uniform_angles(c.angles));
  if (c.detector_noise > 0.0) {
    Rng rng = make_rng(c.train.seed, "detector");
    problem.measured = ct::add_detector_noise(problem.measured, c.detector_noise, rng);
  }
  problem.ground_truth = gt;

  ModelBundle model = ModelBundle::create(bundle_config(c, 2, 1), c.train.seed);
  const fs::path dir = prepare_out(c);
  ct::CtResult result;
  try {
    result = ct::ct_fit(problem, model, c.train, c.loss, progress(c, c.model));
  } catch (const train::FitDiverged& e) {
    train::save_checkpoint(dir / "model.inc", e.last_good,
                           train::activation_params(e.last_good, ct::ct_dataset(problem)), run_record(c));
    train::write_epoch_csv(dir / "log.csv", e.log);
    throw;
  }

  nlohmann::json metrics = base_metrics(c, result.log);
  metrics["ssim"] = real(signals::ssim(result.reconstruction, gt));
  metrics["angles"] = c.angles;
  signals::save_png(result.reconstruction, dir / "reconstruction.png");
  ct::save_sinogram(problem.measured, dir / "sinogram.csv");
  write_run(dir, c, model, {std::move(result.log), std::move(result.final)}, metrics);
  return metrics;
}

RunConfig siren_variant(RunConfig c) {
  c.model = "siren";
  c.freeze_params.reset();
  return c;
}

nlohmann::json run_spectrum(const RunConfig& c) {
  const Vector signal = signals::chirp(c.samples, c.chirp_f0, c.chirp_f1);
  train::Dataset data;
  data.coords = signals::make_grid({c.samples}).coords;
  data.targets = signal;
  data.conditioning.assign(signal.data(), signal.data() + signal.size());
  const fs::path dir = prepare_out(c);

  RunConfig incode = c;
  incode.model = "incode";
  const std::pair<std::string, RunConfig> variants[] = {{"incode", incode}, {"siren", siren_variant(c)}};
  nlohmann::json metrics{{"task", task_name(c.task)}, {"seed", c.train.seed}, {"cutoff", c.cutoff}};
  std::vector<Vector> spectra;
  for (const auto& [name, v] : variants) {
    ModelBundle model = ModelBundle::create(bundle_config(v, 1, 1), v.train.seed);
    train::FitHooks hooks;
    hooks.evaluate = [&signal](const train::Evaluation& ev, const ModelBundle&) {
      return signals::psnr(ev.prediction, signal);
    };
    hooks.on_epoch = progress(v, name);
    const Fitted fitted = fit_or_save(model, data, v, hooks, dir, "_" + name);
    const Matrix responses = nn::composer_hidden_output(model.composer, data.coords, fitted.final.params, 0);
    spectra.push_back(mean_unit_spectrum(responses));
    nlohmann::json m = row_metrics(fitted.log.back());
    m["energy_fraction"] = energy_fraction_above(spectra.back(), c.cutoff);
    metrics[name] = m;
    train::save_checkpoint(dir / ("model_" + name + ".inc"), model, fitted.final.params, run_record(v));
    train::write_epoch_csv(dir / ("log_" + name + ".csv"), fitted.log);
  }

  std::ofstream out(dir / "spectrum.csv");
  if (!out) throw IoError("cannot write " + (dir / "spectrum.csv").string());
  out << "bin,nyquist_fraction,incode,siren\n";
  const Eigen::Index nyquist = spectra[0].size() - 1;
  for (Eigen::Index k = 0; k <= nyquist; ++k)
    out << k << ',' << train::format_real(static_cast<double>(k) / nyquist) << ','
        << train::format_real(spectra[0](k)) << ',' << train::format_real(spectra[1](k)) << '\n';
  if (!out) throw IoError("cannot write " + (dir / "spectrum.csv").string());
  write_json(dir / "metrics.json", metrics);
  return metrics;
}

nlohmann::json run_sweep(const RunConfig& c) {
  const ImageSignal img = signals::load_png(input_path(c, "astronaut_64.png"));
  const fs::path dir = prepare_out(c);
  fs::create_directories(dir / "cells");

  struct Cell {
    std::string axis;
    int depth, width;
  };
  std::vector<int> depths = c.depths, widths = c.widths;
  std::sort(depths.begin(), depths.end());
  std::sort(widths.begin(), widths.end());
  std::vector<Cell> cells;
  if (c.sweep_axis != "width")
    for (int d : depths) cells.push_back({"depth", d, c.sweep_depth_width});
  if (c.sweep_axis != "depth")
    for (int w : widths) cells.push_back({"width", c.sweep_width_depth, w});

  std::ofstream out(dir / "sweep.csv");
  if (!out) throw IoError("cannot write " + (dir / "sweep.csv").string());
  out << "axis,depth,width,model,psnr,ssim\n";
  nlohmann::json rows = nlohmann::json::array();
  for (const Cell& cell : cells) {
    RunConfig incode = c;
    incode.model = "incode";
    for (RunConfig v : {incode, siren_variant(c)}) {
      v.task = Task::fit_image;
      v.depth = cell.depth;
      v.width = cell.width;
      const std::string label = cell.axis + " depth=" + std::to_string(cell.depth) +
                                " width=" + std::to_string(cell.width) + " " + v.model;
      const ImageFit fit = fit_image_signal(v, img, img, {}, label);
      const double psnr = fit.fitted.log.back().psnr;
      const double ssim = signals::ssim(fit.reconstruction, img);
      train::write_epoch_csv(dir / "cells" /
                                 (cell.axis + "-d" + std::to_string(cell.depth) + "-w" +
                                  std::to_string(cell.width) + "-" + v.model + ".csv"),
                             fit.fitted.log);
      out << cell.axis << ',' << cell.depth << ',' << cell.width << ',' << v.model << ','
          << train::format_real(psnr) << ',' << train::format_real(ssim) << '\n';
      rows.push_back({{"axis", cell.axis},
                      {"depth", cell.depth},
                      {"width", cell.width},
                      {"model", v.model},
                      {"psnr", real(psnr)},
                      {"ssim", real(ssim)}});
    }
  }
  if (!out) throw IoError("cannot write " + (dir / "sweep.csv").string());
  nlohmann::json metrics{{"task", task_name(c.task)}, {"seed", c.train.seed}, {"cells", rows}};
  write_json(dir / "metrics.json", metrics);
  return metrics;
}

}  // namespace

train::BundleConfig bundle_config(const RunConfig& c, int input_dim, int output_dim, train::LatentSource latent) {
  train::BundleConfig b;
  b.composer.input_dim = input_dim;
  b.composer.output_dim = output_dim;
  b.composer.hidden_layers = c.depth;
  b.composer.width = c.width;
  b.composer.first_omega0 = c.omega0_first;
  b.composer.hidden_omega0 = c.omega0_hidden;
  b.conditioned = c.conditioned();
  if (c.freeze_params) b.frozen = *c.freeze_params;
  b.latent = latent;
  const int latent_dim = latent == train::LatentSource::conv ? b.extractor.output_dim() : 64;
  b.harmonizer = c.profile == "denoise" ? cond::HarmonizerConfig::denoise_profile(latent_dim)
                                        : cond::HarmonizerConfig::image_profile(latent_dim);
  return b;
}

fs::path data_dir() {
  if (const char* env = std::getenv("INCODE_DATA_DIR")) return env;
  return INCODE_DATA_DIR;
}

void apply_thread_limit() {
  const char* env = std::getenv("INCODE_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw ConfigError(std::string("INCODE_THREADS must be a positive integer, got '") + env + "'");
  omp_set_num_threads(static_cast<int>(std::min<long>(n, omp_get_max_threads())));
}

void tune_allocator() {
  mallopt(M_MMAP_THRESHOLD, 32 << 20);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const DivergenceError*>(&e)) return 4;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ShapeError*>(&e)) return 2;
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const FormatError*>(&e)) return 3;
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return 2;
  return 1;
}

nlohmann::json run_task(const RunConfig& config) {
  config.validate();
  switch (config.task) {
    case Task::fit_image:
      return run_fit_image(config);
    case Task::fit_audio:
      return run_fit_audio(config);
    case Task::fit_occupancy:
      return run_fit_occupancy(config);
    case Task::denoise:
      return run_denoise(config);
    case Task::superres:
      return run_superres(config);
    case Task::inpaint:
      return run_inpaint(config);
    case Task::ct_recon:
      return run_ct_recon(config);
    case Task::spectrum:
      return run_spectrum(config);
    case Task::sweep:
      return run_sweep(config);
  }
  throw ConfigError("unknown task");
}

}  // namespace incode::cli
