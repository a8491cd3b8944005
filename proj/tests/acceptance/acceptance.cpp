// Acceptance criteria 1-11. Prints one PASS/FAIL line per criterion.
// Arguments select a subset, e.g. "3 10". Exits non-zero when a criterion could
// not be evaluated, or with --strict when any criterion fails.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "incode/cli/run_config.hpp"
#include "incode/cli/tasks.hpp"
#include "incode/ct/radon.hpp"
#include "incode/nn/composer.hpp"
#include "incode/signals/synthetic.hpp"
#include "incode/training/model.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace incode;
using cli::RunConfig;
using cli::Task;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

fs::path work_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "incode_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunConfig run_config(Task task, const std::string& name) {
  RunConfig c = cli::task_defaults(task);
  c.quiet = true;
  c.out = (work_dir() / name).string();
  return c;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

// 1. Analytic gradients of the full objective agree with central differences.
Outcome gradient_exactness() {
  Rng rng(2024);
  double worst = 0.0;
  std::size_t checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    train::BundleConfig b;
    b.composer.input_dim = 1 + static_cast<int>(rng() % 3);
    b.composer.output_dim = 1 + static_cast<int>(rng() % 3);
    b.composer.hidden_layers = 2 + static_cast<int>(rng() % 2);
    b.composer.width = 2 + static_cast<int>(rng() % 7);
    b.harmonizer.input_dim = 4;
    b.harmonizer.widths = {6, 4};
    b.harmonizer.weight_std = 0.3;
    b.harmonizer.bias_value = trial % 2 == 0 ? -0.4 : 0.31;
    b.harmonizer.layer_norm = trial % 3 == 0;
    b.extractor.channels = {3, 4};
    b.extractor.kernels = {3, 2};
    train::ModelBundle model = train::ModelBundle::create(b, 100 + trial);

    train::Dataset data;
    data.coords = random_matrix(7, b.composer.input_dim, rng);
    data.targets = random_matrix(7, b.composer.output_dim, rng);
    const Matrix signal = random_matrix(16, 1, rng);
    data.conditioning.assign(signal.data(), signal.data() + signal.size());

    const train::LossConfig loss;
    const train::Evaluation ev = train::evaluate_objective(model, data, loss, {65536, true, {}});
    const auto blocks = train::parameter_blocks(model, ev.grads);
    for (const auto& block : blocks)
      for (std::size_t i = 0; i < block.values.size(); ++i) {
        const double fd = incode::testing::central_difference(
            [&] { return train::evaluate_objective(model, data, loss, {65536, false, {}}).total(); },
            &block.values[i]);
        worst = std::max(worst, incode::testing::relative_error(block.grads[i], fd));
        ++checked;
      }
  }
  return {worst < 1e-4, fmt("max relative error %.3g over %zu parameters in 20 configurations", worst, checked)};
}

// 2. Pinned (1, 1, 0, 0) reproduces a direct SIREN evaluation.
Outcome siren_reduction() {
  nn::ComposerConfig cfg{2, 3, 5, 64, 30.0, 30.0};
  Rng rng(7);
  const nn::ComposerNetwork net(cfg, rng);
  const Matrix coords = random_matrix(10000, 2, rng);
  const Matrix fast = nn::composer_predict(net, coords, nn::ActivationParams::from_effective({1, 1, 0, 0}));
  double worst = 0.0;
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    const std::vector<double> ref = incode::testing::direct_siren(net, {coords(i, 0), coords(i, 1)});
    for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(fast(i, k) - ref[k]));
  }
  return {worst <= 1e-12, fmt("max |difference| %.3g on 10^4 points", worst)};
}

// 3 and 10 share the same runs.
struct ImageRuns {
  std::vector<nlohmann::json> incode, siren;
};

const ImageRuns& image_runs() {
  static const ImageRuns runs = [] {
    ImageRuns r;
    for (std::uint64_t seed : {0, 1, 2})
      for (const char* model : {"incode", "siren"}) {
        RunConfig c = run_config(Task::fit_image, fmt("image_%s_%d", model, static_cast<int>(seed)));
        c.model = model;
        c.width = 128;
        c.depth = 5;
        c.train.epochs = 500;
        c.train.seed = seed;
        (std::string(model) == "incode" ? r.incode : r.siren).push_back(cli::run_task(c));
      }
    return r;
  }();
  return runs;
}

double mean_psnr(const std::vector<nlohmann::json>& runs) {
  double sum = 0.0;
  for (const auto& m : runs) sum += m.at("psnr").get<double>();
  return sum / static_cast<double>(runs.size());
}

Outcome image_gain() {
  const ImageRuns& r = image_runs();
  const double incode = mean_psnr(r.incode), siren = mean_psnr(r.siren);
  return {incode >= siren, fmt("mean PSNR INCODE %.2f dB vs SIREN %.2f dB over 3 seeds", incode, siren)};
}

Outcome constraint_satisfaction() {
  const ImageRuns& r = image_runs();
  bool ok = true;
  double worst_penalty = 0.0, min_a = INFINITY, min_b = INFINITY, min_c = INFINITY, min_d = INFINITY;
  for (const auto& m : r.incode) {
    const double penalty = m.at("penalty"), a = m.at("a"), b = m.at("b"), c = m.at("c"), d = m.at("d");
    ok = ok && penalty < 1e-3 && a >= 1 - 1e-3 && b >= 1 - 1e-3 && c >= -1e-3 && d >= -1e-3;
    worst_penalty = std::max(worst_penalty, penalty);
    min_a = std::min(min_a, a);
    min_b = std::min(min_b, b);
    min_c = std::min(min_c, c);
    min_d = std::min(min_d, d);
  }
  return {ok, fmt("max penalty %.3g; min a %.4f, b %.4f, c %.4f, d %.4f", worst_penalty, min_a, min_b, min_c, min_d)};
}

// 4. Denoising beats the noisy input.
Outcome denoising() {
  RunConfig c = run_config(Task::denoise, "denoise");
  c.width = 128;
  c.depth = 5;
  const nlohmann::json m = cli::run_task(c);
  const double recon = m.at("psnr"), noisy = m.at("noisy_psnr");
  return {recon >= noisy + 2.0, fmt("reconstruction %.2f dB vs noisy %.2f dB (gain %.2f dB)", recon, noisy, recon - noisy)};
}

// 5. Super-resolution ordering at 2x.
Outcome superres() {
  double psnr[2];
  int i = 0;
  for (const char* model : {"incode", "siren"}) {
    RunConfig c = run_config(Task::superres, fmt("superres_%s", model));
    c.model = model;
    c.factor = 2;
    c.width = 128;
    c.depth = 5;
    psnr[i++] = cli::run_task(c).at("psnr").get<double>();
  }
  return {psnr[0] >= psnr[1], fmt("128x128 PSNR INCODE %.2f dB vs SIREN %.2f dB", psnr[0], psnr[1])};
}

// 6. Radon transform against closed forms.
Outcome radon_analytics() {
  // Chord length of a disk of radius R at offset s is 2 sqrt(R^2 - s^2).
  const int n = 64;
  const double radius = 30.0;
  const signals::ImageSignal disk = signals::disk_image(n, radius);
  const Matrix image = Eigen::Map<const Matrix>(disk.values.data(), n, n);
  const std::vector<double> angles = ct::uniform_angles(12);
  const int bins = ct::default_bins(n);
  const Matrix sino = ct::radon(image, angles, bins);
  double chord = 0.0;
  for (std::size_t a = 0; a < angles.size(); ++a)
    for (int k = 0; k < bins; ++k) {
      const double s = k - (bins - 1) / 2.0;
      if (std::abs(s) > 0.9 * radius) continue;
      const double expected = 2.0 * std::sqrt(radius * radius - s * s);
      chord = std::max(chord, std::abs(sino(a, k) - expected) / expected);
    }

  Rng rng(11);
  const std::vector<double> many = ct::uniform_angles(37);
  const Matrix x = random_matrix(n, n, rng);
  const Matrix y = random_matrix(static_cast<Eigen::Index>(many.size()), bins, rng);
  const double lhs = (ct::radon(x, many, bins).array() * y.array()).sum();
  const double rhs = (x.array() * ct::radon_adjoint(y, many, n).array()).sum();
  const double adjoint = std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));

  const Matrix x2 = random_matrix(n, n, rng);
  const double alpha = 0.7, beta = -1.3;
  const Matrix combo = ct::radon(Matrix(alpha * x + beta * x2), many, bins);
  const Matrix split = alpha * ct::radon(x, many, bins) + beta * ct::radon(x2, many, bins);
  const double linearity = (combo - split).cwiseAbs().maxCoeff() / split.cwiseAbs().maxCoeff();

  return {chord <= 0.02 && adjoint <= 1e-6 && linearity <= 1e-10,
          fmt("chord max rel err %.4f (|s| <= 0.9R), adjoint rel err %.3g, linearity rel err %.3g", chord, adjoint,
              linearity)};
}

// 7. CT reconstruction improves with more projection angles.
Outcome ct_sweep() {
  std::vector<double> psnr;
  std::string detail = "PSNR";
  for (int angles : {30, 60, 120, 180}) {
    RunConfig c = run_config(Task::ct_recon, fmt("ct_%d", angles));
    c.angles = angles;
    c.ct_size = 64;
    c.width = 128;
    c.depth = 5;
    psnr.push_back(cli::run_task(c).at("psnr").get<double>());
    detail += fmt(" %d:%.2f", angles, psnr.back());
  }
  bool ok = true;
  for (std::size_t i = 1; i < psnr.size(); ++i) ok = ok && psnr[i] >= psnr[i - 1] - 0.3;
  return {ok, detail + " dB"};
}

// 8. Occupancy of an analytic sphere.
Outcome occupancy() {
  RunConfig c = run_config(Task::fit_occupancy, "occupancy");
  c.resolution = 32;
  c.width = 128;
  c.depth = 5;
  const double iou = cli::run_task(c).at("iou");
  return {iou >= 0.95, fmt("IoU %.4f at threshold 0.5 (32^3, %d epochs)", iou, c.train.epochs)};
}

// 9. First-layer spectra after training on the chirp.
Outcome spectrum_direction() {
  const RunConfig c = run_config(Task::spectrum, "spectrum");
  const nlohmann::json m = cli::run_task(c);
  const double incode = m.at("incode").at("energy_fraction"), siren = m.at("siren").at("energy_fraction");
  return {incode >= siren,
          fmt("energy above %.2f Nyquist: INCODE %.4f vs SIREN %.4f", c.cutoff, incode, siren)};
}

// 11. Identical config and seed give byte-identical artifacts, also across thread counts.
Outcome reproducibility() {
  std::vector<RunConfig> configs;
  {
    RunConfig c = run_config(Task::fit_image, "repro_image");
    c.width = 64;
    c.depth = 3;
    c.train.epochs = 40;
    configs.push_back(c);
  }
  {
    RunConfig c = run_config(Task::inpaint, "repro_inpaint");
    c.width = 64;
    c.depth = 3;
    c.train.epochs = 40;
    configs.push_back(c);
  }
  {
    RunConfig c = run_config(Task::ct_recon, "repro_ct");
    c.width = 32;
    c.depth = 3;
    c.train.epochs = 20;
    c.ct_size = 32;
    c.angles = 30;
    configs.push_back(c);
  }
  {
    RunConfig c = run_config(Task::fit_audio, "repro_audio");
    c.width = 32;
    c.depth = 3;
    c.train.epochs = 20;
    c.seconds = 0.25;
    configs.push_back(c);
  }
  const int threads = omp_get_max_threads();
  int compared = 0;
  bool ok = true;
  for (const RunConfig& base : configs) {
    RunConfig again = base;
    again.out = base.out + "_again";
    omp_set_num_threads(1);
    cli::run_task(base);
    omp_set_num_threads(std::max(3, threads));
    cli::run_task(again);
    omp_set_num_threads(threads);
    for (const char* file : {"model.inc", "model.inc.json", "log.csv", "metrics.json"}) {
      ok = ok && read_bytes(fs::path(base.out) / file) == read_bytes(fs::path(again.out) / file);
      ++compared;
    }
  }
  return {ok, fmt("%d artifact pairs from 4 tasks compared (1 vs %d threads)", compared, std::max(3, threads))};
}

}  // namespace

int main(int argc, char** argv) {
  cli::tune_allocator();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient exactness", gradient_exactness},
      {"SIREN reduction", siren_reduction},
      {"directional image gain", image_gain},
      {"denoising efficacy", denoising},
      {"super-resolution ordering", superres},
      {"radon analytics", radon_analytics},
      {"CT sweep monotonicity", ct_sweep},
      {"occupancy IoU", occupancy},
      {"spectrum direction", spectrum_direction},
      {"constraint satisfaction", constraint_satisfaction},
      {"reproducibility", reproducibility},
  };
  std::set<int> selected;
  bool strict = false;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--strict")
      strict = true;
    else
      selected.insert(std::atoi(argv[i]));
  }

  int failures = 0, errors = 0, evaluated = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
      ++errors;
    }
    ++evaluated;
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", outcome.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                outcome.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  std::printf("summary: %d/%d criteria passed, %d evaluation errors\n", evaluated - failures, evaluated, errors);
  if (errors > 0) return 2;
  return strict && failures > 0 ? 1 : 0;
}
