#include "incode/training/fit.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace incode::train {
namespace {

constexpr const char* kHeader = "epoch,loss,penalty,a,b,c,d,psnr,seconds";

double parse_real(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("epoch log: bad number '" + s + "'");
  return v;
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_epoch_csv(std::ostream& out, const std::vector<EpochLog>& log) {
  out << kHeader << '\n';
  for (const EpochLog& r : log)
    out << r.epoch << ',' << format_real(r.loss) << ',' << format_real(r.penalty) << ','
        << format_real(r.params.a) << ',' << format_real(r.params.b) << ',' << format_real(r.params.c) << ','
        << format_real(r.params.d) << ',' << format_real(r.psnr) << ',' << format_real(r.seconds) << '\n';
}

void write_epoch_csv(const std::filesystem::path& path, const std::vector<EpochLog>& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_epoch_csv(out, log);
  if (!out) throw IoError("cannot write " + path.string());
}

std::vector<EpochLog> read_epoch_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw FormatError(path.string() + ": missing epoch log header");
  std::vector<EpochLog> log;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 9) throw FormatError(path.string() + ": expected 9 columns");
    EpochLog r;
    r.epoch = static_cast<int>(parse_real(f[0]));
    r.loss = parse_real(f[1]);
    r.penalty = parse_real(f[2]);
    r.params = {parse_real(f[3]), parse_real(f[4]), parse_real(f[5]), parse_real(f[6])};
    r.psnr = parse_real(f[7]);
    r.seconds = parse_real(f[8]);
    log.push_back(r);
  }
  return log;
}

FitResult fit(ModelBundle& model, const Dataset& data, const TrainConfig& train, const LossConfig& loss,
              const FitHooks& hooks) {
  train.validate();
  loss.validate();
  data.validate(model);
  const auto start = std::chrono::steady_clock::now();
  ObjectiveOptions options{train.chunk, true, hooks.custom_loss};
  AdamState adam;
  FitResult result;
  ModelBundle last_good = model;

  for (int epoch = 0; epoch <= train.epochs; ++epoch) {
    options.want_gradients = epoch < train.epochs;
    Evaluation ev = evaluate_objective(model, data, loss, options);
    if (!std::isfinite(ev.total()))
      throw FitDiverged("loss became non-finite after " + std::to_string(epoch) + " epochs", std::move(last_good),
                        std::move(result.log));
    if (epoch > 0) {
      EpochLog row;
      row.epoch = epoch;
      row.loss = ev.data_loss;
      row.penalty = ev.penalty;
      row.params = ev.params.effective();
      row.psnr = hooks.evaluate ? hooks.evaluate(ev, model) : std::numeric_limits<double>::quiet_NaN();
      if (train.record_time)
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      result.log.push_back(row);
      if (hooks.on_epoch) hooks.on_epoch(row);
    }
    if (epoch == train.epochs) {
      result.final = std::move(ev);
      break;
    }
    last_good = model;
    const auto blocks = parameter_blocks(model, ev.grads);
    try {
      adam.step(blocks, lr_at(epoch, train));
    } catch (const DivergenceError& e) {
      throw FitDiverged(e.what(), std::move(last_good), std::move(result.log));
    }
  }
  return result;
}

}  // namespace incode::train
