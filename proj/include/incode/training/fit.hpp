#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

#include "incode/training/loss.hpp"
#include "incode/training/model.hpp"
#include "incode/training/schedule.hpp"

namespace incode::train {

/// Metrics of the model after `epoch` optimizer steps.
struct EpochLog {
  int epoch = 0;
  double loss = 0.0;  ///< data term
  double penalty = 0.0;
  nn::ParamQuad params;  ///< effective (a, b, c, d)
  double psnr = 0.0;     ///< NaN when the task has no evaluator
  double seconds = 0.0;
};

/// Writes `epoch,loss,penalty,a,b,c,d,psnr,seconds` with round-trip precision.
void write_epoch_csv(std::ostream& out, const std::vector<EpochLog>& log);
void write_epoch_csv(const std::filesystem::path& path, const std::vector<EpochLog>& log);
std::vector<EpochLog> read_epoch_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal form; "inf"/"-inf"/"nan" for non-finite values.
std::string format_real(double v);

struct FitHooks {
  /// Task metric (PSNR) for the logged state.
  std::function<double(const Evaluation&, const ModelBundle&)> evaluate;
  CustomLoss custom_loss;
  std::function<void(const EpochLog&)> on_epoch;
};

struct FitResult {
  std::vector<EpochLog> log;
  Evaluation final;  ///< state after the last step, without gradients
};

/// Raised when the loss or a gradient becomes non-finite. `last_good` is the
/// model before the failing epoch.
class FitDiverged : public DivergenceError {
 public:
  FitDiverged(const std::string& what, ModelBundle last_good, std::vector<EpochLog> log)
      : DivergenceError(what), last_good(std::move(last_good)), log(std::move(log)) {}
  ModelBundle last_good;
  std::vector<EpochLog> log;
};

/// Full-batch Adam on data loss + constraint penalty. Row e of the log
/// describes the model after e updates (e = 1..epochs).
FitResult fit(ModelBundle& model, const Dataset& data, const TrainConfig& train, const LossConfig& loss,
              const FitHooks& hooks = {});

}  // namespace incode::train
