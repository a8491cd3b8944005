#include "incode/ct/ct_fit.hpp"

#include "incode/signals/grid.hpp"
#include "incode/signals/metrics.hpp"

namespace incode::ct {

void CtProblem::validate() const {
  measured.validate();
  if (image_size < 2) throw ConfigError("ct: image size must be >= 2");
  if (ground_truth &&
      (ground_truth->height != image_size || ground_truth->width != image_size || ground_truth->channels != 1))
    throw ShapeError("ct: ground truth must be a single-channel image_size x image_size image");
}

train::TrainConfig ct_train_defaults() {
  train::TrainConfig t;
  t.epochs = 2000;
  t.lr0 = 2e-4;
  t.alpha = 0.4;
  return t;
}

train::Dataset ct_dataset(const CtProblem& problem) {
  train::Dataset d;
  d.coords = signals::make_grid({problem.image_size, problem.image_size}).coords;
  const Matrix& v = problem.measured.values;
  d.conditioning.assign(v.data(), v.data() + v.size());
  return d;
}

train::CustomLoss sinogram_loss(const CtProblem& problem) {
  return [&problem](const Matrix& prediction, Matrix* grad) {
    const int n = problem.image_size;
    if (prediction.rows() != static_cast<Eigen::Index>(n) * n || prediction.cols() != 1)
      throw ShapeError("ct: prediction must be a single-channel image");
    const Matrix image = Eigen::Map<const Matrix>(prediction.data(), n, n);
    const Sinogram& m = problem.measured;
    const Matrix residual = radon(image, m.angles, m.bins) - m.values;
    const auto count = static_cast<double>(residual.size());
    if (grad) {
      const Matrix back = radon_adjoint(residual, m.angles, n);
      *grad = Eigen::Map<const Matrix>(back.data(), static_cast<Eigen::Index>(n) * n, 1) * (2.0 / count);
    }
    return residual.squaredNorm() / count;
  };
}

CtResult ct_fit(const CtProblem& problem, train::ModelBundle& model, const train::TrainConfig& train,
                const train::LossConfig& loss, const std::function<void(const train::EpochLog&)>& on_epoch) {
  problem.validate();
  const auto& cc = model.composer.config();
  if (cc.input_dim != 2 || cc.output_dim != 1) throw ConfigError("ct: composer must map 2-D coordinates to 1 value");
  const train::Dataset data = ct_dataset(problem);
  train::FitHooks hooks;
  hooks.custom_loss = sinogram_loss(problem);
  hooks.on_epoch = on_epoch;
  if (problem.ground_truth)
    hooks.evaluate = [&problem](const train::Evaluation& ev, const train::ModelBundle&) {
      return signals::psnr(ev.prediction, problem.ground_truth->values);
    };
  train::FitResult fitted = train::fit(model, data, train, loss, hooks);
  CtResult r;
  r.reconstruction = signals::ImageSignal(problem.image_size, problem.image_size, 1);
  r.reconstruction.values = fitted.final.prediction;
  r.log = std::move(fitted.log);
  r.final = std::move(fitted.final);
  return r;
}

}  // namespace incode::ct
