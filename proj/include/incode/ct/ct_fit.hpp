#pragma once

#include <functional>
#include <optional>

#include "incode/ct/radon.hpp"
#include "incode/signals/image.hpp"
#include "incode/training/fit.hpp"

namespace incode::ct {

struct CtProblem {
  Sinogram measured;
  int image_size = 0;  ///< reconstruct an image_size x image_size image
  /// When present, the log's psnr column compares against it.
  std::optional<signals::ImageSignal> ground_truth;

  void validate() const;
};

/// 2000 epochs, lr 2e-4, alpha 0.4.
train::TrainConfig ct_train_defaults();

struct CtResult {
  signals::ImageSignal reconstruction;
  std::vector<train::EpochLog> log;
  train::Evaluation final;
};

/// Fits the composer so that radon(composer(grid)) matches the measured
/// sinogram (mean squared error over detector readings). The conditioning
/// signal is the raster-flattened measured sinogram.
CtResult ct_fit(const CtProblem& problem, train::ModelBundle& model, const train::TrainConfig& train,
                const train::LossConfig& loss = {},
                const std::function<void(const train::EpochLog&)>& on_epoch = {});

/// Dataset used by ct_fit: image grid coordinates, no targets.
train::Dataset ct_dataset(const CtProblem& problem);
/// Mean squared sinogram residual of an image and its gradient.
train::CustomLoss sinogram_loss(const CtProblem& problem);

}  // namespace incode::ct
