#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "raingnn/dataio.hpp"
#include "raingnn/model.hpp"

namespace raingnn {

// Validation MSE must drop by more than this (mm²) to reset patience.
inline constexpr double kEarlyStopMinDelta = 1e-6;

struct TrainReport {
  std::size_t epochs_run = 0;
  std::vector<double> train_loss_history;  // mean batch MSE during each epoch
  std::vector<double> val_loss_history;    // MSE after each epoch
  std::size_t best_epoch = 0;              // index into val_loss_history
  bool stopped_early = false;

  bool operator==(const TrainReport&) const = default;
};

struct TrainResult {
  GcnModel model;  // weights of the best validation epoch
  TrainReport report;
};

// Mean over samples of the node MSE.
double dataset_mse(const GcnModel& model, const Eigen::MatrixXd& a_hat, const SampleSet& set);

// Mini-batch Adam over chronologically ordered days, `batch_size` days per
// step, with patience-based early stopping on validation MSE. The returned
// model carries the best-epoch weights.
TrainResult train(GcnModel model, const Eigen::MatrixXd& a_hat, const SampleSet& train_set,
                  const SampleSet& validation_set);

}  // namespace raingnn
