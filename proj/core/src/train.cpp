#include "raingnn/train.hpp"

#include <algorithm>
#include <limits>
#include <span>

#include "raingnn/error.hpp"
#include "raingnn/optimizer.hpp"

namespace raingnn {

double dataset_mse(const GcnModel& model, const Eigen::MatrixXd& a_hat, const SampleSet& set) {
  if (set.size() == 0) throw Error(ErrorCode::EmptySplit, "cannot score an empty block");
  double total = 0.0;
  for (std::size_t s = 0; s < set.size(); ++s) {
    total += node_mse(forward(model, a_hat, set.features[s]), set.targets[s]);
  }
  return total / static_cast<double>(set.size());
}

TrainResult train(GcnModel model, const Eigen::MatrixXd& a_hat, const SampleSet& train_set,
                  const SampleSet& validation_set) {
  const GcnConfig& cfg = model.config;
  cfg.validate();
  if (train_set.size() == 0) throw Error(ErrorCode::EmptySplit, "empty training block");
  if (validation_set.size() == 0) throw Error(ErrorCode::EmptySplit, "empty validation block");

  AdamOptimizer optimizer(model.params, AdamHyper{.learning_rate = cfg.learning_rate});
  TrainReport report;
  GcnParameters best = model.params;
  double best_val = std::numeric_limits<double>::infinity();
  double reference_val = best_val;
  std::size_t stale_epochs = 0;

  const std::span<const Eigen::MatrixXd> xs(train_set.features);
  const std::span<const Eigen::VectorXd> ys(train_set.targets);
  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < train_set.size(); begin += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, train_set.size() - begin);
      const LossAndGradients lg =
          backward(model, a_hat, xs.subspan(begin, count), ys.subspan(begin, count));
      optimizer.step(model.params, lg.grads);
      epoch_loss += lg.loss * static_cast<double>(count);
    }
    report.train_loss_history.push_back(epoch_loss / static_cast<double>(train_set.size()));
    const double val = dataset_mse(model, a_hat, validation_set);
    report.val_loss_history.push_back(val);
    report.epochs_run = epoch + 1;

    if (val < best_val) {
      best_val = val;
      best = model.params;
      report.best_epoch = epoch;
    }
    if (val < reference_val - kEarlyStopMinDelta) {
      reference_val = val;
      stale_epochs = 0;
    } else if (++stale_epochs >= cfg.patience) {
      report.stopped_early = true;
      break;
    }
  }
  model.params = std::move(best);
  return {std::move(model), std::move(report)};
}

}  // namespace raingnn
