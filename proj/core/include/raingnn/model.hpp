#pragma once

// Graph convolutional regressor.
//
//   H^0     = X                                  (|V| x feature_dim)
//   H^{l+1} = relu(Â H^l W^l)                    for each graph convolution
//   F       = relu(H^L W_fc + 1 b_fc^T)          shared per-node dense layer
//   ŷ       = F w_out + b_out                    linear, one value per node
//
// Â is the symmetric-normalized adjacency; graph convolutions carry no bias.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace raingnn {

struct GcnConfig {
  std::vector<std::size_t> gcl_widths = {10, 10, 10, 10};
  std::size_t fc_width = 32;
  std::size_t window_length = 7;
  double learning_rate = 0.01;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 500;
  std::size_t patience = 10;
  std::uint64_t seed = 42;
  double heavy_threshold_mm = 8.0;

  // Throws InvalidArgument on an empty stack or a non-positive hyperparameter.
  void validate() const;

  bool operator==(const GcnConfig&) const = default;
};

// Layer widths of the four reference architectures, preset 'A' to 'D'.
std::vector<std::size_t> preset_widths(char preset);

struct GcnParameters {
  std::vector<Eigen::MatrixXd> gcl;  // W^l, (in x out)
  Eigen::MatrixXd fc_weight;         // (last gcl width x fc_width)
  Eigen::VectorXd fc_bias;           // fc_width
  Eigen::VectorXd out_weight;        // fc_width
  double out_bias = 0.0;

  static GcnParameters zeros_like(const GcnParameters& shape);

  // Every tensor as a flat view, in a fixed order: gcl..., fc_weight,
  // fc_bias, out_weight, out_bias.
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;
  std::vector<std::string> tensor_names() const;
  std::size_t parameter_count() const;

  bool operator==(const GcnParameters& other) const;
};

struct GcnModel {
  GcnConfig config;
  std::size_t feature_dim = 0;
  GcnParameters params;
};

// Glorot-uniform weights in ±sqrt(6 / (fan_in + fan_out)), zero biases.
GcnModel init_model(const GcnConfig& config, std::size_t feature_dim, std::uint64_t seed);

double glorot_bound(std::size_t fan_in, std::size_t fan_out);

// relu(Â H W). Throws ShapeMismatch.
Eigen::MatrixXd gcl_forward(const Eigen::MatrixXd& h, const Eigen::MatrixXd& a_hat,
                            const Eigen::MatrixXd& w);

// Intermediate values kept for backpropagation.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> inputs;      // H^l entering layer l
  std::vector<Eigen::MatrixXd> aggregated;  // Â H^l
  std::vector<Eigen::MatrixXd> pre_relu;    // Â H^l W^l
  Eigen::MatrixXd hidden;                   // H^L
  Eigen::MatrixXd fc_pre_relu;
  Eigen::MatrixXd fc_out;
  Eigen::VectorXd prediction;
};

ForwardCache forward_cached(const GcnModel& model, const Eigen::MatrixXd& a_hat,
                            const Eigen::MatrixXd& x);

// Raw per-node output in millimetres (may be negative).
Eigen::VectorXd forward(const GcnModel& model, const Eigen::MatrixXd& a_hat,
                        const Eigen::MatrixXd& x);

// Mean over nodes of the squared error.
double node_mse(const Eigen::VectorXd& prediction, const Eigen::VectorXd& target);

// Adds `weight` times the gradient of node_mse(forward(x), y) into `grads`
// and returns the unweighted loss. relu'(0) is taken as 0.
double accumulate_gradients(const GcnModel& model, const Eigen::MatrixXd& a_hat,
                            const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            double weight, GcnParameters& grads);

struct LossAndGradients {
  double loss = 0.0;
  GcnParameters grads;
};

// Gradient of the mean node MSE over a batch of graph snapshots.
LossAndGradients backward(const GcnModel& model, const Eigen::MatrixXd& a_hat,
                          std::span<const Eigen::MatrixXd> xs,
                          std::span<const Eigen::VectorXd> ys);
LossAndGradients backward(const GcnModel& model, const Eigen::MatrixXd& a_hat,
                          const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

struct RainForecast {
  double raw_mm = 0.0;   // model output, used by the loss
  double rain_mm = 0.0;  // max(0, raw_mm)
  bool heavy = false;    // rain_mm >= threshold
};

RainForecast classify_rain(double raw_mm, double threshold_mm);

std::vector<RainForecast> predict_with_flags(const GcnModel& model,
                                             const Eigen::MatrixXd& a_hat,
                                             const Eigen::MatrixXd& x, double threshold_mm);

}  // namespace raingnn
