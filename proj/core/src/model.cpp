#include "raingnn/model.hpp"

#include <cmath>
#include <random>

#include "raingnn/error.hpp"

namespace raingnn {
namespace {

Eigen::MatrixXd relu(const Eigen::MatrixXd& z) { return z.cwiseMax(0.0); }

// relu'(z) with relu'(0) = 0.
Eigen::MatrixXd relu_mask(const Eigen::MatrixXd& z) {
  return (z.array() > 0.0).cast<double>().matrix();
}

void check_input(const GcnModel& model, const Eigen::MatrixXd& a_hat,
                 const Eigen::MatrixXd& x) {
  if (a_hat.rows() != a_hat.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "normalized adjacency must be square");
  }
  if (x.rows() != a_hat.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "feature rows " + std::to_string(x.rows()) +
                                              " vs " + std::to_string(a_hat.rows()) +
                                              " graph nodes");
  }
  if (x.cols() != static_cast<Eigen::Index>(model.feature_dim)) {
    throw Error(ErrorCode::ShapeMismatch, "feature width " + std::to_string(x.cols()) +
                                              " vs model " +
                                              std::to_string(model.feature_dim));
  }
}

template <typename Tensor>
std::span<double> view(Tensor& t) {
  return {t.data(), static_cast<std::size_t>(t.size())};
}
template <typename Tensor>
std::span<const double> view(const Tensor& t) {
  return {t.data(), static_cast<std::size_t>(t.size())};
}

}  // namespace

void GcnConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidArgument, why); };
  if (gcl_widths.empty()) fail("at least one graph convolution layer is required");
  for (std::size_t w : gcl_widths) {
    if (w == 0) fail("graph convolution widths must be positive");
  }
  if (fc_width == 0) fail("fc_width must be positive");
  if (window_length == 0) fail("window_length must be positive");
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (batch_size == 0) fail("batch_size must be positive");
  if (max_epochs == 0) fail("max_epochs must be positive");
  if (patience == 0) fail("patience must be positive");
  if (!(heavy_threshold_mm > 0.0)) fail("heavy_threshold_mm must be positive");
}

std::vector<std::size_t> preset_widths(char preset) {
  switch (preset) {
    case 'A': return {10, 10, 10, 10};
    case 'B': return {16, 32, 64, 128};
    case 'C': return {128, 64, 32};
    case 'D': return {32, 64, 128};
    default:
      throw Error(ErrorCode::InvalidArgument,
                  std::string("unknown model preset '") + preset + "' (expected A-D)");
  }
}

GcnParameters GcnParameters::zeros_like(const GcnParameters& shape) {
  GcnParameters z;
  for (const auto& w : shape.gcl) z.gcl.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  z.fc_weight = Eigen::MatrixXd::Zero(shape.fc_weight.rows(), shape.fc_weight.cols());
  z.fc_bias = Eigen::VectorXd::Zero(shape.fc_bias.size());
  z.out_weight = Eigen::VectorXd::Zero(shape.out_weight.size());
  z.out_bias = 0.0;
  return z;
}

std::vector<std::span<double>> GcnParameters::tensors() {
  std::vector<std::span<double>> out;
  for (auto& w : gcl) out.push_back(view(w));
  out.push_back(view(fc_weight));
  out.push_back(view(fc_bias));
  out.push_back(view(out_weight));
  out.emplace_back(&out_bias, 1);
  return out;
}

std::vector<std::span<const double>> GcnParameters::tensors() const {
  std::vector<std::span<const double>> out;
  for (const auto& w : gcl) out.push_back(view(w));
  out.push_back(view(fc_weight));
  out.push_back(view(fc_bias));
  out.push_back(view(out_weight));
  out.emplace_back(&out_bias, 1);
  return out;
}

std::vector<std::string> GcnParameters::tensor_names() const {
  std::vector<std::string> names;
  for (std::size_t l = 0; l < gcl.size(); ++l) names.push_back("gcl" + std::to_string(l));
  names.insert(names.end(), {"fc_weight", "fc_bias", "out_weight", "out_bias"});
  return names;
}

std::size_t GcnParameters::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors()) n += t.size();
  return n;
}

bool GcnParameters::operator==(const GcnParameters& other) const {
  if (gcl.size() != other.gcl.size()) return false;
  for (std::size_t l = 0; l < gcl.size(); ++l) {
    if (gcl[l].rows() != other.gcl[l].rows() || gcl[l].cols() != other.gcl[l].cols()) {
      return false;
    }
  }
  if (fc_weight.rows() != other.fc_weight.rows()) return false;
  const auto a = tensors();
  const auto b = other.tensors();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return false;
    for (std::size_t k = 0; k < a[i].size(); ++k) {
      if (a[i][k] != b[i][k]) return false;
    }
  }
  return true;
}

double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

GcnModel init_model(const GcnConfig& config, std::size_t feature_dim, std::uint64_t seed) {
  config.validate();
  if (feature_dim == 0) throw Error(ErrorCode::InvalidArgument, "feature_dim must be >= 1");

  std::mt19937_64 rng(seed);
  auto glorot = [&rng](std::size_t rows, std::size_t cols) {
    std::uniform_real_distribution<double> dist(-glorot_bound(rows, cols),
                                                glorot_bound(rows, cols));
    Eigen::MatrixXd w(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = dist(rng);
    return w;
  };

  GcnModel model;
  model.config = config;
  model.feature_dim = feature_dim;
  std::size_t width = feature_dim;
  for (std::size_t next : config.gcl_widths) {
    model.params.gcl.push_back(glorot(width, next));
    width = next;
  }
  model.params.fc_weight = glorot(width, config.fc_width);
  model.params.fc_bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(config.fc_width));
  model.params.out_weight = glorot(config.fc_width, 1).col(0);
  model.params.out_bias = 0.0;
  return model;
}

Eigen::MatrixXd gcl_forward(const Eigen::MatrixXd& h, const Eigen::MatrixXd& a_hat,
                            const Eigen::MatrixXd& w) {
  if (a_hat.rows() != a_hat.cols() || a_hat.cols() != h.rows() || h.cols() != w.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "gcl_forward: Â " + std::to_string(a_hat.rows()) +
                                              "x" + std::to_string(a_hat.cols()) + ", H " +
                                              std::to_string(h.rows()) + "x" +
                                              std::to_string(h.cols()) + ", W " +
                                              std::to_string(w.rows()) + "x" +
                                              std::to_string(w.cols()));
  }
  return relu((a_hat * h) * w);
}

ForwardCache forward_cached(const GcnModel& model, const Eigen::MatrixXd& a_hat,
                            const Eigen::MatrixXd& x) {
  check_input(model, a_hat, x);
  const GcnParameters& p = model.params;
  ForwardCache c;
  Eigen::MatrixXd h = x;
  for (const auto& w : p.gcl) {
    c.inputs.push_back(h);
    c.aggregated.push_back(a_hat * h);
    c.pre_relu.push_back(c.aggregated.back() * w);
    h = relu(c.pre_relu.back());
  }
  c.hidden = h;
  c.fc_pre_relu = (h * p.fc_weight).rowwise() + p.fc_bias.transpose();
  c.fc_out = relu(c.fc_pre_relu);
  c.prediction = (c.fc_out * p.out_weight).array() + p.out_bias;
  return c;
}

Eigen::VectorXd forward(const GcnModel& model, const Eigen::MatrixXd& a_hat,
                        const Eigen::MatrixXd& x) {
  return forward_cached(model, a_hat, x).prediction;
}

double node_mse(const Eigen::VectorXd& prediction, const Eigen::VectorXd& target) {
  if (prediction.size() != target.size()) {
    throw Error(ErrorCode::ShapeMismatch, "prediction/target lengths differ");
  }
  if (prediction.size() == 0) throw Error(ErrorCode::ShapeMismatch, "empty graph");
  return (prediction - target).squaredNorm() / static_cast<double>(prediction.size());
}

double accumulate_gradients(const GcnModel& model, const Eigen::MatrixXd& a_hat,
                            const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            double weight, GcnParameters& grads) {
  const ForwardCache c = forward_cached(model, a_hat, x);
  const double loss = node_mse(c.prediction, y);
  const GcnParameters& p = model.params;
  const auto nodes = static_cast<double>(y.size());

  // d loss / d ŷ
  const Eigen::VectorXd d_pred = (weight * 2.0 / nodes) * (c.prediction - y);
  grads.out_weight.noalias() += c.fc_out.transpose() * d_pred;
  grads.out_bias += d_pred.sum();

  const Eigen::MatrixXd d_fc_pre =
      ((d_pred * p.out_weight.transpose()).array() * relu_mask(c.fc_pre_relu).array())
          .matrix();
  grads.fc_weight.noalias() += c.hidden.transpose() * d_fc_pre;
  grads.fc_bias.noalias() += d_fc_pre.colwise().sum().transpose();

  Eigen::MatrixXd d_h = d_fc_pre * p.fc_weight.transpose();
  for (std::size_t l = p.gcl.size(); l-- > 0;) {
    const Eigen::MatrixXd d_z = (d_h.array() * relu_mask(c.pre_relu[l]).array()).matrix();
    grads.gcl[l].noalias() += c.aggregated[l].transpose() * d_z;
    if (l > 0) d_h = a_hat.transpose() * (d_z * p.gcl[l].transpose());
  }
  return loss;
}

LossAndGradients backward(const GcnModel& model, const Eigen::MatrixXd& a_hat,
                          std::span<const Eigen::MatrixXd> xs,
                          std::span<const Eigen::VectorXd> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::ShapeMismatch, "batch sizes differ");
  if (xs.empty()) throw Error(ErrorCode::ShapeMismatch, "empty batch");
  LossAndGradients out{0.0, GcnParameters::zeros_like(model.params)};
  const double weight = 1.0 / static_cast<double>(xs.size());
  for (std::size_t s = 0; s < xs.size(); ++s) {
    out.loss += weight * accumulate_gradients(model, a_hat, xs[s], ys[s], weight, out.grads);
  }
  return out;
}

LossAndGradients backward(const GcnModel& model, const Eigen::MatrixXd& a_hat,
                          const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  return backward(model, a_hat, std::span<const Eigen::MatrixXd>(&x, 1),
                  std::span<const Eigen::VectorXd>(&y, 1));
}

RainForecast classify_rain(double raw_mm, double threshold_mm) {
  RainForecast f;
  f.raw_mm = raw_mm;
  f.rain_mm = std::max(0.0, raw_mm);
  f.heavy = f.rain_mm >= threshold_mm;
  return f;
}

std::vector<RainForecast> predict_with_flags(const GcnModel& model,
                                             const Eigen::MatrixXd& a_hat,
                                             const Eigen::MatrixXd& x, double threshold_mm) {
  const Eigen::VectorXd raw = forward(model, a_hat, x);
  std::vector<RainForecast> out;
  out.reserve(static_cast<std::size_t>(raw.size()));
  for (Eigen::Index i = 0; i < raw.size(); ++i) out.push_back(classify_rain(raw[i], threshold_mm));
  return out;
}

}  // namespace raingnn
