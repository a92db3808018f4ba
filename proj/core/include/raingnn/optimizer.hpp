#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "raingnn/model.hpp"

namespace raingnn {

struct AdamHyper {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First and second moment estimates for one flat tensor.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

// One bias-corrected Adam update of `params` in place; `t` counts from 1.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               std::size_t t, const AdamHyper& hyper);

// Adam over every tensor of a GcnParameters set.
class AdamOptimizer {
 public:
  AdamOptimizer(const GcnParameters& shape, AdamHyper hyper);

  void step(GcnParameters& params, const GcnParameters& grads);

  std::size_t steps_taken() const { return t_; }
  const AdamHyper& hyper() const { return hyper_; }

 private:
  AdamHyper hyper_;
  std::vector<AdamState> states_;
  std::size_t t_ = 0;
};

}  // namespace raingnn
