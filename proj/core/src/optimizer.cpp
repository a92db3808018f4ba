#include "raingnn/optimizer.hpp"

#include <cmath>

#include "raingnn/error.hpp"

namespace raingnn {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               std::size_t t, const AdamHyper& hyper) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw Error(ErrorCode::ShapeMismatch, "adam_step: tensor sizes differ");
  }
  if (t == 0) throw Error(ErrorCode::InvalidArgument, "adam_step: t counts from 1");

  const double steps = static_cast<double>(t);
  const double m_correction = 1.0 - std::pow(hyper.beta1, steps);
  const double v_correction = 1.0 - std::pow(hyper.beta2, steps);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = hyper.beta1 * state.m[i] + (1.0 - hyper.beta1) * g;
    state.v[i] = hyper.beta2 * state.v[i] + (1.0 - hyper.beta2) * g * g;
    const double m_hat = state.m[i] / m_correction;
    const double v_hat = state.v[i] / v_correction;
    params[i] -= hyper.learning_rate * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
  }
}

AdamOptimizer::AdamOptimizer(const GcnParameters& shape, AdamHyper hyper) : hyper_(hyper) {
  for (const auto& t : shape.tensors()) states_.emplace_back(t.size());
}

void AdamOptimizer::step(GcnParameters& params, const GcnParameters& grads) {
  auto p = params.tensors();
  const auto g = grads.tensors();
  if (p.size() != states_.size() || g.size() != states_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "optimizer built for a different model");
  }
  ++t_;
  for (std::size_t i = 0; i < p.size(); ++i) adam_step(p[i], g[i], states_[i], t_, hyper_);
}

}  // namespace raingnn
