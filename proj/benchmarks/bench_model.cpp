#include <benchmark/benchmark.h>

#include <random>

#include "raingnn/model.hpp"

using namespace raingnn;

namespace {

struct Problem {
  GcnModel model;
  Eigen::MatrixXd a_hat;
  std::vector<Eigen::MatrixXd> xs;
  std::vector<Eigen::VectorXd> ys;
};

Problem make_problem(char preset, int nodes, int batch) {
  GcnConfig cfg;
  cfg.gcl_widths = preset_widths(preset);
  Problem p;
  p.model = init_model(cfg, cfg.window_length + 1, 1);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(nodes, nodes, 0.3) + Eigen::MatrixXd::Identity(nodes, nodes);
  Eigen::VectorXd d = a.rowwise().sum().cwiseSqrt().cwiseInverse();
  p.a_hat = d.asDiagonal() * a * d.asDiagonal();
  for (int b = 0; b < batch; ++b) {
    Eigen::MatrixXd x(nodes, static_cast<Eigen::Index>(cfg.window_length + 1));
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    Eigen::VectorXd y(nodes);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = g(rng);
    p.xs.push_back(std::move(x));
    p.ys.push_back(std::move(y));
  }
  return p;
}

void BM_Forward(benchmark::State& state, char preset) {
  const auto p = make_problem(preset, static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(forward(p.model, p.a_hat, p.xs[0]));
}
BENCHMARK_CAPTURE(BM_Forward, A, 'A')->ArgName("nodes")->Arg(5)->Arg(41);
BENCHMARK_CAPTURE(BM_Forward, B, 'B')->ArgName("nodes")->Arg(5)->Arg(41);
BENCHMARK_CAPTURE(BM_Forward, C, 'C')->ArgName("nodes")->Arg(5)->Arg(41);
BENCHMARK_CAPTURE(BM_Forward, D, 'D')->ArgName("nodes")->Arg(5)->Arg(41);

void BM_BackwardBatch64(benchmark::State& state, char preset) {
  const auto p = make_problem(preset, static_cast<int>(state.range(0)), 64);
  for (auto _ : state) benchmark::DoNotOptimize(backward(p.model, p.a_hat, p.xs, p.ys));
}
BENCHMARK_CAPTURE(BM_BackwardBatch64, A, 'A')->ArgName("nodes")->Arg(5)->Arg(41);
BENCHMARK_CAPTURE(BM_BackwardBatch64, B, 'B')->ArgName("nodes")->Arg(5)->Arg(41);
BENCHMARK_CAPTURE(BM_BackwardBatch64, C, 'C')->ArgName("nodes")->Arg(5)->Arg(41);
BENCHMARK_CAPTURE(BM_BackwardBatch64, D, 'D')->ArgName("nodes")->Arg(5)->Arg(41);

}  // namespace
