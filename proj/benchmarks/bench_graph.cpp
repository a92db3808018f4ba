#include <benchmark/benchmark.h>

#include <random>

#include "raingnn/graph.hpp"

using namespace raingnn;

namespace {

std::vector<Station> stations(int n) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lat(-22.0, -10.0), lon(-69.0, -58.0), alt(100, 4500);
  std::vector<Station> out;
  for (int i = 0; i < n; ++i)
    out.push_back({"S" + std::to_string(i), "s", lat(rng), lon(rng), alt(rng)});
  return out;
}

void BM_BuildAndNormalize(benchmark::State& state) {
  const auto st = stations(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const auto a = build_adjacency(st, InverseDistanceScheme{});
    benchmark::DoNotOptimize(normalize_adjacency(a));
  }
}
BENCHMARK(BM_BuildAndNormalize)->Arg(5)->Arg(41)->Arg(200);

}  // namespace
