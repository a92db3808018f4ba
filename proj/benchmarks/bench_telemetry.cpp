#include <benchmark/benchmark.h>

#include "raingnn/telemetry.hpp"

using namespace raingnn;

namespace {

const std::string kFrame = "JP,1,LP-01,1700000000,3,18.5,42.0,55.0,1.25,6.98*17";

void BM_Parse(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parse_telemetry(kFrame));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * kFrame.size()));
}
BENCHMARK(BM_Parse);

void BM_Encode(benchmark::State& state) {
  const auto m = parse_telemetry(kFrame);
  for (auto _ : state) benchmark::DoNotOptimize(encode_telemetry(m));
}
BENCHMARK(BM_Encode);

void BM_AggregateDay(benchmark::State& state) {
  std::vector<TelemetryMessage> msgs;
  auto m = parse_telemetry(kFrame);
  for (int k = 0; k < 96 * 41; ++k) {
    m.device_id = "D" + std::to_string(k % 41);
    m.timestamp = 1700000000 + (k / 41) * 900;
    msgs.push_back(m);
  }
  DeviceMap map;
  for (int i = 0; i < 41; ++i) map["D" + std::to_string(i)] = "S" + std::to_string(i);
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_daily(msgs, map));
}
BENCHMARK(BM_AggregateDay);

}  // namespace
