#pragma once

#include <cstdint>
#include <vector>

#include "cli/run_config.hpp"
#include "raingnn/types.hpp"

namespace raingnn::cli {

struct SyntheticDataset {
  std::vector<Station> stations;
  std::vector<DailyRecord> records;
};

// Stations scattered over roughly 2° x 2°, and daily rainfall from a
// spatially coupled second-order autoregression:
//
//   z_{t+1} = 1.81 M z_t - 0.9025 M z_{t-1} + e_{t+1},   rain = max(0, 6 + z)
//
// M is the row-normalized inverse-distance adjacency and e mixes a shared
// daily shock with per-station noise. Next-day rain is therefore close to a
// linear function of the trailing window at each station and its neighbours.
SyntheticDataset make_synthetic_dataset(const SynthOptions& options, std::uint64_t seed);

}  // namespace raingnn::cli
