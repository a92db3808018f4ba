#pragma once

// Model checkpoint: one JSON document, `"format": "raingnn-checkpoint"`,
// `"version": 1`. Doubles are written in shortest round-trip form, so
// save/load is lossless. Matrices are stored as {rows, cols, data} with data
// in row-major order. See docs/checkpoint.md for the full layout.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "raingnn/dataio.hpp"
#include "raingnn/graph.hpp"
#include "raingnn/model.hpp"

namespace raingnn {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  GcnModel model;
  std::vector<std::string> node_order;
  AltitudeScaling altitude;
  FeatureScaler feature_scaler;
  AdjacencyScheme graph_scheme = InverseDistanceScheme{};
  // Preprocessing used to build the data blocks the model was trained on.
  double max_missing_frac = 0.20;
  SplitFractions split = kDefaultSplit;

  bool operator==(const Checkpoint& other) const;
};

std::string serialize_checkpoint(const Checkpoint& checkpoint);
// Throws BadCheckpoint on malformed input or an unknown format/version.
Checkpoint parse_checkpoint(std::string_view text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace raingnn
