#pragma once

// Flat `key = value` configuration shared by every subcommand. Each key is
// also a `--key` flag; precedence is defaults < config file < flags.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "raingnn/dataio.hpp"
#include "raingnn/graph.hpp"
#include "raingnn/model.hpp"

namespace raingnn::cli {

struct SynthOptions {
  std::size_t stations = 5;
  std::size_t days = 200;
  std::string start_date = "2023-01-01";
  double missing_frac = 0.02;
};

struct RunConfig {
  std::filesystem::path stations = "stations.csv";
  std::filesystem::path records = "records.csv";
  std::filesystem::path checkpoint = "out/checkpoint.json";
  std::filesystem::path out_dir = "out";

  std::filesystem::path store = "readings.log";
  std::filesystem::path devices = "devices.csv";
  std::string host = "127.0.0.1";
  int port = 8080;

  GcnConfig model;

  std::string graph_scheme = "inverse_distance";
  double epsilon_km = 1.0;
  double self_loop_weight = 1.0;
  std::size_t knn_k = 3;

  SplitFractions split = kDefaultSplit;
  double max_missing_frac = 0.20;

  SynthOptions synth;

  AdjacencyScheme adjacency_scheme() const;
};

struct ConfigKey {
  std::string name;
  std::string help;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<ConfigKey>& config_keys();
const ConfigKey* find_key(std::string_view name);

// Throws InvalidArgument for an unknown key or an unparsable value.
void apply_setting(RunConfig& config, std::string_view key, const std::string& value);

// `key = value` lines; '#' starts a comment. Returns the settings in order.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::istream& in);
std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::filesystem::path& path);

// Every key with its current value, in table order.
std::string to_config_text(const RunConfig& config);

}  // namespace raingnn::cli
