#pragma once

// Subcommand bodies, callable in-process. Every output file is written under
// RunConfig::out_dir.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cli/run_config.hpp"
#include "raingnn/checkpoint.hpp"
#include "raingnn/gateway.hpp"
#include "raingnn/metrics.hpp"
#include "raingnn/train.hpp"

namespace raingnn::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

// Stations (sorted by id, sparse ones dropped) and the chronological
// blocks built from the cleaned records. Features are not yet standardized.
struct PreparedData {
  std::vector<Station> stations;
  SampleSplits splits;
};

PreparedData prepare_data(const std::filesystem::path& stations_csv,
                          const std::filesystem::path& records_csv, std::size_t window_length,
                          double max_missing_frac, const SplitFractions& split);

struct TrainOutcome {
  Checkpoint checkpoint;
  TrainReport report;
  std::filesystem::path checkpoint_path;
  std::filesystem::path report_path;
};

TrainOutcome cmd_train(const RunConfig& config);

struct EvaluateOutcome {
  EvalReport report;
  std::size_t test_days = 0;
  std::size_t stations = 0;
  std::filesystem::path report_path;
};

EvaluateOutcome cmd_evaluate(const RunConfig& config);

struct StationForecast {
  std::string station_id;
  double rain_mm = 0.0;
  bool heavy = false;
};

struct PredictOutcome {
  CivilDate forecast_date;
  double threshold_mm = 0.0;
  std::vector<StationForecast> forecasts;
  std::filesystem::path forecast_path;
};

PredictOutcome cmd_predict(const RunConfig& config);

struct ClimatologyOutcome {
  std::vector<ClimatologyRow> rows;
  std::filesystem::path csv_path;
};

ClimatologyOutcome cmd_climatology(const RunConfig& config);

struct ExportOutcome {
  ExportSummary summary;
  std::filesystem::path csv_path;
};

ExportOutcome cmd_export(const RunConfig& config);

// Writes the edge list of the configured station graph.
std::filesystem::path cmd_graph(const RunConfig& config);

// Writes stations.csv, records.csv and devices.csv for a synthetic network.
std::vector<std::filesystem::path> cmd_synth(const RunConfig& config);

// Runs the gateway until SIGINT/SIGTERM. Throws AddressInUse or StoreUnwritable.
void cmd_serve(const RunConfig& config, std::ostream& log);

std::string train_report_json(const TrainReport& report);
std::string eval_report_json(const EvaluateOutcome& outcome);
std::string forecast_json(const PredictOutcome& outcome);

}  // namespace raingnn::cli
