#include "cli/commands.hpp"

#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cli/synth.hpp"
#include "json.hpp"
#include "raingnn/dataio.hpp"
#include "raingnn/error.hpp"
#include "raingnn/graph.hpp"
#include "raingnn/model.hpp"
#include "raingnn/reading_store.hpp"

namespace raingnn::cli {
namespace {

using nlohmann::json;

std::filesystem::path output_path(const RunConfig& config, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::IoError,
                "cannot create output directory " + config.out_dir.string() + ": " + ec.message());
  }
  return config.out_dir / name;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::vector<Station> sorted_stations(const std::filesystem::path& path) {
  auto stations = load_stations(path);
  std::sort(stations.begin(), stations.end(),
            [](const Station& a, const Station& b) { return a.station_id < b.station_id; });
  return stations;
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

// Stations listed in `order`, or NodeOrderMismatch naming the first absent one.
std::vector<Station> stations_in_order(std::span<const Station> available,
                                       std::span<const std::string> order) {
  std::vector<Station> out;
  for (const std::string& id : order) {
    const auto it = std::find_if(available.begin(), available.end(),
                                 [&](const Station& s) { return s.station_id == id; });
    if (it == available.end()) {
      throw Error(ErrorCode::NodeOrderMismatch, "checkpoint station " + id + " not in data");
    }
    out.push_back(*it);
  }
  return out;
}

}  // namespace

PreparedData prepare_data(const std::filesystem::path& stations_csv,
                          const std::filesystem::path& records_csv, std::size_t window_length,
                          double max_missing_frac, const SplitFractions& split) {
  const auto stations = sorted_stations(stations_csv);
  const auto records = load_records(records_csv);
  const Dataset kept = drop_sparse_stations(records, stations, max_missing_frac);
  const auto complete = interpolate_missing(kept.records);
  const SampleSet samples = make_samples(complete, kept.stations, window_length);
  return {kept.stations, split_chronological(samples, split)};
}

TrainOutcome cmd_train(const RunConfig& config) {
  config.model.validate();
  PreparedData data = prepare_data(config.stations, config.records, config.model.window_length,
                                   config.max_missing_frac, config.split);
  const FeatureScaler scaler = FeatureScaler::fit(data.splits.train.features);
  const SampleSet train_set = standardize(data.splits.train, scaler);
  const SampleSet val_set = standardize(data.splits.validation, scaler);

  const AdjacencyScheme scheme = config.adjacency_scheme();
  const StationGraph graph = StationGraph::build(data.stations, scheme);
  GcnModel model = init_model(config.model, train_set.feature_dim(), config.model.seed);
  TrainResult result = train(std::move(model), graph.normalized_adjacency(), train_set, val_set);

  TrainOutcome out;
  out.checkpoint.model = std::move(result.model);
  out.checkpoint.node_order = graph.node_order();
  out.checkpoint.altitude = train_set.altitude;
  out.checkpoint.feature_scaler = scaler;
  out.checkpoint.graph_scheme = scheme;
  out.checkpoint.max_missing_frac = config.max_missing_frac;
  out.checkpoint.split = config.split;
  out.report = std::move(result.report);

  out.checkpoint_path = output_path(config, "checkpoint.json");
  save_checkpoint(out.checkpoint_path, out.checkpoint);
  out.report_path = output_path(config, "train_report.json");
  write_file(out.report_path, train_report_json(out.report));
  return out;
}

EvaluateOutcome cmd_evaluate(const RunConfig& config) {
  const Checkpoint ck = load_checkpoint(config.checkpoint);
  const std::size_t window = ck.model.config.window_length;
  if (ck.model.feature_dim != window + 1) {
    throw Error(ErrorCode::FeatureDimMismatch,
                "checkpoint feature_dim " + std::to_string(ck.model.feature_dim) +
                    " does not match window " + std::to_string(window) + " + altitude");
  }
  const PreparedData data =
      prepare_data(config.stations, config.records, window, ck.max_missing_frac, ck.split);
  std::vector<std::string> ids;
  for (const Station& s : data.stations) ids.push_back(s.station_id);
  if (ids != ck.node_order) {
    throw Error(ErrorCode::NodeOrderMismatch,
                "checkpoint has " + std::to_string(ck.node_order.size()) +
                    " stations, data has " + std::to_string(ids.size()) + " after cleaning");
  }
  const SampleSet test = standardize(data.splits.test, ck.feature_scaler);
  if (test.feature_dim() != ck.model.feature_dim) {
    throw Error(ErrorCode::FeatureDimMismatch, "test features do not match the checkpoint");
  }
  const StationGraph graph = StationGraph::build(data.stations, ck.graph_scheme);

  std::vector<double> observed;
  std::vector<double> predicted;
  for (std::size_t s = 0; s < test.size(); ++s) {
    const auto flags = predict_with_flags(ck.model, graph.normalized_adjacency(),
                                          test.features[s], ck.model.config.heavy_threshold_mm);
    for (std::size_t i = 0; i < flags.size(); ++i) {
      observed.push_back(test.targets[s][static_cast<Eigen::Index>(i)]);
      predicted.push_back(flags[i].rain_mm);
    }
  }

  EvaluateOutcome out;
  out.report = evaluate(observed, predicted, ck.model.config.heavy_threshold_mm);
  out.test_days = test.size();
  out.stations = data.stations.size();
  out.report_path = output_path(config, "eval_report.json");
  write_file(out.report_path, eval_report_json(out));
  return out;
}

PredictOutcome cmd_predict(const RunConfig& config) {
  const Checkpoint ck = load_checkpoint(config.checkpoint);
  const auto all = sorted_stations(config.stations);
  const auto stations = stations_in_order(all, ck.node_order);
  const auto records = load_records(config.records);
  std::vector<DailyRecord> mine;
  for (const DailyRecord& r : records) {
    if (std::find(ck.node_order.begin(), ck.node_order.end(), r.station_id) !=
        ck.node_order.end()) {
      mine.push_back(r);
    }
  }
  const std::size_t window = ck.model.config.window_length;
  Eigen::MatrixXd x = latest_features(mine, stations, window, ck.altitude);
  if (static_cast<std::size_t>(x.cols()) != ck.model.feature_dim) {
    throw Error(ErrorCode::FeatureDimMismatch, "features do not match the checkpoint");
  }
  x = ck.feature_scaler.transform(x);
  const StationGraph graph = StationGraph::build(stations, ck.graph_scheme);
  const auto flags = predict_with_flags(ck.model, graph.normalized_adjacency(), x,
                                        ck.model.config.heavy_threshold_mm);

  PredictOutcome out;
  CivilDate last = mine.front().date;
  for (const DailyRecord& r : mine) last = std::max(last, r.date);
  out.forecast_date = last + std::chrono::days{1};
  out.threshold_mm = ck.model.config.heavy_threshold_mm;
  for (std::size_t i = 0; i < stations.size(); ++i) {
    out.forecasts.push_back({stations[i].station_id, flags[i].rain_mm, flags[i].heavy});
  }
  out.forecast_path = output_path(config, "forecast.json");
  write_file(out.forecast_path, forecast_json(out));
  return out;
}

ClimatologyOutcome cmd_climatology(const RunConfig& config) {
  const auto stations = sorted_stations(config.stations);
  const auto records = load_records(config.records);
  const Dataset kept = drop_sparse_stations(records, stations, config.max_missing_frac);
  ClimatologyOutcome out;
  out.rows = heavy_climatology(kept.records, kept.stations, config.model.heavy_threshold_mm);
  out.csv_path = output_path(config, "climatology.csv");
  std::ostringstream csv;
  write_climatology_csv(csv, out.rows);
  write_file(out.csv_path, csv.str());
  return out;
}

ExportOutcome cmd_export(const RunConfig& config) {
  const DeviceMap devices = load_device_map(config.devices);
  ExportOutcome out;
  std::ostringstream csv;
  out.summary = export_records(config.store, devices, csv);
  out.csv_path = output_path(config, "records.csv");
  write_file(out.csv_path, csv.str());
  return out;
}

std::filesystem::path cmd_graph(const RunConfig& config) {
  const auto stations = sorted_stations(config.stations);
  const StationGraph graph = StationGraph::build(stations, config.adjacency_scheme());
  std::ostringstream csv;
  write_edges_csv(csv, graph);
  const auto path = output_path(config, "graph_edges.csv");
  write_file(path, csv.str());
  return path;
}

std::vector<std::filesystem::path> cmd_synth(const RunConfig& config) {
  const SyntheticDataset data = make_synthetic_dataset(config.synth, config.model.seed);
  std::ostringstream stations;
  write_stations(stations, data.stations);
  std::ostringstream records;
  write_records(records, data.records);
  std::ostringstream devices;
  devices << "device_id,station_id\n";
  for (const Station& s : data.stations) devices << "GW-" << s.station_id << ',' << s.station_id << '\n';

  std::vector<std::filesystem::path> paths = {output_path(config, "stations.csv"),
                                              output_path(config, "records.csv"),
                                              output_path(config, "devices.csv")};
  write_file(paths[0], stations.str());
  write_file(paths[1], records.str());
  write_file(paths[2], devices.str());
  return paths;
}

void cmd_serve(const RunConfig& config, std::ostream& log) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  // Server threads inherit the mask, so only sigwait below sees the signals.
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Gateway gateway({config.host, config.port, config.store, {}});
  const int port = gateway.start();
  log << "listening on " << config.host << ':' << port << ", store " << config.store.string()
      << std::endl;
  int received = 0;
  sigwait(&signals, &received);
  gateway.stop();
  log << "stopped; store flushed" << std::endl;
}

std::string train_report_json(const TrainReport& report) {
  return json{{"epochs_run", report.epochs_run},
              {"best_epoch", report.best_epoch},
              {"stopped_early", report.stopped_early},
              {"train_loss_history", report.train_loss_history},
              {"val_loss_history", report.val_loss_history}}
             .dump(1) +
         "\n";
}

std::string eval_report_json(const EvaluateOutcome& outcome) {
  const EvalReport& r = outcome.report;
  return json{{"split", "test"},
              {"n", r.n},
              {"test_days", outcome.test_days},
              {"stations", outcome.stations},
              {"mse", r.mse},
              {"mae", r.mae},
              {"pearson_r", optional_json(r.pearson_r)},
              {"heavy",
               {{"threshold_mm", r.threshold_mm},
                {"precision", optional_json(r.heavy.precision)},
                {"recall", optional_json(r.heavy.recall)},
                {"true_positives", r.heavy.true_positives},
                {"false_positives", r.heavy.false_positives},
                {"false_negatives", r.heavy.false_negatives}}}}
             .dump(1) +
         "\n";
}

std::string forecast_json(const PredictOutcome& outcome) {
  json forecasts = json::array();
  for (const StationForecast& f : outcome.forecasts) {
    forecasts.push_back({{"station_id", f.station_id}, {"rain_mm", f.rain_mm}, {"heavy", f.heavy}});
  }
  return json{{"forecast_date", format_iso_date(outcome.forecast_date)},
              {"threshold_mm", outcome.threshold_mm},
              {"forecasts", std::move(forecasts)}}
             .dump(1) +
         "\n";
}

}  // namespace raingnn::cli
