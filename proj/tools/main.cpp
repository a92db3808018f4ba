// raingnn: ingest gauge telemetry, train the station-graph rainfall model,
// evaluate it, forecast heavy rain and summarize heavy-rain climatology.

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "cli/run_config.hpp"
#include "raingnn/error.hpp"

namespace {

using raingnn::cli::RunConfig;

struct Subcommand {
  CLI::App* app = nullptr;
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> overrides;
};

void add_keys(Subcommand& sub, const std::vector<std::string>& keys) {
  sub.app->add_option("--config", sub.config_file,
                      "Flat 'key = value' file; flags given here override it")
      ->check(CLI::ExistingFile);
  const RunConfig defaults;
  for (const std::string& name : keys) {
    const auto* key = raingnn::cli::find_key(name);
    auto* overrides = &sub.overrides;
    sub.app
        ->add_option_function<std::string>(
            "--" + name,
            [overrides, name](const std::string& v) { overrides->emplace_back(name, v); },
            key->help)
        ->default_str(key->get(defaults));
  }
}

RunConfig resolve(const Subcommand& sub) {
  RunConfig config;
  if (!sub.config_file.empty()) {
    for (const auto& [k, v] : raingnn::cli::read_config_file(sub.config_file)) {
      raingnn::cli::apply_setting(config, k, v);
    }
  }
  for (const auto& [k, v] : sub.overrides) raingnn::cli::apply_setting(config, k, v);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = raingnn::cli;

  CLI::App app{"Station-graph heavy-rainfall forecasting toolkit"};
  app.require_subcommand(1);

  const std::vector<std::string> data_keys = {"stations", "records", "out-dir"};
  const std::vector<std::string> model_keys = {
      "model",     "gcl-widths", "fc-width", "window",          "learning-rate",
      "batch-size", "max-epochs", "patience", "seed",            "heavy-threshold",
      "graph-scheme", "epsilon-km", "self-loop-weight", "knn-k", "split",
      "max-missing-frac"};
  auto concat = [](std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };

  Subcommand serve{app.add_subcommand("serve", "Run the SMS webhook ingest service")};
  add_keys(serve, {"host", "port", "store"});
  Subcommand export_{app.add_subcommand("export", "Aggregate the reading store into records.csv")};
  add_keys(export_, {"store", "devices", "out-dir"});
  Subcommand train{app.add_subcommand("train", "Clean data, build the graph and train a model")};
  add_keys(train, concat(data_keys, model_keys));
  Subcommand evaluate{app.add_subcommand("evaluate", "Score a checkpoint on the test block")};
  add_keys(evaluate, concat(data_keys, {"checkpoint"}));
  Subcommand predict{app.add_subcommand("predict", "Forecast next-day rain with heavy flags")};
  add_keys(predict, concat(data_keys, {"checkpoint"}));
  Subcommand climatology{
      app.add_subcommand("climatology", "Annual heavy-rain days per station (CSV)")};
  add_keys(climatology, concat(data_keys, {"max-missing-frac", "heavy-threshold"}));
  Subcommand graph{app.add_subcommand("graph", "Export the station graph edge list")};
  add_keys(graph, {"stations", "out-dir", "graph-scheme", "epsilon-km", "self-loop-weight", "knn-k"});
  Subcommand synth{app.add_subcommand("synth", "Generate a synthetic station network")};
  add_keys(synth, {"out-dir", "seed", "synth-stations", "synth-days", "synth-start",
                   "synth-missing-frac"});
  Subcommand show{app.add_subcommand("config", "Print the effective configuration")};
  std::vector<std::string> all_keys;
  for (const auto& k : cli::config_keys()) all_keys.push_back(k.name);
  add_keys(show, all_keys);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  try {
    if (*serve.app) {
      cli::cmd_serve(resolve(serve), std::cerr);
    } else if (*export_.app) {
      const auto out = cli::cmd_export(resolve(export_));
      for (const auto& w : out.summary.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << out.csv_path.string() << " (" << out.summary.rows << " rows)\n";
    } else if (*train.app) {
      const auto out = cli::cmd_train(resolve(train));
      std::cout << "epochs " << out.report.epochs_run << ", best epoch "
                << out.report.best_epoch << ", best val MSE "
                << out.report.val_loss_history[out.report.best_epoch] << '\n'
                << out.checkpoint_path.string() << '\n'
                << out.report_path.string() << '\n';
    } else if (*evaluate.app) {
      std::cout << cli::eval_report_json(cli::cmd_evaluate(resolve(evaluate)));
    } else if (*predict.app) {
      std::cout << cli::forecast_json(cli::cmd_predict(resolve(predict)));
    } else if (*climatology.app) {
      const auto out = cli::cmd_climatology(resolve(climatology));
      std::cout << out.csv_path.string() << " (" << out.rows.size() << " stations)\n";
    } else if (*graph.app) {
      std::cout << cli::cmd_graph(resolve(graph)).string() << '\n';
    } else if (*synth.app) {
      for (const auto& p : cli::cmd_synth(resolve(synth))) std::cout << p.string() << '\n';
    } else if (*show.app) {
      std::cout << cli::to_config_text(resolve(show));
    }
  } catch (const raingnn::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == raingnn::ErrorCode::InvalidArgument ? cli::kExitUsage : cli::kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return cli::kExitInternal;
  }
  return cli::kExitOk;
}
