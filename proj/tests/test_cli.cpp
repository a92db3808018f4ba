#include <gtest/gtest.h>

#include <Eigen/Dense>  // before httplib

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include "cli/commands.hpp"
#include "cli/run_config.hpp"
#include "raingnn/error.hpp"
#include "schema_check.hpp"
#include "support.hpp"

#include "httplib.h"
#include "json.hpp"

using namespace raingnn;
using namespace raingnn::cli;
using testsupport::TempDir;

namespace {

const std::filesystem::path kStations = testsupport::source_path("data/fixture/stations.csv");
const std::filesystem::path kRecords = testsupport::source_path("data/fixture/records.csv");

RunConfig fixture_config(const TempDir& dir) {
  RunConfig c;
  c.stations = kStations;
  c.records = kRecords;
  c.out_dir = dir.path() / "out";
  c.checkpoint = c.out_dir / "checkpoint.json";
  return c;
}

struct ProcessResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') q += "'\\''";
    else q += c;
  }
  return q + "'";
}

ProcessResult run_cli(const std::vector<std::string>& args, const TempDir& dir) {
  std::string cmd = shell_quote(RAINGNN_CLI_BINARY);
  for (const auto& a : args) cmd += " " + shell_quote(a);
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  cmd += " >" + shell_quote(out.string()) + " 2>" + shell_quote(err.string());
  const int status = std::system(cmd.c_str());
  ProcessResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = testsupport::read_file(out);
  r.err = testsupport::read_file(err);
  return r;
}

nlohmann::json load_json(const std::filesystem::path& p) {
  return nlohmann::json::parse(testsupport::read_file(p));
}

}  // namespace

// ---- configuration ----

TEST(RunConfig, DefaultsMatchReferenceProtocol) {
  const RunConfig c;
  EXPECT_EQ(c.model.learning_rate, 0.01);
  EXPECT_EQ(c.model.batch_size, 64u);
  EXPECT_EQ(c.model.heavy_threshold_mm, 8.0);
  EXPECT_GT(c.model.patience, 0u);
  EXPECT_EQ(c.split, kDefaultSplit);
  EXPECT_EQ(c.max_missing_frac, 0.2);
  EXPECT_EQ(c.graph_scheme, "inverse_distance");
  EXPECT_EQ(c.epsilon_km, 1.0);
}

TEST(RunConfig, TextRoundtrip) {
  RunConfig c;
  apply_setting(c, "model", "B");
  apply_setting(c, "split", "0.6,0.3,0.1");
  apply_setting(c, "learning-rate", "0.005");
  apply_setting(c, "graph-scheme", "knn");
  std::istringstream in(to_config_text(c));
  RunConfig back;
  for (const auto& [k, v] : parse_config_text(in)) apply_setting(back, k, v);
  EXPECT_EQ(back.model, c.model);
  EXPECT_EQ(back.split, c.split);
  EXPECT_EQ(back.graph_scheme, "knn");
  EXPECT_EQ(to_config_text(back), to_config_text(c));
}

TEST(RunConfig, PresetsSelectWidths) {
  for (char p : {'A', 'B', 'C', 'D'}) {
    RunConfig c;
    apply_setting(c, "model", std::string(1, p));
    EXPECT_EQ(c.model.gcl_widths, preset_widths(p));
  }
}

TEST(RunConfig, ParseErrors) {
  RunConfig c;
  auto code = [&](const std::string& k, const std::string& v) {
    try {
      apply_setting(c, k, v);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  EXPECT_EQ(code("no-such-key", "1"), ErrorCode::InvalidArgument);
  EXPECT_EQ(code("window", "seven"), ErrorCode::InvalidArgument);
  EXPECT_EQ(code("model", "Z"), ErrorCode::InvalidArgument);
  EXPECT_EQ(code("split", "0.5,0.5"), ErrorCode::InvalidArgument);
  std::istringstream bad("window 7\n");
  EXPECT_THROW(parse_config_text(bad), Error);
  std::istringstream ok("# comment\n\nwindow = 5  # trailing\n");
  const auto kv = parse_config_text(ok);
  ASSERT_EQ(kv.size(), 1u);
  EXPECT_EQ(kv[0].second, "5");
}

TEST(RunConfig, ShippedExampleParses) {
  const auto kv = read_config_file(testsupport::source_path("config/example.conf"));
  RunConfig c;
  for (const auto& [k, v] : kv) apply_setting(c, k, v);
  EXPECT_EQ(c.model.gcl_widths, preset_widths('A'));
}

TEST(CliProcess, FlagsOverrideConfigFile) {
  TempDir dir;
  testsupport::write_file(dir / "run.conf", "window = 5\nseed = 9\nfc-width = 12\n");
  const auto r = run_cli({"config", "--config", (dir / "run.conf").string(), "--seed", "3"}, dir);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("window = 5\n"), std::string::npos);
  EXPECT_NE(r.out.find("fc-width = 12\n"), std::string::npos);
  EXPECT_NE(r.out.find("seed = 3\n"), std::string::npos);
  EXPECT_NE(r.out.find("learning-rate = 0.01\n"), std::string::npos);
}

TEST(CliProcess, HelpForEverySubcommandListsItsFlags) {
  TempDir dir;
  const std::map<std::string, std::vector<std::string>> flags = {
      {"serve", {"--host", "--port", "--store", "--config"}},
      {"export", {"--store", "--devices", "--out-dir"}},
      {"train", {"--stations", "--records", "--out-dir", "--model", "--gcl-widths", "--fc-width",
                 "--window", "--learning-rate", "--batch-size", "--max-epochs", "--patience",
                 "--seed", "--heavy-threshold", "--graph-scheme", "--epsilon-km",
                 "--self-loop-weight", "--knn-k", "--split", "--max-missing-frac"}},
      {"evaluate", {"--checkpoint", "--stations", "--records", "--out-dir"}},
      {"predict", {"--checkpoint", "--stations", "--records", "--out-dir"}},
      {"climatology", {"--stations", "--records", "--max-missing-frac", "--heavy-threshold"}},
      {"graph", {"--stations", "--graph-scheme", "--knn-k"}},
      {"synth", {"--synth-stations", "--synth-days", "--seed"}},
      {"config", {"--window", "--port"}},
  };
  for (const auto& [sub, expected] : flags) {
    const auto r = run_cli({sub, "--help"}, dir);
    EXPECT_EQ(r.exit_code, 0) << sub;
    for (const auto& f : expected) EXPECT_NE(r.out.find(f), std::string::npos) << sub << " " << f;
  }
  const auto top = run_cli({"--help"}, dir);
  EXPECT_EQ(top.exit_code, 0);
  for (const auto& [sub, _] : flags) EXPECT_NE(top.out.find(sub), std::string::npos);
}

TEST(CliProcess, ExitCodes) {
  TempDir dir;
  EXPECT_EQ(run_cli({}, dir).exit_code, kExitUsage);
  EXPECT_EQ(run_cli({"train", "--no-such-flag"}, dir).exit_code, kExitUsage);
  EXPECT_EQ(run_cli({"train", "--window", "abc"}, dir).exit_code, kExitUsage);

  const auto missing = run_cli({"train", "--stations", (dir / "nope.csv").string(), "--records",
                                kRecords.string(), "--out-dir", (dir / "o").string()},
                               dir);
  EXPECT_EQ(missing.exit_code, kExitData);
  EXPECT_NE(missing.err.find("IoError"), std::string::npos);

  testsupport::write_file(dir / "bad.csv", "station_id,name,latitude_deg,longitude_deg,altitude_m\nS1,x,95,0,0\n");
  const auto range = run_cli({"graph", "--stations", (dir / "bad.csv").string(), "--out-dir",
                              (dir / "o").string()},
                             dir);
  EXPECT_EQ(range.exit_code, kExitData);
  EXPECT_NE(range.err.find("dataio: RangeViolation"), std::string::npos) << range.err;
}

// ---- pipeline commands, in process ----

TEST(CmdTrain, WritesCheckpointAndReport) {
  TempDir dir;
  const auto cfg = fixture_config(dir);
  const auto out = cmd_train(cfg);
  EXPECT_TRUE(std::filesystem::exists(out.checkpoint_path));
  EXPECT_EQ(out.checkpoint_path.parent_path(), cfg.out_dir);
  const auto report = load_json(out.report_path);
  const auto schema = load_json(testsupport::source_path("docs/schema/train_report.schema.json"));
  EXPECT_EQ(testsupport::schema_violations(schema, report), std::vector<std::string>{});
  EXPECT_EQ(report["epochs_run"], out.report.epochs_run);
  EXPECT_EQ(out.checkpoint.node_order.size(), 5u);
}

TEST(CmdTrain, DeterministicBytes) {
  TempDir a, b;
  cmd_train(fixture_config(a));
  cmd_train(fixture_config(b));
  EXPECT_EQ(testsupport::read_file(a / "out/checkpoint.json"),
            testsupport::read_file(b / "out/checkpoint.json"));
  EXPECT_EQ(testsupport::read_file(a / "out/train_report.json"),
            testsupport::read_file(b / "out/train_report.json"));
}

TEST(CmdTrain, SeedChangesWeights) {
  TempDir a, b;
  auto ca = fixture_config(a);
  auto cb = fixture_config(b);
  ca.model.max_epochs = cb.model.max_epochs = 3;
  cb.model.seed = 7;
  cmd_train(ca);
  cmd_train(cb);
  EXPECT_NE(testsupport::read_file(a / "out/checkpoint.json"),
            testsupport::read_file(b / "out/checkpoint.json"));
}

class TrainedFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir;
    cmd_train(fixture_config(*dir_));
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  RunConfig config() const {
    auto c = fixture_config(*dir_);
    c.out_dir = work_.path();
    return c;
  }

  static TempDir* dir_;
  TempDir work_;
};
TempDir* TrainedFixture::dir_ = nullptr;

TEST_F(TrainedFixture, EvaluateReportFollowsSchema) {
  const auto out = cmd_evaluate(config());
  EXPECT_TRUE(std::isfinite(out.report.mse));
  EXPECT_TRUE(std::isfinite(out.report.mae));
  EXPECT_TRUE(out.report.pearson_r.has_value());
  EXPECT_EQ(out.stations, 5u);
  const auto schema = load_json(testsupport::source_path("docs/schema/eval_report.schema.json"));
  EXPECT_EQ(testsupport::schema_violations(schema, load_json(out.report_path)),
            std::vector<std::string>{});
}

TEST_F(TrainedFixture, EvaluateNodeOrderMismatch) {
  auto cfg = config();
  // same data without ST05
  std::ifstream st(kStations), rc(kRecords);
  std::ostringstream s4, r4;
  for (std::string line; std::getline(st, line);)
    if (line.rfind("ST05", 0) != 0) s4 << line << '\n';
  for (std::string line; std::getline(rc, line);)
    if (line.rfind("ST05", 0) != 0) r4 << line << '\n';
  testsupport::write_file(work_ / "s4.csv", s4.str());
  testsupport::write_file(work_ / "r4.csv", r4.str());
  cfg.stations = work_ / "s4.csv";
  cfg.records = work_ / "r4.csv";
  try {
    cmd_evaluate(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NodeOrderMismatch);
  }
  try {
    cmd_predict(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NodeOrderMismatch);
  }
}

TEST_F(TrainedFixture, EvaluateFeatureDimMismatch) {
  auto ck = load_checkpoint(config().checkpoint);
  ck.model.config.window_length = 5;
  save_checkpoint(work_ / "ck.json", ck);
  auto cfg = config();
  cfg.checkpoint = work_ / "ck.json";
  try {
    cmd_evaluate(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FeatureDimMismatch);
  }
}

TEST_F(TrainedFixture, PredictOneEntryPerStation) {
  const auto out = cmd_predict(config());
  ASSERT_EQ(out.forecasts.size(), 5u);
  for (const auto& f : out.forecasts) {
    EXPECT_GE(f.rain_mm, 0.0);
    EXPECT_EQ(f.heavy, f.rain_mm >= 8.0);
  }
  EXPECT_EQ(format_iso_date(out.forecast_date), "2023-07-20");
  const auto schema = load_json(testsupport::source_path("docs/schema/forecast.schema.json"));
  EXPECT_EQ(testsupport::schema_violations(schema, load_json(out.forecast_path)),
            std::vector<std::string>{});
}

TEST_F(TrainedFixture, PredictHeavyFlagAtThreshold) {
  // zero network, output bias 8.0: every station is forecast exactly 8.0 mm
  auto ck = load_checkpoint(config().checkpoint);
  ck.model.params = GcnParameters::zeros_like(ck.model.params);
  ck.model.params.out_bias = 8.0;
  save_checkpoint(work_ / "ck8.json", ck);
  auto cfg = config();
  cfg.checkpoint = work_ / "ck8.json";
  for (const auto& f : cmd_predict(cfg).forecasts) {
    EXPECT_EQ(f.rain_mm, 8.0);
    EXPECT_TRUE(f.heavy);
  }
}

TEST_F(TrainedFixture, PredictSpanTooShortNamesStation) {
  std::ifstream rc(kRecords);
  std::ostringstream cut;
  for (std::string line; std::getline(rc, line);) {
    const bool late = line.size() > 15 && line.substr(5, 10) >= "2023-07-10";
    if (line.rfind("ST03", 0) == 0 && late) continue;
    cut << line << '\n';
  }
  testsupport::write_file(work_ / "r.csv", cut.str());
  auto cfg = config();
  cfg.records = work_ / "r.csv";
  try {
    cmd_predict(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SpanTooShort);
    EXPECT_NE(e.detail().find("ST03"), std::string::npos) << e.detail();
  }
}

TEST(CmdClimatology, OneSortedRowPerSurvivingStation) {
  TempDir dir;
  auto cfg = fixture_config(dir);
  const auto out = cmd_climatology(cfg);
  ASSERT_EQ(out.rows.size(), 5u);
  for (std::size_t i = 1; i < out.rows.size(); ++i)
    EXPECT_LT(out.rows[i - 1].station_id, out.rows[i].station_id);
  const auto lines = testsupport::lines_of(testsupport::read_file(out.csv_path));
  EXPECT_EQ(lines.size(), 6u);

  // a station with most values blanked is dropped before counting
  std::ifstream rc(kRecords);
  std::ostringstream sparse;
  int n = 0;
  for (std::string line; std::getline(rc, line);) {
    if (line.rfind("ST02", 0) == 0 && (n++ % 2 == 0)) line = line.substr(0, line.rfind(',') + 1);
    sparse << line << '\n';
  }
  testsupport::write_file(dir / "sparse.csv", sparse.str());
  cfg.records = dir / "sparse.csv";
  const auto dropped = cmd_climatology(cfg);
  EXPECT_EQ(dropped.rows.size(), 4u);
  const auto again = cmd_climatology(cfg);
  EXPECT_EQ(testsupport::read_file(again.csv_path), testsupport::read_file(dropped.csv_path));
}

TEST(CmdGraph, EdgeList) {
  TempDir dir;
  const auto path = cmd_graph(fixture_config(dir));
  const auto lines = testsupport::lines_of(testsupport::read_file(path));
  EXPECT_EQ(lines.size(), 1u + 15u);  // 5 self-loops + 10 pairs
}

TEST(CmdSynth, ReproducesShippedFixture) {
  TempDir dir;
  auto cfg = fixture_config(dir);
  const auto paths = cmd_synth(cfg);
  ASSERT_EQ(paths.size(), 3u);
  EXPECT_EQ(testsupport::read_file(paths[0]), testsupport::read_file(kStations));
  EXPECT_EQ(testsupport::read_file(paths[1]), testsupport::read_file(kRecords));
}

TEST(CmdExport, WritesRecordsUnderOutDir) {
  TempDir dir;
  auto cfg = fixture_config(dir);
  cfg.store = dir / "r.log";
  cfg.devices = testsupport::source_path("data/fixture/devices.csv");
  testsupport::write_file(cfg.store, "");
  const auto out = cmd_export(cfg);
  EXPECT_EQ(out.csv_path, cfg.out_dir / "records.csv");
  EXPECT_EQ(testsupport::read_file(out.csv_path), "station_id,date,precip_mm\n");
}

// ---- serve, as a child process ----

namespace {

struct ServeProcess {
  pid_t pid = -1;
  int port = 0;
  std::string log;
};

ServeProcess spawn_serve(const std::vector<std::string>& args) {
  int fds[2];
  if (::pipe(fds) != 0) return {};
  ServeProcess p;
  p.pid = ::fork();
  if (p.pid == 0) {
    ::dup2(fds[1], STDERR_FILENO);
    ::close(fds[0]);
    std::vector<char*> argv;
    std::string bin = RAINGNN_CLI_BINARY;
    argv.push_back(bin.data());
    std::vector<std::string> copy = args;
    for (auto& a : copy) argv.push_back(a.data());
    argv.push_back(nullptr);
    ::execv(bin.c_str(), argv.data());
    ::_exit(127);
  }
  ::close(fds[1]);
  // read until the first newline or EOF
  char c;
  while (::read(fds[0], &c, 1) == 1 && c != '\n') p.log.push_back(c);
  ::close(fds[0]);
  std::smatch m;
  if (std::regex_search(p.log, m, std::regex(":(\\d+),"))) p.port = std::stoi(m[1]);
  return p;
}

int wait_exit(pid_t pid) {
  int status = 0;
  ::waitpid(pid, &status, 0);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(CmdServe, PostThenStopLeavesOneLine) {
  TempDir dir;
  const auto store = dir / "r.log";
  auto p = spawn_serve({"serve", "--port", "0", "--store", store.string()});
  ASSERT_GT(p.port, 0) << p.log;

  httplib::Client client("127.0.0.1", p.port);
  auto health = client.Get("/healthz");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  auto r = client.Post("/webhook/sms",
                       httplib::Params{{"From", "+1"},
                                       {"Body", "JP,1,LP-01,1700000000,3,18.5,42.0,55.0,1.25,6.98*17"}});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);

  ::kill(p.pid, SIGINT);
  EXPECT_EQ(wait_exit(p.pid), 0);
  EXPECT_EQ(testsupport::lines_of(testsupport::read_file(store)).size(), 1u);
}

TEST(CmdServe, OccupiedPortFails) {
  TempDir dir;
  auto first = spawn_serve({"serve", "--port", "0", "--store", (dir / "a.log").string()});
  ASSERT_GT(first.port, 0) << first.log;
  const auto second = run_cli({"serve", "--port", std::to_string(first.port), "--store",
                               (dir / "b.log").string()},
                              dir);
  EXPECT_EQ(second.exit_code, kExitData);
  EXPECT_NE(second.err.find("AddressInUse"), std::string::npos) << second.err;
  ::kill(first.pid, SIGTERM);
  EXPECT_EQ(wait_exit(first.pid), 0);
}

TEST(CmdServe, UnwritableStoreFails) {
  TempDir dir;
  const auto r = run_cli({"serve", "--port", "0", "--store", (dir / "no/such/r.log").string()}, dir);
  EXPECT_EQ(r.exit_code, kExitData);
  EXPECT_NE(r.err.find("StoreUnwritable"), std::string::npos) << r.err;
}
