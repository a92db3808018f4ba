#include "raingnn/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "raingnn/error.hpp"

namespace raingnn {
namespace {

using nlohmann::json;

constexpr std::string_view kFormat = "raingnn-checkpoint";

json matrix_json(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw Error(ErrorCode::BadCheckpoint, "matrix data length does not match its shape");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data.at(k++).get<double>();
  }
  return m;
}

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json scheme_json(const AdjacencyScheme& scheme) {
  json j = {{"scheme", scheme_name(scheme)}};
  if (const auto* inv = std::get_if<InverseDistanceScheme>(&scheme)) {
    j["epsilon_km"] = inv->epsilon_km;
    j["self_loop_weight"] = inv->self_loop_weight;
  } else if (const auto* knn = std::get_if<KnnScheme>(&scheme)) {
    j["k"] = knn->k;
    j["epsilon_km"] = knn->epsilon_km;
    j["self_loop_weight"] = knn->self_loop_weight;
  } else {
    j["self_loop_weight"] = std::get<RawDistanceScheme>(scheme).self_loop_weight;
  }
  return j;
}

AdjacencyScheme scheme_from(const json& j) {
  const auto name = j.at("scheme").get<std::string>();
  if (name == "inverse_distance") {
    return InverseDistanceScheme{j.at("epsilon_km").get<double>(),
                                 j.at("self_loop_weight").get<double>()};
  }
  if (name == "knn") {
    return KnnScheme{j.at("k").get<std::size_t>(), j.at("epsilon_km").get<double>(),
                     j.at("self_loop_weight").get<double>()};
  }
  if (name == "raw_distance") return RawDistanceScheme{j.at("self_loop_weight").get<double>()};
  throw Error(ErrorCode::BadCheckpoint, "unknown graph scheme '" + name + "'");
}

bool same_scheme(const AdjacencyScheme& a, const AdjacencyScheme& b) {
  return scheme_json(a) == scheme_json(b);
}

}  // namespace

bool Checkpoint::operator==(const Checkpoint& other) const {
  return model.config == other.model.config && model.feature_dim == other.model.feature_dim &&
         model.params == other.model.params && node_order == other.node_order &&
         altitude.mean == other.altitude.mean && altitude.stddev == other.altitude.stddev &&
         feature_scaler.mean() == other.feature_scaler.mean() &&
         feature_scaler.stddev() == other.feature_scaler.stddev() &&
         same_scheme(graph_scheme, other.graph_scheme) &&
         max_missing_frac == other.max_missing_frac && split == other.split;
}

std::string serialize_checkpoint(const Checkpoint& ck) {
  const GcnConfig& cfg = ck.model.config;
  const GcnParameters& p = ck.model.params;
  json gcl = json::array();
  for (const auto& w : p.gcl) gcl.push_back(matrix_json(w));

  json doc = {
      {"format", kFormat},
      {"version", kCheckpointVersion},
      {"config",
       {{"gcl_widths", cfg.gcl_widths},
        {"fc_width", cfg.fc_width},
        {"window_length", cfg.window_length},
        {"learning_rate", cfg.learning_rate},
        {"batch_size", cfg.batch_size},
        {"max_epochs", cfg.max_epochs},
        {"patience", cfg.patience},
        {"seed", cfg.seed},
        {"heavy_threshold_mm", cfg.heavy_threshold_mm}}},
      {"feature_dim", ck.model.feature_dim},
      {"node_order", ck.node_order},
      {"altitude", {{"mean", ck.altitude.mean}, {"stddev", ck.altitude.stddev}}},
      {"feature_scaler",
       {{"mean", vector_json(ck.feature_scaler.mean())},
        {"stddev", vector_json(ck.feature_scaler.stddev())}}},
      {"graph", scheme_json(ck.graph_scheme)},
      {"preprocessing",
       {{"max_missing_frac", ck.max_missing_frac},
        {"split", std::vector<double>(ck.split.begin(), ck.split.end())}}},
      {"weights",
       {{"gcl", std::move(gcl)},
        {"fc_weight", matrix_json(p.fc_weight)},
        {"fc_bias", vector_json(p.fc_bias)},
        {"out_weight", vector_json(p.out_weight)},
        {"out_bias", p.out_bias}}},
  };
  return doc.dump(1) + "\n";
}

Checkpoint parse_checkpoint(std::string_view text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format").get<std::string>() != kFormat) {
      throw Error(ErrorCode::BadCheckpoint, "not a raingnn checkpoint");
    }
    const int version = doc.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw Error(ErrorCode::BadCheckpoint, "unsupported version " + std::to_string(version));
    }
    Checkpoint ck;
    const json& c = doc.at("config");
    GcnConfig& cfg = ck.model.config;
    cfg.gcl_widths = c.at("gcl_widths").get<std::vector<std::size_t>>();
    cfg.fc_width = c.at("fc_width").get<std::size_t>();
    cfg.window_length = c.at("window_length").get<std::size_t>();
    cfg.learning_rate = c.at("learning_rate").get<double>();
    cfg.batch_size = c.at("batch_size").get<std::size_t>();
    cfg.max_epochs = c.at("max_epochs").get<std::size_t>();
    cfg.patience = c.at("patience").get<std::size_t>();
    cfg.seed = c.at("seed").get<std::uint64_t>();
    cfg.heavy_threshold_mm = c.at("heavy_threshold_mm").get<double>();
    cfg.validate();
    ck.model.feature_dim = doc.at("feature_dim").get<std::size_t>();
    ck.node_order = doc.at("node_order").get<std::vector<std::string>>();
    ck.altitude.mean = doc.at("altitude").at("mean").get<double>();
    ck.altitude.stddev = doc.at("altitude").at("stddev").get<double>();
    ck.feature_scaler = FeatureScaler(vector_from(doc.at("feature_scaler").at("mean")),
                                      vector_from(doc.at("feature_scaler").at("stddev")));
    ck.graph_scheme = scheme_from(doc.at("graph"));
    ck.max_missing_frac = doc.at("preprocessing").at("max_missing_frac").get<double>();
    const auto split = doc.at("preprocessing").at("split").get<std::vector<double>>();
    if (split.size() != 3) throw Error(ErrorCode::BadCheckpoint, "split needs 3 fractions");
    std::copy(split.begin(), split.end(), ck.split.begin());

    const json& w = doc.at("weights");
    GcnParameters& p = ck.model.params;
    for (const auto& m : w.at("gcl")) p.gcl.push_back(matrix_from(m));
    p.fc_weight = matrix_from(w.at("fc_weight"));
    p.fc_bias = vector_from(w.at("fc_bias"));
    p.out_weight = vector_from(w.at("out_weight"));
    p.out_bias = w.at("out_bias").get<double>();

    // Shape chain: feature_dim -> gcl widths -> fc_width -> 1.
    auto width = static_cast<Eigen::Index>(ck.model.feature_dim);
    if (p.gcl.size() != cfg.gcl_widths.size()) {
      throw Error(ErrorCode::BadCheckpoint, "layer count disagrees with config");
    }
    for (std::size_t l = 0; l < p.gcl.size(); ++l) {
      if (p.gcl[l].rows() != width ||
          p.gcl[l].cols() != static_cast<Eigen::Index>(cfg.gcl_widths[l])) {
        throw Error(ErrorCode::BadCheckpoint, "gcl" + std::to_string(l) + " has wrong shape");
      }
      width = p.gcl[l].cols();
    }
    const auto fc = static_cast<Eigen::Index>(cfg.fc_width);
    if (p.fc_weight.rows() != width || p.fc_weight.cols() != fc || p.fc_bias.size() != fc ||
        p.out_weight.size() != fc) {
      throw Error(ErrorCode::BadCheckpoint, "dense head has wrong shape");
    }
    if (ck.feature_scaler.mean().size() != static_cast<Eigen::Index>(ck.model.feature_dim)) {
      throw Error(ErrorCode::BadCheckpoint, "feature scaler width disagrees with feature_dim");
    }
    return ck;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadCheckpoint, e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << serialize_checkpoint(checkpoint);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_checkpoint(buf.str());
}

}  // namespace raingnn
