#include "cli/run_config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "raingnn/error.hpp"

namespace raingnn::cli {
namespace {

[[noreturn]] void bad_value(std::string_view key, const std::string& value) {
  throw Error(ErrorCode::InvalidArgument,
              "invalid value '" + value + "' for '" + std::string(key) + "'");
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(std::string_view key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value);
  return out;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the short form when it round-trips.
  for (int precision = 1; precision < 17; ++precision) {
    char shorter[64];
    std::snprintf(shorter, sizeof shorter, "%.*g", precision, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

template <typename T>
ConfigKey number_key(std::string name, std::string help, T RunConfig::*member) {
  return {name, std::move(help),
          [member, name](RunConfig& c, const std::string& v) {
            c.*member = parse_number<T>(name, v);
          },
          [member](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(c.*member);
            } else {
              return std::to_string(c.*member);
            }
          }};
}

template <typename T>
ConfigKey model_key(std::string name, std::string help, T GcnConfig::*member) {
  return {name, std::move(help),
          [member, name](RunConfig& c, const std::string& v) {
            c.model.*member = parse_number<T>(name, v);
          },
          [member](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(c.model.*member);
            } else {
              return std::to_string(c.model.*member);
            }
          }};
}

ConfigKey path_key(std::string name, std::string help, std::filesystem::path RunConfig::*member) {
  return {std::move(name), std::move(help),
          [member](RunConfig& c, const std::string& v) { c.*member = v; },
          [member](const RunConfig& c) { return (c.*member).string(); }};
}

std::vector<ConfigKey> build_keys() {
  std::vector<ConfigKey> keys;
  keys.push_back(path_key("stations", "Stations CSV", &RunConfig::stations));
  keys.push_back(path_key("records", "Daily precipitation CSV", &RunConfig::records));
  keys.push_back(path_key("checkpoint", "Model checkpoint to read", &RunConfig::checkpoint));
  keys.push_back(path_key("out-dir", "Directory receiving every output file", &RunConfig::out_dir));
  keys.push_back(path_key("store", "Append-only reading log", &RunConfig::store));
  keys.push_back(path_key("devices", "device_id,station_id mapping CSV", &RunConfig::devices));
  keys.push_back({"host", "Gateway listen address",
                  [](RunConfig& c, const std::string& v) { c.host = v; },
                  [](const RunConfig& c) { return c.host; }});
  keys.push_back(number_key("port", "Gateway listen port (0 = any free port)", &RunConfig::port));

  keys.push_back({"model", "Architecture preset A|B|C|D (sets gcl-widths)",
                  [](RunConfig& c, const std::string& v) {
                    if (v.size() != 1) bad_value("model", v);
                    c.model.gcl_widths = preset_widths(v[0]);
                  },
                  [](const RunConfig& c) {
                    for (char p : {'A', 'B', 'C', 'D'}) {
                      if (preset_widths(p) == c.model.gcl_widths) return std::string(1, p);
                    }
                    return std::string("custom");
                  }});
  keys.push_back({"gcl-widths", "Comma-separated graph convolution widths",
                  [](RunConfig& c, const std::string& v) {
                    std::vector<std::size_t> widths;
                    for (const auto& item : split_list(v)) {
                      widths.push_back(parse_number<std::size_t>("gcl-widths", item));
                    }
                    c.model.gcl_widths = std::move(widths);
                  },
                  [](const RunConfig& c) {
                    std::string out;
                    for (std::size_t w : c.model.gcl_widths) {
                      if (!out.empty()) out += ',';
                      out += std::to_string(w);
                    }
                    return out;
                  }});
  keys.push_back(model_key("fc-width", "Width of the dense layer after the graph convolutions",
                           &GcnConfig::fc_width));
  keys.push_back(model_key("window", "Days of past precipitation per feature vector",
                           &GcnConfig::window_length));
  keys.push_back(model_key("learning-rate", "Adam learning rate", &GcnConfig::learning_rate));
  keys.push_back(model_key("batch-size", "Days per mini-batch", &GcnConfig::batch_size));
  keys.push_back(model_key("max-epochs", "Upper bound on training epochs", &GcnConfig::max_epochs));
  keys.push_back(model_key("patience", "Epochs without validation improvement before stopping",
                           &GcnConfig::patience));
  keys.push_back(model_key("seed", "Random seed", &GcnConfig::seed));
  keys.push_back(model_key("heavy-threshold", "Heavy-rain threshold in mm/day (inclusive)",
                           &GcnConfig::heavy_threshold_mm));

  keys.push_back({"graph-scheme", "Edge weighting: inverse_distance | knn | raw_distance",
                  [](RunConfig& c, const std::string& v) {
                    if (v != "inverse_distance" && v != "knn" && v != "raw_distance") {
                      bad_value("graph-scheme", v);
                    }
                    c.graph_scheme = v;
                  },
                  [](const RunConfig& c) { return c.graph_scheme; }});
  keys.push_back(number_key("epsilon-km", "Distance offset in 1/(d + epsilon)", &RunConfig::epsilon_km));
  keys.push_back(number_key("self-loop-weight", "Diagonal adjacency weight", &RunConfig::self_loop_weight));
  keys.push_back(number_key("knn-k", "Neighbours kept per node by the knn scheme", &RunConfig::knn_k));

  keys.push_back({"split", "Train,validation,test fractions",
                  [](RunConfig& c, const std::string& v) {
                    const auto items = split_list(v);
                    if (items.size() != 3) bad_value("split", v);
                    for (std::size_t i = 0; i < 3; ++i) {
                      c.split[i] = parse_number<double>("split", items[i]);
                    }
                  },
                  [](const RunConfig& c) {
                    return format_double(c.split[0]) + "," + format_double(c.split[1]) + "," +
                           format_double(c.split[2]);
                  }});
  keys.push_back(number_key("max-missing-frac",
                            "Drop stations missing more than this fraction of days",
                            &RunConfig::max_missing_frac));

  keys.push_back({"synth-stations", "Synthetic fixture: number of stations",
                  [](RunConfig& c, const std::string& v) {
                    c.synth.stations = parse_number<std::size_t>("synth-stations", v);
                  },
                  [](const RunConfig& c) { return std::to_string(c.synth.stations); }});
  keys.push_back({"synth-days", "Synthetic fixture: number of days",
                  [](RunConfig& c, const std::string& v) {
                    c.synth.days = parse_number<std::size_t>("synth-days", v);
                  },
                  [](const RunConfig& c) { return std::to_string(c.synth.days); }});
  keys.push_back({"synth-start", "Synthetic fixture: first date (YYYY-MM-DD)",
                  [](RunConfig& c, const std::string& v) {
                    if (!parse_iso_date(v)) bad_value("synth-start", v);
                    c.synth.start_date = v;
                  },
                  [](const RunConfig& c) { return c.synth.start_date; }});
  keys.push_back({"synth-missing-frac", "Synthetic fixture: fraction of values blanked",
                  [](RunConfig& c, const std::string& v) {
                    c.synth.missing_frac = parse_number<double>("synth-missing-frac", v);
                  },
                  [](const RunConfig& c) { return format_double(c.synth.missing_frac); }});
  return keys;
}

}  // namespace

AdjacencyScheme RunConfig::adjacency_scheme() const {
  if (graph_scheme == "knn") return KnnScheme{knn_k, epsilon_km, self_loop_weight};
  if (graph_scheme == "raw_distance") return RawDistanceScheme{self_loop_weight};
  return InverseDistanceScheme{epsilon_km, self_loop_weight};
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = build_keys();
  return keys;
}

const ConfigKey* find_key(std::string_view name) {
  for (const auto& k : config_keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

void apply_setting(RunConfig& config, std::string_view key, const std::string& value) {
  const ConfigKey* k = find_key(key);
  if (k == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "unknown configuration key '" + std::string(key) + "'");
  }
  k->set(config, value);
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument,
                  "config line " + std::to_string(n) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (find_key(key) == nullptr) {
      throw Error(ErrorCode::InvalidArgument,
                  "config line " + std::to_string(n) + ": unknown key '" + key + "'");
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open config file " + path.string());
  return parse_config_text(in);
}

std::string to_config_text(const RunConfig& config) {
  std::string out;
  for (const auto& k : config_keys()) {
    if (k.name == "model") continue;  // gcl-widths carries the same information
    out += k.name + " = " + k.get(config) + "\n";
  }
  return out;
}

}  // namespace raingnn::cli
