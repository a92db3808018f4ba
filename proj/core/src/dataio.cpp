#include "raingnn/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>

#include "raingnn/csv.hpp"
#include "raingnn/error.hpp"

namespace raingnn {
namespace {

constexpr std::string_view kStationsHeader =
    "station_id,name,latitude_deg,longitude_deg,altitude_m";
constexpr std::string_view kRecordsHeader = "station_id,date,precip_mm";
constexpr std::string_view kDeviceMapHeader = "device_id,station_id";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void malformed(std::size_t line, const std::string& why) {
  throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line) + ": " + why);
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

// Reads the header line and returns false for an empty file.
bool expect_header(csv::LineReader& reader, std::string_view header) {
  std::string line;
  if (!reader.next(line)) return false;
  if (trim(line) != header) {
    malformed(reader.line_number(), "expected header '" + std::string(header) + "'");
  }
  return true;
}

std::vector<std::string> split_row(const std::string& line, std::size_t line_number,
                                   std::size_t columns) {
  auto fields = csv::split_line(line);
  if (!fields) malformed(line_number, "unbalanced quotes");
  if (fields->size() != columns) {
    malformed(line_number, "expected " + std::to_string(columns) + " columns, found " +
                               std::to_string(fields->size()));
  }
  return *std::move(fields);
}

std::string format_mm(double mm) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", mm);
  return buf;
}

std::pair<CivilDate, CivilDate> date_span(std::span<const DailyRecord> records) {
  auto [lo, hi] = std::minmax_element(
      records.begin(), records.end(),
      [](const DailyRecord& a, const DailyRecord& b) { return a.date < b.date; });
  return {lo->date, hi->date};
}

}  // namespace

std::vector<Station> read_stations(std::istream& in) {
  csv::LineReader reader(in);
  std::vector<Station> stations;
  if (!expect_header(reader, kStationsHeader)) return stations;

  std::set<std::string, std::less<>> ids;
  std::string line;
  while (reader.next(line)) {
    const std::size_t n = reader.line_number();
    const auto f = split_row(line, n, 5);
    Station s;
    s.station_id = std::string(trim(f[0]));
    s.name = std::string(trim(f[1]));
    if (s.station_id.empty()) malformed(n, "empty station_id");
    const auto lat = parse_double(f[2]);
    const auto lon = parse_double(f[3]);
    const auto alt = parse_double(f[4]);
    if (!lat || !lon || !alt) malformed(n, "non-numeric coordinate or altitude");
    if (*lat < -90.0 || *lat > 90.0) {
      throw Error(ErrorCode::RangeViolation,
                  "line " + std::to_string(n) + ": latitude " + f[2] + " outside [-90, 90]");
    }
    if (*lon < -180.0 || *lon > 180.0) {
      throw Error(ErrorCode::RangeViolation, "line " + std::to_string(n) + ": longitude " +
                                                 f[3] + " outside [-180, 180]");
    }
    s.latitude_deg = *lat;
    s.longitude_deg = *lon;
    s.altitude_m = *alt;
    if (!ids.insert(s.station_id).second) {
      throw Error(ErrorCode::DuplicateStation,
                  "line " + std::to_string(n) + ": " + s.station_id);
    }
    stations.push_back(std::move(s));
  }
  return stations;
}

std::vector<Station> load_stations(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_stations(in);
}

void write_stations(std::ostream& out, std::span<const Station> stations) {
  out << kStationsHeader << '\n';
  char buf[128];
  for (const Station& s : stations) {
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.1f", s.latitude_deg, s.longitude_deg,
                  s.altitude_m);
    out << csv::escape(s.station_id) << ',' << csv::escape(s.name) << buf << '\n';
  }
}

std::optional<double> clean_precip_value(std::string_view raw) {
  std::string_view s = trim(raw);
  if (s.empty()) return std::nullopt;
  if (s.size() >= 2) {
    const std::string_view unit = s.substr(s.size() - 2);
    if ((unit[0] == 'm' || unit[0] == 'M') && (unit[1] == 'm' || unit[1] == 'M')) {
      s = trim(s.substr(0, s.size() - 2));
    }
  }

  std::string text;
  for (char c : s) {
    if (c != ' ' && c != '\t') text.push_back(c);
  }
  const auto last_comma = text.rfind(',');
  const auto last_dot = text.rfind('.');
  const auto commas = std::count(text.begin(), text.end(), ',');
  const auto dots = std::count(text.begin(), text.end(), '.');

  // The last separator is the decimal mark when both kinds appear; a lone
  // comma is a decimal comma; repeated separators of one kind group thousands.
  char decimal = 0;
  if (commas > 0 && dots > 0) {
    decimal = last_comma > last_dot ? ',' : '.';
  } else if (commas == 1) {
    decimal = ',';
  } else if (dots == 1) {
    decimal = '.';
  }
  std::string normalized;
  for (char c : text) {
    if (c == ',' || c == '.') {
      if (c == decimal) normalized.push_back('.');
    } else {
      normalized.push_back(c);
    }
  }
  if (decimal != 0 && std::count(normalized.begin(), normalized.end(), '.') != 1) {
    throw Error(ErrorCode::MalformedRow, "ambiguous decimal separators in '" +
                                             std::string(raw) + "'");
  }
  const auto value = parse_double(normalized);
  if (!value) {
    throw Error(ErrorCode::MalformedRow, "not a number: '" + std::string(raw) + "'");
  }
  return *value == 0.0 ? 0.0 : *value;
}

std::vector<DailyRecord> read_records(std::istream& in) {
  csv::LineReader reader(in);
  std::vector<DailyRecord> records;
  if (!expect_header(reader, kRecordsHeader)) return records;

  std::set<std::pair<std::string, std::int64_t>> seen;
  std::string line;
  while (reader.next(line)) {
    const std::size_t n = reader.line_number();
    const auto f = split_row(line, n, 3);
    DailyRecord r;
    r.station_id = std::string(trim(f[0]));
    if (r.station_id.empty()) malformed(n, "empty station_id");
    const auto date = parse_iso_date(trim(f[1]));
    if (!date) malformed(n, "bad date '" + f[1] + "'");
    r.date = *date;
    try {
      r.precip_mm = clean_precip_value(f[2]);
    } catch (const Error& e) {
      malformed(n, e.detail());
    }
    if (r.precip_mm && *r.precip_mm < 0.0) {
      throw Error(ErrorCode::NegativePrecip,
                  "line " + std::to_string(n) + ": " + std::string(trim(f[2])));
    }
    if (!seen.emplace(r.station_id, day_number(r.date)).second) {
      throw Error(ErrorCode::DuplicateRecord, "line " + std::to_string(n) + ": " +
                                                  r.station_id + " " +
                                                  format_iso_date(r.date));
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<DailyRecord> load_records(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_records(in);
}

void write_records(std::ostream& out, std::span<const DailyRecord> records) {
  out << kRecordsHeader << '\n';
  for (const DailyRecord& r : records) {
    out << csv::escape(r.station_id) << ',' << format_iso_date(r.date) << ',';
    if (r.precip_mm) out << format_mm(*r.precip_mm);
    out << '\n';
  }
}

DeviceMap read_device_map(std::istream& in) {
  csv::LineReader reader(in);
  DeviceMap map;
  if (!expect_header(reader, kDeviceMapHeader)) return map;
  std::string line;
  while (reader.next(line)) {
    const auto f = split_row(line, reader.line_number(), 2);
    const std::string device(trim(f[0]));
    const std::string station(trim(f[1]));
    if (device.empty() || station.empty()) malformed(reader.line_number(), "empty id");
    if (!map.emplace(device, station).second) {
      malformed(reader.line_number(), "device " + device + " mapped twice");
    }
  }
  return map;
}

DeviceMap load_device_map(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_device_map(in);
}

Dataset drop_sparse_stations(std::span<const DailyRecord> records,
                             std::span<const Station> stations, double max_missing_frac) {
  if (!(max_missing_frac >= 0.0 && max_missing_frac <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "max_missing_frac must lie in [0, 1]");
  }
  if (records.empty() || stations.empty()) {
    throw Error(ErrorCode::EmptyDataset, "no records or no stations");
  }
  const auto [first, last] = date_span(records);
  const double span_days = static_cast<double>(day_number(last) - day_number(first) + 1);

  std::unordered_map<std::string, std::size_t> present;
  for (const DailyRecord& r : records) {
    if (r.precip_mm) ++present[r.station_id];
  }

  Dataset out;
  std::set<std::string, std::less<>> kept;
  for (const Station& s : stations) {
    const auto it = present.find(s.station_id);
    const double have = it == present.end() ? 0.0 : static_cast<double>(it->second);
    const double missing_frac = (span_days - have) / span_days;
    if (missing_frac <= max_missing_frac) {
      out.stations.push_back(s);
      kept.insert(s.station_id);
    }
  }
  if (out.stations.empty()) {
    throw Error(ErrorCode::EmptyDataset, "every station exceeds the missing-value threshold");
  }
  for (const DailyRecord& r : records) {
    if (kept.contains(r.station_id)) out.records.push_back(r);
  }
  return out;
}

std::vector<DailyRecord> interpolate_missing(std::span<const DailyRecord> records) {
  if (records.empty()) return {};
  const auto [first, last] = date_span(records);
  const std::int64_t origin = day_number(first);
  const auto span = static_cast<std::size_t>(day_number(last) - origin + 1);

  std::map<std::string, std::vector<std::optional<double>>> series;
  for (const DailyRecord& r : records) {
    auto& values = series.try_emplace(r.station_id, span).first->second;
    values[static_cast<std::size_t>(day_number(r.date) - origin)] = r.precip_mm;
  }

  std::vector<DailyRecord> out;
  out.reserve(series.size() * span);
  for (auto& [station_id, values] : series) {
    std::vector<std::size_t> present;
    for (std::size_t k = 0; k < span; ++k) {
      if (values[k]) present.push_back(k);
    }
    if (present.empty()) throw Error(ErrorCode::AllMissingStation, station_id);

    for (std::size_t k = 0; k < present.front(); ++k) values[k] = values[present.front()];
    for (std::size_t k = present.back() + 1; k < span; ++k) values[k] = values[present.back()];
    for (std::size_t p = 0; p + 1 < present.size(); ++p) {
      const std::size_t a = present[p];
      const std::size_t b = present[p + 1];
      const double va = *values[a];
      const double vb = *values[b];
      for (std::size_t k = a + 1; k < b; ++k) {
        values[k] = va + (vb - va) * static_cast<double>(k - a) / static_cast<double>(b - a);
      }
    }
    for (std::size_t k = 0; k < span; ++k) {
      out.push_back({station_id, from_day_number(origin + static_cast<std::int64_t>(k)),
                     values[k]});
    }
  }
  return out;
}

FeatureScaler::FeatureScaler(Eigen::VectorXd mean, Eigen::VectorXd stddev)
    : mean_(std::move(mean)), stddev_(std::move(stddev)) {
  if (mean_.size() != stddev_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "scaler mean/stddev sizes differ");
  }
}

FeatureScaler FeatureScaler::fit(std::span<const Eigen::MatrixXd> blocks) {
  if (blocks.empty()) throw Error(ErrorCode::EmptySplit, "cannot fit scaler on no samples");
  const Eigen::Index cols = blocks.front().cols();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(cols);
  double rows = 0.0;
  for (const auto& b : blocks) {
    if (b.cols() != cols) throw Error(ErrorCode::ShapeMismatch, "ragged feature blocks");
    sum += b.colwise().sum().transpose();
    rows += static_cast<double>(b.rows());
  }
  const Eigen::VectorXd mean = sum / rows;
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(cols);
  for (const auto& b : blocks) {
    sq += (b.rowwise() - mean.transpose()).array().square().matrix().colwise().sum().transpose();
  }
  Eigen::VectorXd stddev = (sq / rows).cwiseSqrt();
  for (Eigen::Index c = 0; c < cols; ++c) {
    if (stddev[c] == 0.0) stddev[c] = 1.0;
  }
  return FeatureScaler(mean, stddev);
}

Eigen::MatrixXd FeatureScaler::transform(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean_.size()) throw Error(ErrorCode::ShapeMismatch, "scaler width");
  return ((x.rowwise() - mean_.transpose()).array().rowwise() /
          stddev_.transpose().array())
      .matrix();
}

Eigen::MatrixXd FeatureScaler::inverse(const Eigen::MatrixXd& z) const {
  if (z.cols() != mean_.size()) throw Error(ErrorCode::ShapeMismatch, "scaler width");
  return ((z.array().rowwise() * stddev_.transpose().array()).matrix().rowwise() +
          mean_.transpose());
}

AltitudeScaling AltitudeScaling::fit(std::span<const Station> stations) {
  AltitudeScaling s;
  if (stations.empty()) return s;
  double sum = 0.0;
  for (const Station& st : stations) sum += st.altitude_m;
  s.mean = sum / static_cast<double>(stations.size());
  double sq = 0.0;
  for (const Station& st : stations) sq += (st.altitude_m - s.mean) * (st.altitude_m - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(stations.size()));
  if (s.stddev == 0.0) s.stddev = 1.0;
  return s;
}

SampleSet SampleSet::slice(std::size_t begin, std::size_t count) const {
  SampleSet out;
  out.node_order = node_order;
  out.window_length = window_length;
  out.altitude = altitude;
  out.scaler = scaler;
  const auto b = static_cast<std::ptrdiff_t>(begin);
  const auto e = static_cast<std::ptrdiff_t>(begin + count);
  out.dates.assign(dates.begin() + b, dates.begin() + e);
  out.features.assign(features.begin() + b, features.begin() + e);
  out.targets.assign(targets.begin() + b, targets.begin() + e);
  return out;
}

SampleSet make_samples(std::span<const DailyRecord> records,
                       std::span<const Station> stations, std::size_t window_length) {
  if (window_length == 0) throw Error(ErrorCode::InvalidArgument, "window_length must be >= 1");
  if (stations.empty()) throw Error(ErrorCode::EmptyDataset, "no stations");

  std::unordered_map<std::string, Eigen::Index> column;
  for (std::size_t i = 0; i < stations.size(); ++i) {
    column.emplace(stations[i].station_id, static_cast<Eigen::Index>(i));
  }
  std::vector<DailyRecord> mine;
  for (const DailyRecord& r : records) {
    if (column.contains(r.station_id)) mine.push_back(r);
  }
  if (mine.empty()) throw Error(ErrorCode::SpanTooShort, "no records for the given stations");

  const auto [first, last] = date_span(mine);
  const std::int64_t origin = day_number(first);
  const auto span = static_cast<std::size_t>(day_number(last) - origin + 1);
  if (span < window_length + 1) {
    throw Error(ErrorCode::SpanTooShort, std::to_string(span) + " days cannot fill a " +
                                             std::to_string(window_length) +
                                             "-day window plus one target day");
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXd table = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(span),
                                                    static_cast<Eigen::Index>(stations.size()),
                                                    nan);
  for (const DailyRecord& r : mine) {
    if (r.precip_mm) {
      table(static_cast<Eigen::Index>(day_number(r.date) - origin), column.at(r.station_id)) =
          *r.precip_mm;
    }
  }
  for (Eigen::Index c = 0; c < table.cols(); ++c) {
    for (Eigen::Index d = 0; d < table.rows(); ++d) {
      if (std::isnan(table(d, c))) {
        throw Error(ErrorCode::InvalidArgument,
                    "missing value for " + stations[static_cast<std::size_t>(c)].station_id +
                        " on " + format_iso_date(from_day_number(origin + d)) +
                        "; interpolate before building samples");
      }
    }
  }

  SampleSet out;
  out.window_length = window_length;
  out.altitude = AltitudeScaling::fit(stations);
  for (const Station& s : stations) out.node_order.push_back(s.station_id);

  const auto n = static_cast<Eigen::Index>(stations.size());
  const auto w = static_cast<Eigen::Index>(window_length);
  for (Eigen::Index t = w - 1; t + 1 < static_cast<Eigen::Index>(span); ++t) {
    Eigen::MatrixXd x(n, w + 1);
    x.leftCols(w) = table.middleRows(t - w + 1, w).transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
      x(i, w) = out.altitude.apply(stations[static_cast<std::size_t>(i)].altitude_m);
    }
    out.dates.push_back(from_day_number(origin + t));
    out.features.push_back(std::move(x));
    out.targets.push_back(table.row(t + 1).transpose());
  }
  return out;
}

Eigen::MatrixXd latest_features(std::span<const DailyRecord> records,
                                std::span<const Station> stations,
                                std::size_t window_length, const AltitudeScaling& altitude) {
  if (window_length == 0) throw Error(ErrorCode::InvalidArgument, "window_length must be >= 1");
  if (records.empty()) throw Error(ErrorCode::SpanTooShort, "no records");
  const std::int64_t last = day_number(date_span(records).second);
  const auto w = static_cast<Eigen::Index>(window_length);
  const std::int64_t window_start = last - w + 1;

  std::set<std::string_view> wanted;
  for (const Station& s : stations) wanted.insert(s.station_id);
  std::set<std::string_view> recent;
  std::vector<DailyRecord> own;
  for (const DailyRecord& r : records) {
    if (!wanted.contains(r.station_id)) continue;
    own.push_back(r);
    if (r.precip_mm && day_number(r.date) >= window_start) recent.insert(r.station_id);
  }
  for (const Station& s : stations) {
    if (!recent.contains(s.station_id)) {
      throw Error(ErrorCode::SpanTooShort,
                  "station " + s.station_id + " has no value in the " +
                      std::to_string(window_length) + " days ending " +
                      format_iso_date(from_day_number(last)));
    }
  }
  // Same gap filling as training.
  std::map<std::pair<std::string_view, std::int64_t>, double> value;
  const auto filled = interpolate_missing(own);
  for (const DailyRecord& r : filled) value[{r.station_id, day_number(r.date)}] = *r.precip_mm;

  Eigen::MatrixXd x(static_cast<Eigen::Index>(stations.size()), w + 1);
  for (std::size_t i = 0; i < stations.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index k = 0; k < w; ++k) {
      const auto it = value.find({stations[i].station_id, window_start + k});
      if (it == value.end()) {
        throw Error(ErrorCode::SpanTooShort,
                    "station " + stations[i].station_id + " has no record on " +
                        format_iso_date(from_day_number(window_start + k)));
      }
      x(row, k) = it->second;
    }
    x(row, w) = altitude.apply(stations[i].altitude_m);
  }
  return x;
}

SplitSizes split_sizes(std::size_t n, const SplitFractions& fractions) {
  double total = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0)) throw Error(ErrorCode::InvalidArgument, "split fractions must be positive");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "split fractions must sum to 1");
  }
  // The slack absorbs representation error, e.g. 0.1 * 30 == 3.0000000000000004.
  const auto block = [n](double f) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * f + 1e-9));
  };
  SplitSizes s;
  s.validation = block(fractions[1]);
  s.test = block(fractions[2]);
  s.train = n - std::min(n, s.validation + s.test);
  if (s.train == 0 || s.validation == 0 || s.test == 0) {
    throw Error(ErrorCode::EmptySplit,
                std::to_string(n) + " samples give train/val/test = " +
                    std::to_string(s.train) + "/" + std::to_string(s.validation) + "/" +
                    std::to_string(s.test));
  }
  return s;
}

SampleSplits split_chronological(const SampleSet& samples, const SplitFractions& fractions) {
  const SplitSizes s = split_sizes(samples.size(), fractions);
  return {samples.slice(0, s.train), samples.slice(s.train, s.validation),
          samples.slice(s.train + s.validation, s.test)};
}

SampleSet standardize(const SampleSet& samples, const FeatureScaler& scaler) {
  SampleSet out = samples;
  for (auto& x : out.features) x = scaler.transform(x);
  out.scaler = scaler;
  return out;
}

SampleSet standardize(const SampleSet& samples, const SampleSet& train) {
  return standardize(samples, FeatureScaler::fit(train.features));
}

}  // namespace raingnn
