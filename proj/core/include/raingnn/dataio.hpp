#pragma once

// Station and daily-precipitation ingestion, cleaning, and sample building.
//
// stations CSV:  station_id,name,latitude_deg,longitude_deg,altitude_m
// records CSV:   station_id,date,precip_mm      (ISO dates, empty = missing)
// device map:    device_id,station_id

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "raingnn/calendar.hpp"
#include "raingnn/telemetry.hpp"
#include "raingnn/types.hpp"

namespace raingnn {

std::vector<Station> read_stations(std::istream& in);
std::vector<Station> load_stations(const std::filesystem::path& path);
void write_stations(std::ostream& out, std::span<const Station> stations);

std::vector<DailyRecord> read_records(std::istream& in);
std::vector<DailyRecord> load_records(const std::filesystem::path& path);
// Writes present values with one fractional digit, missing values as empty.
void write_records(std::ostream& out, std::span<const DailyRecord> records);

DeviceMap read_device_map(std::istream& in);
DeviceMap load_device_map(const std::filesystem::path& path);

// Strips whitespace, a trailing "mm" unit, and thousands separators, and
// accepts a decimal comma. Empty means missing. Returns nullopt for empty
// input; throws MalformedRow if the remainder is not a number.
std::optional<double> clean_precip_value(std::string_view raw);

struct Dataset {
  std::vector<DailyRecord> records;
  std::vector<Station> stations;
};

// Drops stations whose missing fraction over the dataset's full date span
// exceeds `max_missing_frac`. Days without a record count as missing.
Dataset drop_sparse_stations(std::span<const DailyRecord> records,
                             std::span<const Station> stations, double max_missing_frac);

// Fills every station over the dataset's full date span: linear between
// present neighbours, constant beyond the first/last present value.
// Output is sorted by (station_id, date).
std::vector<DailyRecord> interpolate_missing(std::span<const DailyRecord> records);

// Per-column affine standardization. A zero-variance column keeps a unit
// divisor, so it maps to 0.
class FeatureScaler {
 public:
  FeatureScaler() = default;
  FeatureScaler(Eigen::VectorXd mean, Eigen::VectorXd stddev);

  // Statistics over every row of every matrix.
  static FeatureScaler fit(std::span<const Eigen::MatrixXd> blocks);

  bool fitted() const { return mean_.size() > 0; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& stddev() const { return stddev_; }

  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd inverse(const Eigen::MatrixXd& z) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd stddev_;
};

struct AltitudeScaling {
  double mean = 0.0;
  double stddev = 1.0;

  static AltitudeScaling fit(std::span<const Station> stations);
  double apply(double altitude_m) const { return (altitude_m - mean) / stddev; }
};

// One sample per date t: a |V| x (W+1) feature matrix (W trailing days of
// precipitation ending at t, oldest first, then standardized altitude) and
// the next-day precipitation of every station as target.
struct SampleSet {
  std::vector<std::string> node_order;
  std::size_t window_length = 0;
  AltitudeScaling altitude;
  std::vector<CivilDate> dates;
  std::vector<Eigen::MatrixXd> features;
  std::vector<Eigen::VectorXd> targets;
  FeatureScaler scaler;  // unfitted until standardize()

  std::size_t size() const { return dates.size(); }
  std::size_t feature_dim() const { return window_length + 1; }
  SampleSet slice(std::size_t begin, std::size_t count) const;
};

SampleSet make_samples(std::span<const DailyRecord> records,
                       std::span<const Station> stations, std::size_t window_length);

// Features for forecasting the day after the last date in `records`. Gaps are
// filled as in interpolate_missing. A station without any present value in
// the trailing `window_length` days raises SpanTooShort naming it.
Eigen::MatrixXd latest_features(std::span<const DailyRecord> records,
                                std::span<const Station> stations,
                                std::size_t window_length, const AltitudeScaling& altitude);

using SplitFractions = std::array<double, 3>;
inline constexpr SplitFractions kDefaultSplit = {0.70, 0.20, 0.10};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

// floor(n * f) for validation and test; the remainder goes to train.
SplitSizes split_sizes(std::size_t n, const SplitFractions& fractions = kDefaultSplit);

struct SampleSplits {
  SampleSet train;
  SampleSet validation;
  SampleSet test;
};

SampleSplits split_chronological(const SampleSet& samples,
                                 const SplitFractions& fractions = kDefaultSplit);

// Applies `scaler` to every feature matrix; targets stay in millimetres.
SampleSet standardize(const SampleSet& samples, const FeatureScaler& scaler);

// Fits on `train` and applies to `samples`.
SampleSet standardize(const SampleSet& samples, const SampleSet& train);

}  // namespace raingnn
