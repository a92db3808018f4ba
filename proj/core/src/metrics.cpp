#include "raingnn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include <Eigen/Dense>

#include "raingnn/csv.hpp"
#include "raingnn/error.hpp"

namespace raingnn {
namespace {

using ConstMap = Eigen::Map<const Eigen::ArrayXd>;

ConstMap as_array(std::span<const double> v) {
  return ConstMap(v.data(), static_cast<Eigen::Index>(v.size()));
}

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  if (a.empty()) throw Error(ErrorCode::EmptyInput, "metric of zero samples");
}

}  // namespace

double mse(std::span<const double> observed, std::span<const double> predicted) {
  check_pair(observed, predicted);
  return (as_array(observed) - as_array(predicted)).square().mean();
}

double mae(std::span<const double> observed, std::span<const double> predicted) {
  check_pair(observed, predicted);
  return (as_array(observed) - as_array(predicted)).abs().mean();
}

double pearson_r(std::span<const double> observed, std::span<const double> predicted) {
  if (observed.size() != predicted.size() || observed.size() < 2) {
    throw Error(ErrorCode::LengthMismatch, "pearson_r needs two equal-length inputs of >= 2");
  }
  const auto x = as_array(observed);
  const auto y = as_array(predicted);
  const Eigen::ArrayXd dx = x - x.mean();
  const Eigen::ArrayXd dy = y - y.mean();
  const double sxx = dx.square().sum();
  const double syy = dy.square().sum();
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::ZeroVariance, sxx == 0.0 ? "observed is constant"
                                                    : "predicted is constant");
  }
  // The (n - 1) factors of covariance and both deviations cancel.
  const double r = (dx * dy).sum() / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

HeavyEventScores heavy_event_scores(std::span<const double> observed,
                                    std::span<const double> predicted, double threshold_mm) {
  if (observed.size() != predicted.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(observed.size()) + " vs " + std::to_string(predicted.size()));
  }
  HeavyEventScores s;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const bool actual = observed[i] >= threshold_mm;
    const bool flagged = predicted[i] >= threshold_mm;
    if (actual && flagged) ++s.true_positives;
    if (!actual && flagged) ++s.false_positives;
    if (actual && !flagged) ++s.false_negatives;
  }
  const auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  s.precision = ratio(s.true_positives, s.true_positives + s.false_positives);
  s.recall = ratio(s.true_positives, s.true_positives + s.false_negatives);
  return s;
}

EvalReport evaluate(std::span<const double> observed, std::span<const double> predicted,
                    double threshold_mm) {
  EvalReport r;
  r.mse = mse(observed, predicted);
  r.mae = mae(observed, predicted);
  r.n = observed.size();
  r.threshold_mm = threshold_mm;
  try {
    r.pearson_r = pearson_r(observed, predicted);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroVariance && e.code() != ErrorCode::LengthMismatch) throw;
  }
  r.heavy = heavy_event_scores(observed, predicted, threshold_mm);
  return r;
}

std::vector<ClimatologyRow> heavy_climatology(std::span<const DailyRecord> records,
                                              std::span<const Station> stations,
                                              double threshold_mm) {
  if (records.empty() || stations.empty()) {
    throw Error(ErrorCode::EmptyDataset, "climatology needs records and stations");
  }
  auto [lo, hi] = std::minmax_element(
      records.begin(), records.end(),
      [](const DailyRecord& a, const DailyRecord& b) { return a.date < b.date; });
  const double span_days = static_cast<double>(day_number(hi->date) - day_number(lo->date) + 1);
  const double span_years = span_days / kDaysPerYear;

  std::map<std::string, std::size_t, std::less<>> heavy;
  for (const DailyRecord& r : records) {
    if (r.precip_mm && *r.precip_mm >= threshold_mm) ++heavy[r.station_id];
  }

  std::vector<ClimatologyRow> rows;
  for (const Station& s : stations) {
    ClimatologyRow row{s.station_id, s.latitude_deg, s.longitude_deg, 0, 0.0};
    if (const auto it = heavy.find(s.station_id); it != heavy.end()) row.heavy_days = it->second;
    row.avg_heavy_days_per_year = static_cast<double>(row.heavy_days) / span_years;
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const ClimatologyRow& a, const ClimatologyRow& b) {
    return a.station_id < b.station_id;
  });
  return rows;
}

void write_climatology_csv(std::ostream& out, std::span<const ClimatologyRow> rows) {
  out << "station_id,latitude_deg,longitude_deg,avg_heavy_days_per_year\n";
  char buf[96];
  for (const ClimatologyRow& r : rows) {
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f", r.latitude_deg, r.longitude_deg,
                  r.avg_heavy_days_per_year);
    out << csv::escape(r.station_id) << buf << '\n';
  }
}

}  // namespace raingnn
