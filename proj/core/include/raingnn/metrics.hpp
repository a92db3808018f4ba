#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "raingnn/types.hpp"

namespace raingnn {

inline constexpr double kHeavyRainThresholdMm = 8.0;
inline constexpr double kDaysPerYear = 365.25;

// All pairwise metrics throw LengthMismatch for unequal lengths and
// EmptyInput for empty ones.
double mse(std::span<const double> observed, std::span<const double> predicted);
double mae(std::span<const double> observed, std::span<const double> predicted);

// Sample Pearson correlation. Throws ZeroVariance if either input is
// constant and LengthMismatch if lengths differ or are below 2.
double pearson_r(std::span<const double> observed, std::span<const double> predicted);

struct HeavyEventScores {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  std::optional<double> precision;  // empty when nothing was predicted heavy
  std::optional<double> recall;     // empty when nothing was observed heavy
};

// An event is a value >= threshold_mm.
HeavyEventScores heavy_event_scores(std::span<const double> observed,
                                    std::span<const double> predicted,
                                    double threshold_mm = kHeavyRainThresholdMm);

struct EvalReport {
  double mse = 0.0;
  double mae = 0.0;
  std::optional<double> pearson_r;  // empty if either side is constant
  std::size_t n = 0;
  double threshold_mm = kHeavyRainThresholdMm;
  HeavyEventScores heavy;
};

EvalReport evaluate(std::span<const double> observed, std::span<const double> predicted,
                    double threshold_mm = kHeavyRainThresholdMm);

struct ClimatologyRow {
  std::string station_id;
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
  std::size_t heavy_days = 0;
  double avg_heavy_days_per_year = 0.0;
};

// Heavy days per station divided by the dataset span in years
// (span days / 365.25). Rows are ordered by station_id. Missing values never
// count as heavy.
std::vector<ClimatologyRow> heavy_climatology(std::span<const DailyRecord> records,
                                              std::span<const Station> stations,
                                              double threshold_mm = kHeavyRainThresholdMm);

// `station_id,latitude_deg,longitude_deg,avg_heavy_days_per_year`
void write_climatology_csv(std::ostream& out, std::span<const ClimatologyRow> rows);

}  // namespace raingnn
