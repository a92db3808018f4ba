#pragma once

#include <optional>
#include <string>

#include "raingnn/calendar.hpp"

namespace raingnn {

// One gauge or weather station; a node of the station graph.
struct Station {
  std::string station_id;
  std::string name;
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
  double altitude_m = 0.0;

  bool operator==(const Station&) const = default;
};

// One station-day of precipitation. An empty `precip_mm` is a missing
// observation, distinct from a dry day.
struct DailyRecord {
  std::string station_id;
  CivilDate date;
  std::optional<double> precip_mm;

  bool operator==(const DailyRecord&) const = default;
};

}  // namespace raingnn
