#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace raingnn {

// Civil (proleptic Gregorian) date; arithmetic is in whole days.
using CivilDate = std::chrono::sys_days;

// Seconds since the Unix epoch, UTC.
using UnixSeconds = std::int64_t;

// Parses strict `YYYY-MM-DD`.
std::optional<CivilDate> parse_iso_date(std::string_view text);
std::string format_iso_date(CivilDate date);

// UTC civil day containing the given instant.
CivilDate utc_day(UnixSeconds t);

// `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_iso_instant(UnixSeconds t);
std::optional<UnixSeconds> parse_iso_instant(std::string_view text);

inline std::int64_t day_number(CivilDate d) { return d.time_since_epoch().count(); }
inline CivilDate from_day_number(std::int64_t n) {
  return CivilDate{std::chrono::days{n}};
}

}  // namespace raingnn
