#include "raingnn/calendar.hpp"

#include <charconv>
#include <cstdio>

namespace raingnn {
namespace {

bool parse_fixed_digits(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::optional<CivilDate> parse_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_fixed_digits(text.substr(0, 4), y) ||
      !parse_fixed_digits(text.substr(5, 2), m) ||
      !parse_fixed_digits(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  std::chrono::year_month_day ymd{std::chrono::year{y},
                                  std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return CivilDate{ymd};
}

std::string format_iso_date(CivilDate date) {
  std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

CivilDate utc_day(UnixSeconds t) {
  return std::chrono::floor<std::chrono::days>(
      std::chrono::sys_seconds{std::chrono::seconds{t}});
}

std::string format_iso_instant(UnixSeconds t) {
  const CivilDate day = utc_day(t);
  const std::int64_t secs = t - day_number(day) * 86400;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_iso_date(day).c_str(),
                static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60),
                static_cast<int>(secs % 60));
  return buf;
}

std::optional<UnixSeconds> parse_iso_instant(std::string_view text) {
  if (text.size() != 20 || text[10] != 'T' || text[13] != ':' || text[16] != ':' ||
      text[19] != 'Z') {
    return std::nullopt;
  }
  auto date = parse_iso_date(text.substr(0, 10));
  int h = 0, mi = 0, s = 0;
  if (!date || !parse_fixed_digits(text.substr(11, 2), h) ||
      !parse_fixed_digits(text.substr(14, 2), mi) ||
      !parse_fixed_digits(text.substr(17, 2), s) || h > 23 || mi > 59 || s > 59) {
    return std::nullopt;
  }
  return day_number(*date) * 86400 + h * 3600 + mi * 60 + s;
}

}  // namespace raingnn
