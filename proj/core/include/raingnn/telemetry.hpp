#pragma once

// Gauge report wire format.
//
//   JP,1,<device_id>,<unix_seconds>,<tip_count>,<temp_c>,<soil_pct>,<hum_pct>,<uv_mw_cm2>,<batt_v>*<CK>
//
// temp/soil/hum carry exactly one fractional digit, uv/batt exactly two.
// Numbers are canonical: no padding, no leading zeros, no "-0.0". <CK> is the
// XOR of every byte before '*', as two uppercase hex digits. A frame never
// exceeds 160 bytes (one SMS payload).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "raingnn/calendar.hpp"
#include "raingnn/types.hpp"

namespace raingnn {

inline constexpr std::size_t kMaxFrameBytes = 160;
inline constexpr double kMillimetresPerTip = 0.2;

// Decimal with a fixed number of fractional digits, held as a scaled integer
// so that encode/parse roundtrips are exact.
template <int Digits>
class FixedDecimal {
  static_assert(Digits == 1 || Digits == 2);

 public:
  static constexpr int kDigits = Digits;
  static constexpr std::int64_t kScale = Digits == 1 ? 10 : 100;

  constexpr FixedDecimal() = default;

  static constexpr FixedDecimal from_scaled(std::int64_t scaled) {
    FixedDecimal d;
    d.scaled_ = scaled;
    return d;
  }
  // Rounds half away from zero to the nearest representable value.
  static FixedDecimal from_double(double value);

  constexpr std::int64_t scaled() const { return scaled_; }
  constexpr double value() const { return static_cast<double>(scaled_) / kScale; }

  constexpr auto operator<=>(const FixedDecimal&) const = default;

 private:
  std::int64_t scaled_ = 0;
};

using Tenths = FixedDecimal<1>;
using Hundredths = FixedDecimal<2>;

struct TelemetryMessage {
  std::string device_id;
  UnixSeconds timestamp = 0;
  std::int64_t tip_count = 0;  // tips since the previous report
  Tenths temp_c;
  Tenths soil_pct;
  Tenths hum_pct;
  Hundredths uv_mw_cm2;
  Hundredths batt_v;

  bool operator==(const TelemetryMessage&) const = default;
};

// Throws Error{InvalidField} naming the first offending field.
void validate(const TelemetryMessage& msg);

std::uint8_t frame_checksum(std::string_view payload) noexcept;

// Throws InvalidField or OversizeMessage.
std::string encode_telemetry(const TelemetryMessage& msg);

// Strict inverse of encode_telemetry. Throws BadFrame, UnsupportedVersion,
// ChecksumMismatch or InvalidField. Never reads outside `raw`.
TelemetryMessage parse_telemetry(std::string_view raw);

constexpr double tips_to_mm(std::int64_t tip_count) {
  return static_cast<double>(tip_count) * kMillimetresPerTip;
}

using DeviceMap = std::map<std::string, std::string, std::less<>>;

struct UnknownDeviceWarning {
  std::size_t message_index;
  std::string device_id;
};

struct DailyAggregation {
  std::vector<DailyRecord> records;  // sorted by (station_id, date)
  std::vector<UnknownDeviceWarning> unknown_devices;
};

// Sums tips per (station, UTC day). Exact (device_id, timestamp) duplicates
// count once; the first occurrence wins. Days without any message produce no
// record.
DailyAggregation aggregate_daily(std::span<const TelemetryMessage> messages,
                                 const DeviceMap& station_of_device);

}  // namespace raingnn
