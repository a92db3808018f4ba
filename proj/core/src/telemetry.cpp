#include "raingnn/telemetry.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <set>
#include <utility>

#include "raingnn/error.hpp"

namespace raingnn {
namespace {

constexpr std::string_view kHeader = "JP";
constexpr std::string_view kVersion = "1";
constexpr std::size_t kFieldCount = 10;
constexpr std::size_t kMaxDeviceIdLength = 16;

[[noreturn]] void bad_frame(const std::string& why) {
  throw Error(ErrorCode::BadFrame, why);
}

[[noreturn]] void invalid_field(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::InvalidField, field + ": " + why);
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool valid_device_id(std::string_view id) {
  if (id.empty() || id.size() > kMaxDeviceIdLength) return false;
  for (char c : id) {
    const bool alnum = is_digit(c) || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
    if (!alnum && c != '-') return false;
  }
  return true;
}

// `0|[1-9][0-9]*`
bool canonical_unsigned(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!is_digit(c)) return false;
  }
  return s.size() == 1 || s.front() != '0';
}

std::int64_t parse_integer(std::string_view token, const char* field) {
  if (!canonical_unsigned(token)) {
    bad_frame(std::string(field) + " is not a canonical unsigned integer");
  }
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec == std::errc::result_out_of_range) invalid_field(field, "out of range");
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    bad_frame(std::string(field) + " is not an integer");
  }
  return value;
}

// `-?(0|[1-9][0-9]*)\.[0-9]{Digits}`, rejecting "-0.0...".
template <int Digits>
FixedDecimal<Digits> parse_fixed(std::string_view token, const char* field,
                                 bool allow_negative) {
  const bool negative = !token.empty() && token.front() == '-';
  std::string_view body = negative ? token.substr(1) : token;
  const auto dot = body.find('.');
  if (dot == std::string_view::npos || body.size() - dot - 1 != Digits ||
      !canonical_unsigned(body.substr(0, dot))) {
    bad_frame(std::string(field) + " is not a fixed-point decimal with " +
              std::to_string(Digits) + " fractional digit(s)");
  }
  const std::string_view frac = body.substr(dot + 1);
  for (char c : frac) {
    if (!is_digit(c)) bad_frame(std::string(field) + " has a non-digit fraction");
  }
  if (negative && !allow_negative) invalid_field(field, "must not be negative");

  // Integer part is bounded so the scaled value fits in int64.
  const std::string_view whole = body.substr(0, dot);
  if (whole.size() > 16) invalid_field(field, "out of range");
  std::int64_t w = 0;
  std::int64_t f = 0;
  std::from_chars(whole.data(), whole.data() + whole.size(), w);
  std::from_chars(frac.data(), frac.data() + frac.size(), f);
  const std::int64_t scaled = w * FixedDecimal<Digits>::kScale + f;
  if (negative && scaled == 0) bad_frame(std::string(field) + " is negative zero");
  return FixedDecimal<Digits>::from_scaled(negative ? -scaled : scaled);
}

template <int Digits>
void append_fixed(std::string& out, FixedDecimal<Digits> d) {
  const std::int64_t scaled = d.scaled();
  std::uint64_t magnitude = scaled < 0 ? 0 - static_cast<std::uint64_t>(scaled)
                                       : static_cast<std::uint64_t>(scaled);
  if (scaled < 0) out.push_back('-');
  constexpr auto scale = static_cast<std::uint64_t>(FixedDecimal<Digits>::kScale);
  out += std::to_string(magnitude / scale);
  out.push_back('.');
  std::string frac = std::to_string(magnitude % scale);
  out.append(static_cast<std::size_t>(Digits) - frac.size(), '0');
  out += frac;
}

int hex_value(char c) {
  if (is_digit(c)) return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

template <int Digits>
FixedDecimal<Digits> FixedDecimal<Digits>::from_double(double value) {
  return from_scaled(std::llround(value * static_cast<double>(kScale)));
}

template class FixedDecimal<1>;
template class FixedDecimal<2>;

void validate(const TelemetryMessage& msg) {
  if (!valid_device_id(msg.device_id)) {
    invalid_field("device_id", "must be 1-16 characters of [A-Za-z0-9-]");
  }
  if (msg.timestamp < 0) invalid_field("timestamp", "must not precede the Unix epoch");
  if (msg.tip_count < 0) invalid_field("tip_count", "must be non-negative");
  if (msg.soil_pct.scaled() < 0 || msg.soil_pct.scaled() > 1000) {
    invalid_field("soil_pct", "must lie in [0, 100]");
  }
  if (msg.hum_pct.scaled() < 0 || msg.hum_pct.scaled() > 1000) {
    invalid_field("hum_pct", "must lie in [0, 100]");
  }
  if (msg.uv_mw_cm2.scaled() < 0) invalid_field("uv_mw_cm2", "must be non-negative");
  if (msg.batt_v.scaled() < 0 || msg.batt_v.scaled() > 2500) {
    invalid_field("batt_v", "must lie in [0, 25]");
  }
  // Keeps every fixed-point field within the parser's 16-digit integer part.
  constexpr std::int64_t kFixedLimit = 10'000'000'000'000'000;
  if (msg.temp_c.scaled() <= -kFixedLimit || msg.temp_c.scaled() >= kFixedLimit) {
    invalid_field("temp_c", "out of range");
  }
  if (msg.uv_mw_cm2.scaled() >= kFixedLimit * 10) invalid_field("uv_mw_cm2", "out of range");
}

std::uint8_t frame_checksum(std::string_view payload) noexcept {
  std::uint8_t ck = 0;
  for (char c : payload) ck ^= static_cast<std::uint8_t>(c);
  return ck;
}

std::string encode_telemetry(const TelemetryMessage& msg) {
  validate(msg);
  std::string out;
  out.reserve(kMaxFrameBytes);
  out += kHeader;
  out += ',';
  out += kVersion;
  out += ',';
  out += msg.device_id;
  out += ',';
  out += std::to_string(msg.timestamp);
  out += ',';
  out += std::to_string(msg.tip_count);
  out += ',';
  append_fixed(out, msg.temp_c);
  out += ',';
  append_fixed(out, msg.soil_pct);
  out += ',';
  append_fixed(out, msg.hum_pct);
  out += ',';
  append_fixed(out, msg.uv_mw_cm2);
  out += ',';
  append_fixed(out, msg.batt_v);

  static constexpr char kHex[] = "0123456789ABCDEF";
  const std::uint8_t ck = frame_checksum(out);
  out += '*';
  out += kHex[ck >> 4];
  out += kHex[ck & 0x0F];
  if (out.size() > kMaxFrameBytes) {
    throw Error(ErrorCode::OversizeMessage,
                std::to_string(out.size()) + " bytes exceeds " +
                    std::to_string(kMaxFrameBytes));
  }
  return out;
}

TelemetryMessage parse_telemetry(std::string_view raw) {
  if (raw.size() > kMaxFrameBytes) bad_frame("frame longer than 160 bytes");
  const auto star = raw.find('*');
  if (star == std::string_view::npos) bad_frame("missing '*' checksum delimiter");
  const std::string_view payload = raw.substr(0, star);
  const std::string_view ck_text = raw.substr(star + 1);

  const auto tokens = split_commas(payload);
  if (tokens.size() < 2 || tokens[0] != kHeader) bad_frame("frame must start with 'JP,'");
  if (tokens[1] != kVersion) {
    if (tokens[1].empty()) bad_frame("empty version field");
    throw Error(ErrorCode::UnsupportedVersion,
                "version '" + std::string(tokens[1]) + "'");
  }

  if (ck_text.size() != 2 || hex_value(ck_text[0]) < 0 || hex_value(ck_text[1]) < 0) {
    bad_frame("checksum must be two uppercase hex digits");
  }
  const int expected = hex_value(ck_text[0]) * 16 + hex_value(ck_text[1]);
  const int actual = frame_checksum(payload);
  if (expected != actual) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    throw Error(ErrorCode::ChecksumMismatch,
                std::string("computed ") + kHex[actual >> 4] + kHex[actual & 0x0F] +
                    ", frame says " + std::string(ck_text));
  }
  if (tokens.size() != kFieldCount) {
    bad_frame("expected " + std::to_string(kFieldCount) + " fields, found " +
              std::to_string(tokens.size()));
  }

  TelemetryMessage msg;
  msg.device_id = std::string(tokens[2]);
  msg.timestamp = parse_integer(tokens[3], "timestamp");
  msg.tip_count = parse_integer(tokens[4], "tip_count");
  msg.temp_c = parse_fixed<1>(tokens[5], "temp_c", true);
  msg.soil_pct = parse_fixed<1>(tokens[6], "soil_pct", false);
  msg.hum_pct = parse_fixed<1>(tokens[7], "hum_pct", false);
  msg.uv_mw_cm2 = parse_fixed<2>(tokens[8], "uv_mw_cm2", false);
  msg.batt_v = parse_fixed<2>(tokens[9], "batt_v", false);
  validate(msg);
  return msg;
}

DailyAggregation aggregate_daily(std::span<const TelemetryMessage> messages,
                                 const DeviceMap& station_of_device) {
  DailyAggregation result;
  std::set<std::pair<std::string_view, UnixSeconds>> seen;
  std::map<std::pair<std::string, std::int64_t>, std::int64_t> tips;

  for (std::size_t i = 0; i < messages.size(); ++i) {
    const TelemetryMessage& m = messages[i];
    const auto station = station_of_device.find(m.device_id);
    if (station == station_of_device.end()) {
      result.unknown_devices.push_back({i, m.device_id});
      continue;
    }
    if (!seen.emplace(m.device_id, m.timestamp).second) continue;
    tips[{station->second, day_number(utc_day(m.timestamp))}] += m.tip_count;
  }

  result.records.reserve(tips.size());
  for (const auto& [key, count] : tips) {
    result.records.push_back({key.first, from_day_number(key.second), tips_to_mm(count)});
  }
  return result;
}

}  // namespace raingnn
