#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace raingnn {

// Every failure the library reports. The enumerator name is the stable,
// externally visible identifier (HTTP error bodies, CLI messages).
enum class ErrorCode {
  // telemetry
  BadFrame,
  ChecksumMismatch,
  InvalidField,
  UnsupportedVersion,
  OversizeMessage,
  UnknownDevice,
  // gateway
  StoreUnwritable,
  StoreCorrupt,
  AddressInUse,
  // dataio
  MalformedRow,
  DuplicateStation,
  DuplicateRecord,
  RangeViolation,
  NegativePrecip,
  EmptyDataset,
  AllMissingStation,
  SpanTooShort,
  EmptySplit,
  // graph
  DuplicateCoordinates,
  IsolatedNode,
  // model / metrics
  ShapeMismatch,
  LengthMismatch,
  EmptyInput,
  ZeroVariance,
  // cli
  NodeOrderMismatch,
  FeatureDimMismatch,
  BadCheckpoint,
  InvalidArgument,
  IoError,
};

std::string_view error_name(ErrorCode code) noexcept;

// Name of the module that owns an error code ("telemetry", "graph", ...).
std::string_view error_module(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace raingnn
