#include "raingnn/error.hpp"

namespace raingnn {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadFrame: return "BadFrame";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::InvalidField: return "InvalidField";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::OversizeMessage: return "OversizeMessage";
    case ErrorCode::UnknownDevice: return "UnknownDevice";
    case ErrorCode::StoreUnwritable: return "StoreUnwritable";
    case ErrorCode::StoreCorrupt: return "StoreCorrupt";
    case ErrorCode::AddressInUse: return "AddressInUse";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DuplicateStation: return "DuplicateStation";
    case ErrorCode::DuplicateRecord: return "DuplicateRecord";
    case ErrorCode::RangeViolation: return "RangeViolation";
    case ErrorCode::NegativePrecip: return "NegativePrecip";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::AllMissingStation: return "AllMissingStation";
    case ErrorCode::SpanTooShort: return "SpanTooShort";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::DuplicateCoordinates: return "DuplicateCoordinates";
    case ErrorCode::IsolatedNode: return "IsolatedNode";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::NodeOrderMismatch: return "NodeOrderMismatch";
    case ErrorCode::FeatureDimMismatch: return "FeatureDimMismatch";
    case ErrorCode::BadCheckpoint: return "BadCheckpoint";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view error_module(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadFrame:
    case ErrorCode::ChecksumMismatch:
    case ErrorCode::InvalidField:
    case ErrorCode::UnsupportedVersion:
    case ErrorCode::OversizeMessage:
    case ErrorCode::UnknownDevice:
      return "telemetry";
    case ErrorCode::StoreUnwritable:
    case ErrorCode::StoreCorrupt:
    case ErrorCode::AddressInUse:
      return "gateway";
    case ErrorCode::MalformedRow:
    case ErrorCode::DuplicateStation:
    case ErrorCode::DuplicateRecord:
    case ErrorCode::RangeViolation:
    case ErrorCode::NegativePrecip:
    case ErrorCode::EmptyDataset:
    case ErrorCode::AllMissingStation:
    case ErrorCode::SpanTooShort:
    case ErrorCode::EmptySplit:
      return "dataio";
    case ErrorCode::DuplicateCoordinates:
    case ErrorCode::IsolatedNode:
      return "graph";
    case ErrorCode::ShapeMismatch:
    case ErrorCode::BadCheckpoint:
      return "model";
    case ErrorCode::LengthMismatch:
    case ErrorCode::EmptyInput:
    case ErrorCode::ZeroVariance:
      return "metrics";
    case ErrorCode::NodeOrderMismatch:
    case ErrorCode::FeatureDimMismatch:
    case ErrorCode::InvalidArgument:
    case ErrorCode::IoError:
      return "cli";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(error_module(code)) + ": " +
                         std::string(error_name(code)) +
                         (detail.empty() ? "" : ": " + detail)),
      code_(code),
      detail_(detail) {}

}  // namespace raingnn
