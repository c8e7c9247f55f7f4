#include "dse/error.hpp"

namespace dse {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::InvalidOverride: return "InvalidOverride";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::SignatureLengthMismatch: return "SignatureLengthMismatch";
    case ErrorCode::ProfileVersionUnsupported: return "ProfileVersionUnsupported";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::VersionUnsupported: return "VersionUnsupported";
    case ErrorCode::EmptyIndex: return "EmptyIndexError";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::EmptyQuery: return "EmptyQuery";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::UnknownNamedArea: return "UnknownNamedArea";
    case ErrorCode::IncompatiblePairKinds: return "IncompatiblePairKinds";
    case ErrorCode::AggregationOnNonNumeric: return "AggregationOnNonNumeric";
    case ErrorCode::MissingAggregation: return "MissingAggregation";
    case ErrorCode::NoPairs: return "NoPairs";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::PluginUnavailable: return "PluginUnavailable";
    case ErrorCode::MalformedListing: return "MalformedListing";
    case ErrorCode::HashMismatch: return "HashMismatch";
    case ErrorCode::SourceGone: return "SourceGone";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::MetadataInvalid: return "MetadataInvalid";
    case ErrorCode::Duplicate: return "Duplicate";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::Io: return "IoError";
  }
  return "Unknown";
}

}  // namespace dse
