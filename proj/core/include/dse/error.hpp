#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dse {

enum class ErrorCode {
  // profiler
  EmptyTable,
  RaggedRows,
  InvalidOverride,
  // sketches
  NonFiniteValue,
  SignatureLengthMismatch,
  // index
  ProfileVersionUnsupported,
  ChecksumMismatch,
  VersionUnsupported,
  EmptyIndex,
  NotFound,
  // search
  EmptyQuery,
  InvalidQuery,
  UnknownNamedArea,
  // augment
  IncompatiblePairKinds,
  AggregationOnNonNumeric,
  MissingAggregation,
  NoPairs,
  InvalidSpec,
  // ingest
  PluginUnavailable,
  MalformedListing,
  HashMismatch,
  SourceGone,
  // service / config
  InvalidConfig,
  MetadataInvalid,
  Duplicate,
  MalformedDocument,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure surfaced by the library carries one of the codes above so
/// the CLI and HTTP layers can map it to an exit code or status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dse
