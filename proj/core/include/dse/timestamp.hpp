#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "dse/types.hpp"

namespace dse {

// Accepted timestamp grammar (all results are UTC epoch seconds):
//
//   YYYY-MM-DD
//   YYYY-MM-DD(T| )HH:MM[:SS[.fff]][Z | ±HH | ±HHMM | ±HH:MM]
//   YYYY-MM
//   YYYY                 only when bare integers are allowed
//   [-]digits            epoch seconds, only when bare integers are allowed
//
// Bare integers are allowed when the column name hints at time (see
// name_suggests_time); otherwise "2020" is a number, not a year.

std::optional<std::int64_t> parse_timestamp(std::string_view text, bool allow_bare_integers);

/// True when the lower-cased name contains "time", "date", "epoch" or "year".
bool name_suggests_time(std::string_view column_name);

/// ISO-8601 UTC, e.g. 2020-04-01T00:00:00Z.
std::string format_iso8601(std::int64_t epoch_seconds);

/// Start of the UTC period containing t (weeks start Monday; quarters
/// start Jan/Apr/Jul/Oct).
std::int64_t truncate_to(std::int64_t t, Resolution r);

/// Epoch seconds at midnight UTC of the given civil date.
std::int64_t epoch_from_civil(int year, unsigned month, unsigned day);

}  // namespace dse
