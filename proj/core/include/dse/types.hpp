#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace dse {

enum class ColumnType {
  Categorical,
  Numerical,
  Temporal,
  SpatialLatitude,
  SpatialLongitude,
};

/// Temporal granularity, ordered fine to coarse.
enum class Resolution {
  Second,
  Minute,
  Hour,
  Day,
  Week,
  Month,
  Quarter,
  Year,
};

inline constexpr Resolution kAllResolutions[] = {
    Resolution::Second, Resolution::Minute,  Resolution::Hour,
    Resolution::Day,    Resolution::Week,    Resolution::Month,
    Resolution::Quarter, Resolution::Year};

/// Nominal period length used for resolution detection (Month=28d,
/// Quarter=84d, Year=350d so that short calendar periods still qualify).
std::int64_t nominal_seconds(Resolution r) noexcept;

constexpr Resolution coarser(Resolution a, Resolution b) noexcept {
  return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

constexpr bool is_spatial(ColumnType t) noexcept {
  return t == ColumnType::SpatialLatitude || t == ColumnType::SpatialLongitude;
}

/// Types that carry numeric statistics.
constexpr bool has_numeric_stats(ColumnType t) noexcept {
  return t == ColumnType::Numerical || is_spatial(t);
}

std::string_view to_string(ColumnType t) noexcept;
std::string_view to_string(Resolution r) noexcept;
std::optional<ColumnType> parse_column_type(std::string_view s);
std::optional<Resolution> parse_resolution(std::string_view s);

}  // namespace dse
