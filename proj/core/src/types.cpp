#include "dse/types.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace dse {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::int64_t nominal_seconds(Resolution r) noexcept {
  constexpr std::int64_t day = 86400;
  switch (r) {
    case Resolution::Second: return 1;
    case Resolution::Minute: return 60;
    case Resolution::Hour: return 3600;
    case Resolution::Day: return day;
    case Resolution::Week: return 7 * day;
    case Resolution::Month: return 28 * day;
    case Resolution::Quarter: return 84 * day;
    case Resolution::Year: return 350 * day;
  }
  return day;
}

std::string_view to_string(ColumnType t) noexcept {
  switch (t) {
    case ColumnType::Categorical: return "categorical";
    case ColumnType::Numerical: return "numerical";
    case ColumnType::Temporal: return "temporal";
    case ColumnType::SpatialLatitude: return "latitude";
    case ColumnType::SpatialLongitude: return "longitude";
  }
  return "categorical";
}

std::string_view to_string(Resolution r) noexcept {
  switch (r) {
    case Resolution::Second: return "second";
    case Resolution::Minute: return "minute";
    case Resolution::Hour: return "hour";
    case Resolution::Day: return "day";
    case Resolution::Week: return "week";
    case Resolution::Month: return "month";
    case Resolution::Quarter: return "quarter";
    case Resolution::Year: return "year";
  }
  return "day";
}

std::optional<ColumnType> parse_column_type(std::string_view s) {
  const auto v = lower(s);
  if (v == "categorical") return ColumnType::Categorical;
  if (v == "numerical" || v == "numeric") return ColumnType::Numerical;
  if (v == "temporal") return ColumnType::Temporal;
  if (v == "latitude" || v == "spatial_latitude") return ColumnType::SpatialLatitude;
  if (v == "longitude" || v == "spatial_longitude") return ColumnType::SpatialLongitude;
  return std::nullopt;
}

std::optional<Resolution> parse_resolution(std::string_view s) {
  const auto v = lower(s);
  for (auto r : kAllResolutions) {
    if (to_string(r) == v) return r;
  }
  return std::nullopt;
}

}  // namespace dse
