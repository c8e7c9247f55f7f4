#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dse/profile.hpp"
#include "dse/table.hpp"
#include "dse/types.hpp"

namespace dse {

enum class AggregationFn { First, Count, Sum, Mean, Max, Min };

enum class AugmentMode { Join, Union };

struct AugmentationSpec {
  AugmentMode mode = AugmentMode::Join;
  std::vector<std::pair<std::string, std::string>> pairs;  // (left, right)
  std::map<std::string, AggregationFn> agg;                // right column -> fn
  std::optional<Resolution> temporal_resolution;
  std::optional<double> spatial_grid_degrees;
  std::vector<std::string> include_columns;  // right columns; join only
};

/// How a key pair is matched, inferred from both columns' detected types.
enum class KeyKind { Categorical, Numeric, Temporal, Latitude, Longitude };

struct AugmentProvenance {
  std::string left_id;
  std::string right_id;
  AugmentationSpec spec;
  std::size_t left_rows = 0;
  std::size_t right_rows = 0;
  std::size_t result_rows = 0;
};

struct AugmentedTable {
  TableData table;
  AugmentProvenance provenance;
};

/// Truncates to the start of the containing UTC period.
std::vector<std::int64_t> align_temporal(std::span<const std::int64_t> values, Resolution r);

struct GridCell {
  std::int64_t i = 0;
  std::int64_t j = 0;
  friend auto operator<=>(const GridCell&, const GridCell&) = default;
};

/// (floor(lat / g), floor(lon / g)).
GridCell align_spatial(double lat, double lon, double grid_degrees);

/// First for categorical, Mean for numeric right columns that the spec
/// includes (or, with an empty include list, every non-key column).
AugmentationSpec with_default_aggregations(AugmentationSpec spec, const TableData& right,
                                           const ProfilerConfig& config = {});

/// Left-outer join: every left row survives once, with each included right
/// column reduced over the right rows sharing its key.
AugmentedTable join(const TableData& left, const TableData& right, const AugmentationSpec& spec,
                    const ProfilerConfig& config = {});

/// Appends right rows under the left schema via the column pairs.
AugmentedTable union_tables(const TableData& left, const TableData& right,
                            const AugmentationSpec& spec, const ProfilerConfig& config = {});

/// Dispatches on spec.mode.
AugmentedTable augment(const TableData& left, const TableData& right, const AugmentationSpec& spec,
                       const ProfilerConfig& config = {});

std::string_view to_string(AggregationFn fn) noexcept;
std::optional<AggregationFn> parse_aggregation(std::string_view s);

}  // namespace dse
