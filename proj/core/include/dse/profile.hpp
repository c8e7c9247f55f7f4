#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dse/sketches.hpp"
#include "dse/table.hpp"
#include "dse/types.hpp"

namespace dse {

inline constexpr int kProfileVersion = 1;

struct ProfilerConfig {
  std::size_t summary_ranges = kDefaultSummaryRanges;
  std::size_t permutations = kDefaultPermutations;
  double numeric_threshold = 0.90;
  double temporal_threshold = 0.90;
  std::vector<std::string> null_literals{"", "na", "n/a", "null", "none", "-"};
  std::size_t sample_rows = 20;
  std::size_t exact_distinct_limit = 100000;
  std::size_t top_values = 10;

  /// Case-insensitive, whitespace-trimmed match against null_literals.
  bool is_null(std::string_view cell) const;
};

struct NumericStats {
  double mean = 0;
  double variance = 0;  // population variance
  double min = 0;
  double max = 0;

  friend bool operator==(const NumericStats&, const NumericStats&) = default;
};

struct TopValue {
  std::string value;
  std::size_t frequency = 0;

  friend bool operator==(const TopValue&, const TopValue&) = default;
};

struct ColumnProfile {
  std::string name;
  ColumnType detected_type = ColumnType::Categorical;
  std::optional<ColumnType> user_type_override;
  double null_fraction = 0;
  std::uint64_t distinct_count_estimate = 0;
  std::optional<NumericStats> numeric_stats;
  std::optional<Resolution> temporal_resolution;
  std::vector<TopValue> top_values;
  ColumnSummary summary;

  /// The override when present, otherwise the detected type.
  ColumnType type() const noexcept { return user_type_override.value_or(detected_type); }

  friend bool operator==(const ColumnProfile&, const ColumnProfile&) = default;
};

struct ProvenanceRecord {
  std::string source_plugin;
  std::string locator;
  std::int64_t retrieved_at = 0;  // epoch seconds
  std::string content_hash;       // sha256 hex of the raw bytes
  std::uint64_t bytes_size = 0;

  friend bool operator==(const ProvenanceRecord&, const ProvenanceRecord&) = default;
};

/// A (latitude, longitude) column pair and the box summary of its points.
struct SpatialCoverage {
  std::string lat_column;
  std::string lon_column;
  SpatialSummary summary;

  friend bool operator==(const SpatialCoverage&, const SpatialCoverage&) = default;
};

struct DatasetProfile {
  std::string id;
  std::string name;
  std::string description;
  std::string source;
  std::vector<ColumnProfile> columns;
  std::size_t row_count = 0;
  std::vector<std::vector<std::string>> sample;
  std::vector<SpatialCoverage> spatial_coverage;
  ProvenanceRecord provenance;
  std::map<std::string, std::string> custom_metadata;

  const ColumnProfile* column(std::string_view name) const noexcept;

  friend bool operator==(const DatasetProfile&, const DatasetProfile&) = default;
};

/// Descriptive inputs that do not come from the cells themselves.
struct DatasetMeta {
  std::string name;
  std::string description;
  std::string source;
  std::optional<ProvenanceRecord> provenance;
  std::map<std::string, std::string> custom_metadata;
  std::map<std::string, ColumnType> type_overrides;
};

struct TypeDetection {
  ColumnType type = ColumnType::Categorical;
  std::vector<std::optional<double>> numbers;
  std::vector<std::optional<std::int64_t>> timestamps;
  std::size_t null_count = 0;
  double null_fraction = 0;
};

/// Classifies one column. Null cells are excluded from the parse ratios;
/// Temporal wins at >= temporal_threshold, then Numerical at
/// >= numeric_threshold, else Categorical (also for all-null columns).
TypeDetection detect_column_type(std::span<const std::string> values, std::string_view column_name,
                                 const ProfilerConfig& config = {});

/// Coarsest resolution whose nominal period does not exceed the median gap
/// between consecutive distinct timestamps; Day for a single timestamp.
Resolution detect_temporal_resolution(std::span<const std::int64_t> sorted_timestamps);

/// Greedy left-to-right lat/lon pairing over Numerical columns whose
/// min/max fit the coordinate ranges. Paired columns are retyped in place.
std::vector<std::pair<std::string, std::string>> detect_spatial_pairs(
    std::vector<ColumnProfile>& profiles);

/// Throws EmptyTable, RaggedRows or InvalidOverride.
DatasetProfile profile_table(const TableData& table, const ProfilerConfig& config,
                             const DatasetMeta& meta);

/// Short stable id derived from a content hash.
std::string dataset_id_from_hash(std::string_view content_hash);

}  // namespace dse
