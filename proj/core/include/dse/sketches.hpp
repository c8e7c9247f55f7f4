#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dse/kmeans.hpp"
#include "dse/types.hpp"

namespace dse {

inline constexpr std::size_t kDefaultSummaryRanges = 8;
inline constexpr std::size_t kDefaultPermutations = 128;

/// Closed interval [lo, hi] holding `count` members.
struct ValueRange {
  double lo = 0;
  double hi = 0;
  std::size_t count = 0;

  friend bool operator==(const ValueRange&, const ValueRange&) = default;
};

/// k-means ranges over a numeric column; sorted by lo, pairwise disjoint.
struct NumericSummary {
  std::vector<ValueRange> ranges;
  std::size_t total_count = 0;

  friend bool operator==(const NumericSummary&, const NumericSummary&) = default;
};

/// Same shape as NumericSummary over epoch seconds.
struct TemporalSummary {
  std::vector<ValueRange> ranges;
  std::size_t total_count = 0;
  Resolution resolution = Resolution::Day;

  friend bool operator==(const TemporalSummary&, const TemporalSummary&) = default;
};

struct GeoBox {
  double lat_min = 0;
  double lat_max = 0;
  double lon_min = 0;
  double lon_max = 0;
  std::size_t count = 0;

  double area() const noexcept { return (lat_max - lat_min) * (lon_max - lon_min); }
  bool intersects(const GeoBox& o) const noexcept {
    return lat_min <= o.lat_max && o.lat_min <= lat_max && lon_min <= o.lon_max &&
           o.lon_min <= lon_max;
  }

  friend bool operator==(const GeoBox&, const GeoBox&) = default;
};

struct SpatialSummary {
  std::vector<GeoBox> boxes;
  std::size_t total_count = 0;

  friend bool operator==(const SpatialSummary&, const SpatialSummary&) = default;
};

/// MinHash signature over case-folded, trimmed distinct values. Seeds are
/// global constants, so any two sketches of equal length are comparable.
struct CategoricalSketch {
  std::vector<std::uint64_t> signature;
  std::uint64_t cardinality = 0;

  friend bool operator==(const CategoricalSketch&, const CategoricalSketch&) = default;
};

using ColumnSummary = std::variant<CategoricalSketch, NumericSummary, TemporalSummary, SpatialSummary>;

/// The fixed per-position hash seeds (first n of one global sequence).
std::span<const std::uint64_t> minhash_seeds(std::size_t permutations);

NumericSummary build_numeric_summary(std::span<const double> values,
                                     std::size_t k = kDefaultSummaryRanges);
TemporalSummary build_temporal_summary(std::span<const std::int64_t> timestamps, std::size_t k,
                                       Resolution resolution);
SpatialSummary build_spatial_summary(std::span<const GeoPoint> points,
                                     std::size_t k = kDefaultSummaryRanges);

/// cardinality == 0 means "count the distinct folded values here".
CategoricalSketch build_categorical_sketch(std::span<const std::string> values,
                                           std::size_t permutations = kDefaultPermutations,
                                           std::uint64_t cardinality = 0);

/// Distinct-count estimate from the k minimum values, (k-1)/sum(u_i).
double estimate_cardinality(const CategoricalSketch& sketch);

/// Fraction of agreeing signature positions. Empty sketches match nothing.
double estimate_jaccard(const CategoricalSketch& a, const CategoricalSketch& b);

/// |A ∩ B| / |A| via Jaccard rescaled by the two cardinalities, clamped
/// to [0, 1]; `query` is A.
double estimate_containment(const CategoricalSketch& query, const CategoricalSketch& candidate);

/// Member-weighted fraction of the query's ranges covered by the
/// candidate's ranges. Not symmetric.
double estimate_range_overlap(std::span<const ValueRange> query,
                              std::span<const ValueRange> candidate);
double estimate_range_overlap(const NumericSummary& query, const NumericSummary& candidate);
double estimate_range_overlap(const TemporalSummary& query, const TemporalSummary& candidate);

/// Box analogue of estimate_range_overlap using intersection areas.
double estimate_spatial_overlap(const SpatialSummary& query, const SpatialSummary& candidate);

}  // namespace dse
