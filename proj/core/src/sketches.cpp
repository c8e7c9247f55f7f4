#include "dse/sketches.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <unordered_set>

#include "dse/error.hpp"
#include "dse/hashing.hpp"
#include "dse/strings.hpp"

namespace dse {

namespace {

constexpr std::uint64_t kSeedRoot = 0x6d696e6861736821ULL;  // "minhash!"
constexpr std::size_t kMaxPermutations = 1024;

std::vector<ValueRange> to_ranges(const std::vector<Cluster1D>& clusters) {
  std::vector<ValueRange> out;
  out.reserve(clusters.size());
  for (const auto& c : clusters) out.push_back({c.lo, c.hi, c.count});
  return out;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::span<const std::uint64_t> minhash_seeds(std::size_t permutations) {
  static const std::vector<std::uint64_t> seeds = [] {
    std::vector<std::uint64_t> s(kMaxPermutations);
    std::uint64_t state = kSeedRoot;
    for (auto& v : s) v = splitmix64(state);
    return s;
  }();
  if (permutations == 0 || permutations > kMaxPermutations) {
    throw Error(ErrorCode::InvalidConfig, "permutations must be in [1, 1024]");
  }
  return std::span<const std::uint64_t>(seeds.data(), permutations);
}

NumericSummary build_numeric_summary(std::span<const double> values, std::size_t k) {
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "non-finite value in summary input");
  }
  NumericSummary s;
  s.ranges = to_ranges(kmeans_1d(values, std::max<std::size_t>(k, 1)));
  s.total_count = values.size();
  return s;
}

TemporalSummary build_temporal_summary(std::span<const std::int64_t> timestamps, std::size_t k,
                                       Resolution resolution) {
  std::vector<double> as_double(timestamps.begin(), timestamps.end());
  TemporalSummary s;
  s.ranges = to_ranges(kmeans_1d(as_double, std::max<std::size_t>(k, 1)));
  s.total_count = timestamps.size();
  s.resolution = resolution;
  return s;
}

SpatialSummary build_spatial_summary(std::span<const GeoPoint> points, std::size_t k) {
  SpatialSummary s;
  for (const auto& c : kmeans_2d(points, std::max<std::size_t>(k, 1))) {
    s.boxes.push_back({c.lat_min, c.lat_max, c.lon_min, c.lon_max, c.count});
  }
  s.total_count = points.size();
  return s;
}

CategoricalSketch build_categorical_sketch(std::span<const std::string> values,
                                           std::size_t permutations, std::uint64_t cardinality) {
  const auto seeds = minhash_seeds(permutations);
  std::unordered_set<std::uint64_t> bases;
  bases.reserve(values.size());
  for (const auto& v : values) bases.insert(hash64(fold_value(v)));

  CategoricalSketch sketch;
  sketch.signature.assign(permutations, std::numeric_limits<std::uint64_t>::max());
  for (std::uint64_t base : bases) {
    for (std::size_t i = 0; i < permutations; ++i) {
      const std::uint64_t h = mix64(base ^ seeds[i]);
      if (h < sketch.signature[i]) sketch.signature[i] = h;
    }
  }
  sketch.cardinality = cardinality != 0 ? cardinality : bases.size();
  return sketch;
}

double estimate_cardinality(const CategoricalSketch& sketch) {
  if (sketch.cardinality == 0 || sketch.signature.empty()) return 0;
  constexpr double kScale = 18446744073709551616.0;  // 2^64
  double sum = 0;
  for (auto h : sketch.signature) sum += static_cast<double>(h) / kScale;
  if (sum <= 0) return static_cast<double>(sketch.signature.size());
  return (static_cast<double>(sketch.signature.size()) - 1.0) / sum;
}

double estimate_jaccard(const CategoricalSketch& a, const CategoricalSketch& b) {
  if (a.signature.size() != b.signature.size()) {
    throw Error(ErrorCode::SignatureLengthMismatch,
                "signature lengths differ: " + std::to_string(a.signature.size()) + " vs " +
                    std::to_string(b.signature.size()));
  }
  if (a.signature.empty() || a.cardinality == 0 || b.cardinality == 0) return 0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.signature.size(); ++i) same += a.signature[i] == b.signature[i];
  return static_cast<double>(same) / static_cast<double>(a.signature.size());
}

double estimate_containment(const CategoricalSketch& query, const CategoricalSketch& candidate) {
  const double j = estimate_jaccard(query, candidate);
  if (query.cardinality == 0) return 0;
  const double a = static_cast<double>(query.cardinality);
  const double b = static_cast<double>(candidate.cardinality);
  const double intersection = j * (a + b) / (1.0 + j);
  return clamp01(intersection / a);
}

double estimate_range_overlap(std::span<const ValueRange> query,
                              std::span<const ValueRange> candidate) {
  double total = 0;
  for (const auto& r : query) total += static_cast<double>(r.count);
  if (query.empty() || candidate.empty() || total <= 0) return 0;
  double result = 0;
  for (const auto& r : query) {
    const double weight = static_cast<double>(r.count) / total;
    double coverage = 0;
    const double len = r.hi - r.lo;
    if (len <= 0) {
      for (const auto& c : candidate) {
        if (c.lo <= r.lo && r.lo <= c.hi) {
          coverage = 1;
          break;
        }
      }
    } else {
      double covered = 0;
      for (const auto& c : candidate) {
        covered += std::max(0.0, std::min(r.hi, c.hi) - std::max(r.lo, c.lo));
      }
      coverage = clamp01(covered / len);
    }
    result += weight * coverage;
  }
  return clamp01(result);
}

double estimate_range_overlap(const NumericSummary& query, const NumericSummary& candidate) {
  return estimate_range_overlap(query.ranges, candidate.ranges);
}

double estimate_range_overlap(const TemporalSummary& query, const TemporalSummary& candidate) {
  return estimate_range_overlap(query.ranges, candidate.ranges);
}

double estimate_spatial_overlap(const SpatialSummary& query, const SpatialSummary& candidate) {
  double total = 0;
  for (const auto& b : query.boxes) total += static_cast<double>(b.count);
  if (query.boxes.empty() || candidate.boxes.empty() || total <= 0) return 0;
  double result = 0;
  for (const auto& q : query.boxes) {
    const double weight = static_cast<double>(q.count) / total;
    double coverage = 0;
    const double area = q.area();
    if (area <= 0) {
      // degenerate (point or segment) boxes are all-or-nothing
      for (const auto& c : candidate.boxes) {
        if (q.intersects(c)) {
          coverage = 1;
          break;
        }
      }
    } else {
      double covered = 0;
      for (const auto& c : candidate.boxes) {
        const double dlat = std::min(q.lat_max, c.lat_max) - std::max(q.lat_min, c.lat_min);
        const double dlon = std::min(q.lon_max, c.lon_max) - std::max(q.lon_min, c.lon_min);
        if (dlat > 0 && dlon > 0) covered += dlat * dlon;
      }
      coverage = clamp01(covered / area);
    }
    result += weight * coverage;
  }
  return clamp01(result);
}

}  // namespace dse
