#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "dse/error.hpp"
#include "dse/hashing.hpp"
#include "dse/profile.hpp"
#include "dse/strings.hpp"
#include "dse/timestamp.hpp"

namespace dse {

bool ProfilerConfig::is_null(std::string_view cell) const {
  const auto folded = fold_value(cell);
  return std::find(null_literals.begin(), null_literals.end(), folded) != null_literals.end();
}

const ColumnProfile* DatasetProfile::column(std::string_view name) const noexcept {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string dataset_id_from_hash(std::string_view content_hash) {
  return std::string(content_hash.substr(0, 16));
}

TypeDetection detect_column_type(std::span<const std::string> values, std::string_view column_name,
                                 const ProfilerConfig& config) {
  TypeDetection out;
  out.numbers.resize(values.size());
  out.timestamps.resize(values.size());
  const bool bare_ints = name_suggests_time(column_name);
  std::size_t n_num = 0, n_time = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (config.is_null(values[i])) {
      ++out.null_count;
      continue;
    }
    out.numbers[i] = parse_number(values[i]);
    out.timestamps[i] = parse_timestamp(values[i], bare_ints);
    n_num += out.numbers[i].has_value();
    n_time += out.timestamps[i].has_value();
  }
  out.null_fraction = values.empty() ? 0.0
                                     : static_cast<double>(out.null_count) /
                                           static_cast<double>(values.size());
  const std::size_t non_null = values.size() - out.null_count;
  if (non_null == 0) return out;  // all-null: Categorical, null_fraction 1
  const double p_time = static_cast<double>(n_time) / static_cast<double>(non_null);
  const double p_num = static_cast<double>(n_num) / static_cast<double>(non_null);
  if (p_time >= config.temporal_threshold) {
    out.type = ColumnType::Temporal;
  } else if (p_num >= config.numeric_threshold) {
    out.type = ColumnType::Numerical;
  }
  return out;
}

Resolution detect_temporal_resolution(std::span<const std::int64_t> sorted_timestamps) {
  std::vector<std::int64_t> gaps;
  for (std::size_t i = 1; i < sorted_timestamps.size(); ++i) {
    const auto gap = sorted_timestamps[i] - sorted_timestamps[i - 1];
    if (gap > 0) gaps.push_back(gap);
  }
  if (gaps.empty()) return Resolution::Day;
  std::sort(gaps.begin(), gaps.end());
  const std::size_t n = gaps.size();
  const double median = n % 2 == 1 ? static_cast<double>(gaps[n / 2])
                                   : 0.5 * static_cast<double>(gaps[n / 2 - 1] + gaps[n / 2]);
  Resolution result = Resolution::Second;
  for (auto r : kAllResolutions) {
    if (median >= static_cast<double>(nominal_seconds(r))) result = r;
  }
  return result;
}

namespace {

bool contains_any(std::string_view name, std::initializer_list<std::string_view> needles) {
  const auto lower = to_lower(name);
  for (auto n : needles) {
    if (lower.find(n) != std::string::npos) return true;
  }
  return false;
}

bool fits(const ColumnProfile& c, double limit) {
  return c.type() == ColumnType::Numerical && !c.user_type_override && c.numeric_stats &&
         c.numeric_stats->min >= -limit && c.numeric_stats->max <= limit;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> detect_spatial_pairs(
    std::vector<ColumnProfile>& profiles) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<bool> used(profiles.size(), false);
  for (std::size_t a = 0; a < profiles.size(); ++a) {
    if (used[a] || !contains_any(profiles[a].name, {"lat", "latitude"}) || !fits(profiles[a], 90)) {
      continue;
    }
    for (std::size_t b = 0; b < profiles.size(); ++b) {
      if (b == a || used[b]) continue;
      if (!contains_any(profiles[b].name, {"lon", "lng", "long", "longitude"}) ||
          !fits(profiles[b], 180)) {
        continue;
      }
      used[a] = used[b] = true;
      profiles[a].detected_type = ColumnType::SpatialLatitude;
      profiles[b].detected_type = ColumnType::SpatialLongitude;
      pairs.emplace_back(profiles[a].name, profiles[b].name);
      break;
    }
  }
  return pairs;
}

namespace {

NumericStats compute_stats(const std::vector<double>& xs) {
  NumericStats s;
  double sum = 0;
  s.min = xs.front();
  s.max = xs.front();
  for (double x : xs) {
    sum += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  const double n = static_cast<double>(xs.size());
  s.mean = std::clamp(sum / n, s.min, s.max);
  double ss = 0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.variance = ss / n;
  return s;
}

std::vector<TopValue> top_values(const Column& column, const ProfilerConfig& config) {
  std::unordered_map<std::string, std::size_t> freq;
  for (const auto& v : column.values) {
    if (!config.is_null(v)) ++freq[std::string(trim(v))];
  }
  std::vector<TopValue> all;
  all.reserve(freq.size());
  for (auto& [value, count] : freq) all.push_back({value, count});
  std::sort(all.begin(), all.end(), [](const TopValue& a, const TopValue& b) {
    return a.frequency != b.frequency ? a.frequency > b.frequency : a.value < b.value;
  });
  if (all.size() > config.top_values) all.resize(config.top_values);
  return all;
}

std::uint64_t distinct_count(const std::vector<std::string>& non_null, const ProfilerConfig& config,
                             const CategoricalSketch* sketch) {
  std::unordered_set<std::string> seen;
  for (const auto& v : non_null) {
    seen.insert(fold_value(v));
    if (seen.size() > config.exact_distinct_limit) {
      const auto estimate = sketch ? estimate_cardinality(*sketch)
                                   : estimate_cardinality(build_categorical_sketch(
                                         non_null, config.permutations, 1));
      return static_cast<std::uint64_t>(std::llround(estimate));
    }
  }
  return seen.size();
}

// Per-column working state kept between detection and summarisation.
struct Working {
  TypeDetection detection;
  std::vector<std::string> non_null;
};

std::vector<double> numbers_of(const TypeDetection& d) {
  std::vector<double> xs;
  for (const auto& v : d.numbers) {
    if (v) xs.push_back(*v);
  }
  return xs;
}

}  // namespace

DatasetProfile profile_table(const TableData& table, const ProfilerConfig& config,
                             const DatasetMeta& meta) {
  if (table.columns.empty() || table.row_count == 0) {
    throw Error(ErrorCode::EmptyTable, "table needs at least one column and one row");
  }
  table.validate();
  for (const auto& [name, type] : meta.type_overrides) {
    if (!table.find(name)) {
      throw Error(ErrorCode::InvalidOverride, "type override for unknown column '" + name + "'");
    }
    if (is_spatial(type)) {
      throw Error(ErrorCode::InvalidOverride,
                  "spatial types are assigned by pair detection and cannot be overridden");
    }
  }

  DatasetProfile profile;
  profile.name = meta.name;
  profile.description = meta.description;
  profile.source = meta.source;
  profile.row_count = table.row_count;
  profile.custom_metadata = meta.custom_metadata;
  if (meta.provenance) {
    profile.provenance = *meta.provenance;
  } else {
    const auto bytes = write_csv(table);
    profile.provenance.source_plugin = meta.source;
    profile.provenance.content_hash = sha256_hex(bytes);
    profile.provenance.bytes_size = bytes.size();
  }
  profile.id = dataset_id_from_hash(profile.provenance.content_hash);

  std::vector<Working> work(table.columns.size());
  profile.columns.resize(table.columns.size());
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    const auto& column = table.columns[c];
    auto& col = profile.columns[c];
    auto& w = work[c];
    w.detection = detect_column_type(column.values, column.name, config);
    for (const auto& v : column.values) {
      if (!config.is_null(v)) w.non_null.push_back(v);
    }
    col.name = column.name;
    col.detected_type = w.detection.type;
    col.null_fraction = w.detection.null_fraction;
    col.top_values = top_values(column, config);

    if (auto it = meta.type_overrides.find(column.name); it != meta.type_overrides.end()) {
      col.user_type_override = it->second;
      if (it->second == ColumnType::Temporal) {
        // the user vouches for the column, so bare integers are accepted
        for (std::size_t i = 0; i < column.values.size(); ++i) {
          if (!config.is_null(column.values[i])) {
            w.detection.timestamps[i] = parse_timestamp(column.values[i], true);
          }
        }
        if (std::none_of(w.detection.timestamps.begin(), w.detection.timestamps.end(),
                         [](const auto& t) { return t.has_value(); })) {
          throw Error(ErrorCode::InvalidOverride,
                      "column '" + column.name + "' has no parseable timestamps");
        }
      } else if (it->second == ColumnType::Numerical) {
        if (numbers_of(w.detection).empty()) {
          throw Error(ErrorCode::InvalidOverride,
                      "column '" + column.name + "' has no parseable numbers");
        }
      }
    }
    if (col.type() == ColumnType::Numerical) col.numeric_stats = compute_stats(numbers_of(w.detection));
  }

  for (auto& [lat, lon] : detect_spatial_pairs(profile.columns)) {
    profile.spatial_coverage.push_back({lat, lon, {}});
  }

  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    auto& col = profile.columns[c];
    auto& w = work[c];
    switch (col.type()) {
      case ColumnType::Categorical: {
        auto sketch = build_categorical_sketch(w.non_null, config.permutations);
        col.distinct_count_estimate = distinct_count(w.non_null, config, &sketch);
        sketch.cardinality = col.distinct_count_estimate;
        col.summary = std::move(sketch);
        break;
      }
      case ColumnType::Temporal: {
        std::vector<std::int64_t> ts;
        for (const auto& t : w.detection.timestamps) {
          if (t) ts.push_back(*t);
        }
        std::sort(ts.begin(), ts.end());
        std::vector<std::int64_t> distinct(ts);
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        const auto resolution = detect_temporal_resolution(distinct);
        col.temporal_resolution = resolution;
        col.summary = build_temporal_summary(ts, config.summary_ranges, resolution);
        col.distinct_count_estimate = distinct_count(w.non_null, config, nullptr);
        break;
      }
      case ColumnType::Numerical:
      case ColumnType::SpatialLatitude:
      case ColumnType::SpatialLongitude:
        col.summary = build_numeric_summary(numbers_of(w.detection), config.summary_ranges);
        col.distinct_count_estimate = distinct_count(w.non_null, config, nullptr);
        break;
    }
  }

  for (auto& coverage : profile.spatial_coverage) {
    const auto lat_idx = static_cast<std::size_t>(table.index_of(coverage.lat_column));
    const auto lon_idx = static_cast<std::size_t>(table.index_of(coverage.lon_column));
    std::vector<GeoPoint> points;
    for (std::size_t r = 0; r < table.row_count; ++r) {
      const auto& lat = work[lat_idx].detection.numbers[r];
      const auto& lon = work[lon_idx].detection.numbers[r];
      if (lat && lon) points.push_back({*lat, *lon});
    }
    coverage.summary = build_spatial_summary(points, config.summary_ranges);
  }

  const std::size_t sample_rows = std::min(config.sample_rows, table.row_count);
  profile.sample.resize(sample_rows);
  for (std::size_t r = 0; r < sample_rows; ++r) {
    for (const auto& column : table.columns) profile.sample[r].push_back(column.values[r]);
  }
  return profile;
}

}  // namespace dse
