#include "dse/augment.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "dse/error.hpp"
#include "dse/strings.hpp"
#include "dse/timestamp.hpp"

namespace dse {

std::vector<std::int64_t> align_temporal(std::span<const std::int64_t> values, Resolution r) {
  std::vector<std::int64_t> out;
  out.reserve(values.size());
  for (auto v : values) out.push_back(truncate_to(v, r));
  return out;
}

GridCell align_spatial(double lat, double lon, double grid_degrees) {
  return {static_cast<std::int64_t>(std::floor(lat / grid_degrees)),
          static_cast<std::int64_t>(std::floor(lon / grid_degrees))};
}

std::string_view to_string(AggregationFn fn) noexcept {
  switch (fn) {
    case AggregationFn::First: return "first";
    case AggregationFn::Count: return "count";
    case AggregationFn::Sum: return "sum";
    case AggregationFn::Mean: return "mean";
    case AggregationFn::Max: return "max";
    case AggregationFn::Min: return "min";
  }
  return "first";
}

std::optional<AggregationFn> parse_aggregation(std::string_view s) {
  const auto l = to_lower(trim(s));
  for (auto fn : {AggregationFn::First, AggregationFn::Count, AggregationFn::Sum, AggregationFn::Mean,
                  AggregationFn::Max, AggregationFn::Min}) {
    if (l == to_string(fn)) return fn;
  }
  if (l == "avg" || l == "average") return AggregationFn::Mean;
  return std::nullopt;
}

namespace {

struct Typed {
  std::vector<KeyKind> kinds;
  std::vector<TypeDetection> detections;
};

Typed infer_kinds(const TableData& t, const ProfilerConfig& config) {
  Typed out;
  std::vector<ColumnProfile> profiles;
  for (const auto& c : t.columns) {
    auto d = detect_column_type(c.values, c.name, config);
    ColumnProfile p;
    p.name = c.name;
    p.detected_type = d.type;
    if (d.type == ColumnType::Numerical) {
      NumericStats s{0, 0, INFINITY, -INFINITY};
      for (const auto& n : d.numbers) {
        if (!n) continue;
        s.min = std::min(s.min, *n);
        s.max = std::max(s.max, *n);
      }
      p.numeric_stats = s;
    }
    profiles.push_back(std::move(p));
    out.detections.push_back(std::move(d));
  }
  detect_spatial_pairs(profiles);
  for (const auto& p : profiles) {
    switch (p.detected_type) {
      case ColumnType::Categorical: out.kinds.push_back(KeyKind::Categorical); break;
      case ColumnType::Numerical: out.kinds.push_back(KeyKind::Numeric); break;
      case ColumnType::Temporal: out.kinds.push_back(KeyKind::Temporal); break;
      case ColumnType::SpatialLatitude: out.kinds.push_back(KeyKind::Latitude); break;
      case ColumnType::SpatialLongitude: out.kinds.push_back(KeyKind::Longitude); break;
    }
  }
  return out;
}

bool numeric_kind(KeyKind k) {
  return k == KeyKind::Numeric || k == KeyKind::Latitude || k == KeyKind::Longitude;
}

std::size_t require_column(const TableData& t, std::string_view name, const char* side) {
  const auto i = t.index_of(name);
  if (i < 0) {
    throw Error(ErrorCode::InvalidSpec, std::string(side) + " table has no column '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(i);
}

Resolution resolution_of(const TypeDetection& d) {
  std::vector<std::int64_t> ts;
  for (const auto& t : d.timestamps) {
    if (t) ts.push_back(*t);
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return detect_temporal_resolution(ts);
}

struct KeyPart {
  std::size_t left;
  std::size_t right;
  KeyKind kind;
  Resolution resolution = Resolution::Day;
};

// Empty optional when any component is null or unparseable.
std::optional<std::string> make_key(const TableData& t, const TypeDetection* det, std::size_t row,
                                    const std::vector<KeyPart>& parts, bool left,
                                    const AugmentationSpec& spec, const ProfilerConfig& config) {
  std::string key;
  for (const auto& p : parts) {
    const auto col = left ? p.left : p.right;
    const auto& cell = t.columns[col].values[row];
    if (config.is_null(cell)) return std::nullopt;
    if (!key.empty()) key.push_back('\x1f');
    switch (p.kind) {
      case KeyKind::Categorical:
        key += fold_value(cell);
        break;
      case KeyKind::Temporal: {
        const auto ts = det[col].timestamps[row];
        if (!ts) return std::nullopt;
        key += std::to_string(truncate_to(*ts, p.resolution));
        break;
      }
      case KeyKind::Numeric:
      case KeyKind::Latitude:
      case KeyKind::Longitude: {
        const auto v = det[col].numbers[row] ? det[col].numbers[row] : parse_number(cell);
        if (!v) return std::nullopt;
        if (p.kind != KeyKind::Numeric && spec.spatial_grid_degrees) {
          key += std::to_string(static_cast<std::int64_t>(std::floor(*v / *spec.spatial_grid_degrees)));
        } else {
          key += format_number(*v == 0 ? 0.0 : *v);
        }
        break;
      }
    }
  }
  return key;
}

std::string reduce(AggregationFn fn, const Column& col, const std::vector<std::size_t>& rows,
                   const ProfilerConfig& config) {
  if (fn == AggregationFn::Count) {
    std::size_t n = 0;
    for (auto r : rows) n += !config.is_null(col.values[r]);
    return std::to_string(n);
  }
  if (fn == AggregationFn::First) {
    for (auto r : rows) {
      if (!config.is_null(col.values[r])) return col.values[r];
    }
    return "";
  }
  double acc = 0;
  std::size_t n = 0;
  for (auto r : rows) {
    if (config.is_null(col.values[r])) continue;
    const auto v = parse_number(col.values[r]);
    if (!v) continue;
    if (n == 0) {
      acc = *v;
    } else if (fn == AggregationFn::Max) {
      acc = std::max(acc, *v);
    } else if (fn == AggregationFn::Min) {
      acc = std::min(acc, *v);
    } else {
      acc += *v;
    }
    ++n;
  }
  if (n == 0) return "";
  if (fn == AggregationFn::Mean) acc /= static_cast<double>(n);
  return format_number(acc);
}

bool iequal(std::string_view a, std::string_view b) { return to_lower(a) == to_lower(b); }

}  // namespace

AugmentationSpec with_default_aggregations(AugmentationSpec spec, const TableData& right,
                                           const ProfilerConfig& config) {
  std::set<std::string> keys;
  for (const auto& [l, r] : spec.pairs) keys.insert(r);
  std::vector<std::string> targets = spec.include_columns;
  if (targets.empty()) {
    for (const auto& c : right.columns) {
      if (!keys.contains(c.name)) targets.push_back(c.name);
    }
  }
  for (const auto& name : targets) {
    if (spec.agg.contains(name)) continue;
    const auto* col = right.find(name);
    if (!col) continue;
    const auto d = detect_column_type(col->values, col->name, config);
    spec.agg[name] = d.type == ColumnType::Numerical ? AggregationFn::Mean : AggregationFn::First;
  }
  return spec;
}

AugmentedTable join(const TableData& left, const TableData& right, const AugmentationSpec& spec,
                    const ProfilerConfig& config) {
  left.validate();
  right.validate();
  if (spec.pairs.empty()) throw Error(ErrorCode::NoPairs, "join needs at least one key pair");
  if (spec.spatial_grid_degrees && !(*spec.spatial_grid_degrees > 0)) {
    throw Error(ErrorCode::InvalidSpec, "spatial_grid_degrees must be positive");
  }
  const auto lt = infer_kinds(left, config);
  const auto rt = infer_kinds(right, config);

  AugmentationSpec resolved = spec;
  std::vector<KeyPart> parts;
  std::set<std::size_t> right_keys;
  for (const auto& [l, r] : spec.pairs) {
    KeyPart p{require_column(left, l, "left"), require_column(right, r, "right"), KeyKind::Categorical};
    const auto lk = lt.kinds[p.left];
    const auto rk = rt.kinds[p.right];
    if (lk != rk) {
      throw Error(ErrorCode::IncompatiblePairKinds, "cannot join '" + l + "' with '" + r + "'");
    }
    p.kind = lk;
    right_keys.insert(p.right);
    parts.push_back(p);
  }
  // One resolution for all temporal pairs: the coarsest either side needs.
  const bool temporal_keys =
      std::any_of(parts.begin(), parts.end(), [](const KeyPart& p) { return p.kind == KeyKind::Temporal; });
  if (temporal_keys && !spec.temporal_resolution) {
    Resolution r = Resolution::Second;
    for (const auto& p : parts) {
      if (p.kind != KeyKind::Temporal) continue;
      r = coarser(r, coarser(resolution_of(lt.detections[p.left]), resolution_of(rt.detections[p.right])));
    }
    resolved.temporal_resolution = r;
  }
  for (auto& p : parts) {
    if (p.kind == KeyKind::Temporal) p.resolution = *resolved.temporal_resolution;
  }

  std::vector<std::size_t> include;
  if (spec.include_columns.empty()) {
    for (std::size_t c = 0; c < right.columns.size(); ++c) {
      if (!right_keys.contains(c)) include.push_back(c);
    }
  } else {
    for (const auto& name : spec.include_columns) include.push_back(require_column(right, name, "right"));
  }
  for (auto c : include) {
    const auto& name = right.columns[c].name;
    const auto it = spec.agg.find(name);
    if (it == spec.agg.end()) {
      throw Error(ErrorCode::MissingAggregation, "no aggregation for column '" + name + "'");
    }
    const bool needs_numbers = it->second != AggregationFn::First && it->second != AggregationFn::Count;
    if (needs_numbers && !numeric_kind(rt.kinds[c])) {
      throw Error(ErrorCode::AggregationOnNonNumeric,
                  std::string(to_string(it->second)) + " needs a numeric column; '" + name + "' is not");
    }
  }

  std::unordered_map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t row = 0; row < right.row_count; ++row) {
    if (auto key = make_key(right, rt.detections.data(), row, parts, false, resolved, config)) {
      groups[*key].push_back(row);
    }
  }

  AugmentedTable out;
  out.table = left;
  for (auto c : include) {
    const auto& src = right.columns[c];
    Column appended;
    appended.name = src.name;
    const auto collides = [&](const std::string& n) {
      return std::any_of(out.table.columns.begin(), out.table.columns.end(),
                         [&](const Column& x) { return iequal(x.name, n); });
    };
    if (collides(appended.name)) appended.name += "_right";
    for (int k = 2; collides(appended.name); ++k) appended.name = src.name + "_right_" + std::to_string(k);
    appended.values.reserve(left.row_count);
    const auto fn = spec.agg.at(src.name);
    static const std::vector<std::size_t> kNone;
    for (std::size_t row = 0; row < left.row_count; ++row) {
      const auto key = make_key(left, lt.detections.data(), row, parts, true, resolved, config);
      const std::vector<std::size_t>* rows = &kNone;
      if (key) {
        if (auto it = groups.find(*key); it != groups.end()) rows = &it->second;
      }
      appended.values.push_back(reduce(fn, src, *rows, config));
    }
    out.table.columns.push_back(std::move(appended));
  }

  resolved.include_columns.clear();
  for (auto c : include) resolved.include_columns.push_back(right.columns[c].name);
  resolved.mode = AugmentMode::Join;
  out.provenance.spec = std::move(resolved);
  out.provenance.left_rows = left.row_count;
  out.provenance.right_rows = right.row_count;
  out.provenance.result_rows = out.table.row_count;
  return out;
}

AugmentedTable union_tables(const TableData& left, const TableData& right, const AugmentationSpec& spec,
                            const ProfilerConfig& config) {
  left.validate();
  right.validate();
  if (spec.pairs.empty()) throw Error(ErrorCode::NoPairs, "union needs at least one column pair");
  const auto lt = infer_kinds(left, config);
  const auto rt = infer_kinds(right, config);

  std::vector<std::optional<std::size_t>> source(left.columns.size());
  std::set<std::size_t> used_right;
  for (const auto& [l, r] : spec.pairs) {
    const auto li = require_column(left, l, "left");
    const auto ri = require_column(right, r, "right");
    if (source[li] || used_right.contains(ri)) {
      throw Error(ErrorCode::InvalidSpec, "column used in more than one pair");
    }
    if (lt.kinds[li] != rt.kinds[ri]) {
      throw Error(ErrorCode::IncompatiblePairKinds, "cannot union '" + l + "' with '" + r + "'");
    }
    source[li] = ri;
    used_right.insert(ri);
  }

  AugmentedTable out;
  out.table = left;
  for (std::size_t c = 0; c < left.columns.size(); ++c) {
    auto& values = out.table.columns[c].values;
    values.reserve(left.row_count + right.row_count);
    for (std::size_t row = 0; row < right.row_count; ++row) {
      if (!source[c]) {
        values.emplace_back();
        continue;
      }
      const auto& cell = right.columns[*source[c]].values[row];
      values.push_back(config.is_null(cell) ? std::string{} : cell);
    }
  }
  out.table.row_count = left.row_count + right.row_count;

  out.provenance.spec = spec;
  out.provenance.spec.mode = AugmentMode::Union;
  out.provenance.left_rows = left.row_count;
  out.provenance.right_rows = right.row_count;
  out.provenance.result_rows = out.table.row_count;
  return out;
}

AugmentedTable augment(const TableData& left, const TableData& right, const AugmentationSpec& spec,
                       const ProfilerConfig& config) {
  return spec.mode == AugmentMode::Join ? join(left, right, spec, config)
                                        : union_tables(left, right, spec, config);
}

}  // namespace dse
