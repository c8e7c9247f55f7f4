#include "dse/serialize.hpp"

#include <charconv>

#include "dse/error.hpp"
#include "dse/timestamp.hpp"

namespace dse {

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedDocument, what);
}

template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    malformed(std::string(what) + ": " + e.what());
  }
}

std::int64_t timestamp_from_json(const json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  const auto s = j.get<std::string>();
  if (auto t = parse_timestamp(s, true)) return *t;
  throw Error(ErrorCode::InvalidQuery, "unparseable timestamp '" + s + "'");
}

ColumnType column_type_from_json(const json& j) {
  const auto s = j.get<std::string>();
  if (auto t = parse_column_type(s)) return *t;
  malformed("unknown column type '" + s + "'");
}

Resolution resolution_from_json(const json& j) {
  const auto s = j.get<std::string>();
  if (auto r = parse_resolution(s)) return *r;
  malformed("unknown resolution '" + s + "'");
}

json ranges_to_json(const std::vector<ValueRange>& ranges) {
  json arr = json::array();
  for (const auto& r : ranges) arr.push_back(json::array({r.lo, r.hi, r.count}));
  return arr;
}

std::vector<ValueRange> ranges_from_json(const json& j) {
  std::vector<ValueRange> out;
  for (const auto& r : j) out.push_back({r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<std::size_t>()});
  return out;
}

PairKind pair_kind_from_string(const std::string& s) {
  if (s == "categorical") return PairKind::Categorical;
  if (s == "numeric") return PairKind::Numeric;
  if (s == "temporal") return PairKind::Temporal;
  if (s == "spatial") return PairKind::Spatial;
  malformed("unknown pair kind '" + s + "'");
}

}  // namespace

std::string_view to_string(PairKind kind) noexcept {
  switch (kind) {
    case PairKind::Categorical: return "categorical";
    case PairKind::Numeric: return "numeric";
    case PairKind::Temporal: return "temporal";
    case PairKind::Spatial: return "spatial";
  }
  return "categorical";
}

std::string_view to_string(RelatedMode mode) noexcept {
  switch (mode) {
    case RelatedMode::Join: return "join";
    case RelatedMode::Union: return "union";
    case RelatedMode::Either: return "either";
  }
  return "either";
}

json to_json(const SpatialSummary& s) {
  json boxes = json::array();
  for (const auto& b : s.boxes) {
    boxes.push_back({{"min", {b.lat_min, b.lon_min}}, {"max", {b.lat_max, b.lon_max}}, {"count", b.count}});
  }
  return {{"kind", "spatial"}, {"boxes", boxes}, {"total_count", s.total_count}};
}

SpatialSummary spatial_summary_from_json(const json& j) {
  return guarded("spatial summary", [&] {
    SpatialSummary s;
    for (const auto& b : j.at("boxes")) {
      s.boxes.push_back({b.at("min").at(0).get<double>(), b.at("max").at(0).get<double>(),
                         b.at("min").at(1).get<double>(), b.at("max").at(1).get<double>(),
                         b.at("count").get<std::size_t>()});
    }
    s.total_count = j.at("total_count").get<std::size_t>();
    return s;
  });
}

json to_json(const ColumnSummary& summary) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CategoricalSketch>) {
          json sig = json::array();
          for (auto v : s.signature) sig.push_back(std::to_string(v));
          return {{"kind", "categorical"}, {"signature", sig}, {"cardinality", s.cardinality}};
        } else if constexpr (std::is_same_v<T, NumericSummary>) {
          return {{"kind", "numeric"}, {"ranges", ranges_to_json(s.ranges)}, {"total_count", s.total_count}};
        } else if constexpr (std::is_same_v<T, TemporalSummary>) {
          return {{"kind", "temporal"},
                  {"ranges", ranges_to_json(s.ranges)},
                  {"total_count", s.total_count},
                  {"resolution", to_string(s.resolution)}};
        } else {
          return to_json(s);
        }
      },
      summary);
}

ColumnSummary summary_from_json(const json& j) {
  return guarded("column summary", [&]() -> ColumnSummary {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "categorical") {
      CategoricalSketch s;
      for (const auto& v : j.at("signature")) {
        const auto text = v.get<std::string>();
        std::uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size()) malformed("bad signature value");
        s.signature.push_back(value);
      }
      s.cardinality = j.at("cardinality").get<std::uint64_t>();
      return s;
    }
    if (kind == "numeric") {
      return NumericSummary{ranges_from_json(j.at("ranges")), j.at("total_count").get<std::size_t>()};
    }
    if (kind == "temporal") {
      return TemporalSummary{ranges_from_json(j.at("ranges")), j.at("total_count").get<std::size_t>(),
                             resolution_from_json(j.at("resolution"))};
    }
    if (kind == "spatial") return spatial_summary_from_json(j);
    malformed("unknown summary kind '" + kind + "'");
  });
}

json to_json(const ProvenanceRecord& p) {
  return {{"source_plugin", p.source_plugin},
          {"locator", p.locator},
          {"retrieved_at", format_iso8601(p.retrieved_at)},
          {"content_hash", p.content_hash},
          {"bytes_size", p.bytes_size}};
}

ProvenanceRecord provenance_from_json(const json& j) {
  return guarded("provenance", [&] {
    ProvenanceRecord p;
    p.source_plugin = j.at("source_plugin").get<std::string>();
    p.locator = j.at("locator").get<std::string>();
    p.retrieved_at = timestamp_from_json(j.at("retrieved_at"));
    p.content_hash = j.at("content_hash").get<std::string>();
    p.bytes_size = j.at("bytes_size").get<std::uint64_t>();
    return p;
  });
}

json to_json(const DatasetProfile& p) {
  json columns = json::array();
  for (const auto& c : p.columns) {
    json col = {{"name", c.name},
                {"type", to_string(c.detected_type)},
                {"null_fraction", c.null_fraction},
                {"distinct_count", c.distinct_count_estimate},
                {"summary", to_json(c.summary)}};
    if (c.user_type_override) col["user_type_override"] = to_string(*c.user_type_override);
    if (c.numeric_stats) {
      col["numeric_stats"] = {{"mean", c.numeric_stats->mean},
                              {"variance", c.numeric_stats->variance},
                              {"min", c.numeric_stats->min},
                              {"max", c.numeric_stats->max}};
    }
    if (c.temporal_resolution) col["temporal_resolution"] = to_string(*c.temporal_resolution);
    json top = json::array();
    for (const auto& t : c.top_values) top.push_back({{"value", t.value}, {"frequency", t.frequency}});
    col["top_values"] = top;
    columns.push_back(std::move(col));
  }
  json coverage = json::array();
  for (const auto& s : p.spatial_coverage) {
    coverage.push_back({{"lat", s.lat_column}, {"lon", s.lon_column}, {"summary", to_json(s.summary)}});
  }
  return {{"profile_version", kProfileVersion},
          {"id", p.id},
          {"name", p.name},
          {"description", p.description},
          {"source", p.source},
          {"row_count", p.row_count},
          {"columns", columns},
          {"sample", p.sample},
          {"spatial_coverage", coverage},
          {"provenance", to_json(p.provenance)},
          {"custom_metadata", p.custom_metadata}};
}

DatasetProfile profile_from_json(const json& j) {
  if (!j.is_object()) malformed("profile must be a JSON object");
  if (!j.contains("profile_version") || j["profile_version"] != kProfileVersion) {
    throw Error(ErrorCode::ProfileVersionUnsupported,
                "unsupported profile_version " + (j.contains("profile_version") ? j["profile_version"].dump() : "(missing)"));
  }
  return guarded("profile", [&] {
    DatasetProfile p;
    p.id = j.at("id").get<std::string>();
    p.name = j.value("name", "");
    p.description = j.value("description", "");
    p.source = j.value("source", "");
    p.row_count = j.at("row_count").get<std::size_t>();
    for (const auto& c : j.at("columns")) {
      ColumnProfile col;
      col.name = c.at("name").get<std::string>();
      col.detected_type = column_type_from_json(c.at("type"));
      if (c.contains("user_type_override")) col.user_type_override = column_type_from_json(c["user_type_override"]);
      col.null_fraction = c.at("null_fraction").get<double>();
      col.distinct_count_estimate = c.at("distinct_count").get<std::uint64_t>();
      if (c.contains("numeric_stats")) {
        const auto& s = c["numeric_stats"];
        col.numeric_stats = NumericStats{s.at("mean").get<double>(), s.at("variance").get<double>(),
                                         s.at("min").get<double>(), s.at("max").get<double>()};
      }
      if (c.contains("temporal_resolution")) col.temporal_resolution = resolution_from_json(c["temporal_resolution"]);
      for (const auto& t : c.at("top_values")) {
        col.top_values.push_back({t.at("value").get<std::string>(), t.at("frequency").get<std::size_t>()});
      }
      col.summary = summary_from_json(c.at("summary"));
      p.columns.push_back(std::move(col));
    }
    p.sample = j.at("sample").get<std::vector<std::vector<std::string>>>();
    for (const auto& s : j.at("spatial_coverage")) {
      p.spatial_coverage.push_back({s.at("lat").get<std::string>(), s.at("lon").get<std::string>(),
                                    spatial_summary_from_json(s.at("summary"))});
    }
    p.provenance = provenance_from_json(j.at("provenance"));
    p.custom_metadata = j.value("custom_metadata", std::map<std::string, std::string>{});
    return p;
  });
}

json to_json(const BoundingBox& box) {
  return {{"min", {box.lat_min, box.lon_min}}, {"max", {box.lat_max, box.lon_max}}};
}

BoundingBox box_from_json(const json& j) {
  return guarded("bounding box", [&] {
    return BoundingBox{j.at("min").at(0).get<double>(), j.at("max").at(0).get<double>(),
                       j.at("min").at(1).get<double>(), j.at("max").at(1).get<double>()};
  });
}

json to_json(const Query& q) {
  json j = json::object();
  j["keywords"] = q.keywords;
  if (q.temporal) {
    json t = {{"start", format_iso8601(q.temporal->start)}, {"end", format_iso8601(q.temporal->end)}};
    if (q.temporal->resolution) t["resolution"] = to_string(*q.temporal->resolution);
    j["temporal"] = t;
  }
  if (q.spatial) {
    json s = json::object();
    if (q.spatial->box) s["bbox"] = to_json(*q.spatial->box);
    if (q.spatial->named_area) s["area"] = *q.spatial->named_area;
    j["spatial"] = s;
  }
  if (q.sources) j["sources"] = *q.sources;
  if (q.required_types) {
    json types = json::array();
    for (auto t : *q.required_types) types.push_back(to_string(t));
    j["types"] = types;
  }
  if (q.related) j["related"] = {{"profile", to_json(q.related->profile)}, {"mode", to_string(q.related->mode)}};
  j["page"] = {{"offset", q.page.offset}, {"limit", q.page.limit}};
  return j;
}

Query query_from_json(const json& j, bool validate) {
  if (validate && (j.is_null() || (j.is_object() && j.empty()))) throw Error(ErrorCode::EmptyQuery, "empty query");
  if (j.is_null()) return {};
  if (!j.is_object()) malformed("query must be a JSON object");
  Query q = guarded("query", [&] {
    Query q;
    if (j.contains("keywords")) {
      if (j["keywords"].is_string()) {
        q.keywords = {j["keywords"].get<std::string>()};
      } else {
        q.keywords = j["keywords"].get<std::vector<std::string>>();
      }
    }
    if (j.contains("temporal") && !j["temporal"].is_null()) {
      const auto& t = j["temporal"];
      TemporalFilter f;
      f.start = timestamp_from_json(t.at("start"));
      f.end = timestamp_from_json(t.at("end"));
      if (t.contains("resolution") && !t["resolution"].is_null()) f.resolution = resolution_from_json(t["resolution"]);
      q.temporal = f;
    }
    if (j.contains("spatial") && !j["spatial"].is_null()) {
      const auto& s = j["spatial"];
      SpatialFilter f;
      if (s.contains("bbox")) f.box = box_from_json(s["bbox"]);
      if (s.contains("area")) f.named_area = s["area"].get<std::string>();
      q.spatial = f;
    }
    if (j.contains("sources") && !j["sources"].is_null()) q.sources = j["sources"].get<std::set<std::string>>();
    if (j.contains("types") && !j["types"].is_null()) {
      std::set<ColumnType> types;
      for (const auto& t : j["types"]) types.insert(column_type_from_json(t));
      q.required_types = types;
    }
    if (j.contains("related") && !j["related"].is_null()) {
      const auto& r = j["related"];
      RelatedFilter f;
      f.profile = profile_from_json(r.at("profile"));
      const auto mode = r.value("mode", "either");
      if (mode == "join") {
        f.mode = RelatedMode::Join;
      } else if (mode == "union") {
        f.mode = RelatedMode::Union;
      } else if (mode == "either") {
        f.mode = RelatedMode::Either;
      } else {
        malformed("unknown related mode '" + mode + "'");
      }
      q.related = std::move(f);
    }
    if (j.contains("page")) {
      q.page.offset = j["page"].value("offset", std::size_t{0});
      q.page.limit = j["page"].value("limit", std::size_t{20});
    }
    return q;
  });
  if (validate) q.validate();
  return q;
}

json to_json(const JoinCandidate& c) {
  json pairs = json::array();
  for (const auto& p : c.pairs) {
    pairs.push_back({{"query_columns", p.query_columns},
                     {"candidate_columns", p.candidate_columns},
                     {"kind", to_string(p.kind)},
                     {"containment_score", p.containment_score}});
  }
  return {{"type", "join"}, {"dataset_id", c.dataset_id}, {"pairs", pairs}, {"join_score", c.join_score}};
}

JoinCandidate join_candidate_from_json(const json& j) {
  return guarded("join candidate", [&] {
    JoinCandidate c;
    c.dataset_id = j.at("dataset_id").get<std::string>();
    for (const auto& p : j.at("pairs")) {
      c.pairs.push_back({p.at("query_columns").get<std::vector<std::string>>(),
                         p.at("candidate_columns").get<std::vector<std::string>>(),
                         pair_kind_from_string(p.at("kind").get<std::string>()),
                         p.at("containment_score").get<double>()});
    }
    c.join_score = j.at("join_score").get<double>();
    return c;
  });
}

json to_json(const UnionCandidate& c) {
  json pairs = json::array();
  for (const auto& p : c.column_pairs) {
    pairs.push_back({{"query_column", p.query_column},
                     {"candidate_column", p.candidate_column},
                     {"name_similarity", p.name_similarity}});
  }
  return {{"type", "union"},
          {"dataset_id", c.dataset_id},
          {"column_pairs", pairs},
          {"union_score", c.union_score},
          {"matched_fraction", c.matched_fraction}};
}

UnionCandidate union_candidate_from_json(const json& j) {
  return guarded("union candidate", [&] {
    UnionCandidate c;
    c.dataset_id = j.at("dataset_id").get<std::string>();
    for (const auto& p : j.at("column_pairs")) {
      c.column_pairs.push_back({p.at("query_column").get<std::string>(),
                                p.at("candidate_column").get<std::string>(),
                                p.at("name_similarity").get<double>()});
    }
    c.union_score = j.at("union_score").get<double>();
    c.matched_fraction = j.at("matched_fraction").get<double>();
    return c;
  });
}

json to_json(const Snippet& s) {
  json columns = json::array();
  for (const auto& c : s.columns) {
    json top = json::array();
    for (const auto& t : c.top_values) top.push_back({{"value", t.value}, {"frequency", t.frequency}});
    columns.push_back({{"name", c.name}, {"type", to_string(c.type)}, {"top_values", top}});
  }
  json j = {{"name", s.name},
            {"description", s.description},
            {"source", s.source},
            {"row_count", s.row_count},
            {"columns", columns},
            {"sample", s.sample}};
  if (s.temporal_extent) {
    j["temporal_extent"] = {{"start", format_iso8601(s.temporal_extent->first)},
                            {"end", format_iso8601(s.temporal_extent->second)}};
  }
  if (s.spatial_extent) j["spatial_extent"] = to_json(*s.spatial_extent);
  return j;
}

json to_json(const SearchResult& r) {
  const auto opt = [](const std::optional<double>& v) -> json { return v ? json(*v) : json(nullptr); };
  json j = {{"id", r.dataset_id},
            {"score", r.total_score},
            {"score_breakdown",
             {{"keyword", opt(r.breakdown.keyword)},
              {"filter_overlap", opt(r.breakdown.filter_overlap)},
              {"join", opt(r.breakdown.join)},
              {"union", opt(r.breakdown.union_)}}},
            {"snippet", to_json(r.snippet)}};
  if (r.augmentation) {
    j["augmentation"] = std::visit([](const auto& c) { return to_json(c); }, *r.augmentation);
  }
  return j;
}

json to_json(const SearchResponse& r) {
  json results = json::array();
  for (const auto& x : r.results) results.push_back(to_json(x));
  return {{"results", results}, {"total", r.total}};
}

json to_json(const AugmentationSpec& spec) {
  json pairs = json::array();
  for (const auto& [l, r] : spec.pairs) pairs.push_back({l, r});
  json agg = json::object();
  for (const auto& [col, fn] : spec.agg) agg[col] = to_string(fn);
  json j = {{"mode", spec.mode == AugmentMode::Join ? "join" : "union"},
            {"pairs", pairs},
            {"agg", agg},
            {"include_columns", spec.include_columns}};
  if (spec.temporal_resolution) j["temporal_resolution"] = to_string(*spec.temporal_resolution);
  if (spec.spatial_grid_degrees) j["spatial_grid_degrees"] = *spec.spatial_grid_degrees;
  return j;
}

AugmentationSpec spec_from_json(const json& j) {
  return guarded("augmentation spec", [&] {
    AugmentationSpec spec;
    const auto mode = j.value("mode", "join");
    if (mode == "join") {
      spec.mode = AugmentMode::Join;
    } else if (mode == "union") {
      spec.mode = AugmentMode::Union;
    } else {
      throw Error(ErrorCode::InvalidSpec, "unknown augmentation mode '" + mode + "'");
    }
    for (const auto& p : j.at("pairs")) {
      spec.pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
    }
    if (j.contains("agg")) {
      for (const auto& [col, fn] : j["agg"].items()) {
        const auto parsed = parse_aggregation(fn.get<std::string>());
        if (!parsed) throw Error(ErrorCode::InvalidSpec, "unknown aggregation '" + fn.get<std::string>() + "'");
        spec.agg[col] = *parsed;
      }
    }
    if (j.contains("include_columns")) spec.include_columns = j["include_columns"].get<std::vector<std::string>>();
    if (j.contains("temporal_resolution") && !j["temporal_resolution"].is_null()) {
      const auto r = parse_resolution(j["temporal_resolution"].get<std::string>());
      if (!r) throw Error(ErrorCode::InvalidSpec, "unknown resolution");
      spec.temporal_resolution = r;
    }
    if (j.contains("spatial_grid_degrees") && !j["spatial_grid_degrees"].is_null()) {
      spec.spatial_grid_degrees = j["spatial_grid_degrees"].get<double>();
      if (!(*spec.spatial_grid_degrees > 0)) throw Error(ErrorCode::InvalidSpec, "spatial_grid_degrees must be positive");
    }
    return spec;
  });
}

json to_json(const AugmentProvenance& p) {
  return {{"left_id", p.left_id},
          {"right_id", p.right_id},
          {"spec", to_json(p.spec)},
          {"rows", {{"left", p.left_rows}, {"right", p.right_rows}, {"result", p.result_rows}}}};
}

AugmentationSpec spec_from_candidate(const Augmentation& candidate) {
  AugmentationSpec spec;
  if (const auto* join = std::get_if<JoinCandidate>(&candidate)) {
    spec.mode = AugmentMode::Join;
    if (join->pairs.empty()) throw Error(ErrorCode::NoPairs, "join candidate has no pairs");
    const auto& best = join->pairs.front();
    for (std::size_t i = 0; i < best.query_columns.size() && i < best.candidate_columns.size(); ++i) {
      spec.pairs.emplace_back(best.query_columns[i], best.candidate_columns[i]);
    }
    if (best.kind == PairKind::Spatial) spec.spatial_grid_degrees = 0.1;
  } else {
    const auto& uni = std::get<UnionCandidate>(candidate);
    spec.mode = AugmentMode::Union;
    for (const auto& p : uni.column_pairs) spec.pairs.emplace_back(p.query_column, p.candidate_column);
  }
  return spec;
}

}  // namespace dse
