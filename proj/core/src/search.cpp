#include "dse/search.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <iterator>
#include <numeric>
#include <set>
#include <tuple>

#include "dse/error.hpp"
#include "dse/strings.hpp"

namespace dse {

void Query::validate() const {
  const bool any = !keywords.empty() || temporal || spatial || sources || required_types || related;
  if (!any) throw Error(ErrorCode::EmptyQuery, "query has no keywords, filters or related dataset");
  if (temporal && temporal->start > temporal->end) {
    throw Error(ErrorCode::InvalidQuery, "temporal filter start is after end");
  }
  if (spatial) {
    if (!spatial->box && !spatial->named_area) {
      throw Error(ErrorCode::InvalidQuery, "spatial filter needs a bbox or a named area");
    }
    if (spatial->box && !spatial->box->valid()) throw Error(ErrorCode::InvalidQuery, "invalid bounding box");
  }
  if (related && related->profile.columns.empty()) {
    throw Error(ErrorCode::InvalidQuery, "related dataset has no columns");
  }
  if (page.limit == 0) throw Error(ErrorCode::InvalidQuery, "page limit must be positive");
}

std::string fold_name(std::string_view name) {
  const auto lowered = to_lower(trim(name));
  std::string out;
  bool in_sep = false;
  for (char c : lowered) {
    const bool sep = c == ' ' || c == '\t' || c == '_' || c == '-' || c == '\r' || c == '\n';
    if (sep) {
      if (!in_sep) out.push_back('_');
      in_sep = true;
    } else {
      out.push_back(c);
      in_sep = false;
    }
  }
  return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

double name_similarity(std::string_view a, std::string_view b) {
  const auto fa = fold_name(a);
  const auto fb = fold_name(b);
  const auto longest = std::max(fa.size(), fb.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(fa, fb)) / static_cast<double>(longest);
}

Snippet make_snippet(const DatasetProfile& p) {
  Snippet s;
  s.name = p.name;
  s.description = p.description;
  s.source = p.source;
  s.row_count = p.row_count;
  for (const auto& c : p.columns) {
    s.columns.push_back({c.name, c.type(), c.top_values});
    if (const auto* t = std::get_if<TemporalSummary>(&c.summary); t && !t->ranges.empty()) {
      const auto lo = static_cast<std::int64_t>(t->ranges.front().lo);
      const auto hi = static_cast<std::int64_t>(t->ranges.back().hi);
      if (!s.temporal_extent) {
        s.temporal_extent = {lo, hi};
      } else {
        s.temporal_extent->first = std::min(s.temporal_extent->first, lo);
        s.temporal_extent->second = std::max(s.temporal_extent->second, hi);
      }
    }
  }
  for (const auto& cov : p.spatial_coverage) {
    for (const auto& b : cov.summary.boxes) {
      if (!s.spatial_extent) {
        s.spatial_extent = BoundingBox{b.lat_min, b.lat_max, b.lon_min, b.lon_max};
        continue;
      }
      auto& e = *s.spatial_extent;
      e.lat_min = std::min(e.lat_min, b.lat_min);
      e.lat_max = std::max(e.lat_max, b.lat_max);
      e.lon_min = std::min(e.lon_min, b.lon_min);
      e.lon_max = std::max(e.lon_max, b.lon_max);
    }
  }
  s.sample = p.sample;
  return s;
}

namespace {

std::optional<std::pair<double, double>> hull(const std::vector<ValueRange>& ranges) {
  if (ranges.empty()) return std::nullopt;
  return std::pair{ranges.front().lo, ranges.back().hi};
}

BoundingBox hull(const SpatialSummary& s) {
  BoundingBox b{90, -90, 180, -180};
  for (const auto& x : s.boxes) {
    b.lat_min = std::min(b.lat_min, x.lat_min);
    b.lat_max = std::max(b.lat_max, x.lat_max);
    b.lon_min = std::min(b.lon_min, x.lon_min);
    b.lon_max = std::max(b.lon_max, x.lon_max);
  }
  return b;
}

}  // namespace

std::vector<JoinCandidate> join_search(const DatasetProfile& query, const Index& index, double floor) {
  std::map<std::string, JoinCandidate> grouped;
  const auto keep = [&](const std::string& id, JoinPair pair) {
    if (id == query.id || pair.containment_score < floor) return;
    auto& c = grouped[id];
    c.dataset_id = id;
    c.pairs.push_back(std::move(pair));
  };

  for (const auto& col : query.columns) {
    switch (col.type()) {
      case ColumnType::Categorical: {
        const auto* sketch = std::get_if<CategoricalSketch>(&col.summary);
        if (!sketch || sketch->cardinality == 0) break;
        for (const auto& ref : index.query_lsh(*sketch)) {
          const auto* other = index.get(ref.dataset_id);
          const auto* other_col = other ? other->column(ref.column) : nullptr;
          const auto* other_sketch = other_col ? std::get_if<CategoricalSketch>(&other_col->summary) : nullptr;
          if (!other_sketch) continue;
          keep(ref.dataset_id, {{col.name}, {ref.column}, PairKind::Categorical,
                                estimate_containment(*sketch, *other_sketch)});
        }
        break;
      }
      case ColumnType::Numerical:
      case ColumnType::Temporal: {
        const bool temporal = col.type() == ColumnType::Temporal;
        const std::vector<ValueRange>* ranges = nullptr;
        if (const auto* n = std::get_if<NumericSummary>(&col.summary)) ranges = &n->ranges;
        if (const auto* t = std::get_if<TemporalSummary>(&col.summary)) ranges = &t->ranges;
        if (!ranges) break;
        const auto h = hull(*ranges);
        if (!h) break;
        const auto hits = temporal ? index.query_temporal(static_cast<std::int64_t>(std::floor(h->first)),
                                                          static_cast<std::int64_t>(std::ceil(h->second)))
                                   : index.query_numeric(h->first, h->second);
        for (const auto& hit : hits) {
          const auto* other = index.get(hit.dataset_id);
          const auto* other_col = other ? other->column(hit.column) : nullptr;
          if (!other_col) continue;
          const std::vector<ValueRange>* other_ranges = nullptr;
          if (const auto* n = std::get_if<NumericSummary>(&other_col->summary)) other_ranges = &n->ranges;
          if (const auto* t = std::get_if<TemporalSummary>(&other_col->summary)) other_ranges = &t->ranges;
          if (!other_ranges) continue;
          keep(hit.dataset_id, {{col.name}, {hit.column}, temporal ? PairKind::Temporal : PairKind::Numeric,
                                estimate_range_overlap(*ranges, *other_ranges)});
        }
        break;
      }
      case ColumnType::SpatialLatitude:
      case ColumnType::SpatialLongitude:
        break;  // probed per (lat, lon) pair below
    }
  }

  for (const auto& cov : query.spatial_coverage) {
    if (cov.summary.boxes.empty()) continue;
    for (const auto& hit : index.query_spatial(hull(cov.summary))) {
      const auto* other = index.get(hit.dataset_id);
      if (!other) continue;
      for (const auto& other_cov : other->spatial_coverage) {
        if (other_cov.lat_column != hit.lat_column || other_cov.lon_column != hit.lon_column) continue;
        keep(hit.dataset_id, {{cov.lat_column, cov.lon_column},
                              {other_cov.lat_column, other_cov.lon_column},
                              PairKind::Spatial,
                              estimate_spatial_overlap(cov.summary, other_cov.summary)});
      }
    }
  }

  std::vector<JoinCandidate> out;
  out.reserve(grouped.size());
  for (auto& [id, c] : grouped) {
    std::sort(c.pairs.begin(), c.pairs.end(), [](const JoinPair& a, const JoinPair& b) {
      if (a.containment_score != b.containment_score) return a.containment_score > b.containment_score;
      return std::tie(a.query_columns, a.candidate_columns) < std::tie(b.query_columns, b.candidate_columns);
    });
    c.join_score = c.pairs.front().containment_score;
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(), [](const JoinCandidate& a, const JoinCandidate& b) {
    return a.join_score > b.join_score;
  });
  return out;
}

std::vector<UnionCandidate> union_search(const DatasetProfile& query, const Index& index, double threshold) {
  std::vector<UnionCandidate> out;
  if (query.columns.empty()) return out;
  std::vector<std::string> query_folded;
  for (const auto& c : query.columns) query_folded.push_back(fold_name(c.name));

  struct Edge {
    double sim;
    std::size_t q;
    std::size_t c;
  };
  for (const auto& id : index.ids()) {
    if (id == query.id) continue;
    const auto& other = *index.get(id);
    std::vector<Edge> edges;
    for (std::size_t qi = 0; qi < query.columns.size(); ++qi) {
      for (std::size_t ci = 0; ci < other.columns.size(); ++ci) {
        if (query.columns[qi].type() != other.columns[ci].type()) continue;
        const auto fc = fold_name(other.columns[ci].name);
        const auto longest = std::max(query_folded[qi].size(), fc.size());
        const double sim = longest == 0 ? 1.0
                                        : 1.0 - static_cast<double>(levenshtein(query_folded[qi], fc)) /
                                                    static_cast<double>(longest);
        if (sim >= threshold) edges.push_back({sim, qi, ci});
      }
    }
    if (edges.empty()) continue;
    std::sort(edges.begin(), edges.end(), [&](const Edge& a, const Edge& b) {
      if (a.sim != b.sim) return a.sim > b.sim;
      if (query.columns[a.q].name != query.columns[b.q].name) return query.columns[a.q].name < query.columns[b.q].name;
      return other.columns[a.c].name < other.columns[b.c].name;
    });
    std::vector<bool> q_used(query.columns.size(), false), c_used(other.columns.size(), false);
    UnionCandidate cand;
    cand.dataset_id = id;
    double total = 0;
    for (const auto& e : edges) {
      if (q_used[e.q] || c_used[e.c]) continue;
      q_used[e.q] = c_used[e.c] = true;
      cand.column_pairs.push_back({query.columns[e.q].name, other.columns[e.c].name, e.sim});
      total += e.sim;
    }
    cand.union_score = total / static_cast<double>(cand.column_pairs.size());
    cand.matched_fraction = static_cast<double>(cand.column_pairs.size()) / static_cast<double>(query.columns.size());
    out.push_back(std::move(cand));
  }
  std::stable_sort(out.begin(), out.end(), [](const UnionCandidate& a, const UnionCandidate& b) {
    return a.union_score > b.union_score;
  });
  return out;
}

namespace {

struct Scored {
  std::string id;
  double total = 0;
  ScoreBreakdown breakdown;
  std::optional<Augmentation> augmentation;
};

// id -> best value; only ids present passed the filter
using HitMap = std::map<std::string, double>;

void intersect(std::optional<std::set<std::string>>& acc, const std::set<std::string>& ids) {
  if (!acc) {
    acc = ids;
    return;
  }
  std::set<std::string> out;
  std::set_intersection(acc->begin(), acc->end(), ids.begin(), ids.end(), std::inserter(out, out.end()));
  acc = std::move(out);
}

std::set<std::string> keys(const HitMap& m) {
  std::set<std::string> out;
  for (const auto& [k, v] : m) out.insert(k);
  return out;
}

}  // namespace

SearchResponse execute_query(const Query& q, const Index& index, const SearchOptions& options) {
  q.validate();
  const Gazetteer& gazetteer = options.gazetteer ? *options.gazetteer : Gazetteer::builtin();

  std::optional<std::set<std::string>> candidates;
  HitMap keyword_raw, temporal_overlap, spatial_overlap;
  std::map<std::string, const JoinCandidate*> joins;
  std::map<std::string, const UnionCandidate*> unions;
  std::vector<JoinCandidate> join_list;
  std::vector<UnionCandidate> union_list;

  if (!q.keywords.empty()) {
    for (const auto& hit : index.query_keyword(q.keywords)) keyword_raw[hit.dataset_id] = hit.score;
    intersect(candidates, keys(keyword_raw));
  }
  if (q.temporal) {
    for (const auto& hit : index.query_temporal(q.temporal->start, q.temporal->end)) {
      if (q.temporal->resolution && hit.resolution &&
          static_cast<int>(*hit.resolution) > static_cast<int>(*q.temporal->resolution)) {
        continue;
      }
      auto& v = temporal_overlap[hit.dataset_id];
      v = std::max(v, hit.overlap);
    }
    intersect(candidates, keys(temporal_overlap));
  }
  if (q.spatial) {
    BoundingBox box;
    if (q.spatial->box) {
      box = *q.spatial->box;
    } else {
      const auto found = gazetteer.lookup(*q.spatial->named_area);
      if (!found) throw Error(ErrorCode::UnknownNamedArea, "unknown area '" + *q.spatial->named_area + "'");
      box = *found;
    }
    for (const auto& hit : index.query_spatial(box)) {
      auto& v = spatial_overlap[hit.dataset_id];
      v = std::max(v, hit.overlap);
    }
    intersect(candidates, keys(spatial_overlap));
  }
  if (q.sources || q.required_types) {
    std::set<std::string> ids;
    for (const auto& id : index.ids()) {
      const auto& p = *index.get(id);
      if (q.sources && !q.sources->contains(p.source)) continue;
      if (q.required_types) {
        std::set<ColumnType> present;
        for (const auto& c : p.columns) present.insert(c.type());
        if (!std::includes(present.begin(), present.end(), q.required_types->begin(), q.required_types->end())) {
          continue;
        }
      }
      ids.insert(id);
    }
    intersect(candidates, ids);
  }
  if (q.related) {
    std::set<std::string> ids;
    if (q.related->mode != RelatedMode::Union) {
      join_list = join_search(q.related->profile, index, options.join_floor);
      for (const auto& c : join_list) {
        joins[c.dataset_id] = &c;
        ids.insert(c.dataset_id);
      }
    }
    if (q.related->mode != RelatedMode::Join) {
      union_list = union_search(q.related->profile, index, options.union_threshold);
      for (const auto& c : union_list) {
        unions[c.dataset_id] = &c;
        ids.insert(c.dataset_id);
      }
    }
    intersect(candidates, ids);
  }
  if (!candidates) candidates = std::set<std::string>{};

  double keyword_max = 0;
  for (const auto& id : *candidates) {
    if (auto it = keyword_raw.find(id); it != keyword_raw.end()) keyword_max = std::max(keyword_max, it->second);
  }

  const auto& w = options.weights;
  std::vector<Scored> scored;
  scored.reserve(candidates->size());
  for (const auto& id : *candidates) {
    Scored s;
    s.id = id;
    double num = 0, den = 0;
    if (!q.keywords.empty()) {
      const double raw = keyword_raw.at(id);
      s.breakdown.keyword = keyword_max > 0 ? raw / keyword_max : 0.0;
      num += w.keyword * *s.breakdown.keyword;
      den += w.keyword;
    }
    std::vector<double> overlaps;
    if (q.temporal) overlaps.push_back(temporal_overlap.at(id));
    if (q.spatial) overlaps.push_back(spatial_overlap.at(id));
    if (!overlaps.empty()) {
      s.breakdown.filter_overlap = std::accumulate(overlaps.begin(), overlaps.end(), 0.0) / static_cast<double>(overlaps.size());
      num += w.filter * *s.breakdown.filter_overlap;
      den += w.filter;
    }
    if (q.related) {
      double related = 0;
      const auto jit = joins.find(id);
      const auto uit = unions.find(id);
      if (jit != joins.end()) {
        s.breakdown.join = jit->second->join_score;
        related = *s.breakdown.join;
        s.augmentation = *jit->second;
      }
      if (uit != unions.end()) {
        s.breakdown.union_ = uit->second->union_score;
        if (!s.augmentation || *s.breakdown.union_ > related) s.augmentation = *uit->second;
        related = std::max(related, *s.breakdown.union_);
      }
      num += w.related * related;
      den += w.related;
    }
    s.total = den > 0 ? num / den : 0.0;
    scored.push_back(std::move(s));
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    return a.total != b.total ? a.total > b.total : a.id < b.id;
  });

  SearchResponse response;
  response.total = scored.size();
  const std::size_t begin = std::min(q.page.offset, scored.size());
  const std::size_t end = std::min(begin + q.page.limit, scored.size());
  for (std::size_t i = begin; i < end; ++i) {
    auto& s = scored[i];
    SearchResult r;
    r.dataset_id = s.id;
    r.total_score = s.total;
    r.breakdown = s.breakdown;
    r.snippet = make_snippet(*index.get(s.id));
    r.augmentation = std::move(s.augmentation);
    response.results.push_back(std::move(r));
  }
  return response;
}

}  // namespace dse
