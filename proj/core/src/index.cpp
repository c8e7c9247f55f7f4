#include "dse/index.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dse/error.hpp"
#include "dse/hashing.hpp"
#include "dse/strings.hpp"

namespace dse {

namespace {

std::map<std::string, double> weighted_terms(const DatasetProfile& p) {
  std::map<std::string, double> tf;
  for (const auto& t : tokenize(p.name)) tf[t] += Index::kNameWeight;
  for (const auto& t : tokenize(p.description)) tf[t] += Index::kDescriptionWeight;
  for (const auto& c : p.columns) {
    for (const auto& t : tokenize(c.name)) tf[t] += Index::kColumnWeight;
  }
  return tf;
}

template <typename Entry, typename Lo, typename Hi>
void sort_intervals(std::vector<Entry>& entries, std::vector<double>& prefix_max, Lo lo, Hi hi) {
  std::sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
    if (lo(a) != lo(b)) return lo(a) < lo(b);
    if (a.dataset_id != b.dataset_id) return a.dataset_id < b.dataset_id;
    return hi(a) < hi(b);
  });
  prefix_max.resize(entries.size());
  double running = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    running = std::max(running, hi(entries[i]));
    prefix_max[i] = running;
  }
}

}  // namespace

Index::Index(LshParams lsh) : lsh_(lsh), lsh_tables_(lsh.bands) {
  if (lsh.bands == 0 || lsh.rows == 0) {
    throw Error(ErrorCode::InvalidConfig, "LSH bands and rows must be positive");
  }
}

std::vector<std::uint64_t> Index::band_keys(const CategoricalSketch& sketch) const {
  if (sketch.signature.size() != lsh_.signature_length()) {
    throw Error(ErrorCode::SignatureLengthMismatch,
                "signature length " + std::to_string(sketch.signature.size()) +
                    " does not match index length " + std::to_string(lsh_.signature_length()));
  }
  std::vector<std::uint64_t> keys(lsh_.bands);
  for (std::size_t b = 0; b < lsh_.bands; ++b) {
    std::uint64_t h = mix64(0x62616e64ULL + b);
    for (std::size_t r = 0; r < lsh_.rows; ++r) {
      h = mix64(h ^ sketch.signature[b * lsh_.rows + r]) + 0x9e3779b97f4a7c15ULL;
    }
    keys[b] = h;
  }
  return keys;
}

void Index::insert_unsorted(DatasetProfile profile) {
  // validate every sketch before touching any structure
  for (const auto& c : profile.columns) {
    if (const auto* sk = std::get_if<CategoricalSketch>(&c.summary); sk && sk->cardinality > 0) {
      band_keys(*sk);
    }
  }
  if (profiles_.contains(profile.id)) erase(profile.id);
  const std::string id = profile.id;

  double length = 0;
  for (const auto& [term, weight] : weighted_terms(profile)) {
    postings_[term].push_back({id, weight});
    length += weight;
  }
  doc_length_[id] = length;
  total_doc_length_ += length;

  for (const auto& c : profile.columns) {
    if (const auto* sk = std::get_if<CategoricalSketch>(&c.summary)) {
      if (sk->cardinality == 0) continue;  // all-null columns never collide
      const auto keys = band_keys(*sk);
      for (std::size_t b = 0; b < keys.size(); ++b) lsh_tables_[b][keys[b]].push_back({id, c.name});
    } else if (const auto* ns = std::get_if<NumericSummary>(&c.summary)) {
      if (ns->ranges.empty() || is_spatial(c.type())) continue;
      numeric_.entries.push_back(
          {ns->ranges.front().lo, ns->ranges.back().hi, id, c.name, ns->ranges, std::nullopt});
    } else if (const auto* ts = std::get_if<TemporalSummary>(&c.summary)) {
      if (ts->ranges.empty()) continue;
      temporal_.entries.push_back(
          {ts->ranges.front().lo, ts->ranges.back().hi, id, c.name, ts->ranges, ts->resolution});
    }
  }
  for (const auto& cov : profile.spatial_coverage) {
    if (cov.summary.boxes.empty()) continue;
    BoundingBox hull{90, -90, 180, -180};
    for (const auto& b : cov.summary.boxes) {
      hull.lat_min = std::min(hull.lat_min, b.lat_min);
      hull.lat_max = std::max(hull.lat_max, b.lat_max);
      hull.lon_min = std::min(hull.lon_min, b.lon_min);
      hull.lon_max = std::max(hull.lon_max, b.lon_max);
    }
    spatial_.entries.push_back({hull, id, cov.lat_column, cov.lon_column, cov.summary.boxes});
  }
  profiles_.emplace(id, std::move(profile));
}

void Index::erase(std::string_view id) {
  auto it = profiles_.find(id);
  if (it == profiles_.end()) return;
  const auto& profile = it->second;
  for (const auto& [term, weight] : weighted_terms(profile)) {
    auto pit = postings_.find(term);
    if (pit == postings_.end()) continue;
    std::erase_if(pit->second, [&](const Posting& p) { return p.dataset_id == id; });
    if (pit->second.empty()) postings_.erase(pit);
  }
  if (auto dit = doc_length_.find(id); dit != doc_length_.end()) {
    total_doc_length_ -= dit->second;
    doc_length_.erase(dit);
  }
  for (const auto& c : profile.columns) {
    const auto* sk = std::get_if<CategoricalSketch>(&c.summary);
    if (!sk || sk->cardinality == 0) continue;
    const auto keys = band_keys(*sk);
    for (std::size_t b = 0; b < keys.size(); ++b) {
      auto bit = lsh_tables_[b].find(keys[b]);
      if (bit == lsh_tables_[b].end()) continue;
      std::erase_if(bit->second, [&](const ColumnRef& r) { return r.dataset_id == id; });
      if (bit->second.empty()) lsh_tables_[b].erase(bit);
    }
  }
  const auto same = [&](const auto& e) { return e.dataset_id == id; };
  std::erase_if(numeric_.entries, same);
  std::erase_if(temporal_.entries, same);
  std::erase_if(spatial_.entries, same);
  profiles_.erase(it);
}

void Index::rebuild() {
  const auto lo = [](const RangeEntry& e) { return e.lo; };
  const auto hi = [](const RangeEntry& e) { return e.hi; };
  sort_intervals(numeric_.entries, numeric_.prefix_max_hi, lo, hi);
  sort_intervals(temporal_.entries, temporal_.prefix_max_hi, lo, hi);
  sort_intervals(
      spatial_.entries, spatial_.prefix_max_hi, [](const BoxEntry& e) { return e.hull.lat_min; },
      [](const BoxEntry& e) { return e.hull.lat_max; });
  if (total_doc_length_ < 1e-9) total_doc_length_ = 0;
}

std::uint64_t Index::add_dataset(DatasetProfile profile) {
  insert_unsorted(std::move(profile));
  rebuild();
  return ++generation_;
}

std::uint64_t Index::add_datasets(std::vector<DatasetProfile> profiles) {
  for (auto& p : profiles) {
    insert_unsorted(std::move(p));
    ++generation_;
  }
  rebuild();
  return generation_;
}

bool Index::remove_dataset(std::string_view id) {
  if (!profiles_.contains(id)) return false;
  erase(id);
  rebuild();
  ++generation_;
  return true;
}

const DatasetProfile* Index::get(std::string_view id) const {
  auto it = profiles_.find(id);
  return it == profiles_.end() ? nullptr : &it->second;
}

std::vector<std::string> Index::ids() const {
  std::vector<std::string> out;
  out.reserve(profiles_.size());
  for (const auto& [id, p] : profiles_) out.push_back(id);
  return out;
}

std::vector<KeywordHit> Index::query_keyword(std::span<const std::string> tokens) const {
  std::set<std::string> terms;
  for (const auto& t : tokens) {
    for (auto& piece : tokenize(t)) terms.insert(std::move(piece));
  }
  if (terms.empty() || profiles_.empty()) return {};
  const double n = static_cast<double>(profiles_.size());
  const double avgdl = std::max(total_doc_length_ / n, 1e-9);
  std::map<std::string, double> scores;
  for (const auto& term : terms) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const double df = static_cast<double>(it->second.size());
    const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    for (const auto& p : it->second) {
      const double dl = doc_length_.at(p.dataset_id);
      const double tf = p.weight;
      scores[p.dataset_id] += idf * tf * (kBm25K1 + 1) / (tf + kBm25K1 * (1 - kBm25B + kBm25B * dl / avgdl));
    }
  }
  std::vector<KeywordHit> hits;
  hits.reserve(scores.size());
  for (const auto& [id, s] : scores) hits.push_back({id, s});
  std::stable_sort(hits.begin(), hits.end(),
                   [](const KeywordHit& a, const KeywordHit& b) { return a.score > b.score; });
  return hits;
}

std::vector<RangeHit> Index::probe(const SortedIntervals<RangeEntry>& index, double lo,
                                   double hi) const {
  std::vector<RangeHit> hits;
  if (lo > hi) return hits;
  const auto& e = index.entries;
  const auto first = static_cast<std::size_t>(
      std::lower_bound(index.prefix_max_hi.begin(), index.prefix_max_hi.end(), lo) -
      index.prefix_max_hi.begin());
  const ValueRange window{lo, hi, 1};
  for (std::size_t i = first; i < e.size() && e[i].lo <= hi; ++i) {
    if (e[i].hi < lo) continue;
    const bool touches = std::any_of(e[i].ranges.begin(), e[i].ranges.end(),
                                     [&](const ValueRange& r) { return r.lo <= hi && lo <= r.hi; });
    if (!touches) continue;
    const double overlap = estimate_range_overlap(e[i].ranges, std::span(&window, 1));
    hits.push_back({e[i].dataset_id, e[i].column, overlap, e[i].resolution});
  }
  std::sort(hits.begin(), hits.end(), [](const RangeHit& a, const RangeHit& b) {
    return a.dataset_id != b.dataset_id ? a.dataset_id < b.dataset_id : a.column < b.column;
  });
  return hits;
}

std::vector<RangeHit> Index::query_temporal(std::int64_t start, std::int64_t end) const {
  return probe(temporal_, static_cast<double>(start), static_cast<double>(end));
}

std::vector<RangeHit> Index::query_numeric(double lo, double hi) const {
  return probe(numeric_, lo, hi);
}

std::vector<SpatialHit> Index::query_spatial(const BoundingBox& box) const {
  std::vector<SpatialHit> hits;
  const GeoBox probe_box{box.lat_min, box.lat_max, box.lon_min, box.lon_max, 1};
  const auto& e = spatial_.entries;
  const auto first = static_cast<std::size_t>(
      std::lower_bound(spatial_.prefix_max_hi.begin(), spatial_.prefix_max_hi.end(), box.lat_min) -
      spatial_.prefix_max_hi.begin());
  for (std::size_t i = first; i < e.size() && e[i].hull.lat_min <= box.lat_max; ++i) {
    const GeoBox hull{e[i].hull.lat_min, e[i].hull.lat_max, e[i].hull.lon_min, e[i].hull.lon_max, 0};
    if (!hull.intersects(probe_box)) continue;
    if (std::none_of(e[i].boxes.begin(), e[i].boxes.end(),
                     [&](const GeoBox& b) { return b.intersects(probe_box); })) {
      continue;
    }
    SpatialSummary mine{e[i].boxes, 0};
    for (const auto& b : e[i].boxes) mine.total_count += b.count;
    const double overlap = estimate_spatial_overlap(mine, SpatialSummary{{probe_box}, 1});
    hits.push_back({e[i].dataset_id, e[i].lat_column, e[i].lon_column, overlap});
  }
  std::sort(hits.begin(), hits.end(), [](const SpatialHit& a, const SpatialHit& b) {
    return std::tie(a.dataset_id, a.lat_column, a.lon_column) <
           std::tie(b.dataset_id, b.lat_column, b.lon_column);
  });
  return hits;
}

std::vector<ColumnRef> Index::query_lsh(const CategoricalSketch& sketch) const {
  if (sketch.cardinality == 0) return {};
  const auto keys = band_keys(sketch);
  std::set<ColumnRef> found;
  for (std::size_t b = 0; b < keys.size(); ++b) {
    auto it = lsh_tables_[b].find(keys[b]);
    if (it == lsh_tables_[b].end()) continue;
    found.insert(it->second.begin(), it->second.end());
  }
  return {found.begin(), found.end()};
}

}  // namespace dse
