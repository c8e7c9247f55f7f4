#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dse/gazetteer.hpp"
#include "dse/profile.hpp"

namespace dse {

/// Banding of a MinHash signature: bands * rows must equal its length.
struct LshParams {
  std::size_t bands = 32;
  std::size_t rows = 4;

  std::size_t signature_length() const noexcept { return bands * rows; }
};

struct ColumnRef {
  std::string dataset_id;
  std::string column;

  friend auto operator<=>(const ColumnRef&, const ColumnRef&) = default;
};

struct KeywordHit {
  std::string dataset_id;
  double score = 0;
};

struct RangeHit {
  std::string dataset_id;
  std::string column;
  double overlap = 0;  // member-weighted share of the column inside the probe
  std::optional<Resolution> resolution;
};

struct SpatialHit {
  std::string dataset_id;
  std::string lat_column;
  std::string lon_column;
  double overlap = 0;
};

/// Keyword (BM25), range, box and LSH structures over registered profiles.
///
/// Const member functions may run concurrently with each other; mutations
/// need exclusive access (Engine provides the reader/writer lock). Every
/// mutation bumps generation(). All interval tests are closed.
class Index {
 public:
  static constexpr double kNameWeight = 3;
  static constexpr double kDescriptionWeight = 1;
  static constexpr double kColumnWeight = 2;
  static constexpr double kBm25K1 = 1.2;
  static constexpr double kBm25B = 0.75;

  explicit Index(LshParams lsh = {});

  /// Registers (or replaces) a profile; returns the new generation.
  std::uint64_t add_dataset(DatasetProfile profile);
  /// Bulk registration that rebuilds the sorted structures once.
  std::uint64_t add_datasets(std::vector<DatasetProfile> profiles);
  bool remove_dataset(std::string_view id);

  const DatasetProfile* get(std::string_view id) const;
  std::vector<std::string> ids() const;
  std::size_t size() const noexcept { return profiles_.size(); }
  std::uint64_t generation() const noexcept { return generation_; }
  const LshParams& lsh_params() const noexcept { return lsh_; }

  std::vector<KeywordHit> query_keyword(std::span<const std::string> tokens) const;
  std::vector<RangeHit> query_temporal(std::int64_t start, std::int64_t end) const;
  std::vector<RangeHit> query_numeric(double lo, double hi) const;
  std::vector<SpatialHit> query_spatial(const BoundingBox& box) const;
  /// Columns sharing at least one band bucket with the sketch; sorted.
  std::vector<ColumnRef> query_lsh(const CategoricalSketch& sketch) const;

  /// Writes manifest.json, profiles.jsonl and one binary file per
  /// structure (magic "ADSI1", little-endian).
  void persist(const std::filesystem::path& dir) const;
  static Index load(const std::filesystem::path& dir);

  /// Band bucket keys of a signature (exposed for tests).
  std::vector<std::uint64_t> band_keys(const CategoricalSketch& sketch) const;

 private:
  struct Posting {
    std::string dataset_id;
    double weight = 0;  // field-weighted term frequency
  };
  struct RangeEntry {
    double lo = 0;  // hull of all ranges
    double hi = 0;
    std::string dataset_id;
    std::string column;
    std::vector<ValueRange> ranges;
    std::optional<Resolution> resolution;
  };
  struct BoxEntry {
    BoundingBox hull;
    std::string dataset_id;
    std::string lat_column;
    std::string lon_column;
    std::vector<GeoBox> boxes;
  };
  // Entries sorted by lower bound with a running maximum of upper bounds,
  // so a probe skips every prefix that ends before it starts.
  template <typename Entry>
  struct SortedIntervals {
    std::vector<Entry> entries;
    std::vector<double> prefix_max_hi;
  };

  void insert_unsorted(DatasetProfile profile);
  void erase(std::string_view id);
  void rebuild();
  std::vector<RangeHit> probe(const SortedIntervals<RangeEntry>& index, double lo, double hi) const;

  friend class IndexStore;

  LshParams lsh_;
  std::uint64_t generation_ = 0;
  std::map<std::string, DatasetProfile, std::less<>> profiles_;

  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::map<std::string, double, std::less<>> doc_length_;
  double total_doc_length_ = 0;

  SortedIntervals<RangeEntry> numeric_;
  SortedIntervals<RangeEntry> temporal_;
  SortedIntervals<BoxEntry> spatial_;

  std::vector<std::unordered_map<std::uint64_t, std::vector<ColumnRef>>> lsh_tables_;
};

}  // namespace dse
