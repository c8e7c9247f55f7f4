#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dse/gazetteer.hpp"
#include "dse/index.hpp"
#include "dse/profile.hpp"

namespace dse {

struct TemporalFilter {
  std::int64_t start = 0;  // epoch seconds, closed interval
  std::int64_t end = 0;
  /// When set, a column matches only if its resolution is this or finer.
  std::optional<Resolution> resolution;
};

struct SpatialFilter {
  std::optional<BoundingBox> box;
  std::optional<std::string> named_area;
};

enum class RelatedMode { Join, Union, Either };

struct RelatedFilter {
  DatasetProfile profile;
  RelatedMode mode = RelatedMode::Either;
};

struct Page {
  std::size_t offset = 0;
  std::size_t limit = 20;
};

struct Query {
  std::vector<std::string> keywords;
  std::optional<TemporalFilter> temporal;
  std::optional<SpatialFilter> spatial;
  std::optional<std::set<std::string>> sources;
  std::optional<std::set<ColumnType>> required_types;
  std::optional<RelatedFilter> related;
  Page page;

  /// Throws EmptyQuery when no constraint is present, InvalidQuery on
  /// start > end or a malformed box.
  void validate() const;
};

enum class PairKind { Categorical, Numeric, Temporal, Spatial };

/// One intersecting column pair. Spatial pairs name (lat, lon) on each side.
struct JoinPair {
  std::vector<std::string> query_columns;
  std::vector<std::string> candidate_columns;
  PairKind kind = PairKind::Categorical;
  double containment_score = 0;
};

struct JoinCandidate {
  std::string dataset_id;
  std::vector<JoinPair> pairs;  // sorted by score, best first
  double join_score = 0;        // max pair score
};

struct UnionPair {
  std::string query_column;
  std::string candidate_column;
  double name_similarity = 0;
};

struct UnionCandidate {
  std::string dataset_id;
  std::vector<UnionPair> column_pairs;
  double union_score = 0;       // mean pair similarity
  double matched_fraction = 0;  // pairs / query columns
};

/// Components absent from the query stay empty; keyword is divided by the
/// largest raw BM25 score among all matching results.
struct ScoreBreakdown {
  std::optional<double> keyword;
  std::optional<double> filter_overlap;
  std::optional<double> join;
  std::optional<double> union_;
};

struct SnippetColumn {
  std::string name;
  ColumnType type = ColumnType::Categorical;
  std::vector<TopValue> top_values;
};

struct Snippet {
  std::string name;
  std::string description;
  std::string source;
  std::size_t row_count = 0;
  std::vector<SnippetColumn> columns;
  std::optional<std::pair<std::int64_t, std::int64_t>> temporal_extent;
  std::optional<BoundingBox> spatial_extent;
  std::vector<std::vector<std::string>> sample;
};

using Augmentation = std::variant<JoinCandidate, UnionCandidate>;

struct SearchResult {
  std::string dataset_id;
  double total_score = 0;
  ScoreBreakdown breakdown;
  Snippet snippet;
  std::optional<Augmentation> augmentation;
};

struct SearchResponse {
  std::vector<SearchResult> results;  // the requested page
  std::size_t total = 0;              // size of the full ranked list
};

struct RankingWeights {
  double keyword = 0.5;
  double filter = 0.2;
  double related = 0.3;
};

struct SearchOptions {
  RankingWeights weights;
  double join_floor = 0.05;
  double union_threshold = 0.4;
  const Gazetteer* gazetteer = nullptr;  // builtin when null
};

/// Intersects the hit sets of every active constraint, scores each
/// survivor, and returns one page of the list ranked by total score
/// (descending) then dataset id (ascending).
SearchResponse execute_query(const Query& query, const Index& index, const SearchOptions& options = {});

/// Datasets with at least one column whose summary intersects a query
/// column's summary, probing the structure that matches the column type.
std::vector<JoinCandidate> join_search(const DatasetProfile& query, const Index& index,
                                       double floor = 0.05);

/// Datasets sharing same-typed, similarly named columns; greedy one-to-one
/// matching by descending similarity.
std::vector<UnionCandidate> union_search(const DatasetProfile& query, const Index& index,
                                         double threshold = 0.4);

/// Case-fold, trim, collapse runs of whitespace/underscore/hyphen to "_".
std::string fold_name(std::string_view name);
std::size_t levenshtein(std::string_view a, std::string_view b);
/// 1 - lev / max length over folded names; 1 when both fold to "".
double name_similarity(std::string_view a, std::string_view b);

Snippet make_snippet(const DatasetProfile& profile);

}  // namespace dse
