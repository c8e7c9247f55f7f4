#pragma once

#include <nlohmann/json.hpp>

#include "dse/augment.hpp"
#include "dse/profile.hpp"
#include "dse/search.hpp"

// Canonical JSON encodings shared by the CLI, the HTTP service, index
// persistence and the UI. Timestamps are ISO-8601 UTC strings, coordinates
// are [lat, lon], MinHash values are decimal strings (u64 does not survive
// double-based JSON readers). Decoders throw Error(MalformedDocument) on
// shape errors.

namespace dse {

using json = nlohmann::json;

json to_json(const ColumnSummary& summary);
ColumnSummary summary_from_json(const json& j);

json to_json(const SpatialSummary& summary);
SpatialSummary spatial_summary_from_json(const json& j);

json to_json(const ProvenanceRecord& p);
ProvenanceRecord provenance_from_json(const json& j);

/// Carries "profile_version": 1; other versions raise ProfileVersionUnsupported.
json to_json(const DatasetProfile& profile);
DatasetProfile profile_from_json(const json& j);

json to_json(const BoundingBox& box);
BoundingBox box_from_json(const json& j);

json to_json(const Query& query);
/// Decodes and, unless told otherwise, validates (EmptyQuery / InvalidQuery).
Query query_from_json(const json& j, bool validate = true);

json to_json(const JoinCandidate& c);
JoinCandidate join_candidate_from_json(const json& j);
json to_json(const UnionCandidate& c);
UnionCandidate union_candidate_from_json(const json& j);

json to_json(const Snippet& s);
json to_json(const SearchResult& r);
json to_json(const SearchResponse& r);

json to_json(const AugmentationSpec& spec);
AugmentationSpec spec_from_json(const json& j);
json to_json(const AugmentProvenance& p);

/// Join spec whose pairs are the candidate's pairs (spatial pairs expand
/// to a latitude and a longitude pair); aggregations are left to defaults.
AugmentationSpec spec_from_candidate(const Augmentation& candidate);

std::string_view to_string(PairKind kind) noexcept;
std::string_view to_string(RelatedMode mode) noexcept;

}  // namespace dse
