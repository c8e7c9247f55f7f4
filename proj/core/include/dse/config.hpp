#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dse/cache.hpp"
#include "dse/profile.hpp"
#include "dse/search.hpp"

namespace dse {

struct PluginConfig {
  std::string name;
  std::string type;  // "local_dir" or "socrata"
  std::filesystem::path path;
  std::string base_url;
  std::size_t page_size = 100;
};

enum class MetadataFieldType { String, Number, Enum };

struct MetadataField {
  std::string name;
  MetadataFieldType type = MetadataFieldType::String;
  bool required = false;
  std::vector<std::string> enum_values;
};

struct EngineConfig {
  std::filesystem::path index_path = "index";
  std::filesystem::path cache_path = "cache";
  std::uint64_t cache_max_bytes = DatasetCache::kDefaultMaxBytes;
  std::vector<PluginConfig> plugins;
  ProfilerConfig profiler;
  SearchOptions search;  // gazetteer pointer is filled in by the engine
  std::vector<MetadataField> custom_metadata_fields;
  std::string listen = "127.0.0.1:8080";
  std::optional<std::filesystem::path> gazetteer_path;
  std::optional<std::filesystem::path> static_dir;
  std::size_t fetch_workers = 4;
};

// Config file keys (JSON object; all optional):
//
//   index_path, cache_path        relative to the config file's directory
//   cache_max_bytes               integer
//   listen                        "host:port"
//   plugins                       [{name, type: local_dir|socrata, path | base_url, page_size}]
//   profiler                      {summary_ranges, permutations, numeric_threshold,
//                                  temporal_threshold, null_literals, sample_rows, top_values}
//   ranking                       {keyword, filter, related, join_floor, union_threshold}
//   custom_metadata_fields        [{name, type: string|number|enum, required, enum_values}]
//   gazetteer_path, static_dir    paths
//   fetch_workers                 integer
//
// Unknown keys are rejected so typos surface. Throws InvalidConfig.
EngineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
EngineConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const EngineConfig& config);

/// DSE_LISTEN and DSE_INDEX_PATH replace the corresponding keys.
void apply_env_overrides(EngineConfig& config);

/// Throws MetadataInvalid listing every problem (missing required fields,
/// unknown fields, non-numeric numbers, values outside an enum).
void validate_custom_metadata(const std::vector<MetadataField>& fields,
                              const std::map<std::string, std::string>& values);

/// The schema the upload form is generated from.
nlohmann::json metadata_schema(const std::vector<MetadataField>& fields);

/// "host:port" -> (host, port); throws InvalidConfig.
std::pair<std::string, int> parse_listen(const std::string& listen);

}  // namespace dse
