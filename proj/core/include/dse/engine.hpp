#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "dse/augment.hpp"
#include "dse/cache.hpp"
#include "dse/config.hpp"
#include "dse/gazetteer.hpp"
#include "dse/index.hpp"
#include "dse/ingest.hpp"
#include "dse/search.hpp"

namespace dse {

enum class IngestOutcome { Indexed, Unchanged, Skipped, Failed };
std::string_view to_string(IngestOutcome o) noexcept;

struct IngestItem {
  std::string plugin;
  std::string locator;
  std::string id;  // empty unless profiled
  IngestOutcome outcome = IngestOutcome::Skipped;
  std::string reason;
};

struct IngestReport {
  std::vector<IngestItem> items;
  std::size_t count(IngestOutcome o) const;
};

struct UploadResult {
  std::string id;
  DatasetProfile profile;
  bool created = false;  // false: identical bytes were already indexed
};

struct DatasetListing {
  std::string id;
  std::string name;
  std::string source;
  std::size_t row_count = 0;
};

struct CorpusStats {
  std::size_t dataset_count = 0;
  std::map<std::string, std::size_t> per_source;
  std::map<std::string, std::size_t> per_type;  // column counts by effective type
};

/// The library facade used by the CLI and the HTTP service. Reads run
/// concurrently against a consistent index snapshot; mutations are
/// serialized through one writer and persisted when an index path is set.
class Engine {
 public:
  /// Loads the index at config.index_path when one exists.
  explicit Engine(EngineConfig config);
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const EngineConfig& config() const noexcept { return config_; }
  const Gazetteer& gazetteer() const noexcept { return *gazetteer_; }
  DatasetCache& cache() noexcept { return cache_; }

  /// Adds (or replaces) a plugin beyond those in the config.
  void add_plugin(std::unique_ptr<DiscoveryPlugin> plugin);
  std::vector<std::string> plugin_names() const;

  /// Discover, profile and index. With no name every configured plugin
  /// runs; an unknown name throws InvalidConfig.
  IngestReport ingest(const std::optional<std::string>& plugin = std::nullopt, std::size_t limit = 0);

  /// Profiles CSV bytes without indexing them (related-file queries).
  DatasetProfile profile_bytes(std::string_view csv_bytes, const DatasetMeta& meta) const;

  /// Validates custom metadata, profiles, caches and indexes the upload.
  UploadResult upload(std::string_view csv_bytes, DatasetMeta meta);

  SearchResponse search(const Query& query) const;
  std::optional<DatasetProfile> dataset(std::string_view id) const;
  std::vector<DatasetListing> list() const;  // by id
  /// Raw bytes of an indexed dataset. Throws NotFound for unknown ids.
  std::string download(std::string_view id);
  TableData table(std::string_view id);

  /// `left_id` is recorded in the provenance only. Missing aggregations
  /// get the defaults.
  AugmentedTable augment(const TableData& left, std::string left_id, std::string_view right_id,
                         AugmentationSpec spec);
  AugmentedTable augment(std::string_view left_id, std::string_view right_id, AugmentationSpec spec);

  CorpusStats stats() const;
  std::uint64_t generation() const;
  std::size_t size() const;
  void persist() const;

 private:
  void commit(std::vector<DatasetProfile> profiles);
  DiscoveryPlugin* plugin(std::string_view name) const;

  EngineConfig config_;
  std::unique_ptr<Gazetteer> gazetteer_;
  SearchOptions search_options_;
  DatasetCache cache_;
  std::map<std::string, std::unique_ptr<DiscoveryPlugin>, std::less<>> plugins_;

  std::mutex writer_;
  mutable std::mutex persist_mutex_;
  mutable std::shared_mutex mutex_;
  Index index_;
};

/// Builds a plugin from its config block.
std::unique_ptr<DiscoveryPlugin> make_plugin(const PluginConfig& config);

}  // namespace dse
