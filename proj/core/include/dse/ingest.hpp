#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dse/cache.hpp"
#include "dse/profile.hpp"
#include "dse/table.hpp"

namespace dse {

struct ListingEntry {
  std::string locator;
  std::string title;
  std::string description;
};

struct FetchedDataset {
  std::string bytes;
  std::string content_type;  // may be empty
  std::string title;
  std::string description;
};

/// A source of datasets. list() and fetch() may be called from several
/// threads at once.
class DiscoveryPlugin {
 public:
  virtual ~DiscoveryPlugin() = default;
  virtual std::string name() const = 0;
  /// At most `limit` entries (0 = no limit), in a stable order.
  virtual std::vector<ListingEntry> list(std::size_t limit) = 0;
  /// Throws SourceGone when the locator no longer resolves and
  /// PluginUnavailable on transport failures.
  virtual FetchedDataset fetch(const std::string& locator) = 0;
};

/// Every regular file directly inside a directory, sorted by file name.
class LocalDirPlugin : public DiscoveryPlugin {
 public:
  LocalDirPlugin(std::string name, std::filesystem::path dir);
  std::string name() const override { return name_; }
  std::vector<ListingEntry> list(std::size_t limit) override;
  FetchedDataset fetch(const std::string& locator) override;

 private:
  std::string name_;
  std::filesystem::path dir_;
};

struct RawDataset {
  std::string locator;
  std::string title;
  std::string description;
  std::string bytes;
  ProvenanceRecord provenance;
};

struct SkippedItem {
  std::string locator;
  std::string reason;
};

struct DiscoveryResult {
  std::vector<RawDataset> datasets;  // listing order
  std::vector<SkippedItem> skipped;
};

/// True for a .csv locator or a text/csv content type.
bool looks_like_csv(std::string_view locator, std::string_view content_type);

/// Lists the plugin, keeps the first `limit` CSV entries (0 = all),
/// fetches them on a pool of `workers` threads and stores every payload
/// in the cache. Non-CSV entries and per-item fetch failures are reported
/// in `skipped`; a listing failure propagates.
DiscoveryResult discover(DiscoveryPlugin& plugin, DatasetCache& cache, std::size_t limit = 0,
                         std::size_t workers = 4);

using PluginLookup = std::function<DiscoveryPlugin*(std::string_view name)>;

/// Cached bytes when present, otherwise a verified re-fetch through the
/// plugin named in the record. Throws HashMismatch when the source bytes
/// changed and SourceGone when they cannot be retrieved.
std::string materialize_bytes(const ProvenanceRecord& provenance, DatasetCache& cache,
                              const PluginLookup& plugins);
TableData materialize(const ProvenanceRecord& provenance, DatasetCache& cache, const PluginLookup& plugins);

/// Decodes CSV bytes the way ingestion does (UTF-8 repair, RFC-4180).
TableData parse_dataset_bytes(std::string_view bytes);

}  // namespace dse
