#include "dse/ingest.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <optional>
#include <thread>

#include "dse/error.hpp"
#include "dse/hashing.hpp"
#include "dse/strings.hpp"

namespace fs = std::filesystem;

namespace dse {

LocalDirPlugin::LocalDirPlugin(std::string name, fs::path dir) : name_(std::move(name)), dir_(std::move(dir)) {}

std::vector<ListingEntry> LocalDirPlugin::list(std::size_t limit) {
  std::error_code ec;
  if (!fs::is_directory(dir_, ec)) {
    throw Error(ErrorCode::PluginUnavailable, "not a directory: " + dir_.string());
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir_)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ListingEntry> out;
  for (const auto& f : files) {
    if (limit != 0 && out.size() == limit) break;
    out.push_back({fs::absolute(f).lexically_normal().string(), f.stem().string(), ""});
  }
  return out;
}

FetchedDataset LocalDirPlugin::fetch(const std::string& locator) {
  const fs::path p(locator);
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) throw Error(ErrorCode::SourceGone, "file is gone: " + locator);
  FetchedDataset d;
  try {
    d.bytes = read_file(p);
  } catch (const Error& e) {
    throw Error(ErrorCode::PluginUnavailable, e.what());
  }
  d.title = p.stem().string();
  return d;
}

bool looks_like_csv(std::string_view locator, std::string_view content_type) {
  const auto ct = to_lower(content_type);
  if (ct.starts_with("text/csv") || ct.starts_with("application/csv")) return true;
  auto path = to_lower(locator);
  if (const auto q = path.find('?'); q != std::string::npos) path.resize(q);
  return path.ends_with(".csv");
}

namespace {

// Servers often label CSV exports as plain text or raw bytes.
bool csv_compatible(std::string_view content_type) {
  const auto ct = to_lower(content_type);
  return ct.empty() || looks_like_csv("", ct) || ct.starts_with("text/plain") ||
         ct.starts_with("application/octet-stream");
}

}  // namespace

DiscoveryResult discover(DiscoveryPlugin& plugin, DatasetCache& cache, std::size_t limit, std::size_t workers) {
  DiscoveryResult result;
  std::vector<ListingEntry> todo;
  for (auto& entry : plugin.list(0)) {
    if (!looks_like_csv(entry.locator, "")) {
      result.skipped.push_back({entry.locator, "not a CSV payload"});
      continue;
    }
    if (limit != 0 && todo.size() == limit) break;
    todo.push_back(std::move(entry));
  }

  std::vector<std::optional<RawDataset>> slots(todo.size());
  std::vector<std::optional<std::string>> failures(todo.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      try {
        auto fetched = plugin.fetch(todo[i].locator);
        if (!csv_compatible(fetched.content_type)) {
          failures[i] = "content type " + fetched.content_type + " is not CSV";
          continue;
        }
        RawDataset raw;
        raw.locator = todo[i].locator;
        raw.title = todo[i].title.empty() ? fetched.title : todo[i].title;
        raw.description = todo[i].description.empty() ? fetched.description : todo[i].description;
        raw.provenance.source_plugin = plugin.name();
        raw.provenance.locator = todo[i].locator;
        raw.provenance.retrieved_at =
            std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
        raw.provenance.content_hash = cache.put(fetched.bytes);
        raw.provenance.bytes_size = fetched.bytes.size();
        raw.bytes = std::move(fetched.bytes);
        slots[i] = std::move(raw);
      } catch (const Error& e) {
        failures[i] = std::string(to_string(e.code())) + ": " + e.what();
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(workers, todo.size()));
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(work);
  work();
  pool.clear();

  for (std::size_t i = 0; i < todo.size(); ++i) {
    if (slots[i]) {
      result.datasets.push_back(std::move(*slots[i]));
    } else {
      result.skipped.push_back({todo[i].locator, failures[i].value_or("fetch failed")});
    }
  }
  return result;
}

std::string materialize_bytes(const ProvenanceRecord& provenance, DatasetCache& cache, const PluginLookup& plugins) {
  if (auto bytes = cache.get(provenance.content_hash)) return std::move(*bytes);
  DiscoveryPlugin* plugin = plugins ? plugins(provenance.source_plugin) : nullptr;
  if (!plugin) {
    throw Error(ErrorCode::SourceGone,
                "dataset is not cached and plugin '" + provenance.source_plugin + "' cannot re-fetch it");
  }
  auto fetched = plugin->fetch(provenance.locator);
  if (sha256_hex(fetched.bytes) != provenance.content_hash) {
    throw Error(ErrorCode::HashMismatch, "source bytes changed since ingestion: " + provenance.locator);
  }
  cache.put(fetched.bytes);
  return std::move(fetched.bytes);
}

TableData materialize(const ProvenanceRecord& provenance, DatasetCache& cache, const PluginLookup& plugins) {
  return parse_dataset_bytes(materialize_bytes(provenance, cache, plugins));
}

TableData parse_dataset_bytes(std::string_view bytes) { return parse_csv(sanitize_utf8(bytes)); }

}  // namespace dse
