#pragma once

#include <cstdint>
#include <filesystem>
#include <list>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace dse {

/// Content-addressed store of raw dataset bytes, laid out as
/// <root>/<first two hex digits>/<sha256>.csv. Writes are atomic
/// (temp file + rename). Once total size exceeds the cap, least recently
/// used entries are evicted; the entry just written is never evicted.
///
/// Safe for concurrent use within one process.
class DatasetCache {
 public:
  static constexpr std::uint64_t kDefaultMaxBytes = std::uint64_t{1} << 30;

  explicit DatasetCache(std::filesystem::path root, std::uint64_t max_bytes = kDefaultMaxBytes);

  /// Stores the bytes and returns their sha256 hex digest.
  std::string put(std::string_view bytes);
  /// Verified read; a corrupted entry is dropped and reported as a miss.
  std::optional<std::string> get(std::string_view hash);
  bool contains(std::string_view hash) const;
  bool remove(std::string_view hash);

  std::filesystem::path path_for(std::string_view hash) const;
  const std::filesystem::path& root() const noexcept { return root_; }
  std::uint64_t total_bytes() const;
  std::uint64_t max_bytes() const noexcept { return max_bytes_; }
  std::size_t entry_count() const;

 private:
  struct Entry {
    std::uint64_t size = 0;
    std::list<std::string>::iterator lru;
  };

  void touch(const std::string& hash);
  void evict_locked(const std::string& keep);

  std::filesystem::path root_;
  std::uint64_t max_bytes_;
  mutable std::mutex mutex_;
  std::list<std::string> lru_;  // front = most recent
  std::unordered_map<std::string, Entry> entries_;
  std::uint64_t total_ = 0;
};

/// Writes through a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace dse
