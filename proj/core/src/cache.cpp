#include "dse/cache.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

#include "dse/error.hpp"
#include "dse/hashing.hpp"

namespace fs = std::filesystem;

namespace dse {

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  static std::atomic<std::uint64_t> counter{0};
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
         std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot rename into " + path.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

DatasetCache::DatasetCache(fs::path root, std::uint64_t max_bytes)
    : root_(std::move(root)), max_bytes_(max_bytes) {
  fs::create_directories(root_);
  struct Found {
    std::string hash;
    std::uint64_t size;
    fs::file_time_type mtime;
  };
  std::vector<Found> found;
  for (const auto& shard : fs::directory_iterator(root_)) {
    if (!shard.is_directory()) continue;
    for (const auto& f : fs::directory_iterator(shard.path())) {
      if (!f.is_regular_file() || f.path().extension() != ".csv") continue;
      found.push_back({f.path().stem().string(), f.file_size(), f.last_write_time()});
    }
  }
  std::sort(found.begin(), found.end(), [](const Found& a, const Found& b) { return a.mtime > b.mtime; });
  for (const auto& f : found) {
    lru_.push_back(f.hash);
    entries_[f.hash] = {f.size, std::prev(lru_.end())};
    total_ += f.size;
  }
}

fs::path DatasetCache::path_for(std::string_view hash) const {
  const std::string h(hash);
  return root_ / h.substr(0, 2) / (h + ".csv");
}

void DatasetCache::touch(const std::string& hash) {
  auto& e = entries_.at(hash);
  lru_.splice(lru_.begin(), lru_, e.lru);
}

void DatasetCache::evict_locked(const std::string& keep) {
  while (total_ > max_bytes_ && !lru_.empty()) {
    auto victim = std::prev(lru_.end());
    if (*victim == keep) {
      if (lru_.size() == 1) break;
      victim = std::prev(victim);
    }
    std::error_code ec;
    fs::remove(path_for(*victim), ec);
    total_ -= entries_.at(*victim).size;
    entries_.erase(*victim);
    lru_.erase(victim);
  }
}

std::string DatasetCache::put(std::string_view bytes) {
  auto hash = sha256_hex(bytes);
  std::lock_guard lock(mutex_);
  if (entries_.contains(hash)) {
    touch(hash);
    return hash;
  }
  write_file_atomic(path_for(hash), bytes);
  lru_.push_front(hash);
  entries_[hash] = {bytes.size(), lru_.begin()};
  total_ += bytes.size();
  evict_locked(hash);
  return hash;
}

std::optional<std::string> DatasetCache::get(std::string_view hash) {
  const std::string h(hash);
  std::lock_guard lock(mutex_);
  if (!entries_.contains(h)) return std::nullopt;
  std::string bytes;
  try {
    bytes = read_file(path_for(h));
  } catch (const Error&) {
    bytes.clear();
  }
  if (sha256_hex(bytes) != h) {
    std::error_code ec;
    fs::remove(path_for(h), ec);
    total_ -= entries_.at(h).size;
    lru_.erase(entries_.at(h).lru);
    entries_.erase(h);
    return std::nullopt;
  }
  touch(h);
  return bytes;
}

bool DatasetCache::contains(std::string_view hash) const {
  std::lock_guard lock(mutex_);
  return entries_.contains(std::string(hash));
}

bool DatasetCache::remove(std::string_view hash) {
  const std::string h(hash);
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(h);
  if (it == entries_.end()) return false;
  std::error_code ec;
  fs::remove(path_for(h), ec);
  total_ -= it->second.size;
  lru_.erase(it->second.lru);
  entries_.erase(it);
  return true;
}

std::uint64_t DatasetCache::total_bytes() const {
  std::lock_guard lock(mutex_);
  return total_;
}

std::size_t DatasetCache::entry_count() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

}  // namespace dse
