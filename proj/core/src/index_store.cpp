#include <cstring>
#include <fstream>
#include <sstream>

#include "dse/error.hpp"
#include "dse/hashing.hpp"
#include "dse/index.hpp"
#include "dse/serialize.hpp"

namespace dse {

namespace {

constexpr char kMagic[5] = {'A', 'D', 'S', 'I', '1'};
constexpr std::uint32_t kFormatVersion = 1;

class Writer {
 public:
  explicit Writer(std::uint32_t kind) {
    out_.append(kMagic, sizeof kMagic);
    u32(kFormatVersion);
    u32(kind);
  }
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f64(double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    u64(bits);
  }
  void str(std::string_view s) {
    u64(s.size());
    out_.append(s);
  }
  const std::string& bytes() const { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(std::string_view data, std::uint32_t kind, const std::string& name) : data_(data), name_(name) {
    if (data_.size() < sizeof kMagic || std::memcmp(data_.data(), kMagic, sizeof kMagic) != 0) {
      throw Error(ErrorCode::VersionUnsupported, name_ + ": bad magic header");
    }
    pos_ = sizeof kMagic;
    if (u32() != kFormatVersion) throw Error(ErrorCode::VersionUnsupported, name_ + ": unsupported version");
    if (u32() != kind) throw Error(ErrorCode::VersionUnsupported, name_ + ": unexpected file kind");
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() {
    const auto bits = u64();
    double v = 0;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::string str() {
    const auto n = u64();
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  void finish() const {
    if (pos_ != data_.size()) throw Error(ErrorCode::ChecksumMismatch, name_ + ": trailing bytes");
  }

 private:
  void need(std::uint64_t n) const {
    if (n > data_.size() - pos_) throw Error(ErrorCode::ChecksumMismatch, name_ + ": truncated");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
  std::string name_;
};

enum FileKind : std::uint32_t { kKeyword = 1, kNumeric = 2, kTemporal = 3, kSpatial = 4, kLsh = 5 };

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::ChecksumMismatch, "missing index file " + p.filename().string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& bytes) {
  const auto tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "short write to " + tmp);
  }
  std::filesystem::rename(tmp, p);
}

}  // namespace

// Friend of Index: (de)serialises its private structures.
class IndexStore {
 public:
  static std::string keyword(const Index& ix) {
    Writer w(kKeyword);
    w.u64(ix.doc_length_.size());
    for (const auto& [id, len] : ix.doc_length_) {
      w.str(id);
      w.f64(len);
    }
    w.f64(ix.total_doc_length_);
    std::map<std::string, const std::vector<Index::Posting>*> sorted;
    for (const auto& [term, list] : ix.postings_) sorted.emplace(term, &list);
    w.u64(sorted.size());
    for (const auto& [term, list] : sorted) {
      w.str(term);
      w.u64(list->size());
      for (const auto& p : *list) {
        w.str(p.dataset_id);
        w.f64(p.weight);
      }
    }
    return w.bytes();
  }

  static void keyword(Index& ix, std::string_view data) {
    Reader r(data, kKeyword, "keyword.bin");
    for (auto n = r.u64(); n > 0; --n) {
      auto id = r.str();
      ix.doc_length_[id] = r.f64();
    }
    ix.total_doc_length_ = r.f64();
    for (auto n = r.u64(); n > 0; --n) {
      auto term = r.str();
      auto& list = ix.postings_[term];
      for (auto m = r.u64(); m > 0; --m) {
        auto id = r.str();
        list.push_back({std::move(id), r.f64()});
      }
    }
    r.finish();
  }

  static std::string ranges(const Index::SortedIntervals<Index::RangeEntry>& s, std::uint32_t kind) {
    Writer w(kind);
    w.u64(s.entries.size());
    for (const auto& e : s.entries) {
      w.f64(e.lo);
      w.f64(e.hi);
      w.str(e.dataset_id);
      w.str(e.column);
      w.u8(e.resolution.has_value());
      w.u8(e.resolution ? static_cast<std::uint8_t>(*e.resolution) : 0);
      w.u64(e.ranges.size());
      for (const auto& r : e.ranges) {
        w.f64(r.lo);
        w.f64(r.hi);
        w.u64(r.count);
      }
    }
    return w.bytes();
  }

  static void ranges(Index::SortedIntervals<Index::RangeEntry>& s, std::string_view data,
                     std::uint32_t kind, const std::string& name) {
    Reader r(data, kind, name);
    s.entries.resize(r.u64());
    double running = -std::numeric_limits<double>::infinity();
    for (auto& e : s.entries) {
      e.lo = r.f64();
      e.hi = r.f64();
      e.dataset_id = r.str();
      e.column = r.str();
      const bool has_res = r.u8() != 0;
      const auto res = r.u8();
      if (has_res) {
        if (res > static_cast<std::uint8_t>(Resolution::Year)) throw Error(ErrorCode::VersionUnsupported, name + ": bad resolution");
        e.resolution = static_cast<Resolution>(res);
      }
      e.ranges.resize(r.u64());
      for (auto& v : e.ranges) {
        v.lo = r.f64();
        v.hi = r.f64();
        v.count = r.u64();
      }
      running = std::max(running, e.hi);
      s.prefix_max_hi.push_back(running);
    }
    r.finish();
  }

  static std::string spatial(const Index& ix) {
    Writer w(kSpatial);
    w.u64(ix.spatial_.entries.size());
    for (const auto& e : ix.spatial_.entries) {
      w.f64(e.hull.lat_min);
      w.f64(e.hull.lat_max);
      w.f64(e.hull.lon_min);
      w.f64(e.hull.lon_max);
      w.str(e.dataset_id);
      w.str(e.lat_column);
      w.str(e.lon_column);
      w.u64(e.boxes.size());
      for (const auto& b : e.boxes) {
        w.f64(b.lat_min);
        w.f64(b.lat_max);
        w.f64(b.lon_min);
        w.f64(b.lon_max);
        w.u64(b.count);
      }
    }
    return w.bytes();
  }

  static void spatial(Index& ix, std::string_view data) {
    Reader r(data, kSpatial, "spatial.bin");
    auto& s = ix.spatial_;
    s.entries.resize(r.u64());
    double running = -std::numeric_limits<double>::infinity();
    for (auto& e : s.entries) {
      e.hull.lat_min = r.f64();
      e.hull.lat_max = r.f64();
      e.hull.lon_min = r.f64();
      e.hull.lon_max = r.f64();
      e.dataset_id = r.str();
      e.lat_column = r.str();
      e.lon_column = r.str();
      e.boxes.resize(r.u64());
      for (auto& b : e.boxes) {
        b.lat_min = r.f64();
        b.lat_max = r.f64();
        b.lon_min = r.f64();
        b.lon_max = r.f64();
        b.count = r.u64();
      }
      running = std::max(running, e.hull.lat_max);
      s.prefix_max_hi.push_back(running);
    }
    r.finish();
  }

  static std::string lsh(const Index& ix) {
    Writer w(kLsh);
    w.u64(ix.lsh_.bands);
    w.u64(ix.lsh_.rows);
    for (const auto& table : ix.lsh_tables_) {
      std::map<std::uint64_t, const std::vector<ColumnRef>*> sorted;
      for (const auto& [key, refs] : table) sorted.emplace(key, &refs);
      w.u64(sorted.size());
      for (const auto& [key, refs] : sorted) {
        w.u64(key);
        w.u64(refs->size());
        for (const auto& ref : *refs) {
          w.str(ref.dataset_id);
          w.str(ref.column);
        }
      }
    }
    return w.bytes();
  }

  static void lsh(Index& ix, std::string_view data) {
    Reader r(data, kLsh, "lsh.bin");
    const auto bands = r.u64();
    const auto rows = r.u64();
    if (bands != ix.lsh_.bands || rows != ix.lsh_.rows) {
      throw Error(ErrorCode::VersionUnsupported, "lsh.bin: banding differs from manifest");
    }
    for (auto& table : ix.lsh_tables_) {
      for (auto n = r.u64(); n > 0; --n) {
        const auto key = r.u64();
        auto& refs = table[key];
        for (auto m = r.u64(); m > 0; --m) {
          auto id = r.str();
          refs.push_back({std::move(id), r.str()});
        }
      }
    }
    r.finish();
  }

  static void persist(const Index& ix, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::string profiles;
    for (const auto& [id, p] : ix.profiles_) {
      profiles += to_json(p).dump();
      profiles.push_back('\n');
    }
    const std::vector<std::pair<std::string, std::string>> files = {
        {"profiles.jsonl", profiles},
        {"keyword.bin", keyword(ix)},
        {"numeric.bin", ranges(ix.numeric_, kNumeric)},
        {"temporal.bin", ranges(ix.temporal_, kTemporal)},
        {"spatial.bin", spatial(ix)},
        {"lsh.bin", lsh(ix)},
    };
    json manifest = {{"format", "ADSI1"},
                     {"version", kFormatVersion},
                     {"generation", ix.generation_},
                     {"dataset_count", ix.profiles_.size()},
                     {"lsh", {{"bands", ix.lsh_.bands}, {"rows", ix.lsh_.rows}}},
                     {"files", json::object()}};
    for (const auto& [name, bytes] : files) {
      write_file(dir / name, bytes);
      manifest["files"][name] = {{"sha256", sha256_hex(bytes)}, {"size", bytes.size()}};
    }
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  }

  static Index load(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    if (!std::filesystem::exists(manifest_path)) {
      throw Error(ErrorCode::EmptyIndex, "no index manifest in " + dir.string());
    }
    json manifest;
    try {
      manifest = json::parse(read_file(manifest_path));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ChecksumMismatch, std::string("unreadable manifest: ") + e.what());
    }
    if (manifest.value("format", "") != "ADSI1" || manifest.value("version", 0u) != kFormatVersion) {
      throw Error(ErrorCode::VersionUnsupported, "unsupported index format");
    }
    std::map<std::string, std::string> contents;
    for (const auto& [name, meta] : manifest.at("files").items()) {
      auto bytes = read_file(dir / name);
      if (bytes.size() != meta.at("size").get<std::size_t>() || sha256_hex(bytes) != meta.at("sha256").get<std::string>()) {
        throw Error(ErrorCode::ChecksumMismatch, "checksum mismatch in " + name);
      }
      contents.emplace(name, std::move(bytes));
    }
    for (const char* required : {"profiles.jsonl", "keyword.bin", "numeric.bin", "temporal.bin", "spatial.bin", "lsh.bin"}) {
      if (!contents.contains(required)) throw Error(ErrorCode::ChecksumMismatch, std::string("manifest lacks ") + required);
    }

    Index ix(LshParams{manifest.at("lsh").at("bands").get<std::size_t>(), manifest.at("lsh").at("rows").get<std::size_t>()});
    std::istringstream lines(contents["profiles.jsonl"]);
    for (std::string line; std::getline(lines, line);) {
      if (line.empty()) continue;
      auto p = profile_from_json(json::parse(line));
      ix.profiles_.emplace(p.id, std::move(p));
    }
    keyword(ix, contents["keyword.bin"]);
    ranges(ix.numeric_, contents["numeric.bin"], kNumeric, "numeric.bin");
    ranges(ix.temporal_, contents["temporal.bin"], kTemporal, "temporal.bin");
    spatial(ix, contents["spatial.bin"]);
    lsh(ix, contents["lsh.bin"]);
    ix.generation_ = manifest.at("generation").get<std::uint64_t>();
    return ix;
  }
};

void Index::persist(const std::filesystem::path& dir) const { IndexStore::persist(*this, dir); }

Index Index::load(const std::filesystem::path& dir) { return IndexStore::load(dir); }

}  // namespace dse
