#include "dse/engine.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "dse/error.hpp"
#include "dse/hashing.hpp"
#include "dse/socrata.hpp"

namespace fs = std::filesystem;

namespace dse {

std::string_view to_string(IngestOutcome o) noexcept {
  switch (o) {
    case IngestOutcome::Indexed: return "indexed";
    case IngestOutcome::Unchanged: return "unchanged";
    case IngestOutcome::Skipped: return "skipped";
    case IngestOutcome::Failed: return "failed";
  }
  return "skipped";
}

std::size_t IngestReport::count(IngestOutcome o) const {
  return static_cast<std::size_t>(
      std::count_if(items.begin(), items.end(), [o](const IngestItem& i) { return i.outcome == o; }));
}

std::unique_ptr<DiscoveryPlugin> make_plugin(const PluginConfig& c) {
  if (c.type == "local_dir") return std::make_unique<LocalDirPlugin>(c.name, c.path);
  if (c.type == "socrata") {
    SocrataOptions o;
    o.name = c.name;
    o.base_url = c.base_url;
    o.page_size = c.page_size;
    return std::make_unique<SocrataPlugin>(o);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown plugin type '" + c.type + "'");
}

Engine::Engine(EngineConfig config)
    : config_(std::move(config)),
      gazetteer_(std::make_unique<Gazetteer>(config_.gazetteer_path ? Gazetteer::load(*config_.gazetteer_path)
                                                                    : Gazetteer::builtin())),
      search_options_(config_.search),
      cache_(config_.cache_path, config_.cache_max_bytes) {
  search_options_.gazetteer = gazetteer_.get();
  for (const auto& p : config_.plugins) plugins_[p.name] = make_plugin(p);
  if (!config_.index_path.empty() && fs::exists(config_.index_path / "manifest.json")) {
    index_ = Index::load(config_.index_path);
  }
}

Engine::~Engine() = default;

void Engine::add_plugin(std::unique_ptr<DiscoveryPlugin> plugin) {
  std::lock_guard lock(writer_);
  auto name = plugin->name();
  plugins_[name] = std::move(plugin);
}

std::vector<std::string> Engine::plugin_names() const {
  std::vector<std::string> out;
  for (const auto& [name, p] : plugins_) out.push_back(name);
  return out;
}

DiscoveryPlugin* Engine::plugin(std::string_view name) const {
  const auto it = plugins_.find(name);
  return it == plugins_.end() ? nullptr : it->second.get();
}

void Engine::commit(std::vector<DatasetProfile> profiles) {
  if (profiles.empty()) return;
  {
    std::unique_lock lock(mutex_);
    index_.add_datasets(std::move(profiles));
  }
  persist();
}

void Engine::persist() const {
  if (config_.index_path.empty()) return;
  std::lock_guard plock(persist_mutex_);
  std::shared_lock lock(mutex_);
  index_.persist(config_.index_path);
}

IngestReport Engine::ingest(const std::optional<std::string>& name, std::size_t limit) {
  std::lock_guard writer(writer_);
  std::vector<DiscoveryPlugin*> selected;
  if (name) {
    auto* p = plugin(*name);
    if (!p) throw Error(ErrorCode::InvalidConfig, "no plugin named '" + *name + "'");
    selected.push_back(p);
  } else {
    for (const auto& [n, p] : plugins_) selected.push_back(p.get());
  }

  IngestReport report;
  std::vector<DatasetProfile> fresh;
  std::set<std::string> seen;
  for (auto* p : selected) {
    auto found = discover(*p, cache_, limit, config_.fetch_workers);
    for (auto& s : found.skipped) {
      report.items.push_back({p->name(), s.locator, "", IngestOutcome::Skipped, s.reason});
    }
    for (auto& raw : found.datasets) {
      IngestItem item{p->name(), raw.locator, dataset_id_from_hash(raw.provenance.content_hash),
                      IngestOutcome::Indexed, ""};
      bool known;
      {
        std::shared_lock lock(mutex_);
        known = index_.get(item.id) != nullptr;
      }
      if (known || !seen.insert(item.id).second) {
        item.outcome = IngestOutcome::Unchanged;
        report.items.push_back(std::move(item));
        continue;
      }
      try {
        DatasetMeta meta;
        meta.name = raw.title;
        meta.description = raw.description;
        meta.source = p->name();
        meta.provenance = raw.provenance;
        fresh.push_back(profile_table(parse_dataset_bytes(raw.bytes), config_.profiler, meta));
      } catch (const Error& e) {
        item.outcome = IngestOutcome::Failed;
        item.reason = std::string(to_string(e.code())) + ": " + e.what();
      }
      report.items.push_back(std::move(item));
    }
  }
  commit(std::move(fresh));
  return report;
}

DatasetProfile Engine::profile_bytes(std::string_view csv_bytes, const DatasetMeta& meta) const {
  DatasetMeta m = meta;
  if (!m.provenance) {
    ProvenanceRecord p;
    p.source_plugin = m.source.empty() ? "upload" : m.source;
    p.content_hash = sha256_hex(csv_bytes);
    p.bytes_size = csv_bytes.size();
    m.provenance = p;
  }
  return profile_table(parse_dataset_bytes(csv_bytes), config_.profiler, m);
}

UploadResult Engine::upload(std::string_view csv_bytes, DatasetMeta meta) {
  validate_custom_metadata(config_.custom_metadata_fields, meta.custom_metadata);
  const auto hash = sha256_hex(csv_bytes);
  const auto id = dataset_id_from_hash(hash);
  std::lock_guard writer(writer_);
  {
    std::shared_lock lock(mutex_);
    if (const auto* existing = index_.get(id)) return {id, *existing, false};
  }
  if (meta.source.empty()) meta.source = "upload";
  ProvenanceRecord p;
  p.source_plugin = "upload";
  p.locator = "upload:" + (meta.name.empty() ? id : meta.name);
  p.retrieved_at =
      std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
  p.content_hash = hash;
  p.bytes_size = csv_bytes.size();
  meta.provenance = p;
  auto profile = profile_table(parse_dataset_bytes(csv_bytes), config_.profiler, meta);
  cache_.put(csv_bytes);
  UploadResult result{profile.id, profile, true};
  commit({std::move(profile)});
  return result;
}

SearchResponse Engine::search(const Query& query) const {
  std::shared_lock lock(mutex_);
  return execute_query(query, index_, search_options_);
}

std::optional<DatasetProfile> Engine::dataset(std::string_view id) const {
  std::shared_lock lock(mutex_);
  const auto* p = index_.get(id);
  return p ? std::optional(*p) : std::nullopt;
}

std::vector<DatasetListing> Engine::list() const {
  std::shared_lock lock(mutex_);
  std::vector<DatasetListing> out;
  for (const auto& id : index_.ids()) {
    const auto& p = *index_.get(id);
    out.push_back({p.id, p.name, p.source, p.row_count});
  }
  return out;
}

std::string Engine::download(std::string_view id) {
  const auto profile = dataset(id);
  if (!profile) throw Error(ErrorCode::NotFound, "no dataset with id '" + std::string(id) + "'");
  return materialize_bytes(profile->provenance, cache_, [this](std::string_view name) { return plugin(name); });
}

TableData Engine::table(std::string_view id) { return parse_dataset_bytes(download(id)); }

AugmentedTable Engine::augment(const TableData& left, std::string left_id, std::string_view right_id,
                               AugmentationSpec spec) {
  const auto right = table(right_id);
  if (spec.mode == AugmentMode::Join) spec = with_default_aggregations(std::move(spec), right, config_.profiler);
  auto out = dse::augment(left, right, spec, config_.profiler);
  out.provenance.left_id = std::move(left_id);
  out.provenance.right_id = std::string(right_id);
  return out;
}

AugmentedTable Engine::augment(std::string_view left_id, std::string_view right_id, AugmentationSpec spec) {
  return augment(table(left_id), std::string(left_id), right_id, std::move(spec));
}

CorpusStats Engine::stats() const {
  std::shared_lock lock(mutex_);
  CorpusStats s;
  s.dataset_count = index_.size();
  for (const auto& id : index_.ids()) {
    const auto& p = *index_.get(id);
    ++s.per_source[p.source];
    for (const auto& c : p.columns) ++s.per_type[std::string(to_string(c.type()))];
  }
  return s;
}

std::uint64_t Engine::generation() const {
  std::shared_lock lock(mutex_);
  return index_.generation();
}

std::size_t Engine::size() const {
  std::shared_lock lock(mutex_);
  return index_.size();
}

}  // namespace dse
