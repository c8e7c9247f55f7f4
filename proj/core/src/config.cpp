#include "dse/config.hpp"

#include <cstdlib>
#include <set>

#include "dse/error.hpp"
#include "dse/strings.hpp"

namespace fs = std::filesystem;

namespace dse {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) bad(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
      bad("unknown key '" + k + "' in " + where);
    }
  }
}

fs::path resolve(const json& v, const fs::path& base, const std::string& key) {
  if (!v.is_string()) bad(key + " must be a string");
  fs::path p = v.get<std::string>();
  return p.is_relative() && !base.empty() ? base / p : p;
}

template <typename T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("wrong type for '") + key + "'");
  }
}

std::string_view to_string(MetadataFieldType t) {
  switch (t) {
    case MetadataFieldType::String: return "string";
    case MetadataFieldType::Number: return "number";
    case MetadataFieldType::Enum: return "enum";
  }
  return "string";
}

}  // namespace

std::pair<std::string, int> parse_listen(const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos || colon == 0) bad("listen must be host:port, got '" + listen + "'");
  const auto port = parse_number(listen.substr(colon + 1));
  if (!port || *port < 0 || *port > 65535 || *port != static_cast<int>(*port)) bad("bad port in '" + listen + "'");
  return {listen.substr(0, colon), static_cast<int>(*port)};
}

EngineConfig config_from_json(const json& j, const fs::path& base) {
  only_keys(j,
            {"index_path", "cache_path", "cache_max_bytes", "listen", "plugins", "profiler", "ranking",
             "custom_metadata_fields", "gazetteer_path", "static_dir", "fetch_workers"},
            "config");
  EngineConfig c;
  c.index_path = base.empty() ? c.index_path : base / c.index_path;
  c.cache_path = base.empty() ? c.cache_path : base / c.cache_path;
  if (j.contains("index_path")) c.index_path = resolve(j["index_path"], base, "index_path");
  if (j.contains("cache_path")) c.cache_path = resolve(j["cache_path"], base, "cache_path");
  if (j.contains("gazetteer_path")) c.gazetteer_path = resolve(j["gazetteer_path"], base, "gazetteer_path");
  if (j.contains("static_dir")) c.static_dir = resolve(j["static_dir"], base, "static_dir");
  c.cache_max_bytes = get<std::uint64_t>(j, "cache_max_bytes", c.cache_max_bytes);
  c.listen = get<std::string>(j, "listen", c.listen);
  parse_listen(c.listen);
  c.fetch_workers = get<std::size_t>(j, "fetch_workers", c.fetch_workers);
  if (c.fetch_workers == 0) bad("fetch_workers must be positive");

  std::set<std::string> plugin_names;
  for (const auto& p : j.value("plugins", json::array())) {
    only_keys(p, {"name", "type", "path", "base_url", "page_size"}, "plugin");
    PluginConfig pc;
    pc.name = get<std::string>(p, "name", "");
    pc.type = get<std::string>(p, "type", "");
    if (pc.name.empty()) bad("plugin without a name");
    if (!plugin_names.insert(pc.name).second) bad("duplicate plugin name '" + pc.name + "'");
    if (pc.type == "local_dir") {
      if (!p.contains("path")) bad("local_dir plugin '" + pc.name + "' needs a path");
      pc.path = resolve(p["path"], base, "path");
    } else if (pc.type == "socrata") {
      pc.base_url = get<std::string>(p, "base_url", "");
      if (pc.base_url.empty()) bad("socrata plugin '" + pc.name + "' needs a base_url");
    } else {
      bad("unknown plugin type '" + pc.type + "'");
    }
    pc.page_size = get<std::size_t>(p, "page_size", pc.page_size);
    if (pc.page_size == 0) bad("page_size must be positive");
    c.plugins.push_back(std::move(pc));
  }

  if (j.contains("profiler")) {
    const auto& p = j["profiler"];
    only_keys(p,
              {"summary_ranges", "permutations", "numeric_threshold", "temporal_threshold", "null_literals",
               "sample_rows", "top_values"},
              "profiler");
    auto& pr = c.profiler;
    pr.summary_ranges = get<std::size_t>(p, "summary_ranges", pr.summary_ranges);
    pr.permutations = get<std::size_t>(p, "permutations", pr.permutations);
    pr.numeric_threshold = get<double>(p, "numeric_threshold", pr.numeric_threshold);
    pr.temporal_threshold = get<double>(p, "temporal_threshold", pr.temporal_threshold);
    pr.null_literals = get<std::vector<std::string>>(p, "null_literals", pr.null_literals);
    for (auto& n : pr.null_literals) n = fold_value(n);
    pr.sample_rows = get<std::size_t>(p, "sample_rows", pr.sample_rows);
    pr.top_values = get<std::size_t>(p, "top_values", pr.top_values);
    if (pr.summary_ranges == 0) bad("summary_ranges must be positive");
    if (pr.permutations == 0 || pr.permutations > 1024) bad("permutations must be in [1, 1024]");
    for (double t : {pr.numeric_threshold, pr.temporal_threshold}) {
      if (!(t > 0 && t <= 1)) bad("thresholds must be in (0, 1]");
    }
  }

  if (j.contains("ranking")) {
    const auto& r = j["ranking"];
    only_keys(r, {"keyword", "filter", "related", "join_floor", "union_threshold"}, "ranking");
    auto& s = c.search;
    s.weights.keyword = get<double>(r, "keyword", s.weights.keyword);
    s.weights.filter = get<double>(r, "filter", s.weights.filter);
    s.weights.related = get<double>(r, "related", s.weights.related);
    s.join_floor = get<double>(r, "join_floor", s.join_floor);
    s.union_threshold = get<double>(r, "union_threshold", s.union_threshold);
    for (double w : {s.weights.keyword, s.weights.filter, s.weights.related}) {
      if (!(w >= 0)) bad("ranking weights must be nonnegative");
    }
  }

  std::set<std::string> field_names;
  for (const auto& f : j.value("custom_metadata_fields", json::array())) {
    only_keys(f, {"name", "type", "required", "enum_values"}, "custom_metadata_fields entry");
    MetadataField mf;
    mf.name = get<std::string>(f, "name", "");
    if (mf.name.empty()) bad("custom metadata field without a name");
    if (!field_names.insert(mf.name).second) bad("duplicate custom metadata field '" + mf.name + "'");
    const auto type = get<std::string>(f, "type", "string");
    if (type == "string") {
      mf.type = MetadataFieldType::String;
    } else if (type == "number") {
      mf.type = MetadataFieldType::Number;
    } else if (type == "enum") {
      mf.type = MetadataFieldType::Enum;
    } else {
      bad("custom metadata field '" + mf.name + "' has unknown type '" + type + "'");
    }
    mf.required = get<bool>(f, "required", false);
    mf.enum_values = get<std::vector<std::string>>(f, "enum_values", {});
    if (mf.type == MetadataFieldType::Enum && mf.enum_values.empty()) {
      bad("enum field '" + mf.name + "' needs enum_values");
    }
    c.custom_metadata_fields.push_back(std::move(mf));
  }
  return c;
}

EngineConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error&) {
    bad("cannot read config file " + path.string());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad(path.string() + ": " + e.what());
  }
  return config_from_json(j, fs::absolute(path).parent_path());
}

json to_json(const EngineConfig& c) {
  json plugins = json::array();
  for (const auto& p : c.plugins) {
    json e{{"name", p.name}, {"type", p.type}, {"page_size", p.page_size}};
    if (p.type == "local_dir") e["path"] = p.path.string();
    if (p.type == "socrata") e["base_url"] = p.base_url;
    plugins.push_back(std::move(e));
  }
  json fields = json::array();
  for (const auto& f : c.custom_metadata_fields) {
    json e{{"name", f.name}, {"type", to_string(f.type)}, {"required", f.required}};
    if (!f.enum_values.empty()) e["enum_values"] = f.enum_values;
    fields.push_back(std::move(e));
  }
  json out{
      {"index_path", c.index_path.string()},
      {"cache_path", c.cache_path.string()},
      {"cache_max_bytes", c.cache_max_bytes},
      {"listen", c.listen},
      {"plugins", plugins},
      {"profiler",
       {{"summary_ranges", c.profiler.summary_ranges},
        {"permutations", c.profiler.permutations},
        {"numeric_threshold", c.profiler.numeric_threshold},
        {"temporal_threshold", c.profiler.temporal_threshold},
        {"null_literals", c.profiler.null_literals},
        {"sample_rows", c.profiler.sample_rows},
        {"top_values", c.profiler.top_values}}},
      {"ranking",
       {{"keyword", c.search.weights.keyword},
        {"filter", c.search.weights.filter},
        {"related", c.search.weights.related},
        {"join_floor", c.search.join_floor},
        {"union_threshold", c.search.union_threshold}}},
      {"custom_metadata_fields", fields},
      {"fetch_workers", c.fetch_workers},
  };
  if (c.gazetteer_path) out["gazetteer_path"] = c.gazetteer_path->string();
  if (c.static_dir) out["static_dir"] = c.static_dir->string();
  return out;
}

void apply_env_overrides(EngineConfig& c) {
  if (const char* v = std::getenv("DSE_LISTEN"); v && *v) {
    parse_listen(v);
    c.listen = v;
  }
  if (const char* v = std::getenv("DSE_INDEX_PATH"); v && *v) c.index_path = v;
}

void validate_custom_metadata(const std::vector<MetadataField>& fields,
                              const std::map<std::string, std::string>& values) {
  std::vector<std::string> problems;
  for (const auto& f : fields) {
    const auto it = values.find(f.name);
    if (it == values.end() || trim(it->second).empty()) {
      if (f.required) problems.push_back("missing required field '" + f.name + "'");
      continue;
    }
    if (f.type == MetadataFieldType::Number && !parse_number(it->second)) {
      problems.push_back("field '" + f.name + "' must be a number");
    }
    if (f.type == MetadataFieldType::Enum &&
        std::find(f.enum_values.begin(), f.enum_values.end(), it->second) == f.enum_values.end()) {
      problems.push_back("field '" + f.name + "' must be one of its enum values");
    }
  }
  for (const auto& [k, v] : values) {
    if (std::none_of(fields.begin(), fields.end(), [&](const MetadataField& f) { return f.name == k; })) {
      problems.push_back("unknown field '" + k + "'");
    }
  }
  if (problems.empty()) return;
  std::string msg;
  for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
  throw Error(ErrorCode::MetadataInvalid, msg);
}

json metadata_schema(const std::vector<MetadataField>& fields) {
  json out = json::array();
  for (const auto& f : fields) {
    json e{{"name", f.name}, {"type", to_string(f.type)}, {"required", f.required}};
    if (f.type == MetadataFieldType::Enum) e["enum_values"] = f.enum_values;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace dse
