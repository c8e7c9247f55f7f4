// engine: ingest, profile, search, augment and serve from the command line.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 data error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dse/config.hpp"
#include "dse/demo.hpp"
#include "dse/engine.hpp"
#include "dse/error.hpp"
#include "dse/hashing.hpp"
#include "dse/serialize.hpp"
#include "dse/service.hpp"
#include "dse/strings.hpp"
#include "dse/timestamp.hpp"

namespace fs = std::filesystem;
using namespace dse;

namespace {

constexpr int kUsage = 2;
constexpr int kData = 3;

EngineConfig config_or_default(const std::string& path) {
  EngineConfig c = path.empty() ? EngineConfig{} : load_config(path);
  apply_env_overrides(c);
  return c;
}

std::int64_t parse_time_flag(const std::string& text, const char* flag) {
  const auto t = parse_timestamp(text, true);
  if (!t) throw Error(ErrorCode::InvalidQuery, std::string("cannot parse ") + flag + " '" + text + "'");
  return *t;
}

BoundingBox parse_bbox(const std::string& text) {
  std::vector<double> v;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto part = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto n = parse_number(part);
    if (!n) throw Error(ErrorCode::InvalidQuery, "--bbox wants lat_min,lon_min,lat_max,lon_max");
    v.push_back(*n);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (v.size() != 4) throw Error(ErrorCode::InvalidQuery, "--bbox wants lat_min,lon_min,lat_max,lon_max");
  return {v[0], v[2], v[1], v[3]};
}

std::string summarize(const SearchResult& r) {
  if (!r.augmentation) return "";
  if (const auto* j = std::get_if<JoinCandidate>(&*r.augmentation)) {
    const auto& p = j->pairs.front();
    std::string cols;
    for (std::size_t i = 0; i < p.query_columns.size(); ++i) {
      cols += (i ? "," : "") + p.query_columns[i] + "=" + p.candidate_columns[i];
    }
    return "join " + cols + " (" + std::string(to_string(p.kind)) + ", " + format_number(p.containment_score) + ")";
  }
  const auto& u = std::get<UnionCandidate>(*r.augmentation);
  return "union " + std::to_string(u.column_pairs.size()) + " columns (" + format_number(u.union_score) + ")";
}

void print_profile(const DatasetProfile& p) {
  std::printf("%s  %s  (%zu rows, %zu columns)\n", p.id.c_str(), p.name.c_str(), p.row_count, p.columns.size());
  std::printf("  %-24s %-10s %6s %9s  %s\n", "column", "type", "nulls", "distinct", "details");
  for (const auto& c : p.columns) {
    std::string details;
    if (c.numeric_stats) {
      details = "min " + format_number(c.numeric_stats->min) + " max " + format_number(c.numeric_stats->max) +
                " mean " + format_number(c.numeric_stats->mean);
    } else if (c.temporal_resolution) {
      details = "resolution " + std::string(to_string(*c.temporal_resolution));
    } else if (!c.top_values.empty()) {
      details = "top '" + c.top_values.front().value + "' x" + std::to_string(c.top_values.front().frequency);
    }
    std::printf("  %-24s %-10s %5.1f%% %9llu  %s\n", c.name.c_str(), std::string(to_string(c.type())).c_str(),
                100 * c.null_fraction, static_cast<unsigned long long>(c.distinct_count_estimate), details.c_str());
  }
  for (const auto& s : p.spatial_coverage) {
    std::printf("  spatial pair (%s, %s): %zu boxes\n", s.lat_column.c_str(), s.lon_column.c_str(),
                s.summary.boxes.size());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dataset search engine: profile, index, search and augment tabular data"};
  app.require_subcommand(1);
  std::string config_path;
  bool as_json = false;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Discover, profile and index datasets from configured plugins");
  std::optional<std::string> plugin;
  std::size_t limit = 0;
  ingest->add_option("--config", config_path, "Engine config file")->required();
  ingest->add_option("--plugin", plugin, "Only run this plugin");
  ingest->add_option("--limit", limit, "At most N datasets per plugin");
  ingest->add_flag("--json", as_json, "Machine-readable output");

  // profile
  auto* profile = app.add_subcommand("profile", "Profile one CSV file");
  std::string csv_path;
  std::vector<std::string> overrides;
  profile->add_option("csv", csv_path, "CSV file")->required();
  profile->add_option("--config", config_path, "Engine config file (profiler settings)");
  profile->add_option("--type", overrides, "Type override column=type (repeatable)");
  profile->add_flag("--json", as_json, "Print the profile as JSON");

  // search
  auto* search = app.add_subcommand("search", "Query the index");
  std::vector<std::string> keywords, sources, types;
  std::string after, before, bbox, area, related, mode = "either", resolution;
  std::size_t offset = 0, page = 20;
  bool explain = false;
  search->add_option("--config", config_path, "Engine config file");
  search->add_option("--keywords,-k", keywords, "Keywords");
  search->add_option("--after", after, "Temporal window start");
  search->add_option("--before", before, "Temporal window end (inclusive)");
  search->add_option("--resolution", resolution, "Only columns at this resolution or finer");
  search->add_option("--bbox", bbox, "lat_min,lon_min,lat_max,lon_max");
  search->add_option("--area", area, "Named area from the gazetteer");
  search->add_option("--source", sources, "Restrict to sources (repeatable)");
  search->add_option("--type", types, "Require a column of this type (repeatable)");
  search->add_option("--related", related, "CSV file to find joinable/unionable datasets for");
  search->add_option("--mode", mode, "join, union or either")->check(CLI::IsMember({"join", "union", "either"}));
  search->add_option("--offset", offset, "Skip this many results");
  search->add_option("--limit", page, "Page size");
  search->add_flag("--explain", explain, "Show the score breakdown");
  search->add_flag("--json", as_json, "Print the response as JSON");

  // augment
  auto* augment = app.add_subcommand("augment", "Join or union a CSV with an indexed dataset");
  std::string left_path, right_id, spec_text, out_path, provenance_path;
  augment->add_option("--config", config_path, "Engine config file");
  augment->add_option("--left", left_path, "Left CSV")->required();
  augment->add_option("--right-id", right_id, "Indexed dataset id")->required();
  augment->add_option("--spec", spec_text, "AugmentationSpec as JSON text or a path to a JSON file")->required();
  augment->add_option("--out,-o", out_path, "Output CSV (default: stdout)");
  augment->add_option("--provenance", provenance_path, "Provenance JSON (default: <out>.provenance.json)");
  augment->add_flag("--json", as_json, "Print {csv, provenance} as JSON");

  // stats
  auto* stats = app.add_subcommand("stats", "Collection statistics");
  stats->add_option("--config", config_path, "Engine config file");
  stats->add_flag("--json", as_json, "Machine-readable output");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the REST service");
  std::string listen;
  serve->add_option("--config", config_path, "Engine config file");
  serve->add_option("--listen", listen, "host:port (overrides config and DSE_LISTEN)");

  // demo
  auto* demo = app.add_subcommand("demo", "Synthetic end-to-end scenarios");
  demo->require_subcommand(1);
  auto* bicycle = demo->add_subcommand("bicycle", "Bike-share trips: union more months, join weather, compare R^2");
  std::uint64_t seed = 7;
  bicycle->add_option("--seed", seed, "Generator seed");
  bicycle->add_flag("--json", as_json, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*ingest) {
      Engine engine(config_or_default(config_path));
      const auto report = engine.ingest(plugin, limit);
      if (as_json) {
        json items = json::array();
        for (const auto& i : report.items) {
          items.push_back({{"plugin", i.plugin}, {"locator", i.locator}, {"id", i.id},
                           {"status", to_string(i.outcome)}, {"reason", i.reason}});
        }
        std::cout << json{{"items", items}, {"indexed", report.count(IngestOutcome::Indexed)},
                          {"dataset_count", engine.size()}}.dump(2)
                  << "\n";
      } else {
        for (const auto& i : report.items) {
          std::cout << to_string(i.outcome) << "\t" << (i.id.empty() ? "-" : i.id) << "\t" << i.locator
                    << (i.reason.empty() ? "" : "\t" + i.reason) << "\n";
        }
        std::cout << "indexed " << report.count(IngestOutcome::Indexed) << "\n";
      }
      return report.count(IngestOutcome::Failed) > 0 ? kData : 0;
    }

    if (*profile) {
      const auto config = config_or_default(config_path);
      DatasetMeta meta;
      meta.name = fs::path(csv_path).stem().string();
      meta.source = "local";
      for (const auto& o : overrides) {
        const auto eq = o.find('=');
        const auto type = eq == std::string::npos ? std::nullopt : parse_column_type(o.substr(eq + 1));
        if (!type) throw Error(ErrorCode::InvalidConfig, "--type wants column=type, got '" + o + "'");
        meta.type_overrides[o.substr(0, eq)] = *type;
      }
      std::string bytes;
      try {
        bytes = read_file(csv_path);
      } catch (const Error& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
      }
      ProvenanceRecord prov;
      prov.source_plugin = "local";
      prov.locator = fs::absolute(csv_path).string();
      prov.content_hash = sha256_hex(bytes);
      prov.bytes_size = bytes.size();
      meta.provenance = prov;
      const auto p = profile_table(parse_dataset_bytes(bytes), config.profiler, meta);
      if (as_json) {
        std::cout << to_json(p).dump(2) << "\n";
      } else {
        print_profile(p);
      }
      return 0;
    }

    if (*search) {
      Engine engine(config_or_default(config_path));
      Query q;
      for (const auto& k : keywords) {
        for (auto& t : tokenize(k)) q.keywords.push_back(std::move(t));
      }
      if (!after.empty() || !before.empty()) {
        TemporalFilter f;
        f.start = after.empty() ? std::numeric_limits<std::int64_t>::min() / 4 : parse_time_flag(after, "--after");
        f.end = before.empty() ? std::numeric_limits<std::int64_t>::max() / 4 : parse_time_flag(before, "--before");
        q.temporal = f;
      }
      if (!resolution.empty()) {
        const auto r = parse_resolution(resolution);
        if (!r) throw Error(ErrorCode::InvalidQuery, "unknown resolution '" + resolution + "'");
        if (!q.temporal) throw Error(ErrorCode::InvalidQuery, "--resolution needs --after or --before");
        q.temporal->resolution = r;
      }
      if (!bbox.empty() || !area.empty()) {
        SpatialFilter f;
        if (!bbox.empty()) f.box = parse_bbox(bbox);
        if (!area.empty()) f.named_area = area;
        q.spatial = f;
      }
      if (!sources.empty()) q.sources = std::set<std::string>(sources.begin(), sources.end());
      if (!types.empty()) {
        std::set<ColumnType> required;
        for (const auto& t : types) {
          const auto ct = parse_column_type(t);
          if (!ct) throw Error(ErrorCode::InvalidQuery, "unknown column type '" + t + "'");
          required.insert(*ct);
        }
        q.required_types = required;
      }
      if (!related.empty()) {
        DatasetMeta meta;
        meta.name = fs::path(related).stem().string();
        RelatedFilter f;
        f.profile = engine.profile_bytes(read_file(related), meta);
        f.mode = mode == "join" ? RelatedMode::Join : mode == "union" ? RelatedMode::Union : RelatedMode::Either;
        q.related = std::move(f);
      }
      q.page = {offset, page};
      const auto response = engine.search(q);
      if (as_json) {
        std::cout << to_json(response).dump(2) << "\n";
        return 0;
      }
      std::printf("%zu results\n", response.total);
      for (const auto& r : response.results) {
        std::printf("%s  %.4f  %s", r.dataset_id.c_str(), r.total_score, r.snippet.name.c_str());
        if (const auto s = summarize(r); !s.empty()) std::printf("  [%s]", s.c_str());
        std::printf("\n");
        if (explain) {
          const auto& b = r.breakdown;
          const auto show = [](const char* label, const std::optional<double>& v) {
            if (v) std::printf("    %-15s %.4f\n", label, *v);
          };
          show("keyword", b.keyword);
          show("filter_overlap", b.filter_overlap);
          show("join", b.join);
          show("union", b.union_);
        }
      }
      return 0;
    }

    if (*augment) {
      Engine engine(config_or_default(config_path));
      json spec_json;
      const std::string spec_src = fs::exists(spec_text) ? read_file(spec_text) : spec_text;
      try {
        spec_json = json::parse(spec_src);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("--spec is not JSON: ") + e.what());
      }
      const auto left = parse_dataset_bytes(read_file(left_path));
      const auto result = engine.augment(left, left_path, right_id, spec_from_json(spec_json));
      const auto csv = write_csv(result.table);
      const auto prov = to_json(result.provenance);
      if (as_json) {
        std::cout << json{{"csv", csv}, {"provenance", prov}}.dump(2) << "\n";
      } else if (out_path.empty()) {
        std::cout << csv;
      } else {
        write_file_atomic(out_path, csv);
        write_file_atomic(provenance_path.empty() ? out_path + ".provenance.json" : provenance_path,
                          prov.dump(2) + "\n");
        std::cerr << "wrote " << result.table.row_count << " rows to " << out_path << "\n";
      }
      if (!as_json && out_path.empty() && !provenance_path.empty()) {
        write_file_atomic(provenance_path, prov.dump(2) + "\n");
      }
      return 0;
    }

    if (*stats) {
      Engine engine(config_or_default(config_path));
      const auto s = engine.stats();
      if (as_json) {
        std::cout << json{{"dataset_count", s.dataset_count}, {"per_source", s.per_source}, {"per_type", s.per_type}}
                         .dump(2)
                  << "\n";
      } else {
        std::cout << "datasets " << s.dataset_count << "\n";
        for (const auto& [k, v] : s.per_source) std::cout << "  source " << k << ": " << v << "\n";
        for (const auto& [k, v] : s.per_type) std::cout << "  " << k << " columns: " << v << "\n";
      }
      return 0;
    }

    if (*serve) {
      auto config = config_or_default(config_path);
      if (!listen.empty()) config.listen = listen;
      const auto [host, port] = parse_listen(config.listen);
      Engine engine(config);
      Service service(engine);
      std::cerr << "serving " << engine.size() << " datasets on http://" << host << ":" << port << "\n";
      service.run(host, port);
      return 0;
    }

    if (*bicycle) {
      const auto r = run_bicycle_demo(seed);
      if (as_json) {
        std::cout << json{{"seed", seed},
                          {"r2_before", r.r2_before},
                          {"r2_after_union", r.r2_after_union},
                          {"r2_after_join", r.r2_after_join},
                          {"rows_before", r.rows_before},
                          {"rows_after_union", r.rows_after_union},
                          {"union_dataset", r.union_dataset},
                          {"join_dataset", r.join_dataset}}
                         .dump(2)
                  << "\n";
      } else {
        for (const auto& line : r.log) std::cout << line << "\n";
        std::printf("R^2 %.4f -> %.4f -> %.4f\n", r.r2_before, r.r2_after_union, r.r2_after_join);
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidConfig ? kUsage : kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return 0;
}
