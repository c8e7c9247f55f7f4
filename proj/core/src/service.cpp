#include "dse/service.hpp"

#include <httplib.h>

#include <filesystem>
#include <thread>

#include "dse/serialize.hpp"
#include "dse/strings.hpp"

namespace dse {

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyQuery:
    case ErrorCode::InvalidQuery:
    case ErrorCode::UnknownNamedArea:
    case ErrorCode::MalformedDocument:
    case ErrorCode::SignatureLengthMismatch:
    case ErrorCode::ProfileVersionUnsupported:
      return 400;
    case ErrorCode::NotFound:
    case ErrorCode::EmptyIndex:
      return 404;
    case ErrorCode::Duplicate:
    case ErrorCode::HashMismatch:
      return 409;
    case ErrorCode::SourceGone:
      return 410;
    case ErrorCode::EmptyTable:
    case ErrorCode::RaggedRows:
    case ErrorCode::InvalidOverride:
    case ErrorCode::NonFiniteValue:
    case ErrorCode::IncompatiblePairKinds:
    case ErrorCode::AggregationOnNonNumeric:
    case ErrorCode::MissingAggregation:
    case ErrorCode::NoPairs:
    case ErrorCode::InvalidSpec:
    case ErrorCode::MetadataInvalid:
      return 422;
    case ErrorCode::PluginUnavailable:
    case ErrorCode::MalformedListing:
      return 502;
    case ErrorCode::ChecksumMismatch:
    case ErrorCode::VersionUnsupported:
    case ErrorCode::InvalidConfig:
    case ErrorCode::Io:
      return 500;
  }
  return 500;
}

json error_envelope(ErrorCode code, const std::string& message, const json& details) {
  return {{"code", std::string(to_string(code))}, {"message", message}, {"details", details}};
}

DatasetMeta meta_from_json(const json& j) {
  DatasetMeta m;
  if (j.is_null()) return m;
  if (!j.is_object()) throw Error(ErrorCode::MetadataInvalid, "metadata must be a JSON object");
  try {
    m.name = j.value("name", "");
    m.description = j.value("description", "");
    m.source = j.value("source", "");
    const json overrides = j.value("type_overrides", json::object());
    for (const auto& [col, t] : overrides.items()) {
      const auto type = parse_column_type(t.get<std::string>());
      if (!type) throw Error(ErrorCode::MetadataInvalid, "unknown column type for '" + col + "'");
      m.type_overrides[col] = *type;
    }
    const json custom = j.value("custom_metadata", json::object());
    for (const auto& [k, v] : custom.items()) {
      if (v.is_string()) {
        m.custom_metadata[k] = v.get<std::string>();
      } else if (v.is_number()) {
        m.custom_metadata[k] = format_number(v.get<double>());
      } else if (v.is_boolean()) {
        m.custom_metadata[k] = v.get<bool>() ? "true" : "false";
      } else if (!v.is_null()) {
        throw Error(ErrorCode::MetadataInvalid, "custom metadata '" + k + "' must be a scalar");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MetadataInvalid, std::string("metadata: ") + e.what());
  }
  return m;
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e, const json& details = json::object()) {
  send_json(res, http_status(e.code()), error_envelope(e.code(), e.what(), details));
}

json parse_body(const std::string& text) {
  if (trim(text).empty()) return json();
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("request body is not JSON: ") + e.what());
  }
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const json::exception& e) {
      send_error(res, Error(ErrorCode::MalformedDocument, e.what()));
    } catch (const std::exception& e) {
      send_json(res, 500, error_envelope(ErrorCode::Io, e.what()));
    }
  };
}

std::optional<std::string> form_value(const httplib::Request& req, const std::string& key) {
  if (!req.has_file(key)) return std::nullopt;
  return req.get_file_value(key).content;
}

}  // namespace

struct Service::Impl {
  Engine& engine;
  httplib::Server server;
  std::jthread thread;

  explicit Impl(Engine& e) : engine(e) { routes(); }

  Query decode_query(const json& body, bool validate) {
    json j = body;
    if (j.is_object() && j.contains("related") && j["related"].is_object() && j["related"].contains("dataset_id") &&
        !j["related"].contains("profile")) {
      const auto id = j["related"]["dataset_id"].get<std::string>();
      const auto profile = engine.dataset(id);
      if (!profile) throw Error(ErrorCode::NotFound, "no dataset with id '" + id + "'");
      j["related"]["profile"] = to_json(*profile);
    }
    return query_from_json(j, validate);
  }

  void search(const httplib::Request& req, httplib::Response& res) {
    Query q;
    if (req.is_multipart_form_data()) {
      const auto query_text = form_value(req, "query");
      q = decode_query(query_text ? parse_body(*query_text) : json(), false);
      if (const auto related = form_value(req, "related_file")) {
        RelatedFilter f;
        DatasetMeta meta;
        meta.name = req.get_file_value("related_file").filename;
        try {
          f.profile = engine.profile_bytes(*related, meta);
        } catch (const Error& e) {
          send_error(res, e, {{"part", "related_file"}});
          return;
        }
        if (const auto mode = form_value(req, "mode")) {
          const auto m = to_lower(trim(*mode));
          if (m == "join") {
            f.mode = RelatedMode::Join;
          } else if (m == "union") {
            f.mode = RelatedMode::Union;
          } else if (m != "either") {
            throw Error(ErrorCode::InvalidQuery, "unknown related mode '" + *mode + "'");
          }
        }
        q.related = std::move(f);
      }
      q.validate();
    } else {
      q = decode_query(parse_body(req.body), true);
    }
    send_json(res, 200, to_json(engine.search(q)));
  }

  void upload(const httplib::Request& req, httplib::Response& res) {
    std::string bytes;
    json meta_json;
    std::string filename;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("file")) throw Error(ErrorCode::MalformedDocument, "multipart upload needs a 'file' part");
      const auto file = req.get_file_value("file");
      bytes = file.content;
      filename = file.filename;
      if (const auto m = form_value(req, "metadata")) {
        try {
          meta_json = json::parse(*m);
        } catch (const json::exception& e) {
          throw Error(ErrorCode::MetadataInvalid, std::string("metadata is not JSON: ") + e.what());
        }
      }
    } else {
      const auto body = parse_body(req.body);
      if (!body.is_object() || !body.contains("csv")) {
        throw Error(ErrorCode::MalformedDocument, "upload body needs a 'csv' field");
      }
      bytes = body["csv"].get<std::string>();
      meta_json = body.value("metadata", json());
    }
    auto meta = meta_from_json(meta_json);
    if (meta.name.empty()) meta.name = std::filesystem::path(filename).stem().string();
    const auto result = engine.upload(bytes, std::move(meta));
    if (!result.created) {
      json env = error_envelope(ErrorCode::Duplicate, "identical content is already indexed", {{"id", result.id}});
      env["id"] = result.id;
      send_json(res, 409, env);
      return;
    }
    send_json(res, 201, {{"id", result.id}, {"profile", to_json(result.profile)}});
  }

  void augment(const httplib::Request& req, httplib::Response& res) {
    json body;
    std::optional<TableData> left;
    std::string left_label;
    if (req.is_multipart_form_data()) {
      const auto r = form_value(req, "request");
      body = r ? parse_body(*r) : json::object();
      if (req.has_file("left")) {
        const auto file = req.get_file_value("left");
        left = parse_dataset_bytes(file.content);
        left_label = "upload:" + file.filename;
      }
    } else {
      body = parse_body(req.body);
    }
    if (!body.is_object()) throw Error(ErrorCode::MalformedDocument, "augment body must be a JSON object");
    if (!body.contains("right_id")) throw Error(ErrorCode::InvalidSpec, "augment request needs right_id");
    const auto right_id = body["right_id"].get<std::string>();
    if (!engine.dataset(right_id)) throw Error(ErrorCode::NotFound, "no dataset with id '" + right_id + "'");

    AugmentationSpec spec;
    if (body.contains("spec")) {
      spec = spec_from_json(body["spec"]);
    } else if (body.contains("candidate")) {
      const auto& c = body["candidate"];
      spec = c.value("type", "join") == "union" ? spec_from_candidate(union_candidate_from_json(c))
                                                : spec_from_candidate(join_candidate_from_json(c));
    } else {
      throw Error(ErrorCode::InvalidSpec, "augment request needs a spec or a candidate");
    }

    AugmentedTable out;
    if (left) {
      out = engine.augment(*left, left_label, right_id, std::move(spec));
    } else {
      if (!body.contains("left_id")) throw Error(ErrorCode::InvalidSpec, "augment request needs left_id or a left file");
      const auto left_id = body["left_id"].get<std::string>();
      if (!engine.dataset(left_id)) throw Error(ErrorCode::NotFound, "no dataset with id '" + left_id + "'");
      out = engine.augment(left_id, right_id, std::move(spec));
    }
    res.status = 200;
    res.set_header("X-Provenance", to_json(out.provenance).dump());
    res.set_header("Content-Disposition", "attachment; filename=\"augmented.csv\"");
    res.set_content(write_csv(out.table), "text/csv");
  }

  json config_document() const {
    const auto& c = engine.config();
    json types = json::array();
    for (auto t : {ColumnType::Categorical, ColumnType::Numerical, ColumnType::Temporal, ColumnType::SpatialLatitude,
                   ColumnType::SpatialLongitude}) {
      types.push_back(to_string(t));
    }
    json resolutions = json::array();
    for (auto r : kAllResolutions) resolutions.push_back(to_string(r));
    json aggs = json::array();
    for (auto a : {AggregationFn::First, AggregationFn::Count, AggregationFn::Sum, AggregationFn::Mean,
                   AggregationFn::Max, AggregationFn::Min}) {
      aggs.push_back(to_string(a));
    }
    return {
        {"api_version", "v1"},
        {"custom_metadata_fields", metadata_schema(c.custom_metadata_fields)},
        {"column_types", types},
        {"resolutions", resolutions},
        {"aggregations", aggs},
        {"related_modes", {"join", "union", "either"}},
        {"ranking",
         {{"keyword", c.search.weights.keyword},
          {"filter", c.search.weights.filter},
          {"related", c.search.weights.related}}},
        {"page_limit_default", Page{}.limit},
    };
  }

  void routes() {
    server.set_payload_max_length(std::size_t{512} << 20);
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Expose-Headers", "X-Provenance, Content-Disposition"}});
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });

    server.Post("/api/v1/search", guarded([this](const auto& req, auto& res) { search(req, res); }));
    server.Post("/api/v1/upload", guarded([this](const auto& req, auto& res) { upload(req, res); }));
    server.Post("/api/v1/augment", guarded([this](const auto& req, auto& res) { augment(req, res); }));

    server.Get("/api/v1/datasets", guarded([this](const httplib::Request&, httplib::Response& res) {
      json out = json::array();
      for (const auto& d : engine.list()) {
        out.push_back({{"id", d.id}, {"name", d.name}, {"source", d.source}, {"row_count", d.row_count}});
      }
      send_json(res, 200, out);
    }));
    server.Get("/api/v1/datasets/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto& id = req.path_params.at("id");
      const auto p = engine.dataset(id);
      if (!p) throw Error(ErrorCode::NotFound, "no dataset with id '" + id + "'");
      send_json(res, 200, to_json(*p));
    }));
    server.Get("/api/v1/datasets/:id/download", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto& id = req.path_params.at("id");
      auto bytes = engine.download(id);
      res.set_header("Content-Disposition", "attachment; filename=\"" + id + ".csv\"");
      res.set_content(std::move(bytes), "text/csv");
    }));
    server.Get("/api/v1/stats", guarded([this](const httplib::Request&, httplib::Response& res) {
      const auto s = engine.stats();
      send_json(res, 200,
                {{"dataset_count", s.dataset_count},
                 {"per_source", s.per_source},
                 {"per_type", s.per_type},
                 {"generation", engine.generation()}});
    }));
    server.Get("/api/v1/config", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, config_document());
    }));
    server.Get("/api/v1/areas", guarded([this](const httplib::Request& req, httplib::Response& res) {
      json out = json::array();
      for (const auto& [name, box] : engine.gazetteer().search(req.get_param_value("q"))) {
        out.push_back({{"name", name}, {"bbox", to_json(box)}});
      }
      send_json(res, 200, {{"areas", out}});
    }));
    server.Get("/api/v1/areas/:name", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto& name = req.path_params.at("name");
      const auto box = engine.gazetteer().lookup(name);
      if (!box) throw Error(ErrorCode::UnknownNamedArea, "unknown area '" + name + "'");
      send_json(res, 200, {{"name", name}, {"bbox", to_json(*box)}});
    }));

    const auto& dir = engine.config().static_dir;
    if (dir && std::filesystem::is_directory(*dir)) {
      server.set_mount_point("/", dir->string());
    } else {
      server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, {{"service", "dataset search engine"}, {"api", "/api/v1"}});
      });
    }
  }
};

Service::Service(Engine& engine) : impl_(std::make_unique<Impl>(engine)) {}

Service::~Service() { stop(); }

int Service::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::jthread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void Service::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw Error(ErrorCode::Io, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace dse
