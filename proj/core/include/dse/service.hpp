#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "dse/engine.hpp"
#include "dse/error.hpp"

namespace dse {

/// REST front end over an Engine. All routes live under /api/v1; errors
/// use the envelope {"code", "message", "details"}.
///
///   POST /api/v1/search              Query JSON, or multipart {query?, related_file, mode?}
///   POST /api/v1/upload              multipart {file, metadata?} or JSON {csv, metadata?}
///   POST /api/v1/augment             JSON {left_id, right_id, spec | candidate},
///                                    or multipart {left, request}
///   GET  /api/v1/datasets            [{id, name, source, row_count}]
///   GET  /api/v1/datasets/{id}       profile
///   GET  /api/v1/datasets/{id}/download
///   GET  /api/v1/stats
///   GET  /api/v1/config              metadata schema and enumerations for the UI
///   GET  /api/v1/areas?q=            gazetteer search
///   GET  /api/v1/areas/{name}
///
/// Static UI assets are served under / when a static directory is set.
class Service {
 public:
  explicit Service(Engine& engine);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds (port 0 picks a free port), serves on a background thread and
  /// returns the bound port. Throws Io when binding fails.
  int start(const std::string& host, int port);
  /// Serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

int http_status(ErrorCode code) noexcept;
nlohmann::json error_envelope(ErrorCode code, const std::string& message,
                              const nlohmann::json& details = nlohmann::json::object());

/// Upload metadata: {name, description, source, type_overrides: {column: type},
/// custom_metadata: {field: value}}. Throws MetadataInvalid.
DatasetMeta meta_from_json(const nlohmann::json& j);

}  // namespace dse
