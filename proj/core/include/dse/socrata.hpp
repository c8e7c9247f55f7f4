#pragma once

#include <chrono>
#include <string>
#include <utility>

#include "dse/ingest.hpp"

namespace dse {

struct SocrataOptions {
  std::string name = "socrata";
  std::string base_url;  // scheme://host[:port][/prefix]
  std::size_t page_size = 100;
  int max_retries = 3;
  /// Upper bound on one wait, whatever Retry-After says.
  std::chrono::milliseconds max_retry_wait{10000};
  std::chrono::seconds timeout{30};
};

/// Client for the Socrata-style discovery API:
///
///   GET {base}/api/catalog/v1?offset=O&limit=L
///       -> {"results": [{"resource": {"id", "name", "description"}}], "resultSetSize": N}
///   GET {base}/resource/{id}.csv
///
/// 429 and 5xx responses are retried after the Retry-After delay (or an
/// exponential backoff when absent); persistent failure raises
/// PluginUnavailable. 404/410 on export raise SourceGone.
class SocrataPlugin : public DiscoveryPlugin {
 public:
  explicit SocrataPlugin(SocrataOptions options);
  std::string name() const override { return options_.name; }
  std::vector<ListingEntry> list(std::size_t limit) override;
  FetchedDataset fetch(const std::string& locator) override;

  const SocrataOptions& options() const noexcept { return options_; }

 private:
  SocrataOptions options_;
  std::string origin_;  // scheme://host[:port]
  std::string prefix_;  // path prefix without trailing slash
};

/// Splits "http://h:1/a/b" into {"http://h:1", "/a/b"}.
std::pair<std::string, std::string> split_url(const std::string& url);

}  // namespace dse
