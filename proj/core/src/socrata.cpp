#include "dse/socrata.hpp"

#include <httplib.h>

#include <algorithm>
#include <nlohmann/json.hpp>
#include <thread>

#include "dse/error.hpp"
#include "dse/strings.hpp"

namespace dse {

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  const auto host_start = scheme == std::string::npos ? 0 : scheme + 3;
  const auto slash = url.find('/', host_start);
  if (slash == std::string::npos) return {url, ""};
  auto path = url.substr(slash);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {url.substr(0, slash), path};
}

SocrataPlugin::SocrataPlugin(SocrataOptions options) : options_(std::move(options)) {
  if (options_.base_url.empty()) throw Error(ErrorCode::InvalidConfig, "socrata plugin needs a base_url");
  if (options_.page_size == 0) options_.page_size = 100;
  std::tie(origin_, prefix_) = split_url(options_.base_url);
}

namespace {

struct Response {
  int status = 0;
  std::string body;
  std::string content_type;
};

Response get_with_retries(const std::string& origin, const std::string& path, const SocrataOptions& o) {
  httplib::Client client(origin);
  client.set_connection_timeout(o.timeout);
  client.set_read_timeout(o.timeout);
  client.set_follow_location(true);
  std::string last_error;
  for (int attempt = 0;; ++attempt) {
    auto res = client.Get(path);
    std::chrono::milliseconds wait{200 << std::min(attempt, 6)};
    if (res) {
      if (res->status < 500 && res->status != 429) {
        return {res->status, std::move(res->body), res->get_header_value("Content-Type")};
      }
      last_error = "HTTP " + std::to_string(res->status);
      if (auto ra = parse_number(res->get_header_value("Retry-After")); ra && *ra >= 0) {
        wait = std::chrono::milliseconds(static_cast<std::int64_t>(*ra * 1000));
      }
    } else {
      last_error = httplib::to_string(res.error());
    }
    if (attempt >= o.max_retries) break;
    std::this_thread::sleep_for(std::min(wait, o.max_retry_wait));
  }
  throw Error(ErrorCode::PluginUnavailable,
              "GET " + origin + path + " failed after " + std::to_string(o.max_retries + 1) + " attempts: " + last_error);
}

}  // namespace

std::vector<ListingEntry> SocrataPlugin::list(std::size_t limit) {
  std::vector<ListingEntry> out;
  for (std::size_t offset = 0;;) {
    const auto path = prefix_ + "/api/catalog/v1?offset=" + std::to_string(offset) +
                      "&limit=" + std::to_string(options_.page_size);
    const auto res = get_with_retries(origin_, path, options_);
    if (res.status != 200) {
      throw Error(ErrorCode::PluginUnavailable, "catalog listing returned HTTP " + std::to_string(res.status));
    }
    std::size_t page_count = 0;
    std::size_t total = 0;
    try {
      const auto doc = nlohmann::json::parse(res.body);
      const auto& results = doc.at("results");
      if (!results.is_array()) throw Error(ErrorCode::MalformedListing, "results is not an array");
      total = doc.value("resultSetSize", std::size_t{0});
      for (const auto& r : results) {
        const auto& resource = r.at("resource");
        const auto id = resource.at("id").get<std::string>();
        if (id.empty() || id.find('/') != std::string::npos) {
          throw Error(ErrorCode::MalformedListing, "bad resource id '" + id + "'");
        }
        ++page_count;
        if (limit != 0 && out.size() == limit) continue;
        out.push_back({options_.base_url + (options_.base_url.ends_with('/') ? "" : "/") + "resource/" + id + ".csv",
                       resource.value("name", id), resource.value("description", "")});
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedListing, std::string("catalog listing: ") + e.what());
    }
    offset += page_count;
    if (page_count == 0 || offset >= total || (limit != 0 && out.size() >= limit)) break;
  }
  return out;
}

FetchedDataset SocrataPlugin::fetch(const std::string& locator) {
  const auto [origin, path] = split_url(locator);
  const auto res = get_with_retries(origin, path.empty() ? "/" : path, options_);
  if (res.status == 404 || res.status == 410) throw Error(ErrorCode::SourceGone, "resource is gone: " + locator);
  if (res.status != 200) {
    throw Error(ErrorCode::PluginUnavailable, "export returned HTTP " + std::to_string(res.status));
  }
  FetchedDataset d;
  d.bytes = res.body;
  d.content_type = res.content_type;
  return d;
}

}  // namespace dse
