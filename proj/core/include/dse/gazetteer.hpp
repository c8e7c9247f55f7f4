#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace dse {

struct BoundingBox {
  double lat_min = 0;
  double lat_max = 0;
  double lon_min = 0;
  double lon_max = 0;

  bool valid() const noexcept {
    return lat_min <= lat_max && lon_min <= lon_max && lat_min >= -90 && lat_max <= 90 &&
           lon_min >= -180 && lon_max <= 180;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Named area -> bounding box table. Lookups are case-insensitive and
/// ignore surrounding whitespace.
class Gazetteer {
 public:
  /// The bundled table: NYC and its boroughs, a set of US cities and
  /// states, and a set of countries.
  static const Gazetteer& builtin();

  /// JSON object {"name": [lat_min, lon_min, lat_max, lon_max], ...}.
  static Gazetteer load(const std::filesystem::path& path);

  void add(std::string_view name, const BoundingBox& box);
  std::optional<BoundingBox> lookup(std::string_view name) const;

  /// Names containing `fragment` (case-insensitive), for autocompletion.
  std::map<std::string, BoundingBox> search(std::string_view fragment) const;
  std::size_t size() const noexcept { return areas_.size(); }

 private:
  std::map<std::string, BoundingBox> areas_;  // keyed by folded name
  std::map<std::string, std::string> display_;
};

}  // namespace dse
