#include "dse/gazetteer.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "dse/error.hpp"
#include "dse/strings.hpp"

namespace dse {

namespace {

struct Area {
  const char* name;
  double lat_min, lon_min, lat_max, lon_max;
};

// Approximate extents, rounded to 0.01 degree.
constexpr Area kBuiltinAreas[] = {
    {"New York City", 40.48, -74.26, 40.92, -73.70},
    {"NYC", 40.48, -74.26, 40.92, -73.70},
    {"Manhattan", 40.68, -74.03, 40.88, -73.90},
    {"Brooklyn", 40.57, -74.05, 40.74, -73.83},
    {"Queens", 40.54, -73.96, 40.81, -73.70},
    {"Bronx", 40.79, -73.93, 40.92, -73.75},
    {"Staten Island", 40.48, -74.26, 40.65, -74.05},
    {"Los Angeles", 33.70, -118.67, 34.34, -118.16},
    {"Chicago", 41.64, -87.94, 42.02, -87.52},
    {"San Francisco", 37.70, -122.52, 37.83, -122.35},
    {"Boston", 42.23, -71.19, 42.40, -70.92},
    {"Seattle", 47.49, -122.44, 47.74, -122.24},
    {"Washington DC", 38.79, -77.12, 39.00, -76.91},
    {"Houston", 29.52, -95.79, 30.11, -95.01},
    {"Philadelphia", 39.87, -75.28, 40.14, -74.96},
    {"New York State", 40.50, -79.76, 45.02, -71.86},
    {"California", 32.53, -124.41, 42.01, -114.13},
    {"Texas", 25.84, -106.65, 36.50, -93.51},
    {"Florida", 24.52, -87.63, 31.00, -80.03},
    {"Illinois", 36.97, -91.51, 42.51, -87.50},
    {"Massachusetts", 41.24, -73.51, 42.89, -69.93},
    {"Washington State", 45.54, -124.76, 49.00, -116.92},
    {"New Jersey", 38.93, -75.56, 41.36, -73.89},
    {"Pennsylvania", 39.72, -80.52, 42.27, -74.69},
    {"United States", 24.40, -124.85, 49.38, -66.89},
    {"Canada", 41.68, -141.00, 83.11, -52.62},
    {"Mexico", 14.53, -118.40, 32.72, -86.70},
    {"Brazil", -33.75, -73.99, 5.27, -34.79},
    {"Argentina", -55.06, -73.56, -21.78, -53.59},
    {"Colombia", -4.23, -79.00, 12.46, -66.85},
    {"United Kingdom", 49.87, -8.65, 60.86, 1.77},
    {"France", 41.33, -5.14, 51.09, 9.56},
    {"Germany", 47.27, 5.87, 55.06, 15.04},
    {"Spain", 35.95, -9.39, 43.79, 4.33},
    {"Italy", 36.62, 6.63, 47.09, 18.52},
    {"Nigeria", 4.27, 2.67, 13.89, 14.68},
    {"Ethiopia", 3.40, 32.99, 14.89, 48.00},
    {"Kenya", -4.68, 33.89, 5.03, 41.90},
    {"South Africa", -34.84, 16.45, -22.13, 32.89},
    {"Egypt", 22.00, 24.70, 31.67, 36.90},
    {"Somalia", -1.68, 40.99, 11.98, 51.41},
    {"Sudan", 8.68, 21.81, 22.23, 38.61},
    {"Democratic Republic of the Congo", -13.46, 12.18, 5.39, 31.31},
    {"India", 6.75, 68.11, 35.50, 97.40},
    {"China", 18.16, 73.50, 53.56, 134.77},
    {"Japan", 24.25, 122.93, 45.52, 145.82},
    {"Australia", -43.64, 113.34, -10.67, 153.57},
    {"Russia", 41.19, 19.64, 81.86, 180.00},
    {"Afghanistan", 29.38, 60.47, 38.49, 74.89},
    {"Iraq", 29.06, 38.79, 37.38, 48.58},
    {"Syria", 32.31, 35.73, 37.32, 42.38},
    {"Africa", -34.84, -17.63, 37.35, 51.41},
    {"Europe", 34.80, -25.00, 71.20, 45.00},
};

}  // namespace

const Gazetteer& Gazetteer::builtin() {
  static const Gazetteer g = [] {
    Gazetteer out;
    for (const auto& a : kBuiltinAreas) out.add(a.name, {a.lat_min, a.lat_max, a.lon_min, a.lon_max});
    return out;
  }();
  return g;
}

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open gazetteer " + path.string());
  Gazetteer out;
  try {
    const auto doc = nlohmann::json::parse(in);
    for (const auto& [name, v] : doc.items()) {
      const BoundingBox box{v.at(0).get<double>(), v.at(2).get<double>(), v.at(1).get<double>(),
                            v.at(3).get<double>()};
      if (!box.valid()) throw Error(ErrorCode::InvalidConfig, "invalid box for area '" + name + "'");
      out.add(name, box);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("malformed gazetteer: ") + e.what());
  }
  return out;
}

void Gazetteer::add(std::string_view name, const BoundingBox& box) {
  const auto key = fold_value(name);
  areas_[key] = box;
  display_[key] = std::string(trim(name));
}

std::optional<BoundingBox> Gazetteer::lookup(std::string_view name) const {
  if (auto it = areas_.find(fold_value(name)); it != areas_.end()) return it->second;
  return std::nullopt;
}

std::map<std::string, BoundingBox> Gazetteer::search(std::string_view fragment) const {
  const auto needle = fold_value(fragment);
  std::map<std::string, BoundingBox> out;
  for (const auto& [key, box] : areas_) {
    if (key.find(needle) != std::string::npos) out.emplace(display_.at(key), box);
  }
  return out;
}

}  // namespace dse
