#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dse {

struct Cluster1D {
  double lo = 0;
  double hi = 0;
  std::size_t count = 0;
};

/// Globally optimal 1-D k-means (minimum within-cluster SSE) with
/// k' = min(k, distinct values) clusters, returned sorted by lo. Solved
/// exactly by dynamic programming over the sorted distinct values; clusters
/// are contiguous in sorted order so each one is a closed interval.
std::vector<Cluster1D> kmeans_1d(std::span<const double> values, std::size_t k);

struct GeoPoint {
  double lat = 0;
  double lon = 0;
};

struct Cluster2D {
  double lat_min = 0;
  double lat_max = 0;
  double lon_min = 0;
  double lon_max = 0;
  std::size_t count = 0;
};

/// Lloyd's algorithm on (lat, lon) with a deterministic quantile-grid
/// initialisation; stops when assignments are stable or after max_iter
/// rounds. Empty clusters are dropped, so at most k boxes come back.
std::vector<Cluster2D> kmeans_2d(std::span<const GeoPoint> points, std::size_t k,
                                 int max_iter = 100);

}  // namespace dse
