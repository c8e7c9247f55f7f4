#include "dse/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace dse {

namespace {

struct WeightedValues {
  std::vector<double> x;
  std::vector<double> w;
};

WeightedValues distinct_sorted(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  WeightedValues out;
  for (double v : sorted) {
    if (!out.x.empty() && out.x.back() == v) {
      out.w.back() += 1;
    } else {
      out.x.push_back(v);
      out.w.push_back(1);
    }
  }
  return out;
}

// Segment costs from prefix sums of w, w*x, w*x^2 (x centred for accuracy).
class SegmentCost {
 public:
  explicit SegmentCost(const WeightedValues& v) {
    const std::size_t n = v.x.size();
    double total_w = 0, total_wx = 0;
    for (std::size_t i = 0; i < n; ++i) {
      total_w += v.w[i];
      total_wx += v.w[i] * v.x[i];
    }
    const double centre = total_wx / total_w;
    w_.assign(n + 1, 0);
    s1_.assign(n + 1, 0);
    s2_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = v.x[i] - centre;
      w_[i + 1] = w_[i] + v.w[i];
      s1_[i + 1] = s1_[i] + v.w[i] * x;
      s2_[i + 1] = s2_[i] + v.w[i] * x * x;
    }
  }

  // SSE of distinct values [i, j] inclusive
  double operator()(std::size_t i, std::size_t j) const {
    const double w = w_[j + 1] - w_[i];
    const double s1 = s1_[j + 1] - s1_[i];
    const double s2 = s2_[j + 1] - s2_[i];
    return std::max(0.0, s2 - s1 * s1 / w);
  }

 private:
  std::vector<double> w_, s1_, s2_;
};

}  // namespace

std::vector<Cluster1D> kmeans_1d(std::span<const double> values, std::size_t k) {
  if (values.empty() || k == 0) return {};
  const auto v = distinct_sorted(values);
  const std::size_t n = v.x.size();
  const std::size_t kk = std::min(k, n);
  const SegmentCost cost(v);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // best[m][j]: minimal SSE of values [0, j] split into m+1 clusters;
  // start[m][j]: first index of the last cluster in that solution.
  std::vector<std::vector<double>> best(kk, std::vector<double>(n, kInf));
  std::vector<std::vector<std::size_t>> start(kk, std::vector<std::size_t>(n, 0));
  for (std::size_t j = 0; j < n; ++j) best[0][j] = cost(0, j);

  for (std::size_t m = 1; m < kk; ++m) {
    // optimal split points are monotone in j: divide and conquer over j
    auto solve = [&](auto&& self, std::size_t lo, std::size_t hi, std::size_t opt_lo,
                     std::size_t opt_hi) -> void {
      if (lo > hi) return;
      const std::size_t mid = lo + (hi - lo) / 2;
      double best_val = kInf;
      std::size_t best_i = std::max(opt_lo, m);
      const std::size_t last = std::min(mid, opt_hi);
      for (std::size_t i = std::max(opt_lo, m); i <= last; ++i) {
        const double val = best[m - 1][i - 1] + cost(i, mid);
        if (val < best_val) {
          best_val = val;
          best_i = i;
        }
      }
      best[m][mid] = best_val;
      start[m][mid] = best_i;
      if (mid > lo) self(self, lo, mid - 1, opt_lo, best_i);
      self(self, mid + 1, hi, best_i, opt_hi);
    };
    solve(solve, m, n - 1, m, n - 1);
  }

  std::vector<Cluster1D> clusters(kk);
  std::size_t end = n - 1;
  for (std::size_t m = kk; m-- > 0;) {
    const std::size_t begin = m == 0 ? 0 : start[m][end];
    double count = 0;
    for (std::size_t i = begin; i <= end; ++i) count += v.w[i];
    clusters[m] = {v.x[begin], v.x[end], static_cast<std::size_t>(count)};
    if (begin == 0) break;
    end = begin - 1;
  }
  return clusters;
}

namespace {

std::vector<double> grid_quantiles(std::vector<double> axis, std::size_t parts) {
  std::sort(axis.begin(), axis.end());
  std::vector<double> q;
  for (std::size_t i = 0; i < parts; ++i) {
    const auto idx = static_cast<std::size_t>((static_cast<double>(i) + 0.5) *
                                              static_cast<double>(axis.size()) /
                                              static_cast<double>(parts));
    q.push_back(axis[std::min(idx, axis.size() - 1)]);
  }
  return q;
}

}  // namespace

std::vector<Cluster2D> kmeans_2d(std::span<const GeoPoint> points, std::size_t k, int max_iter) {
  if (points.empty() || k == 0) return {};

  std::map<std::pair<double, double>, std::size_t> counts;
  for (const auto& p : points) ++counts[{p.lat, p.lon}];
  std::vector<GeoPoint> pts;
  std::vector<double> weight;
  for (const auto& [key, c] : counts) {
    pts.push_back({key.first, key.second});
    weight.push_back(static_cast<double>(c));
  }
  const std::size_t kk = std::min(k, pts.size());

  std::vector<double> lats, lons;
  for (const auto& p : pts) {
    lats.push_back(p.lat);
    lons.push_back(p.lon);
  }
  const auto rows = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(kk))));
  const std::size_t cols = (kk + rows - 1) / rows;
  const auto lat_q = grid_quantiles(lats, rows);
  const auto lon_q = grid_quantiles(lons, cols);
  std::vector<GeoPoint> centroids;
  for (std::size_t r = 0; r < rows && centroids.size() < kk; ++r) {
    for (std::size_t c = 0; c < cols && centroids.size() < kk; ++c) {
      centroids.push_back({lat_q[r], lon_q[c]});
    }
  }

  std::vector<std::size_t> assign(pts.size(), kk);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double dl = pts[i].lat - centroids[c].lat;
        const double dn = pts[i].lon - centroids[c].lon;
        const double d = dl * dl + dn * dn;
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<double> sum_lat(centroids.size(), 0), sum_lon(centroids.size(), 0),
        sum_w(centroids.size(), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      sum_lat[assign[i]] += weight[i] * pts[i].lat;
      sum_lon[assign[i]] += weight[i] * pts[i].lon;
      sum_w[assign[i]] += weight[i];
    }
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      if (sum_w[c] > 0) centroids[c] = {sum_lat[c] / sum_w[c], sum_lon[c] / sum_w[c]};
    }
  }

  std::vector<Cluster2D> boxes(centroids.size());
  std::vector<bool> used(centroids.size(), false);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto& b = boxes[assign[i]];
    if (!used[assign[i]]) {
      b = {pts[i].lat, pts[i].lat, pts[i].lon, pts[i].lon, 0};
      used[assign[i]] = true;
    }
    b.lat_min = std::min(b.lat_min, pts[i].lat);
    b.lat_max = std::max(b.lat_max, pts[i].lat);
    b.lon_min = std::min(b.lon_min, pts[i].lon);
    b.lon_max = std::max(b.lon_max, pts[i].lon);
    b.count += static_cast<std::size_t>(weight[i]);
  }
  std::vector<Cluster2D> out;
  for (std::size_t c = 0; c < boxes.size(); ++c) {
    if (used[c]) out.push_back(boxes[c]);
  }
  std::sort(out.begin(), out.end(), [](const Cluster2D& a, const Cluster2D& b) {
    return a.lat_min != b.lat_min ? a.lat_min < b.lat_min : a.lon_min < b.lon_min;
  });
  return out;
}

}  // namespace dse
