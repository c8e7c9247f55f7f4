#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <cmath>
#include <map>
#include <set>

#include "dse/kmeans.hpp"
#include "testkit.hpp"

namespace dse {
namespace {

double sse(const std::vector<double>& sorted, const std::vector<std::size_t>& cuts) {
  double total = 0;
  std::size_t begin = 0;
  for (std::size_t end : cuts) {
    double mean = 0;
    for (std::size_t i = begin; i < end; ++i) mean += sorted[i];
    mean /= static_cast<double>(end - begin);
    for (std::size_t i = begin; i < end; ++i) total += (sorted[i] - mean) * (sorted[i] - mean);
    begin = end;
  }
  return total;
}

// Minimum SSE over every split of the sorted values into exactly k
// non-empty runs that never separate equal values.
double brute_force_sse(std::vector<double> v, std::size_t k) {
  std::sort(v.begin(), v.end());
  std::vector<std::size_t> boundaries;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] != v[i - 1]) boundaries.push_back(i);
  }
  const std::size_t need = k - 1;
  double best = std::numeric_limits<double>::infinity();
  if (boundaries.size() < need) return best;
  std::vector<bool> pick(boundaries.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(need), true);
  std::sort(pick.begin(), pick.end());
  do {
    std::vector<std::size_t> cuts;
    for (std::size_t i = 0; i < pick.size(); ++i) {
      if (pick[i]) cuts.push_back(boundaries[i]);
    }
    cuts.push_back(v.size());
    best = std::min(best, sse(v, cuts));
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

double clusters_sse(const std::vector<double>& values, const std::vector<Cluster1D>& clusters) {
  std::vector<std::vector<double>> members(clusters.size());
  for (double x : values) {
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      if (x >= clusters[c].lo && x <= clusters[c].hi) {
        members[c].push_back(x);
        break;
      }
    }
  }
  double total = 0;
  for (const auto& m : members) {
    double mean = 0;
    for (double x : m) mean += x;
    mean /= static_cast<double>(m.size());
    for (double x : m) total += (x - mean) * (x - mean);
  }
  return total;
}

TEST(KMeans1D, TwoObviousGroups) {
  const std::vector<double> v{1, 2, 3, 100, 101, 102};
  const auto c = kmeans_1d(v, 2);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].lo, 1);
  EXPECT_EQ(c[0].hi, 3);
  EXPECT_EQ(c[0].count, 3u);
  EXPECT_EQ(c[1].lo, 100);
  EXPECT_EQ(c[1].hi, 102);
}

TEST(KMeans1D, KCappedByDistinct) {
  const std::vector<double> v{5, 5, 5};
  const auto c = kmeans_1d(v, 4);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].count, 3u);
}

TEST(KMeans1D, GlobalOptimumOnSmallInputs) {
  testkit::Rng rng(17);
  for (int trial = 0; trial < 3000; ++trial) {
    const auto distinct = testkit::uniform(rng, 1, 12);
    std::vector<double> pool;
    for (std::size_t i = 0; i < distinct; ++i) pool.push_back(std::round(testkit::uniform_real(rng, -50, 50)));
    std::vector<double> v;
    for (std::size_t i = 0, n = testkit::uniform(rng, distinct, 20); i < n; ++i) {
      v.push_back(pool[i < distinct ? i : testkit::uniform(rng, 0, distinct - 1)]);
    }
    const auto k = testkit::uniform(rng, 1, 3);
    const auto clusters = kmeans_1d(v, k);
    std::size_t real_distinct = std::set<double>(v.begin(), v.end()).size();
    ASSERT_EQ(clusters.size(), std::min(k, real_distinct));
    const double expected = brute_force_sse(v, clusters.size());
    ASSERT_NEAR(clusters_sse(v, clusters), expected, 1e-6 * (1 + expected)) << "trial " << trial;
  }
}

TEST(KMeans1D, ClustersSortedDisjointAndCounted) {
  testkit::Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> v;
    for (std::size_t i = 0, n = testkit::uniform(rng, 1, 400); i < n; ++i) v.push_back(testkit::uniform_real(rng, -1e3, 1e3));
    const auto c = kmeans_1d(v, testkit::uniform(rng, 1, 10));
    std::size_t total = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      EXPECT_LE(c[i].lo, c[i].hi);
      if (i > 0) EXPECT_LT(c[i - 1].hi, c[i].lo);
      total += c[i].count;
    }
    EXPECT_EQ(total, v.size());
  }
}

TEST(KMeans2D, TwoCitiesSeparate) {
  testkit::Rng rng(2);
  std::vector<GeoPoint> pts;
  for (int i = 0; i < 60; ++i) pts.push_back({40.7 + testkit::uniform_real(rng, -0.05, 0.05), -74.0 + testkit::uniform_real(rng, -0.05, 0.05)});
  for (int i = 0; i < 40; ++i) pts.push_back({34.05 + testkit::uniform_real(rng, -0.05, 0.05), -118.24 + testkit::uniform_real(rng, -0.05, 0.05)});
  auto boxes = kmeans_2d(pts, 2);
  ASSERT_EQ(boxes.size(), 2u);
  std::sort(boxes.begin(), boxes.end(), [](const auto& a, const auto& b) { return a.lat_min < b.lat_min; });
  EXPECT_EQ(boxes[0].count, 40u);
  EXPECT_EQ(boxes[1].count, 60u);
  // Each box holds exactly its own cluster's points.
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& b = boxes[i < 60 ? 1 : 0];
    EXPECT_TRUE(pts[i].lat >= b.lat_min && pts[i].lat <= b.lat_max && pts[i].lon >= b.lon_min && pts[i].lon <= b.lon_max);
  }
}

TEST(KMeans2D, SinglePointAndFullGrid) {
  const std::vector<GeoPoint> one{{10, 20}};
  const auto b = kmeans_2d(one, 3);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].lat_min, b[0].lat_max);

  std::vector<GeoPoint> grid;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) grid.push_back({static_cast<double>(i), static_cast<double>(j)});
  }
  const auto g = kmeans_2d(grid, 1);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].count, 100u);
  EXPECT_EQ(g[0].lat_min, 0);
  EXPECT_EQ(g[0].lat_max, 9);
  EXPECT_EQ(g[0].lon_max, 9);
}

}  // namespace
}  // namespace dse
