#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dse/error.hpp"
#include "dse/sketches.hpp"
#include "testkit.hpp"

namespace dse {
namespace {

using testkit::Rng;

std::vector<std::string> letters(char from, char to) {
  std::vector<std::string> out;
  for (char c = from; c <= to; ++c) out.emplace_back(1, c);
  return out;
}

std::vector<std::string> numbered(const std::string& tag, int from, int to) {
  std::vector<std::string> out;
  for (int i = from; i < to; ++i) out.push_back(tag + std::to_string(i));
  return out;
}

TEST(NumericSummary, Examples) {
  const std::vector<double> v{1, 2, 3, 100, 101, 102};
  const auto s = build_numeric_summary(v, 2);
  ASSERT_EQ(s.ranges.size(), 2u);
  EXPECT_EQ(s.ranges[0], (ValueRange{1, 3, 3}));
  EXPECT_EQ(s.ranges[1], (ValueRange{100, 102, 3}));

  std::vector<double> seq;
  for (int i = 0; i < 100; ++i) seq.push_back(i);
  const auto one = build_numeric_summary(seq, 1);
  ASSERT_EQ(one.ranges.size(), 1u);
  EXPECT_EQ(one.ranges[0], (ValueRange{0, 99, 100}));
  EXPECT_EQ(one.total_count, 100u);
}

TEST(NumericSummary, RejectsNonFinite) {
  const std::vector<double> v{1, std::nan("")};
  try {
    build_numeric_summary(v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteValue);
  }
}

TEST(NumericSummary, FaithfulToInput) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v;
    for (std::size_t i = 0, n = testkit::uniform(rng, 1, 300); i < n; ++i) {
      v.push_back(std::round(testkit::uniform_real(rng, -100, 100)));
    }
    const auto s = build_numeric_summary(v);
    std::size_t total = 0;
    for (std::size_t i = 0; i < s.ranges.size(); ++i) {
      total += s.ranges[i].count;
      if (i > 0) EXPECT_LE(s.ranges[i - 1].hi, s.ranges[i].lo);
    }
    EXPECT_EQ(total, v.size());
    EXPECT_EQ(s.total_count, v.size());
    for (double x : v) {
      EXPECT_TRUE(std::any_of(s.ranges.begin(), s.ranges.end(), [&](const auto& r) { return r.lo <= x && x <= r.hi; }));
    }
  }
}

TEST(TemporalSummary, CarriesResolution) {
  const std::vector<std::int64_t> t{0, 86400, 2 * 86400};
  const auto s = build_temporal_summary(t, 8, Resolution::Day);
  EXPECT_EQ(s.resolution, Resolution::Day);
  EXPECT_EQ(s.total_count, 3u);
}

TEST(SpatialSummary, CountsAndBounds) {
  Rng rng(8);
  std::vector<GeoPoint> pts;
  for (int i = 0; i < 500; ++i) pts.push_back({testkit::uniform_real(rng, -90, 90), testkit::uniform_real(rng, -180, 180)});
  const auto s = build_spatial_summary(pts);
  std::size_t total = 0;
  for (const auto& b : s.boxes) {
    total += b.count;
    EXPECT_GE(b.lat_min, -90);
    EXPECT_LE(b.lat_max, 90);
    EXPECT_GE(b.lon_min, -180);
    EXPECT_LE(b.lon_max, 180);
  }
  EXPECT_EQ(total, 500u);
  EXPECT_EQ(s.total_count, 500u);
}

TEST(CategoricalSketch, OrderMultiplicityAndCaseInvariant) {
  const std::vector<std::string> a{"x", "y", "z", "x"};
  const std::vector<std::string> b{"z", "y", "x"};
  EXPECT_EQ(build_categorical_sketch(a).signature, build_categorical_sketch(b).signature);
  const std::vector<std::string> c{"A", "b "};
  const std::vector<std::string> d{"a", "B"};
  EXPECT_EQ(build_categorical_sketch(c).signature, build_categorical_sketch(d).signature);
  EXPECT_EQ(build_categorical_sketch(a).signature.size(), 128u);
  EXPECT_EQ(build_categorical_sketch(a).cardinality, 3u);
}

TEST(CategoricalSketch, SeedsAreGlobal) {
  const auto s = minhash_seeds(128);
  EXPECT_EQ(s.size(), 128u);
  EXPECT_EQ(minhash_seeds(16)[5], s[5]);
}

TEST(Jaccard, OverlappingLetters) {
  const auto a = build_categorical_sketch(letters('a', 'j'));
  const auto b = build_categorical_sketch(letters('f', 'o'));
  EXPECT_NEAR(estimate_jaccard(a, b), 1.0 / 3.0, 0.15);
  EXPECT_EQ(estimate_jaccard(a, b), estimate_jaccard(b, a));
  EXPECT_EQ(estimate_jaccard(a, a), 1.0);
}

TEST(Jaccard, DisjointAndSubset) {
  const auto a = build_categorical_sketch(numbered("a", 0, 1000));
  const auto b = build_categorical_sketch(numbered("b", 0, 1000));
  EXPECT_LE(estimate_jaccard(a, b), 0.1);
  const auto small = build_categorical_sketch(numbered("s", 0, 500));
  const auto big = build_categorical_sketch(numbered("s", 0, 1000));
  EXPECT_NEAR(estimate_jaccard(small, big), 0.5, 0.15);
}

TEST(Jaccard, LengthMismatchRaises) {
  const auto a = build_categorical_sketch(letters('a', 'c'), 128);
  const auto b = build_categorical_sketch(letters('a', 'c'), 64);
  try {
    (void)estimate_jaccard(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SignatureLengthMismatch);
  }
}

TEST(Jaccard, EstimatorBand) {
  Rng rng(101);
  double total = 0, worst = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t universe = 400;
    const std::size_t shared = universe * static_cast<std::size_t>(1 + i % 9) / 10;
    auto [va, vb] = testkit::planted_pair(rng, universe, shared, "p");
    const double truth = testkit::exact_jaccard(testkit::folded_set(va), testkit::folded_set(vb));
    const double err = std::abs(estimate_jaccard(build_categorical_sketch(va), build_categorical_sketch(vb)) - truth);
    total += err;
    worst = std::max(worst, err);
  }
  EXPECT_LE(total / 200, 0.05);
  EXPECT_LE(worst, 0.20);
}

TEST(Containment, Examples) {
  const auto a = build_categorical_sketch(numbered("v", 0, 50));
  const auto b = build_categorical_sketch(numbered("v", 0, 100));
  EXPECT_GE(estimate_containment(a, b), 0.8);
  const auto c = build_categorical_sketch(numbered("w", 0, 100));
  EXPECT_LE(estimate_containment(a, c), 0.1);
  EXPECT_EQ(estimate_containment(a, a), 1.0);
  EXPECT_EQ(estimate_containment(build_categorical_sketch(std::vector<std::string>{}), a), 0.0);
}

TEST(Containment, TracksOracle) {
  Rng rng(77);
  for (int i = 0; i < 100; ++i) {
    const auto na = testkit::uniform(rng, 50, 300);
    const auto nb = testkit::uniform(rng, 50, 300);
    const auto shared = testkit::uniform(rng, 0, std::min(na, nb));
    std::vector<std::string> a = numbered("s", 0, static_cast<int>(shared));
    std::vector<std::string> b = a;
    for (auto& v : numbered("a", 0, static_cast<int>(na - shared))) a.push_back(v);
    for (auto& v : numbered("b", 0, static_cast<int>(nb - shared))) b.push_back(v);
    const double truth = testkit::exact_containment(testkit::folded_set(a), testkit::folded_set(b));
    const double est = estimate_containment(build_categorical_sketch(a), build_categorical_sketch(b));
    EXPECT_GE(est, 0.0);
    EXPECT_LE(est, 1.0);
    EXPECT_NEAR(est, truth, 0.35) << na << " " << nb << " " << shared;
  }
}

TEST(Cardinality, KmvEstimate) {
  const auto s = build_categorical_sketch(numbered("k", 0, 5000));
  EXPECT_NEAR(estimate_cardinality(s) / 5000.0, 1.0, 0.3);
}

TEST(RangeOverlap, Examples) {
  const std::vector<ValueRange> q{{0, 10, 5}};
  const std::vector<ValueRange> c{{5, 15, 5}};
  EXPECT_DOUBLE_EQ(estimate_range_overlap(q, c), 0.5);
  EXPECT_DOUBLE_EQ(estimate_range_overlap(c, q), 0.5);
  EXPECT_DOUBLE_EQ(estimate_range_overlap(q, q), 1.0);

  const std::vector<ValueRange> two{{0, 1, 4}, {10, 11, 4}};
  const std::vector<ValueRange> first{{0, 1, 1}};
  EXPECT_DOUBLE_EQ(estimate_range_overlap(two, first), 0.5);

  const std::vector<ValueRange> wide{{0, 100, 1}};
  EXPECT_DOUBLE_EQ(estimate_range_overlap(q, wide), 1.0);
  EXPECT_DOUBLE_EQ(estimate_range_overlap(wide, q), 0.1);
}

TEST(RangeOverlap, PointRanges) {
  const std::vector<ValueRange> p{{3, 3, 1}};
  const std::vector<ValueRange> in{{0, 5, 1}};
  const std::vector<ValueRange> out{{4, 5, 1}};
  EXPECT_EQ(estimate_range_overlap(p, in), 1.0);
  EXPECT_EQ(estimate_range_overlap(p, out), 0.0);
  EXPECT_EQ(estimate_range_overlap(std::span<const ValueRange>{}, in), 0.0);
}

TEST(RangeOverlap, BoundedAndMatchesMeasureOracle) {
  Rng rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<ValueRange> q, c;
    double x = 0;
    for (std::size_t i = 0, n = testkit::uniform(rng, 1, 5); i < n; ++i) {
      x += testkit::uniform_real(rng, 0.5, 5);
      const double w = testkit::uniform_real(rng, 0.5, 5);
      q.push_back({x, x + w, testkit::uniform(rng, 1, 10)});
      x += w;
    }
    double y = 0;
    for (std::size_t i = 0, n = testkit::uniform(rng, 1, 5); i < n; ++i) {
      y += testkit::uniform_real(rng, 0, 6);
      const double w = testkit::uniform_real(rng, 0.5, 6);
      c.push_back({y, y + w, 1});
      y += w;
    }
    // Oracle: numerical integration of the covered fraction of each query range.
    double total = 0, expected = 0;
    for (const auto& r : q) total += static_cast<double>(r.count);
    for (const auto& r : q) {
      const int steps = 4000;
      int covered = 0;
      for (int s = 0; s < steps; ++s) {
        const double p = r.lo + (r.hi - r.lo) * (s + 0.5) / steps;
        covered += std::any_of(c.begin(), c.end(), [&](const auto& cr) { return cr.lo <= p && p <= cr.hi; });
      }
      expected += static_cast<double>(r.count) / total * covered / steps;
    }
    const double got = estimate_range_overlap(q, c);
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, 1.0);
    EXPECT_NEAR(got, expected, 2e-3);
  }
}

TEST(SpatialOverlap, Examples) {
  SpatialSummary q{{{0, 10, 0, 10, 1}, {20, 30, 20, 30, 1}}, 2};
  EXPECT_DOUBLE_EQ(estimate_spatial_overlap(q, q), 1.0);
  SpatialSummary west{{{0, 10, 0, 5, 1}, {20, 30, 20, 25, 1}}, 2};
  EXPECT_DOUBLE_EQ(estimate_spatial_overlap(q, west), 0.5);
  SpatialSummary north{{{10, 80, -170, 170, 1}}, 1};
  SpatialSummary south{{{-80, -10, -170, 170, 1}}, 1};
  EXPECT_EQ(estimate_spatial_overlap(north, south), 0.0);
  SpatialSummary point{{{5, 5, 5, 5, 1}}, 1};
  EXPECT_EQ(estimate_spatial_overlap(point, q), 1.0);
}

}  // namespace
}  // namespace dse
