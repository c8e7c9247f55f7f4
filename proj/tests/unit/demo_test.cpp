#include <gtest/gtest.h>

#include <cmath>

#include "dse/demo.hpp"
#include "testkit.hpp"

namespace dse {
namespace {

double pearson_sq(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy * sxy / (sxx * syy);
}

TEST(OlsR2, MatchesSquaredCorrelation) {
  testkit::Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x, y;
    std::vector<std::vector<std::string>> rows;
    const auto n = testkit::uniform(rng, 5, 60);
    for (std::size_t i = 0; i < n; ++i) {
      x.push_back(testkit::uniform_real(rng, -10, 10));
      y.push_back(2 * x.back() + testkit::uniform_real(rng, -8, 8));
      rows.push_back({std::to_string(x.back()), std::to_string(y.back())});
    }
    const auto table = make_table({"x", "y"}, rows);
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
      xs.push_back(std::stod(r[0]));
      ys.push_back(std::stod(r[1]));
    }
    EXPECT_NEAR(ols_r2(table, "y", {"x"}), pearson_sq(xs, ys), 1e-9);
  }
}

TEST(OlsR2, ExactFitAndNullRows) {
  const auto t = make_table({"a", "b", "y"}, {{"1", "0", "3"},
                                              {"2", "1", "7"},
                                              {"0", "3", "7"},
                                              {"5", "", "99"},
                                              {"4", "4", "17"},
                                              {"3", "1", "9"}});
  EXPECT_NEAR(ols_r2(t, "y", {"a", "b"}), 1.0, 1e-12);
}

TEST(BicycleDemo, TablesHaveDocumentedShape) {
  const auto b = generate_bicycle(3);
  EXPECT_EQ(b.april.row_count, 30u);
  EXPECT_EQ(b.april.row_count + b.extension.row_count, 365u);
  EXPECT_EQ(b.weather.row_count, 365u);
  EXPECT_EQ(b.extension.columns.front().name, "Date");
  EXPECT_FALSE(b.distractors.empty());
  EXPECT_EQ(write_csv(generate_bicycle(3).weather), write_csv(b.weather));
}

TEST(BicycleDemo, EachAugmentationRaisesFit) {
  for (std::uint64_t seed : {1u, 2u, 7u}) {
    const auto r = run_bicycle_demo(seed);
    EXPECT_EQ(r.rows_before, 30u);
    EXPECT_EQ(r.rows_after_union, 365u);
    EXPECT_EQ(r.union_dataset, "bike trips, rest of year");
    EXPECT_EQ(r.join_dataset, "daily weather");
    EXPECT_LT(r.r2_before, r.r2_after_union) << seed;
    EXPECT_LT(r.r2_after_union, r.r2_after_join) << seed;
  }
}

}  // namespace
}  // namespace dse
