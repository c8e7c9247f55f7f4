#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dse/table.hpp"

namespace dse {

// Synthetic bike-share scenario. Daily trips follow
//
//   trips = 500 + 25 * temperature - 30 * precipitation_mm + N(0, 120)
//
// with a seasonal temperature curve and rain on roughly 30% of days.
//
//   april      date, trips, temperature             (30 days)
//   extension  Date, trip_count, Temperature        (the other 11 months)
//   weather    day, precipitation_mm, wind_kmh      (every day of the year)
//
// plus distractors that share neither period nor schema.
struct BicycleTables {
  int year = 2023;
  TableData april;
  TableData extension;
  TableData weather;
  std::vector<std::pair<std::string, TableData>> distractors;  // (name, table)
};

BicycleTables generate_bicycle(std::uint64_t seed);

/// In-sample R^2 of an ordinary least-squares fit of y on xs with an
/// intercept, over rows where every value parses as a number.
double ols_r2(const TableData& table, std::string_view y, const std::vector<std::string>& xs);

struct BicycleReport {
  double r2_before = 0;
  double r2_after_union = 0;
  double r2_after_join = 0;
  std::size_t rows_before = 0;
  std::size_t rows_after_union = 0;
  std::string union_dataset;  // name of the dataset found by union search
  std::string join_dataset;   // name of the dataset found by join search
  std::vector<std::string> log;
};

/// Indexes the generated datasets, finds the extension by union search and
/// the weather table by join search, materializes both augmentations and
/// fits trips ~ temperature (+ precipitation) at each stage.
BicycleReport run_bicycle_demo(std::uint64_t seed);

}  // namespace dse
