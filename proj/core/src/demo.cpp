#include "dse/demo.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "dse/augment.hpp"
#include "dse/error.hpp"
#include "dse/index.hpp"
#include "dse/search.hpp"
#include "dse/serialize.hpp"
#include "dse/strings.hpp"
#include "dse/timestamp.hpp"

namespace dse {

namespace {

std::string day_string(std::int64_t t) { return format_iso8601(t).substr(0, 10); }

std::string one_decimal(double x) { return format_number(std::round(x * 10) / 10); }

}  // namespace

BicycleTables generate_bicycle(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> temp_noise(0, 3);
  std::normal_distribution<double> trip_noise(0, 120);
  std::bernoulli_distribution rainy(0.3);
  std::exponential_distribution<double> rain_amount(1.0 / 8);
  std::normal_distribution<double> wind(15, 5);

  BicycleTables t;
  const auto jan1 = epoch_from_civil(t.year, 1, 1);
  std::vector<std::vector<std::string>> april, extension, weather;
  for (int d = 0; d < 365; ++d) {
    const auto ts = jan1 + std::int64_t{d} * 86400;
    const double temperature =
        12 - 12 * std::cos(2 * std::numbers::pi * (d - 15) / 365.0) + temp_noise(rng);
    const double rain = rainy(rng) ? rain_amount(rng) : 0.0;
    const double trips = std::max(0.0, 500 + 25 * temperature - 30 * rain + trip_noise(rng));
    std::vector<std::string> row{day_string(ts), format_number(std::round(trips)), one_decimal(temperature)};
    const auto date = day_string(ts);
    (date.substr(5, 2) == "04" ? april : extension).push_back(std::move(row));
    weather.push_back({date, one_decimal(rain), one_decimal(std::max(0.0, wind(rng)))});
  }
  t.april = make_table({"date", "trips", "temperature"}, april);
  t.extension = make_table({"Date", "trip_count", "Temperature"}, extension);
  t.weather = make_table({"day", "precipitation_mm", "wind_kmh"}, weather);

  // Same shapes, other years and places.
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::vector<std::string>> taxi, air, parks;
  const auto old = epoch_from_civil(2009, 1, 1);
  for (int i = 0; i < 200; ++i) {
    const auto ts = old + std::int64_t{i} * 3600;
    taxi.push_back({format_iso8601(ts), one_decimal(u(rng) * 30), one_decimal(5 + u(rng) * 60),
                    one_decimal(-34 - u(rng)), one_decimal(18 + u(rng))});
    air.push_back({day_string(old + std::int64_t{i} * 86400), one_decimal(u(rng) * 80),
                   std::vector<std::string>{"good", "moderate", "poor"}[i % 3]});
    parks.push_back({"park " + std::to_string(i), std::vector<std::string>{"north", "south", "east"}[i % 3],
                     one_decimal(u(rng) * 100)});
  }
  t.distractors.emplace_back("taxi fares 2009",
                             make_table({"pickup_time", "distance_km", "fare", "lat", "lon"}, taxi));
  t.distractors.emplace_back("air quality 2009", make_table({"reading_date", "pm25", "category"}, air));
  t.distractors.emplace_back("park inventory", make_table({"park_name", "district", "acres"}, parks));
  return t;
}

double ols_r2(const TableData& table, std::string_view y, const std::vector<std::string>& xs) {
  const auto* ycol = table.find(y);
  if (!ycol) throw Error(ErrorCode::InvalidSpec, "no column '" + std::string(y) + "'");
  std::vector<const Column*> xcols;
  for (const auto& x : xs) {
    const auto* c = table.find(x);
    if (!c) throw Error(ErrorCode::InvalidSpec, "no column '" + x + "'");
    xcols.push_back(c);
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < table.row_count; ++r) {
    std::vector<double> row;
    auto yv = parse_number(ycol->values[r]);
    if (!yv) continue;
    row.push_back(*yv);
    bool ok = true;
    for (const auto* c : xcols) {
      auto v = parse_number(c->values[r]);
      if (!v) {
        ok = false;
        break;
      }
      row.push_back(*v);
    }
    if (ok) rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(xs.size()) + 1;
  if (n <= p) throw Error(ErrorCode::InvalidSpec, "too few complete rows for the fit");
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd Y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    Y(i) = row[0];
    X(i, 0) = 1;
    for (Eigen::Index j = 1; j < p; ++j) X(i, j) = row[static_cast<std::size_t>(j)];
  }
  const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(Y);
  const double ssr = (Y - X * beta).squaredNorm();
  const double sst = (Y.array() - Y.mean()).square().sum();
  return sst > 0 ? 1.0 - ssr / sst : 0.0;
}

BicycleReport run_bicycle_demo(std::uint64_t seed) {
  const auto tables = generate_bicycle(seed);
  const ProfilerConfig config;
  BicycleReport report;

  Index index;
  std::map<std::string, const TableData*> by_id;
  std::map<std::string, std::string> names;
  const auto add = [&](const std::string& name, const TableData& t) {
    DatasetMeta meta;
    meta.name = name;
    meta.source = "demo";
    auto profile = profile_table(t, config, meta);
    by_id[profile.id] = &t;
    names[profile.id] = name;
    index.add_dataset(std::move(profile));
  };
  add("bike trips, rest of year", tables.extension);
  add("daily weather", tables.weather);
  for (const auto& [name, t] : tables.distractors) add(name, t);

  report.rows_before = tables.april.row_count;
  report.r2_before = ols_r2(tables.april, "trips", {"temperature"});
  report.log.push_back("baseline: " + std::to_string(report.rows_before) + " rows, R^2 " +
                       format_number(report.r2_before));

  DatasetMeta april_meta;
  april_meta.name = "april trips";
  const auto april_profile = profile_table(tables.april, config, april_meta);
  const auto unions = union_search(april_profile, index);
  if (unions.empty()) throw Error(ErrorCode::NotFound, "union search found nothing");
  const auto& best_union = unions.front();
  report.union_dataset = names.at(best_union.dataset_id);
  const auto unioned = union_tables(tables.april, *by_id.at(best_union.dataset_id), spec_from_candidate(best_union), config);
  report.rows_after_union = unioned.table.row_count;
  report.r2_after_union = ols_r2(unioned.table, "trips", {"temperature"});
  report.log.push_back("union with '" + report.union_dataset + "' (score " + format_number(best_union.union_score) +
                       "): " + std::to_string(report.rows_after_union) + " rows, R^2 " +
                       format_number(report.r2_after_union));

  DatasetMeta unioned_meta;
  unioned_meta.name = "trips, full year";
  const auto unioned_profile = profile_table(unioned.table, config, unioned_meta);
  const JoinCandidate* chosen = nullptr;
  const JoinPair* key = nullptr;
  const auto joins = join_search(unioned_profile, index);
  for (const auto& c : joins) {
    if (c.dataset_id == best_union.dataset_id) continue;
    for (const auto& p : c.pairs) {
      if (p.kind == PairKind::Temporal && (!key || p.containment_score > key->containment_score)) {
        chosen = &c;
        key = &p;
      }
    }
  }
  if (!chosen) throw Error(ErrorCode::NotFound, "join search found no temporal match");
  report.join_dataset = names.at(chosen->dataset_id);
  const auto& right = *by_id.at(chosen->dataset_id);
  AugmentationSpec spec;
  spec.pairs = {{key->query_columns.front(), key->candidate_columns.front()}};
  spec = with_default_aggregations(std::move(spec), right, config);
  const auto joined = join(unioned.table, right, spec, config);
  std::vector<std::string> regressors{"temperature"};
  for (std::size_t c = unioned.table.columns.size(); c < joined.table.columns.size(); ++c) {
    regressors.push_back(joined.table.columns[c].name);
  }
  report.r2_after_join = ols_r2(joined.table, "trips", regressors);
  report.log.push_back("join with '" + report.join_dataset + "' on " + spec.pairs.front().first + " = " +
                       spec.pairs.front().second + " (containment " + format_number(key->containment_score) +
                       "): R^2 " + format_number(report.r2_after_join));
  return report;
}

}  // namespace dse
