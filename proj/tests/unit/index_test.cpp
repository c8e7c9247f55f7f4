#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>

#include "dse/strings.hpp"
#include "dse/error.hpp"
#include "dse/index.hpp"
#include "dse/serialize.hpp"
#include "dse/timestamp.hpp"
#include "testkit.hpp"

namespace dse {
namespace {

using testkit::Rng;

DatasetProfile make_profile(const std::string& name, const std::string& description, const TableData& t,
                            const std::string& source = "local") {
  DatasetMeta meta;
  meta.name = name;
  meta.description = description;
  meta.source = source;
  return profile_table(t, {}, meta);
}

TableData daily(int year, unsigned month, unsigned from, unsigned to) {
  std::vector<std::vector<std::string>> rows;
  for (unsigned d = from; d <= to; ++d) rows.push_back({format_iso8601(epoch_from_civil(year, month, d)).substr(0, 10), std::to_string(d)});
  return make_table({"date", "value"}, rows);
}

// Independent BM25: field-weighted term frequency, Lucene-style idf.
std::map<std::string, double> bm25_oracle(const std::vector<DatasetProfile>& docs, const std::vector<std::string>& query) {
  std::vector<std::map<std::string, double>> tf(docs.size());
  std::vector<double> len(docs.size(), 0);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto add = [&](const std::string& text, double w) {
      for (const auto& t : tokenize(text)) {
        tf[i][t] += w;
        len[i] += w;
      }
    };
    add(docs[i].name, 3);
    add(docs[i].description, 1);
    for (const auto& c : docs[i].columns) add(c.name, 2);
  }
  double avg = 0;
  for (double l : len) avg += l;
  avg /= static_cast<double>(docs.size());
  std::set<std::string> terms;
  for (const auto& q : query) {
    for (const auto& t : tokenize(q)) terms.insert(t);
  }
  std::map<std::string, double> out;
  for (const auto& term : terms) {
    double df = 0;
    for (const auto& m : tf) df += m.contains(term);
    if (df == 0) continue;
    const double n = static_cast<double>(docs.size());
    const double idf = std::log(1 + (n - df + 0.5) / (df + 0.5));
    for (std::size_t i = 0; i < docs.size(); ++i) {
      auto it = tf[i].find(term);
      if (it == tf[i].end()) continue;
      const double f = it->second;
      out[docs[i].id] += idf * f * 2.2 / (f + 1.2 * (0.25 + 0.75 * len[i] / avg));
    }
  }
  return out;
}

TEST(Index, AddGetRemove) {
  Index idx;
  const auto p = make_profile("Taxi trips", "yellow cabs", daily(2020, 4, 1, 30));
  const auto g0 = idx.generation();
  const auto g1 = idx.add_dataset(p);
  EXPECT_GT(g1, g0);
  ASSERT_NE(idx.get(p.id), nullptr);
  EXPECT_EQ(*idx.get(p.id), p);
  const std::vector<std::string> q{"taxi"};
  EXPECT_EQ(idx.query_keyword(q).size(), 1u);
  EXPECT_TRUE(idx.remove_dataset(p.id));
  EXPECT_GT(idx.generation(), g1);
  EXPECT_TRUE(idx.query_keyword(q).empty());
  EXPECT_TRUE(idx.query_temporal(0, 4'000'000'000).empty());
  EXPECT_FALSE(idx.remove_dataset(p.id));
}

TEST(Index, Bm25MatchesOracleOnFixtures) {
  std::vector<DatasetProfile> docs{
      make_profile("Taxi trips 2020", "yellow cab rides in the city", daily(2020, 4, 1, 10)),
      make_profile("Weather daily", "temperature and rain for the city", daily(2020, 5, 1, 10)),
      make_profile("Bike share", "citi bike trips per station", daily(2020, 6, 1, 10)),
  };
  Index idx;
  for (const auto& d : docs) idx.add_dataset(d);
  for (const std::vector<std::string>& q : {std::vector<std::string>{"taxi"}, {"trips"}, {"city", "rain"}, {"date"}}) {
    const auto hits = idx.query_keyword(q);
    const auto expected = bm25_oracle(docs, q);
    ASSERT_EQ(hits.size(), expected.size());
    for (const auto& h : hits) EXPECT_NEAR(h.score, expected.at(h.dataset_id), 1e-9);
  }
  const std::vector<std::string> taxi{"Taxi"};
  EXPECT_EQ(idx.query_keyword(taxi).front().dataset_id, docs[0].id);
  const std::vector<std::string> unknown{"zebra"};
  EXPECT_TRUE(idx.query_keyword(unknown).empty());
}

TEST(Index, SharedTokenSymmetry) {
  Index idx;
  const auto a = make_profile("alpha", "", make_table({"x"}, {{"1"}}));
  const auto b = make_profile("alpha", "", make_table({"x"}, {{"2"}}));
  idx.add_dataset(a);
  idx.add_dataset(b);
  const std::vector<std::string> q{"alpha"};
  const auto hits = idx.query_keyword(q);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_DOUBLE_EQ(hits[0].score, hits[1].score);
}

TEST(Index, TemporalProbeClosedIntervals) {
  Index idx;
  const auto p = make_profile("april", "", daily(2020, 4, 1, 30));
  idx.add_dataset(p);
  EXPECT_EQ(idx.query_temporal(epoch_from_civil(2020, 4, 15), epoch_from_civil(2020, 5, 15)).size(), 1u);
  EXPECT_TRUE(idx.query_temporal(epoch_from_civil(2020, 6, 1), epoch_from_civil(2020, 7, 1)).empty());
  const auto touch = idx.query_temporal(epoch_from_civil(2020, 4, 30), epoch_from_civil(2020, 5, 3));
  ASSERT_EQ(touch.size(), 1u);
  EXPECT_EQ(touch[0].column, "date");
  EXPECT_EQ(touch[0].resolution, Resolution::Day);
  const auto full = idx.query_temporal(epoch_from_civil(2020, 1, 1), epoch_from_civil(2021, 1, 1));
  EXPECT_DOUBLE_EQ(full[0].overlap, 1.0);
}

TEST(Index, SpatialProbe) {
  Index idx;
  std::vector<std::vector<std::string>> la;
  for (int i = 0; i < 20; ++i) la.push_back({std::to_string(34.0 + i * 0.01), std::to_string(-118.3 + i * 0.01)});
  const auto p = make_profile("la points", "", make_table({"latitude", "longitude"}, la));
  idx.add_dataset(p);
  const BoundingBox nyc{40.49, 40.92, -74.26, -73.70};
  EXPECT_TRUE(idx.query_spatial(nyc).empty());
  const BoundingBox la_box{33.9, 34.5, -118.5, -117.9};
  const auto hits = idx.query_spatial(la_box);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].lat_column, "latitude");
}

TEST(Index, LshIdenticalSetsCollide) {
  Index idx;
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 50; ++i) rows.push_back({"borough" + std::to_string(i)});
  const auto a = make_profile("a", "", make_table({"name"}, rows));
  const auto b = make_profile("b", "other", make_table({"label"}, rows));
  idx.add_dataset(a);
  idx.add_dataset(b);
  const auto& sketch = std::get<CategoricalSketch>(a.columns[0].summary);
  const auto refs = idx.query_lsh(sketch);
  ASSERT_EQ(refs.size(), 2u);
  EXPECT_EQ(idx.band_keys(sketch), idx.band_keys(std::get<CategoricalSketch>(b.columns[0].summary)));
  EXPECT_EQ(idx.band_keys(sketch).size(), 32u);
}

TEST(Index, RangeQueryCompletenessAgainstScan) {
  testkit::CorpusOptions o;
  o.datasets = 120;
  o.seed = 21;
  Index idx;
  std::vector<DatasetProfile> profiles;
  for (const auto& item : testkit::random_corpus(o)) profiles.push_back(profile_table(item.table, {}, item.meta));
  idx.add_datasets(profiles);
  Rng rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = static_cast<std::int64_t>(testkit::uniform(rng, 946684800, 1735689600));
    const auto b = a + static_cast<std::int64_t>(testkit::uniform(rng, 0, 400 * 86400));
    std::set<std::pair<std::string, std::string>> expected, got;
    for (const auto& p : profiles) {
      for (const auto& c : p.columns) {
        const auto* s = std::get_if<TemporalSummary>(&c.summary);
        if (!s) continue;
        for (const auto& r : s->ranges) {
          if (r.lo <= static_cast<double>(b) && static_cast<double>(a) <= r.hi) expected.insert({p.id, c.name});
        }
      }
    }
    for (const auto& h : idx.query_temporal(a, b)) got.insert({h.dataset_id, h.column});
    ASSERT_EQ(got, expected);
  }
}

TEST(Index, InterleavedAddRemoveConsistency) {
  testkit::CorpusOptions o;
  o.datasets = 40;
  o.seed = 4;
  std::vector<DatasetProfile> profiles;
  for (const auto& item : testkit::random_corpus(o)) profiles.push_back(profile_table(item.table, {}, item.meta));
  Index idx;
  std::set<std::string> live;
  Rng rng(1);
  for (int step = 0; step < 200; ++step) {
    const auto& p = profiles[testkit::uniform(rng, 0, profiles.size() - 1)];
    const auto before = idx.generation();
    if (testkit::coin(rng, 0.6)) {
      idx.add_dataset(p);
      live.insert(p.id);
      EXPECT_GT(idx.generation(), before);
    } else {
      EXPECT_EQ(idx.remove_dataset(p.id), live.erase(p.id) == 1);
    }
    const std::vector<std::string> q{"taxi", "weather", "records", "crime"};
    for (const auto& h : idx.query_keyword(q)) ASSERT_TRUE(live.contains(h.dataset_id));
    for (const auto& h : idx.query_temporal(0, 2'000'000'000)) ASSERT_TRUE(live.contains(h.dataset_id));
    for (const auto& h : idx.query_numeric(-1e9, 1e9)) ASSERT_TRUE(live.contains(h.dataset_id));
    for (const auto& h : idx.query_spatial({-90, 90, -180, 180})) ASSERT_TRUE(live.contains(h.dataset_id));
    for (const auto& c : p.columns) {
      if (const auto* s = std::get_if<CategoricalSketch>(&c.summary)) {
        for (const auto& r : idx.query_lsh(*s)) ASSERT_TRUE(live.contains(r.dataset_id));
      }
    }
    ASSERT_EQ(idx.size(), live.size());
  }
}

class IndexPersist : public ::testing::Test {
 protected:
  testkit::TempDir dir;
};

TEST_F(IndexPersist, RoundTripIsQueryEquivalent) {
  testkit::CorpusOptions o;
  o.datasets = 100;
  o.seed = 77;
  std::vector<DatasetProfile> profiles;
  for (const auto& item : testkit::random_corpus(o)) profiles.push_back(profile_table(item.table, {}, item.meta));
  Index idx;
  idx.add_datasets(profiles);
  idx.persist(dir.path());
  const auto back = Index::load(dir.path());
  ASSERT_EQ(back.ids(), idx.ids());
  for (const auto& id : idx.ids()) EXPECT_EQ(*back.get(id), *idx.get(id));
  EXPECT_EQ(back.generation(), idx.generation());
  const std::vector<std::string> q{"taxi", "crime", "date"};
  const auto a = idx.query_keyword(q), b = back.query_keyword(q);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].dataset_id, b[i].dataset_id);
    EXPECT_DOUBLE_EQ(a[i].score, b[i].score);
  }
  EXPECT_EQ(idx.query_temporal(1.2e9, 1.4e9).size(), back.query_temporal(1.2e9, 1.4e9).size());
  EXPECT_EQ(idx.query_spatial({0, 60, -100, 100}).size(), back.query_spatial({0, 60, -100, 100}).size());
  for (const auto& p : profiles) {
    for (const auto& c : p.columns) {
      if (const auto* s = std::get_if<CategoricalSketch>(&c.summary)) EXPECT_EQ(idx.query_lsh(*s), back.query_lsh(*s));
    }
  }
}

TEST_F(IndexPersist, TruncatedFileFailsChecksum) {
  Index idx;
  idx.add_dataset(make_profile("a", "", daily(2020, 1, 1, 5)));
  idx.persist(dir.path());
  bool truncated = false;
  for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
    if (e.path().filename() == "manifest.json") continue;
    const auto size = std::filesystem::file_size(e.path());
    if (size > 8) {
      std::filesystem::resize_file(e.path(), size / 2);
      truncated = true;
      break;
    }
  }
  ASSERT_TRUE(truncated);
  try {
    Index::load(dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ChecksumMismatch);
  }
}

TEST_F(IndexPersist, EmptyDirectory) {
  try {
    Index::load(dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyIndex);
  }
}

TEST_F(IndexPersist, UnknownVersionRejected) {
  Index idx;
  idx.add_dataset(make_profile("a", "", daily(2020, 1, 1, 5)));
  idx.persist(dir.path());
  auto manifest = nlohmann::json::parse(std::ifstream(dir / "manifest.json"));
  manifest["version"] = 99;
  testkit::write_text(dir / "manifest.json", manifest.dump());
  try {
    Index::load(dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::VersionUnsupported);
  }
}

}  // namespace
}  // namespace dse
