#include "testkit.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "dse/strings.hpp"
#include "dse/timestamp.hpp"

namespace fs = std::filesystem;

namespace dse::testkit {

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = fs::temp_directory_path() /
          ("dse-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::string random_word(Rng& rng, std::size_t min_len, std::size_t max_len) {
  std::string w;
  const auto n = uniform(rng, min_len, max_len);
  for (std::size_t i = 0; i < n; ++i) w.push_back(static_cast<char>('a' + uniform(rng, 0, 25)));
  return w;
}

namespace {

std::string lower_trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  std::string out = s.substr(b, e - b + 1);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool oracle_null(const std::string& s) {
  static const std::set<std::string> literals{"", "na", "n/a", "null", "none", "-"};
  return literals.contains(lower_trim(s));
}

std::optional<double> oracle_number(const std::string& s) {
  const auto t = lower_trim(s);
  if (t.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool same_name(const std::string& a, const std::string& b) { return lower_trim(a) == lower_trim(b); }

}  // namespace

std::set<std::string> folded_set(const std::vector<std::string>& values) {
  std::set<std::string> out;
  for (const auto& v : values) {
    if (!oracle_null(v)) out.insert(lower_trim(v));
  }
  return out;
}

double exact_jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.contains(x);
  const auto uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double exact_containment(const std::set<std::string>& query, const std::set<std::string>& candidate) {
  if (query.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& x : query) inter += candidate.contains(x);
  return static_cast<double>(inter) / static_cast<double>(query.size());
}

std::pair<std::vector<std::string>, std::vector<std::string>> planted_pair(Rng& rng, std::size_t universe,
                                                                          std::size_t shared,
                                                                          const std::string& tag) {
  std::vector<std::string> a, b;
  const auto salt = std::to_string(rng());
  for (std::size_t i = 0; i < universe; ++i) {
    auto v = tag + "-" + salt + "-" + std::to_string(i);
    if (i < shared) {
      a.push_back(v);
      b.push_back(v);
    } else if ((i - shared) % 2 == 0) {
      a.push_back(v);
    } else {
      b.push_back(v);
    }
  }
  return {a, b};
}

std::string canonical_csv(const TableData& t) {
  TableData c = t;
  for (auto& col : c.columns) {
    for (auto& v : col.values) {
      if (auto n = oracle_number(v)) v = format_number(*n == 0 ? 0.0 : *n);
    }
  }
  return write_csv(c);
}

std::optional<std::int64_t> oracle_parse_time(const std::string& s) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
  const auto t = lower_trim(s);
  if (std::sscanf(t.c_str(), "%4d-%2d-%2dt%2d:%2d:%2dz", &y, &mo, &d, &h, &mi, &se) == 6 ||
      (t.size() == 10 && std::sscanf(t.c_str(), "%4d-%2d-%2d", &y, &mo, &d) == 3) ||
      (t.size() == 7 && std::sscanf(t.c_str(), "%4d-%2d", &y, &mo) == 2 && (d = 1))) {
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd}.time_since_epoch().count() * 86400LL + h * 3600LL + mi * 60LL + se;
  }
  return std::nullopt;
}

std::int64_t oracle_truncate(std::int64_t t, Resolution r) {
  using namespace std::chrono;
  const sys_seconds tp{seconds{t}};
  const auto dp = floor<days>(tp);
  const year_month_day ymd{dp};
  switch (r) {
    case Resolution::Second: return t;
    case Resolution::Minute: return floor<minutes>(tp).time_since_epoch().count() * 60;
    case Resolution::Hour: return floor<hours>(tp).time_since_epoch().count() * 3600;
    case Resolution::Day: return dp.time_since_epoch().count() * 86400LL;
    case Resolution::Week: {
      const weekday wd{dp};
      const auto back = (wd.c_encoding() + 6) % 7;  // days since Monday
      return (dp - days{back}).time_since_epoch().count() * 86400LL;
    }
    case Resolution::Month:
      return sys_days{ymd.year() / ymd.month() / 1}.time_since_epoch().count() * 86400LL;
    case Resolution::Quarter: {
      const unsigned m = static_cast<unsigned>(ymd.month());
      const unsigned q = (m - 1) / 3 * 3 + 1;
      return sys_days{ymd.year() / month{q} / 1}.time_since_epoch().count() * 86400LL;
    }
    case Resolution::Year:
      return sys_days{ymd.year() / January / 1}.time_since_epoch().count() * 86400LL;
  }
  return t;
}

namespace {

bool keys_equal(const std::string& a, const std::string& b, Kind kind, const OracleSpec& spec) {
  if (oracle_null(a) || oracle_null(b)) return false;
  switch (kind) {
    case Kind::Categorical: return lower_trim(a) == lower_trim(b);
    case Kind::Numeric: {
      const auto x = oracle_number(a), y = oracle_number(b);
      return x && y && *x == *y;
    }
    case Kind::Temporal: {
      const auto x = oracle_parse_time(a), y = oracle_parse_time(b);
      return x && y && oracle_truncate(*x, *spec.resolution) == oracle_truncate(*y, *spec.resolution);
    }
    case Kind::Latitude:
    case Kind::Longitude: {
      const auto x = oracle_number(a), y = oracle_number(b);
      if (!x || !y) return false;
      if (spec.spec.spatial_grid_degrees) {
        const double g = *spec.spec.spatial_grid_degrees;
        return std::floor(*x / g) == std::floor(*y / g);
      }
      return *x == *y;
    }
  }
  return false;
}

std::string aggregate(AggregationFn fn, const std::vector<std::string>& cells) {
  std::vector<std::string> present;
  for (const auto& c : cells) {
    if (!oracle_null(c)) present.push_back(c);
  }
  switch (fn) {
    case AggregationFn::Count: return std::to_string(present.size());
    case AggregationFn::First: return present.empty() ? "" : present.front();
    default: break;
  }
  std::vector<double> xs;
  for (const auto& c : present) {
    if (auto v = oracle_number(c)) xs.push_back(*v);
  }
  if (xs.empty()) return "";
  double out = xs.front();
  if (fn == AggregationFn::Max) {
    for (double x : xs) out = std::max(out, x);
  } else if (fn == AggregationFn::Min) {
    for (double x : xs) out = std::min(out, x);
  } else {
    out = 0;
    for (double x : xs) out += x;
    if (fn == AggregationFn::Mean) out /= static_cast<double>(xs.size());
  }
  return format_number(out);
}

const Column& column_named(const TableData& t, const std::string& name) {
  for (const auto& c : t.columns) {
    if (c.name == name) return c;
  }
  throw std::runtime_error("oracle: no column " + name);
}

}  // namespace

TableData oracle_join(const TableData& left, const TableData& right, const OracleSpec& os) {
  const auto& spec = os.spec;
  std::vector<std::string> include = spec.include_columns;
  if (include.empty()) {
    for (const auto& c : right.columns) {
      const bool is_key = std::any_of(spec.pairs.begin(), spec.pairs.end(),
                                      [&](const auto& p) { return p.second == c.name; });
      if (!is_key) include.push_back(c.name);
    }
  }
  TableData out = left;
  for (const auto& name : include) {
    const auto& src = column_named(right, name);
    Column col;
    col.name = name;
    bool clash = std::any_of(out.columns.begin(), out.columns.end(),
                             [&](const Column& c) { return same_name(c.name, col.name); });
    if (clash) col.name += "_right";
    for (std::size_t lr = 0; lr < left.row_count; ++lr) {
      std::vector<std::string> group;
      for (std::size_t rr = 0; rr < right.row_count; ++rr) {
        bool match = true;
        for (std::size_t p = 0; p < spec.pairs.size() && match; ++p) {
          match = keys_equal(column_named(left, spec.pairs[p].first).values[lr],
                             column_named(right, spec.pairs[p].second).values[rr], os.key_kinds[p], os);
        }
        if (match) group.push_back(src.values[rr]);
      }
      col.values.push_back(aggregate(spec.agg.at(name), group));
    }
    out.columns.push_back(std::move(col));
  }
  return out;
}

TableData oracle_union(const TableData& left, const TableData& right, const AugmentationSpec& spec) {
  TableData out = left;
  for (auto& col : out.columns) {
    const std::string* source = nullptr;
    for (const auto& [l, r] : spec.pairs) {
      if (l == col.name) source = &r;
    }
    for (std::size_t rr = 0; rr < right.row_count; ++rr) {
      if (!source) {
        col.values.emplace_back();
        continue;
      }
      const auto& cell = column_named(right, *source).values[rr];
      col.values.push_back(oracle_null(cell) ? std::string{} : cell);
    }
  }
  out.row_count = left.row_count + right.row_count;
  return out;
}

// ---- corpus ----------------------------------------------------------------

namespace {

const std::vector<std::string>& topics() {
  static const std::vector<std::string> t{"taxi",    "weather", "crime",   "housing", "school",  "energy",
                                          "traffic", "health",  "permits", "transit", "budget",  "noise",
                                          "water",   "parks",   "library", "fires",   "bicycle", "census"};
  return t;
}

std::string date_string(std::int64_t t, Resolution r) {
  const auto iso = format_iso8601(t);
  return r >= Resolution::Day ? iso.substr(0, 10) : iso;
}

}  // namespace

std::vector<CorpusItem> random_corpus(const CorpusOptions& o) {
  Rng rng(o.seed);
  std::vector<std::string> vocabulary;
  for (int i = 0; i < 300; ++i) vocabulary.push_back(random_word(rng));

  std::vector<CorpusItem> out;
  for (std::size_t d = 0; d < o.datasets; ++d) {
    CorpusItem item;
    const auto& topic = topics()[uniform(rng, 0, topics().size() - 1)];
    const auto& topic2 = topics()[uniform(rng, 0, topics().size() - 1)];
    item.meta.name = topic + " " + random_word(rng) + " " + std::to_string(d);
    item.meta.description = "records about " + topic2 + " and " + vocabulary[uniform(rng, 0, vocabulary.size() - 1)];
    item.meta.source = o.sources[uniform(rng, 0, o.sources.size() - 1)];

    const auto rows = uniform(rng, o.min_rows, o.max_rows);
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> cols;
    const auto add = [&](std::string name, std::vector<std::string> values) {
      names.push_back(std::move(name));
      cols.push_back(std::move(values));
    };
    // categorical
    for (std::size_t c = 0, n = uniform(rng, 1, 3); c < n; ++c) {
      std::vector<std::string> v;
      const auto base = uniform(rng, 0, vocabulary.size() - 41);
      const auto span = uniform(rng, 3, 40);
      for (std::size_t r = 0; r < rows; ++r) v.push_back(vocabulary[base + uniform(rng, 0, span)]);
      add("cat_" + vocabulary[uniform(rng, 0, vocabulary.size() - 1)], std::move(v));
    }
    // numeric
    for (std::size_t c = 0, n = uniform(rng, 0, 3); c < n; ++c) {
      std::vector<std::string> v;
      const double lo = uniform_real(rng, -1000, 1000);
      const double width = uniform_real(rng, 1, 500);
      for (std::size_t r = 0; r < rows; ++r) {
        v.push_back(coin(rng, 0.03) ? "" : format_number(std::round((lo + uniform_real(rng, 0, width)) * 100) / 100));
      }
      add("measure_" + std::to_string(c), std::move(v));
    }
    // temporal
    if (coin(rng, 0.7)) {
      const Resolution res = std::vector<Resolution>{Resolution::Hour, Resolution::Day, Resolution::Month}[uniform(rng, 0, 2)];
      const auto start = epoch_from_civil(static_cast<int>(uniform(rng, 2000, 2023)), static_cast<unsigned>(uniform(rng, 1, 12)), 1);
      const std::int64_t step = res == Resolution::Hour ? 3600 : res == Resolution::Day ? 86400 : 31 * 86400;
      std::vector<std::string> v;
      for (std::size_t r = 0; r < rows; ++r) {
        auto t = start + static_cast<std::int64_t>(r) * step;
        if (res == Resolution::Month) t = truncate_to(t, Resolution::Month);
        v.push_back(date_string(t, res));
      }
      std::shuffle(v.begin(), v.end(), rng);
      add(coin(rng, 0.5) ? "date" : "timestamp", std::move(v));
    }
    // spatial
    if (coin(rng, 0.5)) {
      const double clat = uniform_real(rng, -60, 60), clon = uniform_real(rng, -170, 170);
      const double spread = uniform_real(rng, 0.05, 5);
      std::vector<std::string> la, lo;
      for (std::size_t r = 0; r < rows; ++r) {
        la.push_back(format_number(std::round(std::clamp(clat + uniform_real(rng, -spread, spread), -90.0, 90.0) * 1e4) / 1e4));
        lo.push_back(format_number(std::round(std::clamp(clon + uniform_real(rng, -spread, spread), -180.0, 180.0) * 1e4) / 1e4));
      }
      add("latitude", std::move(la));
      add("longitude", std::move(lo));
    }
    TableData t;
    for (std::size_t c = 0; c < names.size(); ++c) t.columns.push_back({names[c], std::move(cols[c])});
    t.row_count = rows;
    item.table = std::move(t);
    out.push_back(std::move(item));
  }
  return out;
}

namespace {

std::set<std::string> oracle_tokens(const std::string& text) {
  std::set<std::string> out;
  std::string cur;
  for (char ch : text + " ") {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    } else if (!cur.empty()) {
      out.insert(cur);
      cur.clear();
    }
  }
  return out;
}

}  // namespace

std::set<std::string> oracle_filter(const std::vector<DatasetProfile>& profiles, const Query& q,
                                    const BoundingBox* area) {
  std::set<std::string> query_tokens;
  for (const auto& k : q.keywords) {
    for (const auto& t : oracle_tokens(k)) query_tokens.insert(t);
  }
  std::set<std::string> out;
  for (const auto& p : profiles) {
    if (!q.keywords.empty()) {
      auto doc = oracle_tokens(p.name + " " + p.description);
      for (const auto& c : p.columns) {
        for (const auto& t : oracle_tokens(c.name)) doc.insert(t);
      }
      if (std::none_of(query_tokens.begin(), query_tokens.end(), [&](const auto& t) { return doc.contains(t); })) {
        continue;
      }
    }
    if (q.temporal) {
      bool hit = false;
      for (const auto& c : p.columns) {
        const auto* s = std::get_if<TemporalSummary>(&c.summary);
        if (!s) continue;
        if (q.temporal->resolution && static_cast<int>(s->resolution) > static_cast<int>(*q.temporal->resolution)) {
          continue;
        }
        for (const auto& r : s->ranges) {
          hit = hit || (r.lo <= static_cast<double>(q.temporal->end) && static_cast<double>(q.temporal->start) <= r.hi);
        }
      }
      if (!hit) continue;
    }
    if (q.spatial) {
      const BoundingBox box = q.spatial->box ? *q.spatial->box : *area;
      bool hit = false;
      for (const auto& cov : p.spatial_coverage) {
        for (const auto& b : cov.summary.boxes) {
          hit = hit || (b.lat_min <= box.lat_max && box.lat_min <= b.lat_max && b.lon_min <= box.lon_max &&
                        box.lon_min <= b.lon_max);
        }
      }
      if (!hit) continue;
    }
    if (q.sources && !q.sources->contains(p.source)) continue;
    if (q.required_types) {
      bool all = true;
      for (auto t : *q.required_types) {
        all = all && std::any_of(p.columns.begin(), p.columns.end(), [&](const ColumnProfile& c) { return c.type() == t; });
      }
      if (!all) continue;
    }
    out.insert(p.id);
  }
  return out;
}

}  // namespace dse::testkit

namespace dse::testkit {

namespace {

std::string noisy_case(Rng& rng, const std::string& w) {
  std::string out = w;
  if (coin(rng, 0.3)) {
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  if (coin(rng, 0.2)) out = " " + out + " ";
  return out;
}

// Row 0 is never null so every column keeps a detectable type.
std::string maybe_null(Rng& rng, std::string v, double p, std::size_t row) {
  if (row == 0 || !coin(rng, p)) return v;
  static const std::vector<std::string> nulls{"", "NA", "null", "-"};
  return nulls[uniform(rng, 0, nulls.size() - 1)];
}

// Integers and quarters keep sums exact whatever the summation order.
std::string exact_number(Rng& rng, int lo, int hi) {
  const double v = static_cast<double>(static_cast<int>(uniform(rng, 0, static_cast<std::size_t>(hi - lo))) + lo) +
                   0.25 * static_cast<double>(uniform(rng, 0, 3));
  return format_number(v);
}

std::vector<std::string> value_column(Rng& rng, std::size_t rows, bool numeric, const std::vector<std::string>& words) {
  std::vector<std::string> v;
  for (std::size_t r = 0; r < rows; ++r) {
    v.push_back(maybe_null(rng, numeric ? exact_number(rng, 0, 500) : words[uniform(rng, 0, words.size() - 1)], 0.05, r));
  }
  return v;
}

AugmentCase random_union_case(Rng& rng) {
  AugmentCase c;
  c.label = "union";
  std::vector<std::string> words;
  for (int i = 0; i < 20; ++i) words.push_back(random_word(rng));
  const auto ncols = uniform(rng, 1, 4);
  std::vector<bool> numeric;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < ncols; ++i) {
    numeric.push_back(coin(rng, 0.5));
    names.push_back((numeric.back() ? "amount_" : "label_") + std::to_string(i));
  }
  const auto lrows = uniform(rng, 1, 200);
  const auto rrows = uniform(rng, 1, 200);
  for (std::size_t i = 0; i < ncols; ++i) c.left.columns.push_back({names[i], value_column(rng, lrows, numeric[i], words)});
  c.left.row_count = lrows;
  // Right side: shuffled, renamed columns for a subset plus one extra column.
  std::vector<std::size_t> order(ncols);
  for (std::size_t i = 0; i < ncols; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const auto matched = uniform(rng, 1, ncols);
  for (std::size_t k = 0; k < matched; ++k) {
    const auto i = order[k];
    const auto rname = "R_" + names[i];
    c.right.columns.push_back({rname, value_column(rng, rrows, numeric[i], words)});
    c.oracle.spec.pairs.emplace_back(names[i], rname);
  }
  c.right.columns.push_back({"extra", value_column(rng, rrows, false, words)});
  std::shuffle(c.right.columns.begin(), c.right.columns.end(), rng);
  c.right.row_count = rrows;
  c.oracle.spec.mode = AugmentMode::Union;
  return c;
}

}  // namespace

AugmentCase random_augment_case(Rng& rng) {
  if (coin(rng, 0.3)) return random_union_case(rng);
  AugmentCase c;
  auto& spec = c.oracle.spec;
  spec.mode = AugmentMode::Join;
  std::vector<std::string> words;
  for (int i = 0; i < 30; ++i) words.push_back(random_word(rng));
  const auto lrows = uniform(rng, 1, 200);
  const auto rrows = uniform(rng, 1, 200);
  c.left.row_count = lrows;
  c.right.row_count = rrows;
  std::vector<std::string> lkey, rkey, lkey2, rkey2;
  const auto kind = uniform(rng, 0, 3);
  if (kind == 0) {
    c.label = "categorical";
    const auto pool = uniform(rng, 2, 30);
    for (std::size_t r = 0; r < lrows; ++r) lkey.push_back(maybe_null(rng, noisy_case(rng, words[uniform(rng, 0, pool - 1)]), 0.05, r));
    for (std::size_t r = 0; r < rrows; ++r) rkey.push_back(maybe_null(rng, noisy_case(rng, words[uniform(rng, 0, pool - 1)]), 0.05, r));
    c.left.columns.push_back({"station", lkey});
    c.right.columns.push_back({"Station Name", rkey});
    spec.pairs.emplace_back("station", "Station Name");
    c.oracle.key_kinds.push_back(Kind::Categorical);
  } else if (kind == 1) {
    c.label = "numeric";
    const auto pool = uniform(rng, 2, 40);
    auto num = [&] {
      const auto v = uniform(rng, 1, pool);
      return coin(rng, 0.2) ? std::to_string(v) + ".0" : std::to_string(v);
    };
    for (std::size_t r = 0; r < lrows; ++r) lkey.push_back(maybe_null(rng, num(), 0.03, r));
    for (std::size_t r = 0; r < rrows; ++r) rkey.push_back(maybe_null(rng, num(), 0.03, r));
    c.left.columns.push_back({"zone_id", lkey});
    c.right.columns.push_back({"zone", rkey});
    spec.pairs.emplace_back("zone_id", "zone");
    c.oracle.key_kinds.push_back(Kind::Numeric);
  } else if (kind == 2) {
    c.label = "temporal";
    const auto start = epoch_from_civil(2019, static_cast<unsigned>(uniform(rng, 1, 12)), 1);
    // Consecutive days on the left and consecutive hours on the right, so
    // the detected resolutions are Day and Hour whatever the row counts.
    const std::size_t days = 60;
    const auto offset = uniform(rng, 0, days * 24 - 200);
    for (std::size_t r = 0; r < lrows; ++r) {
      lkey.push_back(maybe_null(rng, format_iso8601(start + static_cast<std::int64_t>(r % days) * 86400).substr(0, 10), 0.03, r));
    }
    for (std::size_t r = 0; r < rrows; ++r) {
      rkey.push_back(maybe_null(rng, format_iso8601(start + static_cast<std::int64_t>(offset + r) * 3600), 0.03, r));
    }
    std::shuffle(lkey.begin() + 1, lkey.end(), rng);
    std::shuffle(rkey.begin() + 1, rkey.end(), rng);
    c.left.columns.push_back({"date", lkey});
    c.right.columns.push_back({"timestamp", rkey});
    spec.pairs.emplace_back("date", "timestamp");
    c.oracle.key_kinds.push_back(Kind::Temporal);
    c.oracle.resolution = Resolution::Day;
    if (coin(rng, 0.5)) {
      spec.temporal_resolution = std::vector<Resolution>{Resolution::Day, Resolution::Week, Resolution::Month}[uniform(rng, 0, 2)];
      c.oracle.resolution = spec.temporal_resolution;
    }
  } else {
    c.label = "spatial";
    const double lat0 = uniform_real(rng, -60, 60), lon0 = uniform_real(rng, -170, 170);
    auto coord = [&](double base) { return format_number(std::round((base + uniform_real(rng, 0, 3)) * 1000) / 1000); };
    for (std::size_t r = 0; r < lrows; ++r) {
      lkey.push_back(coord(lat0));
      lkey2.push_back(coord(lon0));
    }
    for (std::size_t r = 0; r < rrows; ++r) {
      rkey.push_back(coord(lat0));
      rkey2.push_back(coord(lon0));
    }
    c.left.columns.push_back({"latitude", lkey});
    c.left.columns.push_back({"longitude", lkey2});
    c.right.columns.push_back({"lat", rkey});
    c.right.columns.push_back({"lon", rkey2});
    spec.pairs.emplace_back("latitude", "lat");
    spec.pairs.emplace_back("longitude", "lon");
    c.oracle.key_kinds = {Kind::Latitude, Kind::Longitude};
    spec.spatial_grid_degrees = std::vector<double>{0.25, 0.5, 1.0}[uniform(rng, 0, 2)];
  }
  c.left.columns.push_back({"value", value_column(rng, lrows, true, words)});
  // Right value columns; "value" collides with the left column of that name.
  const auto nvals = uniform(rng, 1, 3);
  std::vector<std::string> right_values;
  for (std::size_t i = 0; i < nvals; ++i) {
    const bool numeric = coin(rng, 0.6);
    const std::string name = i == 0 && coin(rng, 0.4) ? "Value" : (numeric ? "metric_" : "tag_") + std::to_string(i);
    c.right.columns.push_back({name, value_column(rng, rrows, numeric, words)});
    right_values.push_back(name);
    static const std::vector<AggregationFn> any{AggregationFn::First, AggregationFn::Count};
    static const std::vector<AggregationFn> all{AggregationFn::First, AggregationFn::Count, AggregationFn::Sum,
                                                AggregationFn::Mean,  AggregationFn::Max,   AggregationFn::Min};
    const auto& fns = numeric ? all : any;
    spec.agg[name] = fns[uniform(rng, 0, fns.size() - 1)];
  }
  if (coin(rng, 0.4)) {
    for (const auto& n : right_values) {
      if (coin(rng, 0.6)) spec.include_columns.push_back(n);
    }
  }
  return c;
}

Query random_filter_query(Rng& rng) {
  static const std::vector<std::string> words{"taxi", "weather", "crime", "housing", "records", "date", "latitude", "measure", "bicycle", "zzz"};
  static const std::vector<ColumnType> types{ColumnType::Categorical, ColumnType::Numerical, ColumnType::Temporal, ColumnType::SpatialLatitude};
  Query q;
  while (!q.keywords.size() && !q.temporal && !q.spatial && !q.sources && !q.required_types) {
    if (coin(rng, 0.5)) {
      for (std::size_t i = 0, n = uniform(rng, 1, 3); i < n; ++i) q.keywords.push_back(words[uniform(rng, 0, words.size() - 1)]);
    }
    if (coin(rng, 0.4)) {
      const auto a = static_cast<std::int64_t>(uniform(rng, 946684800, 1735689600));
      std::optional<Resolution> res;
      if (coin(rng, 0.3)) res = kAllResolutions[uniform(rng, 2, 5)];
      q.temporal = TemporalFilter{a, a + static_cast<std::int64_t>(uniform(rng, 0, 3 * 365 * 86400)), res};
    }
    if (coin(rng, 0.3)) {
      const double lat = uniform_real(rng, -70, 60), lon = uniform_real(rng, -180, 140);
      q.spatial = SpatialFilter{BoundingBox{lat, lat + uniform_real(rng, 0, 30), lon, lon + uniform_real(rng, 0, 40)}, std::nullopt};
    }
    if (coin(rng, 0.25)) q.sources = std::set<std::string>{coin(rng, 0.5) ? "local" : "upload"};
    if (coin(rng, 0.25)) q.required_types = std::set<ColumnType>{types[uniform(rng, 0, types.size() - 1)]};
  }
  q.page.limit = 1000;
  return q;
}

}  // namespace dse::testkit
