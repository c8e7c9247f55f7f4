#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "dse/hashing.hpp"
#include "dse/strings.hpp"
#include "testkit.hpp"

namespace dse {
namespace {

TEST(Strings, TrimAndFold) {
  EXPECT_EQ(trim("  a b \t"), "a b");
  EXPECT_EQ(trim("   "), "");
  EXPECT_EQ(fold_value("  New York "), "new york");
}

TEST(Strings, TokenizeSplitsOnNonAlnum) {
  EXPECT_EQ(tokenize("NYC Taxi-Trips_2020!"), (std::vector<std::string>{"nyc", "taxi", "trips", "2020"}));
  EXPECT_TRUE(tokenize("  --  ").empty());
}

TEST(Strings, ParseNumberIsStrict) {
  EXPECT_EQ(parse_number("42"), 42.0);
  EXPECT_EQ(parse_number(" -1.5e3 "), -1500.0);
  EXPECT_FALSE(parse_number("12abc"));
  EXPECT_FALSE(parse_number(""));
  EXPECT_FALSE(parse_number("nan"));
  EXPECT_FALSE(parse_number("inf"));
}

TEST(Strings, FormatNumberRoundTrips) {
  EXPECT_EQ(format_number(3.0), "3");
  EXPECT_EQ(format_number(0.1), "0.1");
  testkit::Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const double v = testkit::uniform_real(rng, -1e6, 1e6) / std::pow(10.0, static_cast<double>(i % 7));
    const auto back = parse_number(format_number(v));
    ASSERT_TRUE(back);
    EXPECT_EQ(*back, v);
  }
}

TEST(Hashing, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Hashing, Hash64IsSeeded) {
  EXPECT_EQ(hash64("x", 1), hash64("x", 1));
  EXPECT_NE(hash64("x", 1), hash64("x", 2));
}

}  // namespace
}  // namespace dse
