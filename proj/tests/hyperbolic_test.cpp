// Copyright 2026 The pkache-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <gtest/gtest.h>

#include "pkache/hyperbolic.hpp"

using namespace pkache;

namespace {

LayoutConfig two_way() {
  LayoutConfig l;
  l.k = 2;
  l.d = 1;
  return l;
}

struct Frozen {
  const char* factor;
  std::vector<std::int64_t> values;  // at x = 2, 3, 5, 10, 1000, 1023, 1024, 2047
};

// floor(log2(x) * IF) at 60 significant digits
const std::vector<Frozen> kFrozen = {
    {"0.1", {0, 0, 0, 0, 0, 0, 1, 1}},
    {"1", {1, 1, 2, 3, 9, 9, 10, 10}},
    {"10", {10, 15, 23, 33, 99, 99, 100, 109}},
    {"100", {100, 158, 232, 332, 996, 999, 1000, 1099}},
    {"1000", {1000, 1584, 2321, 3321, 9965, 9998, 10000, 10999}},
};

}  // namespace

TEST(IntegerFactor, ParsesDecimalsExactly) {
  EXPECT_EQ(IntegerFactor::parse("0.1"), IntegerFactor(1, 10));
  EXPECT_EQ(IntegerFactor::parse("100"), IntegerFactor(100));
  EXPECT_EQ(IntegerFactor::parse("12.50"), IntegerFactor(25, 2));
  EXPECT_EQ(IntegerFactor::parse("0.1").to_string(), "0.1");
  EXPECT_EQ(IntegerFactor(1, 3).to_string().substr(0, 6), "0.3333");
  EXPECT_THROW(IntegerFactor::parse("abc"), std::invalid_argument);
  EXPECT_THROW(IntegerFactor::parse("0"), std::invalid_argument);
  EXPECT_THROW(IntegerFactor::parse(""), std::invalid_argument);
}

TEST(LogTable, WorkedExamples) {
  const LogTable t(2048, IntegerFactor(100));
  EXPECT_EQ(t[8], 300);
  EXPECT_EQ(t[10], 332);
  EXPECT_EQ(t[1], 0);
  EXPECT_EQ(t[0], 0);
}

TEST(LogTable, TwoDigitAccuracyExample) {
  // 123.45678 kept to two decimals is 12345; the table applies the same scaling
  EXPECT_EQ(static_cast<std::int64_t>(123.45678 * 100), 12345);
}

TEST(LogTable, MatchesHighPrecisionValues) {
  const std::vector<std::uint64_t> xs{2, 3, 5, 10, 1000, 1023, 1024, 2047};
  for (const auto& f : kFrozen) {
    const LogTable t(4096, IntegerFactor::parse(f.factor));
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(t[xs[i]], f.values[i]) << f.factor << " x=" << xs[i];
  }
}

TEST(LogTable, PowersOfTwoAndMonotone) {
  for (std::uint64_t f : {1, 7, 100, 1000}) {
    const LogTable t(4096, IntegerFactor(f));
    for (std::uint64_t j = 0; j < 12; ++j) EXPECT_EQ(t[std::uint64_t{1} << j], static_cast<std::int64_t>(j * f));
    for (std::size_t x = 2; x < 4096; ++x) ASSERT_LE(t[x - 1], t[x]);
  }
}

TEST(LogTable, SaturatesPastMaxScn) {
  const LogTable t(2048, IntegerFactor(100));
  EXPECT_EQ(t[2048], t[2047]);
  EXPECT_EQ(t[1'000'000], t[2047]);
  EXPECT_THROW(LogTable(1, IntegerFactor(100)), std::invalid_argument);
}

TEST(LogTable, MemoryModel) {
  const LogTable coarse(2048, IntegerFactor(1, 10));
  const LogTable fine(2048, IntegerFactor(100));
  // value width + 11 index bits, times 2048 entries
  EXPECT_EQ(log_table_bits(coarse), (1u + 11u) * 2048u);
  EXPECT_EQ(log_table_bits(fine), (11u + 11u) * 2048u);
  EXPECT_GT(log_table_bits(fine), log_table_bits(coarse));
}

TEST(PriorityScore, Examples) {
  const LogTable t(2048, IntegerFactor(100));
  EXPECT_EQ(priority_score(4, 0, 10, t), -132);
  EXPECT_EQ(priority_score(1, 6, 10, t), -200);
  EXPECT_GT(priority_score(4, 0, 10, t), priority_score(1, 6, 10, t));
  EXPECT_EQ(priority_score(37, 3, 40, t), 0);
  EXPECT_EQ(priority_score(1, 10, 10, t), 0);  // lifetime 0 counts as 1
}

TEST(PriorityScore, DecisiveBeyondTwoScaledUnits) {
  using boost::multiprecision::cpp_int;
  using boost::multiprecision::pow;
  std::mt19937_64 rng(99);
  for (const char* text : {"1", "10", "100", "1000"}) {
    const IntegerFactor f = IntegerFactor::parse(text);
    const LogTable t(2048, f);
    int decisive = 0;
    for (int trial = 0; trial < 3000; ++trial) {
      const std::uint64_t f1 = 1 + rng() % 2047, l1 = 1 + rng() % 2047;
      const std::uint64_t f2 = 1 + rng() % 2047, l2 = 1 + rng() % 2047;
      // p1 / p2 >= 2^(2 / IF)  <=>  (f1 l2)^num >= 4^den (f2 l1)^num
      const auto num = static_cast<unsigned>(f.num());
      const auto den = static_cast<unsigned>(f.den());
      if (pow(cpp_int(f1 * l2), num) >= pow(cpp_int(4), den) * pow(cpp_int(f2 * l1), num)) {
        ++decisive;
        ASSERT_GT(priority_score(f1, 0, l1, t), priority_score(f2, 0, l2, t))
            << text << " f1=" << f1 << " l1=" << l1 << " f2=" << f2 << " l2=" << l2;
      }
    }
    EXPECT_GT(decisive, 0) << text;
  }
}

TEST(Hyperbolic, FreshElementPacksFreqOneAndTick) {
  HyperbolicCache cache(two_way(), HyperbolicPolicy(two_way()));
  cache.fetch(5);
  const auto e = cache.store().peek(0)[0];
  EXPECT_EQ(cache.policy().freq(e.scn[0]), 1u);
  EXPECT_EQ(cache.policy().insert_time(e.scn[0]), cache.policy().tick());
}

TEST(Hyperbolic, EvictsLowestPriority) {
  HyperbolicCache cache(two_way(), HyperbolicPolicy(two_way()));
  std::optional<std::uint64_t> evicted;
  for (std::uint64_t key : {1, 1, 1, 2, 3}) {
    auto r = cache.fetch(key);
    if (r.evicted) evicted = r.evicted->key;
  }
  // at the last packet key 1 has 3 accesses over 4 ticks, key 2 one over 1
  EXPECT_EQ(evicted, 1u);
}

TEST(Hyperbolic, EqualScoresDoNotSwap) {
  const HyperbolicPolicy p(two_way());
  CacheElement a{1, 1, {p.pack(3, 0), 0}};
  CacheElement b{2, 2, {p.pack(3, 0), 0}};
  EXPECT_FALSE(p.should_swap(a, b, 0));
  EXPECT_FALSE(p.should_swap(b, a, 0));
  CacheElement empty;
  EXPECT_TRUE(p.should_swap(empty, a, 0));
  EXPECT_FALSE(p.should_swap(a, empty, 0));
}

TEST(Hyperbolic, HitIncrementsFreqOnly) {
  HyperbolicCache cache(two_way(), HyperbolicPolicy(two_way()));
  cache.fetch(4);
  const auto before = cache.store().peek(0)[0].scn[0];
  cache.fetch(4);
  const auto after = cache.store().peek(0)[0].scn[0];
  EXPECT_EQ(cache.policy().freq(after), 2u);
  EXPECT_EQ(cache.policy().insert_time(after), cache.policy().insert_time(before));
}

TEST(Hyperbolic, TickHalvingKeepsInsertionOrder) {
  LayoutConfig l;
  l.k = 4;
  l.d = 2;
  HyperbolicParams params;
  params.max_scn = 64;
  HyperbolicCache cache(l, HyperbolicPolicy(l, params));
  auto snapshot = [&] {
    std::map<std::uint64_t, std::uint64_t> out;
    for (std::size_t h = 0; h < 2; ++h) {
      for (const auto& e : cache.store().peek(h)) {
        if (!e.empty()) out[e.key] = cache.policy().insert_time(e.scn[0]);
      }
    }
    return out;
  };
  std::mt19937_64 rng(4);
  for (int i = 0; i < 5000; ++i) {
    const auto before = snapshot();
    const auto halvings = cache.policy().halvings();
    cache.fetch(1 + rng() % 12);
    const auto after = snapshot();
    ASSERT_LT(cache.policy().tick(), 63u);
    for (const auto& [key, t] : after) ASSERT_LE(t, cache.policy().tick());
    if (cache.policy().halvings() == halvings) continue;
    for (const auto& [a, ta] : before) {
      for (const auto& [b, tb] : before) {
        if (ta < tb && after.count(a) && after.count(b)) {
          ASSERT_LE(after.at(a), after.at(b));
        }
      }
    }
  }
  EXPECT_GT(cache.policy().halvings(), 50u);
}

TEST(Hyperbolic, FreqSaturatesAtHalfWord) {
  LayoutConfig l;
  l.k = 1;
  l.d = 1;
  l.scn_bits = 24;
  HyperbolicCache cache(l, HyperbolicPolicy(l));
  for (int i = 0; i < 5000; ++i) cache.fetch(1);
  EXPECT_EQ(cache.policy().freq(cache.store().peek(0)[0].scn[0]), 4095u);
}

TEST(Hyperbolic, RejectsScnTooNarrowForTable) {
  LayoutConfig l;
  l.scn_bits = 16;  // 8-bit insertion ticks cannot index a 2048-entry table
  EXPECT_THROW(HyperbolicPolicy{l}, std::invalid_argument);
}
