// Copyright 2026 The pkache-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "pkache/core.hpp"

using namespace pkache;

TEST(BitString, FieldsSpanWordBoundaries) {
  BitString b(130);
  b.set(60, 10, 0x3FF);
  b.set(120, 10, 0x155);
  EXPECT_EQ(b.get(60, 10), 0x3FFu);
  EXPECT_EQ(b.get(120, 10), 0x155u);
  EXPECT_EQ(b.get(0, 60), 0u);
  EXPECT_EQ(b.popcount(), 10u + 5u);
  b.set(60, 10, 0);
  EXPECT_TRUE(b.zero(60, 10));
}

TEST(BitString, RejectsOversizedValuesAndRanges) {
  BitString b(64);
  EXPECT_THROW(b.set(0, 4, 16), std::out_of_range);
  EXPECT_THROW(b.get(60, 8), std::out_of_range);
  EXPECT_THROW(b.get(0, 0), std::out_of_range);
  BitString c(32);
  EXPECT_THROW(b ^= c, std::invalid_argument);
}

TEST(BitString, ToStringIsMostSignificantFirst) {
  BitString b(4);
  b.set(0, 1, 1);
  EXPECT_EQ(b.to_string(), "0001");
}

TEST(HashToSet, Examples) {
  EXPECT_EQ(hash_to_set(37, 16), 5u);
  EXPECT_EQ(hash_to_set(16, 16), 0u);
  EXPECT_EQ(hash_to_set(1'000'003, 7), 1'000'003u % 7u);
  EXPECT_THROW(hash_to_set(0, 16), std::invalid_argument);
  EXPECT_THROW(hash_to_set(1, 0), std::invalid_argument);
}

TEST(TernaryLookup, Examples) {
  OpCounter ops;
  const std::vector<std::uint64_t> keys{7, 0, 9};
  const auto entry = make_keys_entry(keys, 32);
  EXPECT_EQ(ternary_lookup(entry, 9, 32, ops), 2u);
  EXPECT_EQ(ternary_lookup(entry, 3, 32, ops), std::nullopt);
  EXPECT_EQ(ops.tcam_matches, 2u);
  EXPECT_THROW(ternary_lookup(entry, 0, 32, ops), std::invalid_argument);
}

TEST(TernaryLookup, XorSliceOfHitIsAllZero) {
  const std::vector<std::uint64_t> keys{5, 6, 7, 8};
  const auto entry = make_keys_entry(keys, 32);
  const auto diff = entry ^ replicate_key(5, 4, 32);
  EXPECT_TRUE(diff.zero(0, 32));
  for (std::size_t way = 1; way < 4; ++way) EXPECT_FALSE(diff.zero(way * 32, 32));
  OpCounter ops;
  EXPECT_EQ(ternary_lookup(entry, 5, 32, ops), 0u);
}

TEST(TernaryLookup, AgreesWithLinearScan) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t k = 1 + rng() % 16;
    const std::size_t key_bits = 4 + rng() % 12;
    std::vector<std::uint64_t> keys;
    while (keys.size() < k) {
      std::uint64_t key = rng() % (std::uint64_t{1} << key_bits);
      if (key != 0 && std::find(keys.begin(), keys.end(), key) != keys.end()) continue;
      keys.push_back(key);
    }
    const auto entry = make_keys_entry(keys, key_bits);
    const std::uint64_t probe = 1 + rng() % ((std::uint64_t{1} << key_bits) - 1);
    std::optional<std::size_t> expect;
    for (std::size_t i = 0; i < k; ++i) {
      if (keys[i] == probe) expect = i;
    }
    OpCounter ops;
    ASSERT_EQ(ternary_lookup(entry, probe, key_bits, ops), expect);
  }
}

TEST(LayoutConfig, MaskLimit) {
  LayoutConfig ok;
  ok.k = 64;
  EXPECT_NO_THROW(ok.validate());
  LayoutConfig too_wide = ok;
  too_wide.k = 65;
  EXPECT_THROW(too_wide.validate(), std::invalid_argument);
  LayoutConfig zero;
  zero.d = 0;
  EXPECT_THROW(zero.validate(), std::invalid_argument);
}

TEST(RegisterStore, FreshStoreIsEmpty) {
  LayoutConfig layout;
  layout.k = 4;
  layout.d = 2;
  RegisterStore store(layout);
  OpCounter ops;
  for (const auto& e : store.read_set(0, ops)) EXPECT_TRUE(e.empty());
  EXPECT_EQ(ops.register_reads, 1u);
  EXPECT_THROW(store.read_set(2, ops), std::out_of_range);
}

TEST(RegisterStore, WriteReadRoundTrip) {
  LayoutConfig layout;
  layout.k = 2;
  layout.d = 1;
  RegisterStore store(layout);
  OpCounter ops;
  std::vector<CacheElement> set{{3, 30, {2, 0}}, {0, 0, {0, 0}}};
  store.write_set(0, set, ops);
  EXPECT_EQ(store.read_set(0, ops), set);
  EXPECT_EQ(ops.register_writes, 1u);
  EXPECT_EQ(ops.register_reads, 1u);
  EXPECT_EQ(store.keys_entry(0).get(0, 32), 3u);
  EXPECT_EQ(store.keys_entry(0).get(32, 32), 0u);
}

TEST(RegisterStore, RejectsOverwideFields) {
  LayoutConfig layout;
  layout.k = 1;
  layout.d = 1;
  layout.value_bits = 8;
  RegisterStore store(layout);
  OpCounter ops;
  std::vector<CacheElement> set{{1, 256, {0, 0}}};
  EXPECT_THROW(store.write_set(0, set, ops), std::out_of_range);
}

TEST(RegisterStore, RandomCodecRoundTripAndKeysRegister) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    LayoutConfig layout;
    layout.key_bits = 1 + rng() % 40;
    layout.value_bits = 1 + rng() % 64;
    layout.scn_bits = 1 + rng() % 64;
    layout.scn_words = 1 + rng() % 2;
    layout.k = 1 + rng() % 8;
    layout.d = 1;
    RegisterStore store(layout);
    std::vector<CacheElement> set(layout.k);
    for (std::size_t i = 0; i < layout.k; ++i) {
      set[i].key = (rng() & BitString::mask(layout.key_bits));
      if (std::count_if(set.begin(), set.begin() + static_cast<long>(i),
                        [&](const CacheElement& e) { return e.key == set[i].key; })) {
        set[i].key = 0;
      }
      set[i].value = rng() & BitString::mask(layout.value_bits);
      for (std::size_t w = 0; w < layout.scn_words; ++w) set[i].scn[w] = rng() & BitString::mask(layout.scn_bits);
    }
    OpCounter ops;
    store.write_set(0, set, ops);
    ASSERT_EQ(store.peek(0), set);
    std::vector<std::uint64_t> keys;
    for (const auto& e : set) keys.push_back(e.key);
    ASSERT_EQ(store.keys_entry(0), make_keys_entry(keys, layout.key_bits));
    ASSERT_TRUE(store.consistent());
  }
}

TEST(RegisterStore, WayZeroIsLowestOrderSlice) {
  LayoutConfig layout;
  layout.k = 2;
  layout.d = 1;
  RegisterStore store(layout);
  OpCounter ops;
  std::vector<CacheElement> set{{1, 2, {3, 0}}, {4, 5, {6, 0}}};
  store.write_set(0, set, ops);
  const auto& bits = store.set_entry(0);
  EXPECT_EQ(bits.get(0, 32), 1u);
  EXPECT_EQ(bits.get(32, 32), 2u);
  EXPECT_EQ(bits.get(64, 32), 3u);
  EXPECT_EQ(bits.get(96, 32), 4u);
}

TEST(OpCounter, ResetAndAux) {
  OpCounter ops;
  ops.aux(3);
  ops.tcam_matches = 1;
  EXPECT_EQ(ops.register_reads, 3u);
  EXPECT_EQ(ops.register_writes, 3u);
  ops.reset();
  EXPECT_EQ(ops, OpCounter{});
}
