// Copyright 2026 The pkache-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pkache/policies.hpp"

namespace pkache {

/// Fixed-point scale for log values, held as an exact fraction so that
/// factors like 0.1 build the same table on every platform.
class IntegerFactor {
 public:
  IntegerFactor() = default;
  explicit IntegerFactor(std::uint64_t whole) : num_(whole), den_(1) {
    if (whole == 0) throw std::invalid_argument("IntegerFactor must be positive");
  }
  IntegerFactor(std::uint64_t num, std::uint64_t den) : num_(num), den_(den) {
    if (num == 0 || den == 0) throw std::invalid_argument("IntegerFactor must be positive");
    const auto g = std::gcd(num_, den_);
    num_ /= g;
    den_ /= g;
  }

  /// Accepts plain decimals: "100", "0.1", "12.5".
  static IntegerFactor parse(std::string_view text) {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    bool seen_dot = false;
    bool any_digit = false;
    for (char c : text) {
      if (c == '.' && !seen_dot) {
        seen_dot = true;
        continue;
      }
      if (c < '0' || c > '9') throw std::invalid_argument("bad integer factor: " + std::string(text));
      if (num > (std::numeric_limits<std::uint64_t>::max() - 9) / 10 || (seen_dot && den > 1'000'000'000'000ULL)) {
        throw std::invalid_argument("integer factor too precise: " + std::string(text));
      }
      num = num * 10 + static_cast<std::uint64_t>(c - '0');
      if (seen_dot) den *= 10;
      any_digit = true;
    }
    if (!any_digit) throw std::invalid_argument("bad integer factor: " + std::string(text));
    return IntegerFactor(num, den);
  }

  std::uint64_t num() const { return num_; }
  std::uint64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Shortest exact decimal when one exists within 18 fractional digits.
  std::string to_string() const {
    std::string out = std::to_string(num_ / den_);
    std::uint64_t rem = num_ % den_;
    if (rem == 0) return out;
    out.push_back('.');
    for (int digits = 0; rem != 0 && digits < 18; ++digits) {
      rem *= 10;
      out.push_back(static_cast<char>('0' + rem / den_));
      rem %= den_;
    }
    return out;
  }

  friend bool operator==(const IntegerFactor&, const IntegerFactor&) = default;

 private:
  std::uint64_t num_ = 100;
  std::uint64_t den_ = 1;
};

namespace detail {

/// floor(p * log2(x)) for x >= 1, exact. The long double estimate is used
/// when it is clearly away from an integer boundary; otherwise the bit
/// length of x^p decides.
inline std::uint64_t floor_scaled_log2(std::uint64_t x, std::uint64_t p) {
  if (x <= 1) return 0;
  const long double estimate = static_cast<long double>(p) * std::log2(static_cast<long double>(x));
  const long double nearest = std::nearbyint(estimate);
  if (std::fabs(estimate - nearest) > 1e-6L) return static_cast<std::uint64_t>(std::floor(estimate));
  boost::multiprecision::cpp_int power = boost::multiprecision::pow(boost::multiprecision::cpp_int(x), static_cast<unsigned>(p));
  return static_cast<std::uint64_t>(boost::multiprecision::msb(power));
}

}  // namespace detail

/// entries[x] = floor(log2(x) * integer_factor) for 1 <= x < max_scn, with
/// entries[0] = 0. Lookups at or past max_scn saturate to the last entry.
class LogTable {
 public:
  LogTable(std::size_t max_scn, IntegerFactor factor) : factor_(factor), entries_(max_scn, 0) {
    if (max_scn < 2) throw std::invalid_argument("LogTable: max_scn must be >= 2");
    for (std::size_t x = 2; x < max_scn; ++x) {
      entries_[x] = static_cast<std::int64_t>(detail::floor_scaled_log2(x, factor.num()) / factor.den());
    }
  }

  std::int64_t operator[](std::uint64_t x) const {
    return x >= entries_.size() ? entries_.back() : entries_[static_cast<std::size_t>(x)];
  }

  std::size_t max_scn() const { return entries_.size(); }
  const IntegerFactor& factor() const { return factor_; }
  std::span<const std::int64_t> entries() const { return entries_; }

 private:
  IntegerFactor factor_;
  std::vector<std::int64_t> entries_;
};

inline LogTable build_log_table(std::size_t max_scn, IntegerFactor factor) { return LogTable(max_scn, factor); }

/// Table footprint in bits: (value width + index width) * entries.
inline std::uint64_t log_table_bits(const LogTable& table) {
  const auto value_bits = static_cast<std::uint64_t>(std::bit_width(static_cast<std::uint64_t>(table.entries().back())));
  const auto index_bits = static_cast<std::uint64_t>(std::bit_width(table.max_scn() - 1));
  return (std::max<std::uint64_t>(value_bits, 1) + index_bits) * table.max_scn();
}

/// log(freq) - log(lifetime) as a scaled integer; comparing two scores
/// stands in for comparing freq / lifetime. Lifetime 0 counts as 1.
inline std::int64_t priority_score(std::uint64_t freq, std::uint64_t insert_time, std::uint64_t tick,
                                   const LogTable& table) {
  const std::uint64_t lifetime = tick > insert_time ? tick - insert_time : 1;
  return table[freq] - table[lifetime];
}

struct HyperbolicParams {
  IntegerFactor integer_factor{100};
  std::size_t max_scn = 2048;
};

/// Hyperbolic caching with semi-division. Each SCN word packs the access
/// count since insertion (high half) and the insertion tick (low half).
///
/// The tick advances once per packet. When it reaches max_scn - 1 the tick
/// and every stored insertion tick are halved with a right shift; counts
/// are left as they are and saturate at the half-word maximum.
class HyperbolicPolicy {
 public:
  static constexpr PolicyKind kKind = PolicyKind::hyperbolic;
  static constexpr std::uint64_t kLookupsPerCompare = 4;

  HyperbolicPolicy(const LayoutConfig& layout, std::shared_ptr<const LogTable> table)
      : table_(std::move(table)), half_(layout.scn_bits / 2) {
    if (!table_) throw std::invalid_argument("HyperbolicPolicy: missing log table");
    if (half_ == 0 || std::bit_width(table_->max_scn() - 1) > half_) {
      throw std::invalid_argument("HyperbolicPolicy: scn_bits too narrow for max_scn");
    }
  }

  HyperbolicPolicy(const LayoutConfig& layout, HyperbolicParams params = {})
      : HyperbolicPolicy(layout, std::make_shared<const LogTable>(params.max_scn, params.integer_factor)) {}

  std::uint64_t tick() const { return tick_; }
  const LogTable& table() const { return *table_; }
  std::size_t halvings() const { return halvings_; }

  std::uint64_t pack(std::uint64_t freq, std::uint64_t insert_time) const { return (freq << half_) | insert_time; }
  std::uint64_t freq(std::uint64_t word) const { return word >> half_; }
  std::uint64_t insert_time(std::uint64_t word) const { return word & BitString::mask(half_); }

  std::int64_t score(const CacheElement& e, std::size_t slot) const {
    return priority_score(freq(e.scn[slot]), insert_time(e.scn[slot]), tick_, *table_);
  }

  void begin_packet(RegisterStore& store, std::size_t slot) {
    ++tick_;
    if (tick_ + 1 < table_->max_scn()) return;
    tick_ >>= 1;
    store.maintain([&](std::span<CacheElement> set) {
      for (auto& e : set) {
        if (!e.empty()) e.scn[slot] = pack(freq(e.scn[slot]), insert_time(e.scn[slot]) >> 1);
      }
    });
    ++halvings_;
  }

  void on_hit(std::span<CacheElement> set, std::size_t way, std::size_t slot) {
    set[way].scn[slot] = touch_word(set[way].scn[slot]);
  }

  void before_insert(std::span<CacheElement>, std::size_t) {}

  /// Empty ways always become the candidate; otherwise swap iff the stored
  /// element's score is strictly below the candidate's.
  bool should_swap(const CacheElement& stored, const CacheElement& candidate, std::size_t slot) const {
    if (candidate.empty()) return false;
    if (stored.empty()) return true;
    return score(stored, slot) < score(candidate, slot);
  }

  std::uint64_t fresh_word() const { return pack(1, tick_); }

  std::uint64_t touch_word(std::uint64_t word) const {
    const std::uint64_t f = freq(word);
    return f < BitString::mask(half_) ? pack(f + 1, insert_time(word)) : word;
  }

 private:
  std::shared_ptr<const LogTable> table_;
  std::size_t half_;
  std::uint64_t tick_ = 0;
  std::size_t halvings_ = 0;
};

using HyperbolicCache = SingleRegionCache<HyperbolicPolicy>;

}  // namespace pkache
