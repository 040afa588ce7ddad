// Copyright 2026 The pkache-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cctype>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pkache/core.hpp"

namespace pkache {

enum class PolicyKind { fifo, lru, lfu, hyperbolic };

inline std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::fifo: return "FIFO";
    case PolicyKind::lru: return "LRU";
    case PolicyKind::lfu: return "LFU";
    case PolicyKind::hyperbolic: return "Hyperbolic";
  }
  return "?";
}

inline PolicyKind parse_policy(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "fifo") return PolicyKind::fifo;
  if (s == "lru") return PolicyKind::lru;
  if (s == "lfu") return PolicyKind::lfu;
  if (s == "hyperbolic" || s == "hyper") return PolicyKind::hyperbolic;
  throw std::invalid_argument("unknown policy: " + std::string(name));
}

enum class Outcome { hit, miss };

struct FetchResult {
  Outcome outcome = Outcome::miss;
  std::uint64_t value = 0;
  std::optional<CacheElement> evicted;  // absent on hits and on empty-way absorption

  bool hit() const { return outcome == Outcome::hit; }
};

/// Source of values on a miss. Implementations must be deterministic.
class BackingStore {
 public:
  virtual ~BackingStore() = default;
  virtual std::uint64_t fetch_value(std::uint64_t key) const = 0;
};

/// Returns the key itself truncated to the value field.
class IdentityBacking final : public BackingStore {
 public:
  explicit IdentityBacking(std::size_t value_bits = 32) : mask_(BitString::mask(value_bits)) {}
  std::uint64_t fetch_value(std::uint64_t key) const override { return key & mask_; }

 private:
  std::uint64_t mask_;
};

class TableBacking final : public BackingStore {
 public:
  explicit TableBacking(std::unordered_map<std::uint64_t, std::uint64_t> table) : table_(std::move(table)) {}
  std::uint64_t fetch_value(std::uint64_t key) const override {
    auto it = table_.find(key);
    if (it == table_.end()) throw std::out_of_range("TableBacking: no value for key " + std::to_string(key));
    return it->second;
  }

 private:
  std::unordered_map<std::uint64_t, std::uint64_t> table_;
};

/// Restricted-model replacement policy over one SCN word (`slot`) of each
/// element. A policy only ever sees one set at a time; `begin_packet` is
/// the single place allowed to touch the whole store (clock maintenance).
template <class P>
concept ReplacementPolicy = requires(P p, const P cp, RegisterStore& store, std::span<CacheElement> set,
                                     const CacheElement& e, std::size_t idx, std::uint64_t word) {
  { P::kKind } -> std::convertible_to<PolicyKind>;
  { P::kLookupsPerCompare } -> std::convertible_to<std::uint64_t>;
  p.begin_packet(store, idx);
  p.on_hit(set, idx, idx);
  p.before_insert(set, idx);
  { cp.should_swap(e, e, idx) } -> std::same_as<bool>;
  { cp.fresh_word() } -> std::same_as<std::uint64_t>;
  { cp.touch_word(word) } -> std::same_as<std::uint64_t>;
};

/// Every miss shifts the set one way to the right.
class FifoPolicy {
 public:
  static constexpr PolicyKind kKind = PolicyKind::fifo;
  static constexpr std::uint64_t kLookupsPerCompare = 0;

  explicit FifoPolicy(const LayoutConfig& = {}) {}

  void begin_packet(RegisterStore&, std::size_t) {}
  void on_hit(std::span<CacheElement>, std::size_t, std::size_t) {}
  void before_insert(std::span<CacheElement>, std::size_t) {}
  bool should_swap(const CacheElement&, const CacheElement&, std::size_t) const { return true; }
  std::uint64_t fresh_word() const { return 1; }
  std::uint64_t touch_word(std::uint64_t word) const { return word; }
};

/// SCN is a global access clock; the fold keeps the smallest.
///
/// When the clock would overflow the SCN field, each set's live SCNs are
/// replaced by their rank within the set and the clock restarts above the
/// largest rank. Relative order inside every set is unchanged.
class LruPolicy {
 public:
  static constexpr PolicyKind kKind = PolicyKind::lru;
  static constexpr std::uint64_t kLookupsPerCompare = 0;

  explicit LruPolicy(const LayoutConfig& layout) : scn_max_(layout.scn_max()) {
    if (scn_max_ <= layout.k + 1) throw std::invalid_argument("LruPolicy: scn_bits too narrow for k");
  }

  std::uint64_t global_scn() const { return global_scn_; }

  void begin_packet(RegisterStore& store, std::size_t slot) {
    if (global_scn_ >= scn_max_) rescale(store, slot);
    ++global_scn_;
  }

  void on_hit(std::span<CacheElement> set, std::size_t way, std::size_t slot) { set[way].scn[slot] = global_scn_; }
  void before_insert(std::span<CacheElement>, std::size_t) {}
  bool should_swap(const CacheElement& stored, const CacheElement& candidate, std::size_t slot) const {
    return stored.scn[slot] < candidate.scn[slot];
  }
  std::uint64_t fresh_word() const { return global_scn_; }
  std::uint64_t touch_word(std::uint64_t) const { return global_scn_; }

  std::size_t rescales() const { return rescales_; }

 private:
  void rescale(RegisterStore& store, std::size_t slot) {
    std::uint64_t top = 0;
    store.maintain([&](std::span<CacheElement> set) {
      std::vector<std::uint64_t> live;
      for (const auto& e : set) {
        if (!e.empty()) live.push_back(e.scn[slot]);
      }
      std::sort(live.begin(), live.end());
      live.erase(std::unique(live.begin(), live.end()), live.end());
      for (auto& e : set) {
        if (e.empty()) continue;
        auto rank = static_cast<std::uint64_t>(std::lower_bound(live.begin(), live.end(), e.scn[slot]) - live.begin()) + 1;
        e.scn[slot] = rank;
        top = std::max(top, rank);
      }
    });
    global_scn_ = top;
    ++rescales_;
  }

  std::uint64_t scn_max_;
  std::uint64_t global_scn_ = 0;
  std::size_t rescales_ = 0;
};

/// Aged frequency: the touched element gains one, every other live element
/// in the same set loses one (never below 1, so empty ways stay smallest).
class LfuPolicy {
 public:
  static constexpr PolicyKind kKind = PolicyKind::lfu;
  static constexpr std::uint64_t kLookupsPerCompare = 0;

  explicit LfuPolicy(const LayoutConfig& layout) : scn_max_(layout.scn_max()) {}

  void begin_packet(RegisterStore&, std::size_t) {}

  void on_hit(std::span<CacheElement> set, std::size_t way, std::size_t slot) {
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (i != way) age(set[i], slot);
    }
    set[way].scn[slot] = touch_word(set[way].scn[slot]);
  }

  void before_insert(std::span<CacheElement> set, std::size_t slot) {
    for (auto& e : set) age(e, slot);
  }

  bool should_swap(const CacheElement& stored, const CacheElement& candidate, std::size_t slot) const {
    return stored.scn[slot] < candidate.scn[slot];
  }
  std::uint64_t fresh_word() const { return 1; }
  std::uint64_t touch_word(std::uint64_t word) const { return word < scn_max_ ? word + 1 : word; }

 private:
  static void age(CacheElement& e, std::size_t slot) {
    if (!e.empty() && e.scn[slot] > 1) --e.scn[slot];
  }

  std::uint64_t scn_max_;
};

/// One register-backed cache region driven by a policy. `slot` selects the
/// SCN word the policy owns.
template <ReplacementPolicy Policy>
class Region {
 public:
  Region(LayoutConfig layout, Policy policy, std::size_t slot = 0)
      : store_(layout), policy_(std::move(policy)), slot_(slot) {
    if (slot_ >= store_.layout().scn_words) throw std::invalid_argument("Region: slot exceeds scn_words");
  }

  std::size_t set_of(std::uint64_t key) const { return hash_to_set(key, store_.layout().d); }

  std::optional<std::size_t> lookup(std::size_t h, std::uint64_t key, OpCounter& ops) const {
    return store_.ternary_lookup(h, key, ops);
  }

  std::vector<CacheElement> read(std::size_t h, OpCounter& ops) const { return store_.read_set(h, ops); }
  void write(std::size_t h, std::span<const CacheElement> set, OpCounter& ops) { store_.write_set(h, set, ops); }

  void begin_packet() { policy_.begin_packet(store_, slot_); }
  void on_hit(std::span<CacheElement> set, std::size_t way) { policy_.on_hit(set, way, slot_); }

  /// Places `incoming` at way 0 and folds the displaced element through
  /// ways 1..k-1; returns the element that leaves the set (possibly empty).
  /// Exactly k-1 compare steps regardless of contents.
  CacheElement insert(std::span<CacheElement> set, const CacheElement& incoming, OpCounter& ops) {
    policy_.before_insert(set, slot_);
    CacheElement candidate = set[0];
    set[0] = incoming;
    ops.aux(2);  // candidate register + keys register
    for (std::size_t way = 1; way < set.size(); ++way) {
      if (policy_.should_swap(set[way], candidate, slot_)) std::swap(set[way], candidate);
      ops.aux(2);
      ops.extra_accesses += Policy::kLookupsPerCompare;
    }
    return candidate;
  }

  const RegisterStore& store() const { return store_; }
  RegisterStore& store() { return store_; }
  const Policy& policy() const { return policy_; }
  Policy& policy() { return policy_; }
  std::size_t slot() const { return slot_; }

 private:
  RegisterStore store_;
  Policy policy_;
  std::size_t slot_;
};

/// Running per-packet maxima and totals.
struct OpStats {
  OpCounter total;
  OpCounter max;
  std::uint64_t packets = 0;

  void add(const OpCounter& packet) {
    total += packet;
    max.keep_max(packet);
    ++packets;
  }
};

inline std::shared_ptr<const BackingStore> default_backing(std::size_t value_bits) {
  return std::make_shared<IdentityBacking>(value_bits);
}

/// Single-region restricted cache: one ternary match, then either a hit
/// update or an insert-at-way-0 fold.
template <ReplacementPolicy Policy>
class SingleRegionCache {
 public:
  SingleRegionCache(LayoutConfig layout, Policy policy, std::shared_ptr<const BackingStore> backing = nullptr)
      : region_(layout, std::move(policy), 0),
        backing_(backing ? std::move(backing) : default_backing(layout.value_bits)) {}

  explicit SingleRegionCache(LayoutConfig layout) : SingleRegionCache(layout, Policy(layout)) {}

  FetchResult fetch(std::uint64_t key) {
    require_live_key(key);
    last_.reset();
    region_.begin_packet();
    const std::size_t h = region_.set_of(key);
    FetchResult result;
    if (auto way = region_.lookup(h, key, last_)) {
      auto set = region_.read(h, last_);
      region_.on_hit(set, *way);
      region_.write(h, set, last_);
      result.outcome = Outcome::hit;
      result.value = set[*way].value;
    } else {
      const std::uint64_t value = backing_->fetch_value(key);
      auto set = region_.read(h, last_);
      CacheElement fresh{key, value, {region_.policy().fresh_word(), 0}};
      CacheElement victim = region_.insert(set, fresh, last_);
      region_.write(h, set, last_);
      result.outcome = Outcome::miss;
      result.value = value;
      if (!victim.empty()) result.evicted = victim;
    }
    stats_.add(last_);
    return result;
  }

  const OpCounter& last_ops() const { return last_; }
  const OpStats& stats() const { return stats_; }
  const RegisterStore& store() const { return region_.store(); }
  const Policy& policy() const { return region_.policy(); }

 private:
  Region<Policy> region_;
  std::shared_ptr<const BackingStore> backing_;
  OpCounter last_;
  OpStats stats_;
};

using FifoCache = SingleRegionCache<FifoPolicy>;
using LruCache = SingleRegionCache<LruPolicy>;
using LfuCache = SingleRegionCache<LfuPolicy>;

}  // namespace pkache
