// Copyright 2026 The pkache-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pkache/hyperbolic.hpp"
#include "pkache/multiregion.hpp"
#include "pkache/policies.hpp"

namespace pkache::oracle {

/// How the reference LFU counts.
enum class LfuCounting {
  plain,     // accesses since insertion
  set_aged,  // same aging rule as the restricted engine: others in the set lose one, floor 1
};

struct ReferenceOptions {
  LfuCounting lfu = LfuCounting::plain;
  std::uint64_t lfu_cap = 0xFFFF'FFFFULL;
  /// Resolution used to tag hyperbolic evictions whose winner a scaled
  /// log table could not tell apart.
  IntegerFactor resolution{100};
  /// Classify every eviction as tied or not (costly for hyperbolic).
  bool track_ties = false;
};

struct RefEntry {
  std::uint64_t key = 0;
  std::uint64_t count = 0;        // LFU metric / hyperbolic access count
  std::uint64_t last_access = 0;  // clock value of the latest touch
  std::uint64_t insert_time = 0;
};

struct RefResult {
  bool hit = false;
  std::optional<std::uint64_t> evicted;
};

/// Unrestricted k-way cache with exact metrics. FULL associativity is the
/// d = 1, k = capacity special case.
class ReferenceCache {
 public:
  ReferenceCache(PolicyKind policy, std::size_t k, std::size_t d, ReferenceOptions options = {})
      : policy_(policy), k_(k), options_(options), sets_(d) {
    if (k == 0 || d == 0) throw std::invalid_argument("ReferenceCache: k and d must be >= 1");
  }

  static ReferenceCache full(PolicyKind policy, std::size_t capacity, ReferenceOptions options = {}) {
    return ReferenceCache(policy, capacity, 1, options);
  }

  RefResult fetch(std::uint64_t key) {
    require_live_key(key);
    advance_clock();
    RefResult r;
    if (contains(key)) {
      touch(key);
      r.hit = true;
      return r;
    }
    const std::size_t h = set_of(key);
    age_set(h, std::nullopt);
    if (set_full(h)) {
      r.evicted = choose_victim(h)->key;
      erase(*r.evicted);
    }
    insert(key);
    return r;
  }

  void advance_clock() {
    ++now_;
    last_ambiguous_ = false;
  }

  std::size_t set_of(std::uint64_t key) const { return static_cast<std::size_t>(key % sets_.size()); }
  bool set_full(std::size_t h) const { return sets_[h].size() >= k_; }

  bool contains(std::uint64_t key) const { return find(key) != nullptr; }

  void touch(std::uint64_t key) {
    const std::size_t h = set_of(key);
    age_set(h, key);
    RefEntry* e = find(key);
    e->last_access = now_;
    if (policy_ == PolicyKind::lfu) {
      if (options_.lfu == LfuCounting::plain || e->count < options_.lfu_cap) ++e->count;
    } else {
      ++e->count;
    }
  }

  /// The entry the policy would evict from set h; also records whether the
  /// choice was a metric tie.
  std::optional<RefEntry> choose_victim(std::size_t h) {
    const auto& set = sets_[h];
    if (set.empty()) return std::nullopt;
    std::size_t best = 0;
    for (std::size_t i = 1; i < set.size(); ++i) {
      if (better_victim(set[i], set[best])) best = i;
    }
    last_ambiguous_ = options_.track_ties && ambiguous(set, best);
    if (last_ambiguous_) ++ambiguous_evictions_;
    return set[best];
  }

  void erase(std::uint64_t key) {
    auto& set = sets_[set_of(key)];
    set.erase(std::find_if(set.begin(), set.end(), [&](const RefEntry& e) { return e.key == key; }));
  }

  void insert(std::uint64_t key) { sets_[set_of(key)].push_back(RefEntry{key, 1, now_, now_}); }

  /// Applies set-aged LFU decrements for an access to set h (no-op otherwise).
  void age_set(std::size_t h, std::optional<std::uint64_t> except) {
    if (policy_ != PolicyKind::lfu || options_.lfu != LfuCounting::set_aged) return;
    for (auto& e : sets_[h]) {
      if ((!except || e.key != *except) && e.count > 1) --e.count;
    }
  }

  bool last_eviction_ambiguous() const { return last_ambiguous_; }
  std::uint64_t ambiguous_evictions() const { return ambiguous_evictions_; }
  std::uint64_t now() const { return now_; }
  PolicyKind policy() const { return policy_; }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& s : sets_) n += s.size();
    return n;
  }

  std::string dump() const {
    std::ostringstream os;
    for (std::size_t h = 0; h < sets_.size(); ++h) {
      os << "set " << h << ":";
      for (const auto& e : sets_[h]) {
        os << " [" << e.key << " n=" << e.count << " last=" << e.last_access << " ins=" << e.insert_time << "]";
      }
      os << "\n";
    }
    return os.str();
  }

 private:
  using wide = unsigned __int128;

  std::uint64_t lifetime(const RefEntry& e) const { return now_ > e.insert_time ? now_ - e.insert_time : 1; }

  /// a strictly better victim than b (ties keep the earlier index).
  bool better_victim(const RefEntry& a, const RefEntry& b) const {
    switch (policy_) {
      case PolicyKind::fifo: return false;  // earliest insertion sits at index 0
      case PolicyKind::lru: return a.last_access < b.last_access;
      case PolicyKind::lfu:
        return a.count < b.count || (a.count == b.count && a.last_access < b.last_access);
      case PolicyKind::hyperbolic:
        // a.count / life(a) < b.count / life(b), cross-multiplied
        return static_cast<wide>(a.count) * lifetime(b) < static_cast<wide>(b.count) * lifetime(a);
    }
    return false;
  }

  bool ambiguous(const std::vector<RefEntry>& set, std::size_t victim) const {
    const RefEntry& v = set[victim];
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (i == victim) continue;
      const RefEntry& e = set[i];
      if (policy_ == PolicyKind::lfu && e.count == v.count) return true;
      if (policy_ == PolicyKind::hyperbolic && within_resolution(e, v)) return true;
    }
    return false;
  }

  /// (p_e / p_v)^IF < 4, i.e. the two priorities are less than two scaled
  /// log units apart.
  bool within_resolution(const RefEntry& e, const RefEntry& v) const {
    using boost::multiprecision::cpp_int;
    using boost::multiprecision::pow;
    const auto a = static_cast<unsigned>(options_.resolution.num());
    const auto b = static_cast<unsigned>(options_.resolution.den());
    const cpp_int lhs = pow(cpp_int(e.count) * lifetime(v), a);
    const cpp_int rhs = pow(cpp_int(4), b) * pow(cpp_int(v.count) * lifetime(e), a);
    return lhs < rhs;
  }

  const RefEntry* find(std::uint64_t key) const {
    for (const auto& e : sets_[set_of(key)]) {
      if (e.key == key) return &e;
    }
    return nullptr;
  }
  RefEntry* find(std::uint64_t key) {
    for (auto& e : sets_[set_of(key)]) {
      if (e.key == key) return &e;
    }
    return nullptr;
  }

  PolicyKind policy_;
  std::size_t k_;
  ReferenceOptions options_;
  std::vector<std::vector<RefEntry>> sets_;
  std::uint64_t now_ = 0;
  bool last_ambiguous_ = false;
  std::uint64_t ambiguous_evictions_ = 0;
};

/// Unrestricted window + main cache with a TinyLFU filter whose counters are
/// all halved together once every W accesses.
class ReferenceMultiRegion {
 public:
  ReferenceMultiRegion(const MultiRegionConfig& config, ReferenceOptions options = {})
      : config_(config),
        window_(config.window.policy, config.window.k, config.window.d, options),
        main_(config.main.policy, config.main.k, config.main.d, options),
        counters_(config.key_universe, 0),
        aging_window_(config.effective_aging_window()) {
    config.validate();
  }

  RefResult fetch(std::uint64_t key) {
    require_live_key(key);
    if (key >= counters_.size()) throw std::out_of_range("ReferenceMultiRegion: key outside the key universe");
    auto& c = counters_[key];
    if (c < config_.counter_cap) ++c;
    window_.advance_clock();
    main_.advance_clock();

    RefResult r;
    if (main_.contains(key)) {
      main_.touch(key);
      r.hit = true;
    } else if (window_.contains(key)) {
      window_.touch(key);
      r.hit = true;
    } else {
      r.evicted = miss(key);
    }
    if (++accesses_ % aging_window_ == 0) {
      for (auto& counter : counters_) counter >>= 1;
    }
    return r;
  }

  std::uint64_t count(std::uint64_t key) const { return counters_.at(key); }

 private:
  std::optional<std::uint64_t> miss(std::uint64_t key) {
    std::optional<std::uint64_t> window_victim;
    const std::size_t hw = window_.set_of(key);
    window_.age_set(hw, std::nullopt);
    if (window_.set_full(hw)) {
      window_victim = window_.choose_victim(hw)->key;
      window_.erase(*window_victim);
    }
    window_.insert(key);
    if (!window_victim) return std::nullopt;

    const std::size_t hm = main_.set_of(*window_victim);
    main_.age_set(hm, std::nullopt);
    if (!main_.set_full(hm)) {
      main_.insert(*window_victim);
      return std::nullopt;
    }
    const std::uint64_t main_victim = main_.choose_victim(hm)->key;
    if (config_.filter == AdmissionFilter::tinylfu && !(counters_[*window_victim] > counters_[main_victim])) {
      return window_victim;
    }
    main_.erase(main_victim);
    main_.insert(*window_victim);
    return main_victim;
  }

  MultiRegionConfig config_;
  ReferenceCache window_;
  ReferenceCache main_;
  std::vector<std::uint64_t> counters_;
  std::uint64_t aging_window_;
  std::uint64_t accesses_ = 0;
};

}  // namespace pkache::oracle
