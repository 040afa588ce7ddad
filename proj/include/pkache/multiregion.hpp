// Copyright 2026 The pkache-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pkache/hyperbolic.hpp"
#include "pkache/policies.hpp"

namespace pkache {

enum class AdmissionFilter { none, tinylfu };

/// What a window victim carries into the main region's SCN word.
enum class AdmissionScn {
  refresh,  // reset to the main policy's just-inserted value
  carry,    // keep the word maintained while the element sat in the window
};

struct RegionSpec {
  PolicyKind policy = PolicyKind::lru;
  std::size_t k = 16;
  std::size_t d = 16;

  std::size_t capacity() const { return k * d; }
};

struct MultiRegionConfig {
  RegionSpec window{PolicyKind::fifo, 4, 16};
  RegionSpec main{PolicyKind::lru, 16, 16};
  AdmissionFilter filter = AdmissionFilter::tinylfu;
  std::size_t key_universe = 0;   // counters cover keys [0, key_universe)
  std::uint64_t aging_window = 0; // W; 0 selects 16 * total capacity
  std::uint64_t aging_stride = 16;  // n
  std::uint64_t counter_cap = (1U << 15) - 1;
  AdmissionScn admission = AdmissionScn::refresh;
  std::size_t key_bits = 32;
  std::size_t value_bits = 32;
  std::size_t scn_bits = 32;

  std::uint64_t effective_aging_window() const {
    return aging_window != 0 ? aging_window : 16 * (window.capacity() + main.capacity());
  }

  LayoutConfig layout_for(const RegionSpec& region) const {
    return LayoutConfig{key_bits, value_bits, scn_bits, 2, region.k, region.d};
  }

  void validate() const {
    if (key_universe < 2) throw std::invalid_argument("MultiRegionConfig: key_universe must cover at least key 1");
    if (aging_stride == 0 || aging_stride >= effective_aging_window()) {
      throw std::invalid_argument("MultiRegionConfig: aging stride must satisfy 0 < n < W");
    }
    if (counter_cap == 0) throw std::invalid_argument("MultiRegionConfig: counter cap must be positive");
    layout_for(window).validate();
    layout_for(main).validate();
  }
};

/// Explicit per-key access counters with de-amortized halving: every
/// `stride` accesses the next ceil(universe * stride / window) counters in
/// cyclic key order are halved, so each counter is halved once per window.
class CountingFilter {
 public:
  CountingFilter(std::size_t universe, std::uint64_t window, std::uint64_t stride, std::uint64_t cap)
      : counters_(universe, 0), window_(window), stride_(stride), cap_(cap) {
    if (universe == 0 || stride == 0 || window == 0 || stride >= window) {
      throw std::invalid_argument("CountingFilter: need universe > 0 and 0 < stride < window");
    }
    per_step_ = std::min<std::uint64_t>((universe * stride + window - 1) / window, universe);
  }

  std::uint64_t count(std::uint64_t key) const { return counters_.at(static_cast<std::size_t>(key)); }

  void increment(std::uint64_t key, OpCounter& ops) {
    auto& c = counters_.at(static_cast<std::size_t>(key));
    if (c < cap_) ++c;
    ops.extra_accesses += 2;
  }

  /// Counts one access and runs an aging step when one is due.
  void record_access(OpCounter& ops) {
    if (++accesses_ % stride_ == 0) age_step(ops);
  }

  void age_step(OpCounter& ops) {
    for (std::uint64_t i = 0; i < per_step_; ++i) {
      counters_[cursor_] >>= 1;
      cursor_ = (cursor_ + 1) % counters_.size();
    }
    ops.extra_accesses += 2 * per_step_;
  }

  std::uint64_t per_step() const { return per_step_; }
  std::size_t cursor() const { return cursor_; }
  std::uint64_t accesses() const { return accesses_; }
  std::size_t universe() const { return counters_.size(); }

 private:
  std::vector<std::uint64_t> counters_;
  std::uint64_t window_;
  std::uint64_t stride_;
  std::uint64_t cap_;
  std::uint64_t per_step_ = 1;
  std::uint64_t accesses_ = 0;
  std::size_t cursor_ = 0;
};

enum class Admission { not_attempted, absorbed, admitted, rejected };

/// Window region (SCN word 0) in front of a main region (SCN word 1), with
/// an optional TinyLFU admission filter between them.
template <ReplacementPolicy WindowPolicy, ReplacementPolicy MainPolicy>
class MultiRegionCache {
 public:
  MultiRegionCache(const MultiRegionConfig& config, WindowPolicy window_policy, MainPolicy main_policy,
                   std::shared_ptr<const BackingStore> backing = nullptr)
      : config_(checked(config)),
        window_(config.layout_for(config.window), std::move(window_policy), 0),
        main_(config.layout_for(config.main), std::move(main_policy), 1),
        filter_(config.key_universe, config.effective_aging_window(), config.aging_stride, config.counter_cap),
        backing_(backing ? std::move(backing) : default_backing(config.value_bits)) {
    if (WindowPolicy::kKind != config.window.policy || MainPolicy::kKind != config.main.policy) {
      throw std::invalid_argument("MultiRegionCache: policy types do not match the config");
    }
  }

  FetchResult fetch(std::uint64_t key) {
    require_live_key(key);
    if (key >= config_.key_universe) throw std::out_of_range("MultiRegionCache: key outside the key universe");
    last_.reset();
    last_admission_ = Admission::not_attempted;
    if (filtered()) filter_.increment(key, last_);
    window_.begin_packet();
    main_.begin_packet();

    const std::size_t hm = main_.set_of(key);
    const std::size_t hw = window_.set_of(key);
    const auto in_main = main_.lookup(hm, key, last_);
    const auto in_window = window_.lookup(hw, key, last_);

    FetchResult result;
    if (in_main) {
      auto set = main_.read(hm, last_);
      main_.on_hit(set, *in_main);
      set[*in_main].scn[0] = window_.policy().touch_word(set[*in_main].scn[0]);
      main_.write(hm, set, last_);
      result.outcome = Outcome::hit;
      result.value = set[*in_main].value;
    } else if (in_window) {
      auto set = window_.read(hw, last_);
      window_.on_hit(set, *in_window);
      set[*in_window].scn[1] = main_.policy().touch_word(set[*in_window].scn[1]);
      window_.write(hw, set, last_);
      result.outcome = Outcome::hit;
      result.value = set[*in_window].value;
    } else {
      result.outcome = Outcome::miss;
      result.value = backing_->fetch_value(key);
      result.evicted = insert_miss(key, result.value);
    }
    if (filtered()) filter_.record_access(last_);
    stats_.add(last_);
    return result;
  }

  const OpCounter& last_ops() const { return last_; }
  const OpStats& stats() const { return stats_; }
  Admission last_admission() const { return last_admission_; }
  const CountingFilter& filter() const { return filter_; }
  const RegisterStore& window_store() const { return window_.store(); }
  const RegisterStore& main_store() const { return main_.store(); }
  const MultiRegionConfig& config() const { return config_; }

 private:
  static const MultiRegionConfig& checked(const MultiRegionConfig& c) {
    c.validate();
    return c;
  }

  std::optional<CacheElement> insert_miss(std::uint64_t key, std::uint64_t value) {
    const std::size_t hw = window_.set_of(key);
    auto wset = window_.read(hw, last_);
    const CacheElement fresh{key, value, {window_.policy().fresh_word(), main_.policy().fresh_word()}};
    CacheElement window_victim = window_.insert(wset, fresh, last_);
    window_.write(hw, wset, last_);
    if (window_victim.empty()) return std::nullopt;

    if (config_.admission == AdmissionScn::refresh) window_victim.scn[1] = main_.policy().fresh_word();
    const std::size_t hm = main_.set_of(window_victim.key);
    auto mset = main_.read(hm, last_);
    CacheElement main_victim = main_.insert(mset, window_victim, last_);
    std::optional<CacheElement> evicted;
    if (main_victim.empty()) {
      last_admission_ = Admission::absorbed;
    } else if (filtered() &&
               !admits(filter_.count(window_victim.key), filter_.count(main_victim.key))) {
      // The main victim goes back to way 0 in place of the window victim.
      last_.extra_accesses += 2;
      mset[0] = main_victim;
      evicted = window_victim;
      last_admission_ = Admission::rejected;
    } else {
      if (filtered()) last_.extra_accesses += 2;
      evicted = main_victim;
      last_admission_ = Admission::admitted;
    }
    main_.write(hm, mset, last_);
    return evicted;
  }

  bool filtered() const { return config_.filter == AdmissionFilter::tinylfu; }

  static bool admits(std::uint64_t window_count, std::uint64_t main_count) { return window_count > main_count; }

  MultiRegionConfig config_;
  Region<WindowPolicy> window_;
  Region<MainPolicy> main_;
  CountingFilter filter_;
  std::shared_ptr<const BackingStore> backing_;
  OpCounter last_;
  OpStats stats_;
  Admission last_admission_ = Admission::not_attempted;
};

}  // namespace pkache
