// Copyright 2026 The pkache-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>

#include "pkache/hyperbolic.hpp"
#include "pkache/multiregion.hpp"
#include "pkache/oracle.hpp"
#include "pkache/policies.hpp"

namespace pkache {

/// Runtime handle over any restricted or reference cache.
class CacheEngine {
 public:
  virtual ~CacheEngine() = default;
  virtual FetchResult fetch(std::uint64_t key) = 0;
  /// Operations of the latest packet; all zero for reference engines.
  virtual OpCounter last_ops() const { return {}; }
  virtual std::string dump() const = 0;
};

/// Calls fn with a freshly built policy of the requested kind.
template <class Fn>
decltype(auto) with_policy(PolicyKind kind, const LayoutConfig& layout, const std::shared_ptr<const LogTable>& table,
                           Fn&& fn) {
  switch (kind) {
    case PolicyKind::fifo: return fn(FifoPolicy(layout));
    case PolicyKind::lru: return fn(LruPolicy(layout));
    case PolicyKind::lfu: return fn(LfuPolicy(layout));
    case PolicyKind::hyperbolic: return fn(HyperbolicPolicy(layout, table));
  }
  throw std::invalid_argument("unknown policy kind");
}

namespace detail {

template <class Cache>
class RestrictedEngine final : public CacheEngine {
 public:
  explicit RestrictedEngine(Cache cache) : cache_(std::move(cache)) {}
  FetchResult fetch(std::uint64_t key) override { return cache_.fetch(key); }
  OpCounter last_ops() const override { return cache_.last_ops(); }
  std::string dump() const override {
    if constexpr (requires { cache_.store(); }) {
      return cache_.store().dump();
    } else {
      return "window:\n" + cache_.window_store().dump() + "main:\n" + cache_.main_store().dump();
    }
  }
  const Cache& cache() const { return cache_; }

 private:
  Cache cache_;
};

template <class Ref>
class ReferenceEngine final : public CacheEngine {
 public:
  explicit ReferenceEngine(Ref ref) : ref_(std::move(ref)) {}
  FetchResult fetch(std::uint64_t key) override {
    const auto r = ref_.fetch(key);
    FetchResult out;
    out.outcome = r.hit ? Outcome::hit : Outcome::miss;
    out.value = key;
    if (r.evicted) out.evicted = CacheElement{*r.evicted, 0, {}};
    return out;
  }
  std::string dump() const override {
    if constexpr (requires { ref_.dump(); }) {
      return ref_.dump();
    } else {
      return {};
    }
  }

 private:
  Ref ref_;
};

}  // namespace detail

inline std::shared_ptr<const LogTable> make_log_table(const HyperbolicParams& params) {
  return std::make_shared<const LogTable>(params.max_scn, params.integer_factor);
}

inline std::unique_ptr<CacheEngine> make_restricted(PolicyKind kind, const LayoutConfig& layout,
                                                    const HyperbolicParams& params = {},
                                                    std::shared_ptr<const BackingStore> backing = nullptr) {
  const auto table = kind == PolicyKind::hyperbolic ? make_log_table(params) : nullptr;
  return with_policy(kind, layout, table, [&](auto policy) -> std::unique_ptr<CacheEngine> {
    using P = decltype(policy);
    return std::make_unique<detail::RestrictedEngine<SingleRegionCache<P>>>(
        SingleRegionCache<P>(layout, std::move(policy), backing));
  });
}

inline std::unique_ptr<CacheEngine> make_restricted_multi(const MultiRegionConfig& config,
                                                          const HyperbolicParams& params = {},
                                                          std::shared_ptr<const BackingStore> backing = nullptr) {
  config.validate();
  const bool hyper =
      config.window.policy == PolicyKind::hyperbolic || config.main.policy == PolicyKind::hyperbolic;
  const auto table = hyper ? make_log_table(params) : nullptr;
  return with_policy(config.window.policy, config.layout_for(config.window), table, [&](auto window) {
    return with_policy(config.main.policy, config.layout_for(config.main), table,
                       [&](auto main) -> std::unique_ptr<CacheEngine> {
                         using W = decltype(window);
                         using M = decltype(main);
                         return std::make_unique<detail::RestrictedEngine<MultiRegionCache<W, M>>>(
                             MultiRegionCache<W, M>(config, window, std::move(main), backing));
                       });
  });
}

inline std::unique_ptr<CacheEngine> make_reference(PolicyKind kind, std::size_t k, std::size_t d,
                                                   oracle::ReferenceOptions options = {}) {
  return std::make_unique<detail::ReferenceEngine<oracle::ReferenceCache>>(oracle::ReferenceCache(kind, k, d, options));
}

inline std::unique_ptr<CacheEngine> make_reference_multi(const MultiRegionConfig& config,
                                                         oracle::ReferenceOptions options = {}) {
  return std::make_unique<detail::ReferenceEngine<oracle::ReferenceMultiRegion>>(
      oracle::ReferenceMultiRegion(config, options));
}

}  // namespace pkache
