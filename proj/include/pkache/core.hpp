// Copyright 2026 The pkache-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pkache/bits.hpp"

namespace pkache {

/// Widest ternary mask a match table accepts; bounds k * key_bits.
inline constexpr std::size_t kTcamMaskLimit = 2048;

/// Bit widths and geometry of one cache region.
struct LayoutConfig {
  std::size_t key_bits = 32;
  std::size_t value_bits = 32;
  std::size_t scn_bits = 32;
  std::size_t scn_words = 1;  // 2 for elements of a multi-region cache
  std::size_t k = 8;          // ways per set
  std::size_t d = 16;         // sets

  std::size_t element_bits() const { return key_bits + value_bits + scn_words * scn_bits; }
  std::size_t set_bits() const { return k * element_bits(); }
  std::size_t capacity() const { return k * d; }
  std::uint64_t scn_max() const { return BitString::mask(scn_bits); }

  void validate() const {
    auto width_ok = [](std::size_t w) { return w >= 1 && w <= 64; };
    if (!width_ok(key_bits) || !width_ok(value_bits) || !width_ok(scn_bits)) {
      throw std::invalid_argument("LayoutConfig: field widths must be in [1, 64]");
    }
    if (scn_words < 1 || scn_words > 2) throw std::invalid_argument("LayoutConfig: scn_words must be 1 or 2");
    if (k < 1 || d < 1) throw std::invalid_argument("LayoutConfig: k and d must be >= 1");
    if (k * key_bits > kTcamMaskLimit) {
      throw std::invalid_argument("LayoutConfig: k * key_bits exceeds the 2048-bit TCAM mask limit");
    }
  }
};

/// One way's payload. Key 0 marks an empty way.
struct CacheElement {
  std::uint64_t key = 0;
  std::uint64_t value = 0;
  std::array<std::uint64_t, 2> scn{};

  bool empty() const { return key == 0; }
  friend bool operator==(const CacheElement&, const CacheElement&) = default;
};

/// Per-packet operation accountant.
///
/// `extra_accesses` counts policy-specific auxiliary registers (log table
/// lookups, admission filter counters) that sit outside the three core
/// operation classes.
struct OpCounter {
  std::uint64_t tcam_matches = 0;
  std::uint64_t register_reads = 0;
  std::uint64_t register_writes = 0;
  std::uint64_t extra_accesses = 0;

  void reset() { *this = OpCounter{}; }

  /// `n` read/write pairs on auxiliary registers (candidate, keys).
  void aux(std::uint64_t n) {
    register_reads += n;
    register_writes += n;
  }

  OpCounter& operator+=(const OpCounter& o) {
    tcam_matches += o.tcam_matches;
    register_reads += o.register_reads;
    register_writes += o.register_writes;
    extra_accesses += o.extra_accesses;
    return *this;
  }

  void keep_max(const OpCounter& o) {
    tcam_matches = std::max(tcam_matches, o.tcam_matches);
    register_reads = std::max(register_reads, o.register_reads);
    register_writes = std::max(register_writes, o.register_writes);
    extra_accesses = std::max(extra_accesses, o.extra_accesses);
  }

  friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

inline void require_live_key(std::uint64_t key) {
  if (key == 0) throw std::invalid_argument("key 0 is reserved for empty ways");
}

/// Modulo set mapping.
inline std::size_t hash_to_set(std::uint64_t key, std::size_t d) {
  require_live_key(key);
  if (d == 0) throw std::invalid_argument("hash_to_set: d must be >= 1");
  return static_cast<std::size_t>(key % d);
}

/// The requested key concatenated k times, as fed to the ternary table.
inline BitString replicate_key(std::uint64_t key, std::size_t k, std::size_t key_bits) {
  BitString out(k * key_bits);
  for (std::size_t i = 0; i < k; ++i) out.set(i * key_bits, key_bits, key);
  return out;
}

/// Packs keys into a keys-register entry, way 0 in the lowest slice.
inline BitString make_keys_entry(std::span<const std::uint64_t> keys, std::size_t key_bits) {
  BitString out(keys.size() * key_bits);
  for (std::size_t i = 0; i < keys.size(); ++i) out.set(i * key_bits, key_bits, keys[i]);
  return out;
}

/// Single ternary match over a keys-register entry: XOR with the replicated
/// key, then report the way whose slice is all zero.
inline std::optional<std::size_t> ternary_lookup(const BitString& keys_entry, std::uint64_t key,
                                                 std::size_t key_bits, OpCounter& ops) {
  require_live_key(key);
  if (key_bits == 0 || keys_entry.width() % key_bits != 0) {
    throw std::invalid_argument("ternary_lookup: entry width is not a multiple of key_bits");
  }
  if ((key & ~BitString::mask(key_bits)) != 0) return std::nullopt;
  const std::size_t k = keys_entry.width() / key_bits;
  ++ops.tcam_matches;
  const BitString diff = keys_entry ^ replicate_key(key, k, key_bits);
  for (std::size_t way = 0; way < k; ++way) {
    if (diff.zero(way * key_bits, key_bits)) return way;
  }
  return std::nullopt;
}

/// Fixed array of d encoded sets plus the parallel keys-only register.
class RegisterStore {
 public:
  explicit RegisterStore(LayoutConfig layout) : layout_(layout) {
    layout_.validate();
    sets_.assign(layout_.d, BitString(layout_.set_bits()));
    keys_.assign(layout_.d, BitString(layout_.k * layout_.key_bits));
  }

  const LayoutConfig& layout() const { return layout_; }

  std::vector<CacheElement> read_set(std::size_t h, OpCounter& ops) const {
    ++ops.register_reads;
    return peek(h);
  }

  void write_set(std::size_t h, std::span<const CacheElement> elements, OpCounter& ops) {
    ++ops.register_writes;
    store(h, elements);
  }

  std::optional<std::size_t> ternary_lookup(std::size_t h, std::uint64_t key, OpCounter& ops) const {
    check_set(h);
    return pkache::ternary_lookup(keys_[h], key, layout_.key_bits, ops);
  }

  /// Uncounted decode, for diagnostics and oracles.
  std::vector<CacheElement> peek(std::size_t h) const {
    check_set(h);
    std::vector<CacheElement> out(layout_.k);
    const BitString& bits = sets_[h];
    for (std::size_t way = 0; way < layout_.k; ++way) {
      std::size_t off = way * layout_.element_bits();
      CacheElement& e = out[way];
      e.key = bits.get(off, layout_.key_bits);
      off += layout_.key_bits;
      e.value = bits.get(off, layout_.value_bits);
      off += layout_.value_bits;
      for (std::size_t w = 0; w < layout_.scn_words; ++w) {
        e.scn[w] = bits.get(off, layout_.scn_bits);
        off += layout_.scn_bits;
      }
    }
    return out;
  }

  /// Uncounted whole-store rewrite; models control-plane maintenance such
  /// as clock rescaling, which is not part of any packet's cost.
  template <class Fn>
  void maintain(Fn&& fn) {
    for (std::size_t h = 0; h < layout_.d; ++h) {
      auto elements = peek(h);
      fn(std::span<CacheElement>(elements));
      store(h, elements);
    }
  }

  const BitString& set_entry(std::size_t h) const {
    check_set(h);
    return sets_[h];
  }

  const BitString& keys_entry(std::size_t h) const {
    check_set(h);
    return keys_[h];
  }

  /// keys register matches the key fields of every set, and live keys are
  /// distinct within each set.
  bool consistent() const {
    for (std::size_t h = 0; h < layout_.d; ++h) {
      if (!consistent_at(h)) return false;
    }
    return true;
  }

  std::string dump() const {
    std::ostringstream os;
    for (std::size_t h = 0; h < layout_.d; ++h) {
      os << "set " << h << ":";
      for (const auto& e : peek(h)) {
        os << " [" << e.key << " v=" << e.value << " scn=" << e.scn[0];
        if (layout_.scn_words == 2) os << "," << e.scn[1];
        os << "]";
      }
      os << "\n";
    }
    return os.str();
  }

 private:
  void check_set(std::size_t h) const {
    if (h >= layout_.d) throw std::out_of_range("RegisterStore: set index out of range");
  }

  void store(std::size_t h, std::span<const CacheElement> elements) {
    check_set(h);
    if (elements.size() != layout_.k) throw std::invalid_argument("RegisterStore: expected k elements");
    BitString bits(layout_.set_bits());
    BitString keys(layout_.k * layout_.key_bits);
    for (std::size_t way = 0; way < layout_.k; ++way) {
      const CacheElement& e = elements[way];
      std::size_t off = way * layout_.element_bits();
      bits.set(off, layout_.key_bits, e.key);
      off += layout_.key_bits;
      bits.set(off, layout_.value_bits, e.value);
      off += layout_.value_bits;
      for (std::size_t w = 0; w < layout_.scn_words; ++w) {
        bits.set(off, layout_.scn_bits, e.scn[w]);
        off += layout_.scn_bits;
      }
      keys.set(way * layout_.key_bits, layout_.key_bits, e.key);
    }
    sets_[h] = std::move(bits);
    keys_[h] = std::move(keys);
    assert(consistent_at(h));
  }

  bool consistent_at(std::size_t h) const {
    const auto elements = peek(h);
    for (std::size_t way = 0; way < layout_.k; ++way) {
      if (keys_[h].get(way * layout_.key_bits, layout_.key_bits) != elements[way].key) return false;
      for (std::size_t j = way + 1; j < layout_.k; ++j) {
        if (!elements[way].empty() && elements[way].key == elements[j].key) return false;
      }
    }
    return true;
  }

  LayoutConfig layout_;
  std::vector<BitString> sets_;
  std::vector<BitString> keys_;
};

}  // namespace pkache
