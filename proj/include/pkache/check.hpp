// Copyright 2026 The pkache-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pkache/engine.hpp"
#include "pkache/oracle.hpp"

namespace pkache {

struct ExhaustiveReport {
  PolicyKind policy = PolicyKind::lru;
  std::size_t k = 0;
  std::size_t d = 0;
  std::size_t alphabet = 0;
  std::size_t max_len = 0;
  std::uint64_t sequences = 0;
  std::uint64_t divergent = 0;         // hit/miss streams differ somewhere
  std::uint64_t tie_tagged = 0;        // a metric tie at some eviction up to the first divergence
  std::uint64_t untagged_divergent = 0;
  std::optional<std::string> first_untagged;  // sequence plus both state dumps

  /// FIFO and LRU must match exactly; LFU and Hyperbolic may only diverge
  /// after a tied eviction.
  bool ok() const { return untagged_divergent == 0; }

  std::string summary() const {
    std::ostringstream os;
    os << to_string(policy) << " k=" << k << " d=" << d << " alphabet=" << alphabet << " len<=" << max_len
       << ": sequences=" << sequences << " divergent=" << divergent << " tie_tagged=" << tie_tagged
       << " untagged_divergent=" << untagged_divergent;
    return os.str();
  }
};

/// Replays every key sequence over {1..alphabet} of length 1..max_len through
/// the restricted engine and the unrestricted reference with the same k, d.
/// The reference LFU uses the engine's aging rule so that tie-breaking is the
/// only remaining difference; hyperbolic ties are judged at the log table's
/// resolution.
inline ExhaustiveReport exhaustive_check(PolicyKind policy, std::size_t k, std::size_t d, std::size_t alphabet,
                                         std::size_t max_len, const HyperbolicParams& params = {}) {
  ExhaustiveReport report;
  report.policy = policy;
  report.k = k;
  report.d = d;
  report.alphabet = alphabet;
  report.max_len = max_len;
  LayoutConfig layout;
  layout.k = k;
  layout.d = d;
  oracle::ReferenceOptions options;
  options.lfu = oracle::LfuCounting::set_aged;
  options.lfu_cap = layout.scn_max();
  options.resolution = params.integer_factor;
  options.track_ties = true;

  std::vector<std::uint64_t> seq;
  for (std::size_t len = 1; len <= max_len; ++len) {
    seq.assign(len, 1);
    while (true) {
      ++report.sequences;
      auto engine = make_restricted(policy, layout, params);
      oracle::ReferenceCache ref(policy, k, d, options);
      bool tied = false;
      std::optional<std::size_t> diverged_at;
      for (std::size_t i = 0; i < len; ++i) {
        const bool restricted_hit = engine->fetch(seq[i]).hit();
        const bool reference_hit = ref.fetch(seq[i]).hit;
        if (ref.last_eviction_ambiguous() && !diverged_at) tied = true;
        if (restricted_hit != reference_hit && !diverged_at) diverged_at = i;
      }
      if (diverged_at) {
        ++report.divergent;
        if (tied) {
          ++report.tie_tagged;
        } else {
          ++report.untagged_divergent;
          if (!report.first_untagged) {
            std::ostringstream os;
            os << "sequence:";
            for (auto key : seq) os << ' ' << key;
            os << "\nfirst divergence at step " << *diverged_at << "\nrestricted:\n"
               << engine->dump() << "reference:\n" << ref.dump();
            report.first_untagged = os.str();
          }
        }
      } else if (tied) {
        ++report.tie_tagged;
      }
      // next sequence in lexicographic order
      std::size_t pos = len;
      while (pos > 0 && seq[pos - 1] == alphabet) seq[--pos] = 1;
      if (pos == 0) break;
      ++seq[pos - 1];
    }
  }
  return report;
}

}  // namespace pkache
