// Copyright 2026 The pkache-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pkache {

/// One keyed access, remapped to a live key (>= 1).
struct TraceEvent {
  std::uint64_t key = 0;
  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

using Trace = std::vector<TraceEvent>;

/// Identifies the PRNG and sampling method so reports stay reproducible.
inline constexpr std::string_view kGeneratorId = "mt19937_64+u53-inverse-cdf";

struct ZipfSpec {
  std::uint64_t n = 1'000'000;  // universe size
  double s = 0.99;              // skew
  std::uint64_t length = 1'000'000;
  std::uint64_t seed = 42;

  void validate() const {
    if (n < 1) throw std::invalid_argument("ZipfSpec: N must be >= 1");
    if (!(s > 0.0)) throw std::invalid_argument("ZipfSpec: s must be > 0");
    if (length < 1) throw std::invalid_argument("ZipfSpec: length must be >= 1");
  }
};

inline long double zipf_normalizer(std::uint64_t n, double s) {
  long double sum = 0;
  // smallest terms first keeps the rounding error down
  for (std::uint64_t i = n; i >= 1; --i) sum += std::pow(static_cast<long double>(i), -static_cast<long double>(s));
  return sum;
}

/// f(N, l, s) = (1 / l^s) / sum_{n=1..N} 1 / n^s
inline double zipf_frequency(std::uint64_t n, std::uint64_t rank, double s) {
  if (rank < 1 || rank > n) throw std::out_of_range("zipf_frequency: rank outside [1, N]");
  return static_cast<double>(std::pow(static_cast<long double>(rank), -static_cast<long double>(s)) /
                             zipf_normalizer(n, s));
}

/// Uniform double in [0, 1) from the top 53 bits; independent of the
/// standard library's distribution implementations.
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// i.i.d. rank draws; rank r becomes key r.
inline Trace generate_zipf(const ZipfSpec& spec) {
  spec.validate();
  std::vector<double> cdf(spec.n);
  long double acc = 0;
  for (std::uint64_t i = 0; i < spec.n; ++i) {
    acc += std::pow(static_cast<long double>(i + 1), -static_cast<long double>(spec.s));
    cdf[i] = static_cast<double>(acc);
  }
  const double total = cdf.back();
  std::mt19937_64 rng(spec.seed);
  Trace out;
  out.reserve(spec.length);
  for (std::uint64_t i = 0; i < spec.length; ++i) {
    const double u = unit_draw(rng) * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    out.push_back(TraceEvent{static_cast<std::uint64_t>(it - cdf.begin()) + 1});
  }
  return out;
}

enum class TraceFormat { plain, csv, arc };

inline TraceFormat parse_trace_format(std::string_view name) {
  if (name == "plain" || name == "PLAIN") return TraceFormat::plain;
  if (name == "csv" || name == "CSV") return TraceFormat::csv;
  if (name == "arc" || name == "ARC") return TraceFormat::arc;
  throw std::invalid_argument("unknown trace format: " + std::string(name));
}

class TraceError : public std::runtime_error {
 public:
  TraceError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// First-seen dense remapping onto [1, distinct].
class KeyRemapper {
 public:
  std::uint64_t operator()(std::uint64_t raw) {
    auto [it, inserted] = ids_.try_emplace(raw, ids_.size() + 1);
    return it->second;
  }
  std::size_t distinct() const { return ids_.size(); }

 private:
  std::unordered_map<std::uint64_t, std::uint64_t> ids_;
};

struct TraceOptions {
  TraceFormat format = TraceFormat::plain;
  std::string csv_column = "key";  // header name, or a 0-based index (no header row then)
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::uint64_t parse_key(std::string_view token, std::size_t line) {
  token = trim(token);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
    throw TraceError("non-numeric key '" + std::string(token) + "'", line);
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

/// Parses PLAIN (one decimal key per line), CSV (header row, key column by
/// name or index) or ARC (first field is the starting block, an optional
/// second field a block count that expands into consecutive keys).
/// Accepts LF or CRLF and a leading UTF-8 BOM; blank lines are skipped.
inline Trace parse_trace(std::istream& in, const TraceOptions& options = {}) {
  Trace out;
  KeyRemapper remap;
  std::string raw;
  std::size_t line_no = 0;
  std::optional<std::size_t> csv_index;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    line = detail::trim(line);
    if (line.empty()) continue;
    switch (options.format) {
      case TraceFormat::plain:
        out.push_back({remap(detail::parse_key(line, line_no))});
        break;
      case TraceFormat::csv: {
        const auto fields = detail::split(line, ',');
        if (!csv_index) {
          const auto& col = options.csv_column;
          if (!col.empty() && std::all_of(col.begin(), col.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            csv_index = std::stoul(col);
          } else {
            auto it = std::find_if(fields.begin(), fields.end(),
                                   [&](std::string_view f) { return detail::trim(f) == col; });
            if (it == fields.end()) throw TraceError("CSV header has no column '" + col + "'", line_no);
            csv_index = static_cast<std::size_t>(it - fields.begin());
            break;  // header row
          }
        }
        if (*csv_index >= fields.size()) throw TraceError("CSV row has no key column", line_no);
        out.push_back({remap(detail::parse_key(fields[*csv_index], line_no))});
        break;
      }
      case TraceFormat::arc: {
        const auto fields = detail::split_ws(line);
        const std::uint64_t start = detail::parse_key(fields[0], line_no);
        const std::uint64_t count = fields.size() > 1 ? detail::parse_key(fields[1], line_no) : 1;
        for (std::uint64_t i = 0; i < count; ++i) out.push_back({remap(start + i)});
        break;
      }
    }
  }
  if (out.empty()) throw TraceError("trace contains no events", 0);
  return out;
}

inline Trace parse_trace(const std::string& path, const TraceOptions& options = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceError("cannot open trace file " + path, 0);
  return parse_trace(in, options);
}

inline std::uint64_t max_key(const Trace& trace) {
  std::uint64_t m = 0;
  for (const auto& e : trace) m = std::max(m, e.key);
  return m;
}

}  // namespace pkache
