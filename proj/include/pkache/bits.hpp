// Copyright 2026 The pkache-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pkache {

/// Fixed-width little-endian bit string. Bit 0 is the least significant bit
/// of word 0. Field accessors take fields up to 64 bits wide.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t width) : width_(width), words_((width + 63) / 64, 0) {}

  std::size_t width() const { return width_; }

  std::uint64_t get(std::size_t offset, std::size_t bits) const {
    check_range(offset, bits);
    const std::size_t word = offset / 64;
    const std::size_t shift = offset % 64;
    std::uint64_t out = words_[word] >> shift;
    if (shift != 0 && shift + bits > 64) {
      out |= words_[word + 1] << (64 - shift);
    }
    return out & mask(bits);
  }

  void set(std::size_t offset, std::size_t bits, std::uint64_t value) {
    check_range(offset, bits);
    if ((value & ~mask(bits)) != 0) {
      throw std::out_of_range("BitString::set: value wider than field");
    }
    const std::size_t word = offset / 64;
    const std::size_t shift = offset % 64;
    words_[word] = (words_[word] & ~(mask(bits) << shift)) | (value << shift);
    if (shift != 0 && shift + bits > 64) {
      const std::size_t spill = shift + bits - 64;
      words_[word + 1] = (words_[word + 1] & ~mask(spill)) | (value >> (64 - shift));
    }
  }

  /// True when the `bits`-wide field at `offset` is all zero.
  bool zero(std::size_t offset, std::size_t bits) const { return get(offset, bits) == 0; }

  std::size_t popcount() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(__builtin_popcountll(w));
    return n;
  }

  BitString& operator^=(const BitString& other) {
    if (other.width_ != width_) throw std::invalid_argument("BitString: width mismatch");
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
    return *this;
  }

  friend BitString operator^(BitString lhs, const BitString& rhs) { return lhs ^= rhs; }
  friend bool operator==(const BitString&, const BitString&) = default;

  /// Most significant bit first, for diagnostics.
  std::string to_string() const {
    std::string s;
    s.reserve(width_);
    for (std::size_t i = width_; i-- > 0;) s.push_back(((words_[i / 64] >> (i % 64)) & 1U) ? '1' : '0');
    return s;
  }

  static constexpr std::uint64_t mask(std::size_t bits) {
    return bits >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
  }

 private:
  void check_range(std::size_t offset, std::size_t bits) const {
    if (bits == 0 || bits > 64 || offset + bits > width_) {
      throw std::out_of_range("BitString: field out of range");
    }
  }

  std::size_t width_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace pkache
