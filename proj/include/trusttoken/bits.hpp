// Copyright ttsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRUSTTOKEN_BITS_HPP
#define TRUSTTOKEN_BITS_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "trusttoken/errors.hpp"
#include "trusttoken/rng.hpp"

namespace trusttoken {

/// Fixed-width bit string. Tokens and PUF responses are values of this type;
/// widths are dynamic because reduced instances run with 4-bit tokens.
/// Unused high bits of the last word are kept zero so equality and popcount
/// work on whole words.
class BitString {
 public:
  BitString() = default;

  explicit BitString(size_t bit_count)
      : size_(bit_count), words_((bit_count + 63) / 64, 0) {}

  static BitString random(size_t bit_count, Rng& rng) {
    BitString b(bit_count);
    for (auto& w : b.words_) w = rng.next_u64();
    b.mask_tail();
    return b;
  }

  /// Parses "1010..."; character i becomes bit i.
  static BitString parse(std::string_view text) {
    BitString b(text.size());
    for (size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '1') {
        b.set(i, true);
      } else if (text[i] != '0') {
        throw ValidationError("BitString::parse: expected only '0'/'1'");
      }
    }
    return b;
  }

  size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool test(size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }

  void set(size_t i, bool v) {
    const uint64_t mask = uint64_t{1} << (i % 64);
    if (v) {
      words_[i / 64] |= mask;
    } else {
      words_[i / 64] &= ~mask;
    }
  }

  size_t count_ones() const {
    size_t n = 0;
    for (uint64_t w : words_) n += static_cast<size_t>(std::popcount(w));
    return n;
  }

  std::string to_string() const {
    std::string s(size_, '0');
    for (size_t i = 0; i < size_; ++i) {
      if (test(i)) s[i] = '1';
    }
    return s;
  }

  /// Compact display form: one hex digit per 4 bits, bit 4j weighted 8.
  std::string to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve((size_ + 3) / 4);
    for (size_t j = 0; j < size_; j += 4) {
      unsigned v = 0;
      for (size_t k = 0; k < 4 && j + k < size_; ++k) {
        v = (v << 1) | (test(j + k) ? 1u : 0u);
      }
      if (size_ - j < 4) v <<= 4 - (size_ - j);
      s.push_back(digits[v]);
    }
    return s;
  }

  bool operator==(const BitString&) const = default;

  friend size_t hamming_distance(const BitString& a, const BitString& b);

 private:
  void mask_tail() {
    const size_t tail = size_ % 64;
    if (tail != 0 && !words_.empty()) {
      words_.back() &= (uint64_t{1} << tail) - 1;
    }
  }

  size_t size_ = 0;
  std::vector<uint64_t> words_;
};

/// Count of differing bit positions. Widths must match.
inline size_t hamming_distance(const BitString& a, const BitString& b) {
  if (a.size_ != b.size_) {
    throw DimensionError("hamming_distance: width mismatch (" +
                         std::to_string(a.size_) + " vs " +
                         std::to_string(b.size_) + ")");
  }
  size_t n = 0;
  for (size_t i = 0; i < a.words_.size(); ++i) {
    n += static_cast<size_t>(std::popcount(a.words_[i] ^ b.words_[i]));
  }
  return n;
}

}  // namespace trusttoken

#endif  // TRUSTTOKEN_BITS_HPP
