#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "bloommap/errors.hpp"

namespace bloommap {

// Fixed-size bit array. Bits only go 0 -> 1, and not at all once frozen.
class BitArray {
 public:
  BitArray() = default;
  explicit BitArray(std::uint64_t m) : m_(m), words_((m + 63) / 64, 0) {}

  std::uint64_t size() const noexcept { return m_; }
  bool frozen() const noexcept { return frozen_; }
  void freeze() noexcept { frozen_ = true; }

  void set(std::uint64_t i) {
    if (frozen_) throw FrozenError("bit array is frozen");
    words_[i >> 6] |= std::uint64_t{1} << (i & 63);
  }

  bool test(std::uint64_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }

  std::uint64_t count_ones() const noexcept {
    std::uint64_t c = 0;
    for (std::uint64_t w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
    return c;
  }

  // rho: proportion of bits still zero.
  double zero_fraction() const noexcept {
    return m_ == 0 ? 1.0 : static_cast<double>(m_ - count_ones()) / static_cast<double>(m_);
  }

  // ceil(m/8) bytes, bit j at byte j/8, position j%8.
  std::vector<std::uint8_t> to_bytes() const {
    std::vector<std::uint8_t> out((m_ + 7) / 8, 0);
    for (std::size_t b = 0; b < out.size(); ++b) out[b] = static_cast<std::uint8_t>(words_[b >> 3] >> (8 * (b & 7)));
    return out;
  }

  static BitArray from_bytes(std::uint64_t m, std::span<const std::uint8_t> bytes) {
    BitArray a(m);
    for (std::size_t b = 0; b < bytes.size() && b < (m + 7) / 8; ++b)
      a.words_[b >> 3] |= std::uint64_t{bytes[b]} << (8 * (b & 7));
    // Padding bits past m are ignored.
    if (m % 64 != 0 && !a.words_.empty()) a.words_.back() &= (std::uint64_t{1} << (m % 64)) - 1;
    return a;
  }

  bool operator==(const BitArray& other) const noexcept { return m_ == other.m_ && words_ == other.words_; }

 private:
  std::uint64_t m_ = 0;
  std::vector<std::uint64_t> words_;
  bool frozen_ = false;
};

}  // namespace bloommap
