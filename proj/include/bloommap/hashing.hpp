#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "bloommap/codetree.hpp"

namespace bloommap {

// Identifier stored in the map file header.
inline constexpr std::uint8_t kHashMurmur64A = 1;

// Seeded MurmurHash64A over a byte string, reading blocks little-endian.
std::uint64_t murmur64a(std::string_view bytes, std::uint64_t seed) noexcept;

// Seed of base hash j: j folded into the master seed, then two
// multiply-xorshift rounds (splitmix64 finalizer). Injective in j.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t j) noexcept;

// Maps a 64-bit hash onto [0, m) via the high half of h * m.
inline std::uint64_t reduce_range(std::uint64_t h, std::uint64_t m) noexcept {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(h) * m) >> 64);
}

// Base hashes h_1 .. h_k : keys -> [0, m).
class HashFamily {
 public:
  HashFamily(std::uint64_t master_seed, std::uint64_t k, std::uint64_t m);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t size() const noexcept { return seeds_.size(); }
  std::uint64_t range() const noexcept { return m_; }
  std::uint64_t seed(std::uint64_t j) const;

  // 1 <= j <= k, otherwise IndexError.
  std::uint64_t base_hash(std::uint64_t j, std::string_view key) const;

  // Unchecked variant for hot loops; j must be in range.
  std::uint64_t base_hash_unchecked(std::uint64_t j, std::string_view key) const noexcept {
    return reduce_range(murmur64a(key, seeds_[j - 1]), m_);
  }

 private:
  std::uint64_t master_seed_;
  std::uint64_t m_;
  std::vector<std::uint64_t> seeds_;
};

// h_{w,j}(x) = h_{s_w + j}(x) + off(w) mod m, 1 <= j <= k_w.
std::uint64_t node_hash(const HashFamily& family, const CodeTree& tree, int node, std::uint32_t j,
                        std::string_view key);

}  // namespace bloommap
