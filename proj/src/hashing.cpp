#include "bloommap/hashing.hpp"

#include <string>

#include "bloommap/errors.hpp"

namespace bloommap {

namespace {

inline std::uint64_t load_le64(const unsigned char* p) noexcept {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

std::uint64_t murmur64a(std::string_view bytes, std::uint64_t seed) noexcept {
  constexpr std::uint64_t mul = 0xc6a4a7935bd1e995ULL;
  constexpr int shift = 47;
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t len = bytes.size();
  std::uint64_t h = seed ^ (len * mul);

  const std::size_t blocks = len / 8;
  for (std::size_t i = 0; i < blocks; ++i) {
    std::uint64_t k = load_le64(data + 8 * i);
    k *= mul;
    k ^= k >> shift;
    k *= mul;
    h ^= k;
    h *= mul;
  }

  const unsigned char* tail = data + 8 * blocks;
  switch (len & 7) {
    case 7: h ^= std::uint64_t{tail[6]} << 48; [[fallthrough]];
    case 6: h ^= std::uint64_t{tail[5]} << 40; [[fallthrough]];
    case 5: h ^= std::uint64_t{tail[4]} << 32; [[fallthrough]];
    case 4: h ^= std::uint64_t{tail[3]} << 24; [[fallthrough]];
    case 3: h ^= std::uint64_t{tail[2]} << 16; [[fallthrough]];
    case 2: h ^= std::uint64_t{tail[1]} << 8; [[fallthrough]];
    case 1:
      h ^= std::uint64_t{tail[0]};
      h *= mul;
  }

  h ^= h >> shift;
  h *= mul;
  h ^= h >> shift;
  return h;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t j) noexcept {
  std::uint64_t z = master_seed ^ (j * 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

HashFamily::HashFamily(std::uint64_t master_seed, std::uint64_t k, std::uint64_t m)
    : master_seed_(master_seed), m_(m) {
  if (m == 0) throw IndexError("hash range must be at least 1");
  seeds_.reserve(k);
  for (std::uint64_t j = 1; j <= k; ++j) seeds_.push_back(derive_seed(master_seed, j));
}

std::uint64_t HashFamily::seed(std::uint64_t j) const {
  if (j < 1 || j > seeds_.size()) throw IndexError("hash index " + std::to_string(j) + " outside [1, " + std::to_string(seeds_.size()) + "]");
  return seeds_[j - 1];
}

std::uint64_t HashFamily::base_hash(std::uint64_t j, std::string_view key) const {
  return reduce_range(murmur64a(key, seed(j)), m_);
}

std::uint64_t node_hash(const HashFamily& family, const CodeTree& tree, int node, std::uint32_t j,
                        std::string_view key) {
  const TreeNode& n = tree.node(node);
  if (j < 1 || j > n.hash_count)
    throw IndexError("node hash index " + std::to_string(j) + " outside [1, " + std::to_string(n.hash_count) + "]");
  const std::uint64_t base = family.base_hash(std::uint64_t{n.hash_prefix} + j, key);
  return (base + n.offset % family.range()) % family.range();
}

}  // namespace bloommap
