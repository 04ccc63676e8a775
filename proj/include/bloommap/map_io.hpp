#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "bloommap/bloom_map.hpp"

namespace bloommap {

inline constexpr std::uint8_t kFormatVersion = 1;

// Binary map file, all integers little-endian:
//   "BMAP" | version u8 | variant u8 | hash_algo u8 | reserved u8
//   m u64 | n u64 | b u32 | epsilon f64 | master_seed u64
//   b x (label_len u16 | label bytes | probability f64)
//   tree maps:   preorder x (is_leaf u8 | k_w u32 | leaf value u32)
//   simple maps: b x k_i u32
//   ceil(m/8) bit bytes, bit j at byte j/8 position j%8
//   FNV-1a 64 of everything above
std::vector<std::uint8_t> serialize(const BloomMap& map);
BloomMap deserialize(std::span<const std::uint8_t> bytes);

void save(const BloomMap& map, std::ostream& out);
BloomMap load(std::istream& in);

void save_file(const BloomMap& map, const std::filesystem::path& path);
BloomMap load_file(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept;

// `key<TAB>value` per line; the last tab separates the value label.
std::vector<KeyValue> read_pairs_tsv(std::istream& in);

// Value frequencies of `pairs`, labels in first-seen order before sorting.
ValueDistribution infer_distribution(std::span<const KeyValue> pairs);

}  // namespace bloommap
