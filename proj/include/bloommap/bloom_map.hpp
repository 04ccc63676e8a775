#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bloommap/bitarray.hpp"
#include "bloommap/codetree.hpp"
#include "bloommap/distribution.hpp"
#include "bloommap/hashing.hpp"

namespace bloommap {

// Persisted variant tag.
enum class Variant : std::uint8_t { Simple = 0, TreeStandard = 1, TreeFast = 2, TreeCustom = 3 };

// Build-time choice exposed to callers and the CLI.
enum class MapKind { Simple, Standard, Fast };

const char* to_string(Variant v) noexcept;
const char* to_string(MapKind k) noexcept;
MapKind parse_map_kind(std::string_view name);

struct KeyValue {
  std::string key;
  std::string value;
};

struct QueryOutcome {
  std::optional<std::size_t> value;  // nullopt is BOTTOM
  std::uint64_t probes = 0;
  std::uint64_t hash_evals = 0;

  bool bottom() const noexcept { return !value.has_value(); }
};

// k_i = ceil(log2(1/eps) + log2(1/p_i)).
std::vector<std::uint32_t> simple_hash_counts(const ValueDistribution& dist, double epsilon);
// m = ceil(n log2(e) (log2(1/eps) + H)).
std::uint64_t simple_bits(std::uint64_t n, const ValueDistribution& dist, double epsilon);

class BloomMap {
 public:
  // Empty, unfrozen maps; fill with store() then freeze().
  static BloomMap make_simple(ValueDistribution dist, double epsilon, std::uint64_t planned_keys, std::uint64_t seed);
  static BloomMap make_tree(ValueDistribution dist, CodeTree tree, Variant variant, const Geometry& geometry,
                            double epsilon, std::uint64_t seed);

  // Reassembles a persisted map. Frozen on return.
  static BloomMap restore(Variant variant, ValueDistribution dist, std::optional<CodeTree> tree,
                          std::vector<std::uint32_t> simple_ks, std::uint64_t n, double epsilon, std::uint64_t seed,
                          BitArray bits);

  // Sets every bit of `value`'s pattern for `key`. FrozenError after freeze().
  void store(std::string_view key, std::size_t value);
  void freeze() noexcept { bits_.freeze(); }
  bool frozen() const noexcept { return bits_.frozen(); }

  // Returns v_{max qval(key)} or BOTTOM. Tree maps run the right-first
  // depth-first search; Simple maps test values from b down to 1 and stop at
  // the first complete pattern. Both short-circuit on the first zero bit.
  QueryOutcome query(std::string_view key) const {
    return query_with(key, [this](std::uint64_t pos) { return bits_.test(pos); });
  }

  // Same traversal with bit reads routed through `probe(pos) -> bool`.
  template <class Probe>
  QueryOutcome query_with(std::string_view key, Probe&& probe) const;

  // Bit positions store() sets for (key, value), in store order.
  std::vector<std::uint64_t> pattern(std::string_view key, std::size_t value) const;

  double zero_fraction() const noexcept { return bits_.zero_fraction(); }

  Variant variant() const noexcept { return variant_; }
  bool is_tree() const noexcept { return tree_.has_value(); }
  std::uint64_t m() const noexcept { return bits_.size(); }
  std::uint64_t k() const noexcept { return hashes_.size(); }
  std::uint64_t n() const noexcept { return n_; }
  double epsilon() const noexcept { return epsilon_; }
  std::uint64_t seed() const noexcept { return hashes_.master_seed(); }
  const ValueDistribution& distribution() const noexcept { return dist_; }
  const std::optional<CodeTree>& tree() const noexcept { return tree_; }
  const std::vector<std::uint32_t>& simple_ks() const noexcept { return simple_ks_; }
  const BitArray& bits() const noexcept { return bits_; }
  const HashFamily& hashes() const noexcept { return hashes_; }
  const std::string& label(std::size_t value) const { return dist_.label(value); }

 private:
  BloomMap(Variant variant, ValueDistribution dist, std::optional<CodeTree> tree, std::vector<std::uint32_t> simple_ks,
           std::uint64_t m, double epsilon, std::uint64_t seed);

  Variant variant_;
  ValueDistribution dist_;
  std::optional<CodeTree> tree_;
  std::vector<std::uint32_t> simple_ks_;
  std::vector<std::uint64_t> simple_prefix_;
  double epsilon_;
  std::uint64_t n_ = 0;
  HashFamily hashes_;
  BitArray bits_;
};

BloomMap build_simple(std::span<const KeyValue> pairs, const ValueDistribution& dist, double epsilon,
                      std::uint64_t seed);

// Alphabetic tree for `dist`, hash counts from `scheme` (certified), sized by
// the actual per-value key counts of `pairs`.
BloomMap build_tree(std::span<const KeyValue> pairs, const ValueDistribution& dist, double epsilon,
                    const HashScheme& scheme, std::uint64_t seed);

BloomMap build_map(std::span<const KeyValue> pairs, const ValueDistribution& dist, double epsilon, MapKind kind,
                   std::uint64_t seed);

template <class Probe>
QueryOutcome BloomMap::query_with(std::string_view key, Probe&& probe) const {
  QueryOutcome out;
  const std::uint64_t m = bits_.size();

  if (!tree_) {
    for (std::size_t v = simple_ks_.size(); v-- > 0;) {
      bool complete = true;
      for (std::uint32_t j = 1; j <= simple_ks_[v]; ++j) {
        const std::uint64_t pos = hashes_.base_hash_unchecked(simple_prefix_[v] + j, key);
        ++out.hash_evals;
        ++out.probes;
        if (!probe(pos)) {
          complete = false;
          break;
        }
      }
      if (complete) {
        out.value = v;
        return out;
      }
    }
    return out;
  }

  // Base hashes are shared between nodes at equal prefix positions; each is
  // evaluated at most once per query.
  constexpr std::uint64_t unset = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> base(hashes_.size() + 1, unset);
  const CodeTree& tree = *tree_;

  auto findval = [&](auto& self, int w) -> bool {
    const TreeNode& node = tree.node(w);
    const std::uint64_t off = node.offset % m;
    for (std::uint32_t j = 1; j <= node.hash_count; ++j) {
      std::uint64_t& h = base[node.hash_prefix + j];
      if (h == unset) {
        h = hashes_.base_hash_unchecked(node.hash_prefix + j, key);
        ++out.hash_evals;
      }
      ++out.probes;
      if (!probe((h + off) % m)) return false;
    }
    if (node.is_leaf()) {
      out.value = static_cast<std::size_t>(node.leaf_value);
      return true;
    }
    if (self(self, node.right)) return true;
    return self(self, node.left);
  };
  findval(findval, tree.root());
  return out;
}

}  // namespace bloommap
