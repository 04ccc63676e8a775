#include "bloommap/bloom_map.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include "bloommap/errors.hpp"

namespace bloommap {

namespace {

std::uint64_t tree_hash_span(const CodeTree& tree) {
  std::uint64_t k = 0;
  for (std::size_t i = 0; i < tree.leaf_count(); ++i) k = std::max(k, tree.path_hash_total(i));
  return k;
}

struct ResolvedPairs {
  std::vector<std::pair<std::string_view, std::size_t>> pairs;
  std::vector<std::uint64_t> counts;
};

ResolvedPairs resolve(std::span<const KeyValue> pairs, const ValueDistribution& dist) {
  ResolvedPairs out;
  out.counts.assign(dist.size(), 0);
  std::unordered_map<std::string_view, std::size_t> labels;
  for (std::size_t i = 0; i < dist.size(); ++i) labels.emplace(dist.label(i), i);
  std::unordered_map<std::string_view, std::size_t> seen;
  seen.reserve(pairs.size());
  out.pairs.reserve(pairs.size());
  for (const auto& kv : pairs) {
    const auto it = labels.find(kv.value);
    if (it == labels.end()) throw UnknownValue("value '" + kv.value + "' is not in the distribution");
    const auto [pos, inserted] = seen.emplace(kv.key, it->second);
    if (!inserted) {
      if (pos->second != it->second) throw DuplicateKey("key '" + kv.key + "' stored with two different values");
      continue;
    }
    out.pairs.emplace_back(kv.key, it->second);
    ++out.counts[it->second];
  }
  return out;
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidEpsilon("epsilon must lie in (0,1)");
}

}  // namespace

const char* to_string(Variant v) noexcept {
  switch (v) {
    case Variant::Simple: return "simple";
    case Variant::TreeStandard: return "standard";
    case Variant::TreeFast: return "fast";
    case Variant::TreeCustom: return "custom";
  }
  return "unknown";
}

const char* to_string(MapKind k) noexcept {
  switch (k) {
    case MapKind::Simple: return "simple";
    case MapKind::Standard: return "standard";
    case MapKind::Fast: return "fast";
  }
  return "unknown";
}

MapKind parse_map_kind(std::string_view name) {
  if (name == "simple") return MapKind::Simple;
  if (name == "standard") return MapKind::Standard;
  if (name == "fast") return MapKind::Fast;
  throw InvalidScheme("unknown variant '" + std::string(name) + "'");
}

std::vector<std::uint32_t> simple_hash_counts(const ValueDistribution& dist, double epsilon) {
  check_epsilon(epsilon);
  std::vector<std::uint32_t> ks;
  ks.reserve(dist.size());
  for (double p : dist.probs()) {
    const double exact = std::log2(1.0 / epsilon) + std::log2(1.0 / p);
    ks.push_back(std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::ceil(exact - 1e-9))));
  }
  return ks;
}

std::uint64_t simple_bits(std::uint64_t n, const ValueDistribution& dist, double epsilon) {
  check_epsilon(epsilon);
  const long double bits = static_cast<long double>(n) * std::numbers::log2e_v<long double> *
                           (std::log2(1.0L / epsilon) + static_cast<long double>(dist.entropy()));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(bits)));
}

BloomMap::BloomMap(Variant variant, ValueDistribution dist, std::optional<CodeTree> tree,
                   std::vector<std::uint32_t> simple_ks, std::uint64_t m, double epsilon, std::uint64_t seed)
    : variant_(variant),
      dist_(std::move(dist)),
      tree_(std::move(tree)),
      simple_ks_(std::move(simple_ks)),
      epsilon_(epsilon),
      hashes_(seed,
              tree_ ? tree_hash_span(*tree_)
                    : std::accumulate(simple_ks_.begin(), simple_ks_.end(), std::uint64_t{0}),
              m),
      bits_(m) {
  if (tree_) {
    if (tree_->leaf_count() != dist_.size()) throw InvalidScheme("tree leaf count does not match the distribution");
  } else {
    if (simple_ks_.size() != dist_.size()) throw InvalidScheme("hash count list does not match the distribution");
    std::uint64_t prefix = 0;
    for (std::uint32_t k : simple_ks_) {
      if (k < 1) throw InvalidScheme("every value needs at least one hash");
      simple_prefix_.push_back(prefix);
      prefix += k;
    }
  }
}

BloomMap BloomMap::make_simple(ValueDistribution dist, double epsilon, std::uint64_t planned_keys,
                               std::uint64_t seed) {
  if (planned_keys == 0) throw EmptyMap("cannot size a map with no keys");
  auto ks = simple_hash_counts(dist, epsilon);
  const std::uint64_t m = simple_bits(planned_keys, dist, epsilon);
  return BloomMap(Variant::Simple, std::move(dist), std::nullopt, std::move(ks), m, epsilon, seed);
}

BloomMap BloomMap::make_tree(ValueDistribution dist, CodeTree tree, Variant variant, const Geometry& geometry,
                             double epsilon, std::uint64_t seed) {
  check_epsilon(epsilon);
  if (variant == Variant::Simple) throw InvalidScheme("tree maps need a tree variant tag");
  return BloomMap(variant, std::move(dist), std::move(tree), {}, geometry.m, epsilon, seed);
}

BloomMap BloomMap::restore(Variant variant, ValueDistribution dist, std::optional<CodeTree> tree,
                           std::vector<std::uint32_t> simple_ks, std::uint64_t n, double epsilon,
                           std::uint64_t seed, BitArray bits) {
  if ((variant == Variant::Simple) == tree.has_value()) throw InvalidScheme("variant tag does not match the blocks");
  BloomMap map(variant, std::move(dist), std::move(tree), std::move(simple_ks), bits.size(), epsilon, seed);
  map.bits_ = std::move(bits);
  map.n_ = n;
  map.bits_.freeze();
  return map;
}

std::vector<std::uint64_t> BloomMap::pattern(std::string_view key, std::size_t value) const {
  if (value >= dist_.size()) throw IndexError("value index out of range");
  std::vector<std::uint64_t> out;
  if (!tree_) {
    for (std::uint32_t j = 1; j <= simple_ks_[value]; ++j) out.push_back(hashes_.base_hash(simple_prefix_[value] + j, key));
    return out;
  }
  for (int w : tree_->path(value))
    for (std::uint32_t j = 1; j <= tree_->node(w).hash_count; ++j) out.push_back(node_hash(hashes_, *tree_, w, j, key));
  return out;
}

void BloomMap::store(std::string_view key, std::size_t value) {
  if (frozen()) throw FrozenError("cannot store into a frozen map");
  for (std::uint64_t pos : pattern(key, value)) bits_.set(pos);
  ++n_;
}

BloomMap build_simple(std::span<const KeyValue> pairs, const ValueDistribution& dist, double epsilon,
                      std::uint64_t seed) {
  check_epsilon(epsilon);
  const auto resolved = resolve(pairs, dist);
  BloomMap map = BloomMap::make_simple(dist, epsilon, resolved.pairs.size(), seed);
  for (const auto& [key, value] : resolved.pairs) map.store(key, value);
  map.freeze();
  return map;
}

BloomMap build_tree(std::span<const KeyValue> pairs, const ValueDistribution& dist, double epsilon,
                    const HashScheme& scheme, std::uint64_t seed) {
  check_epsilon(epsilon);
  const auto resolved = resolve(pairs, dist);
  CodeTree tree = assign_hash_counts(build_alphabetic_tree(dist), epsilon, scheme);
  const Geometry geometry = compute_geometry(tree, resolved.counts, epsilon);
  const Variant variant = scheme.kind == SchemeKind::Standard ? Variant::TreeStandard
                          : scheme.kind == SchemeKind::Fast   ? Variant::TreeFast
                                                              : Variant::TreeCustom;
  BloomMap map = BloomMap::make_tree(dist, std::move(tree), variant, geometry, epsilon, seed);
  for (const auto& [key, value] : resolved.pairs) map.store(key, value);
  map.freeze();
  return map;
}

BloomMap build_map(std::span<const KeyValue> pairs, const ValueDistribution& dist, double epsilon, MapKind kind,
                   std::uint64_t seed) {
  switch (kind) {
    case MapKind::Simple: return build_simple(pairs, dist, epsilon, seed);
    case MapKind::Standard: return build_tree(pairs, dist, epsilon, HashScheme::standard(), seed);
    case MapKind::Fast: return build_tree(pairs, dist, epsilon, HashScheme::fast(), seed);
  }
  throw InvalidScheme("unknown map kind");
}

}  // namespace bloommap
