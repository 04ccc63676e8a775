#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "bloommap/bloom_map.hpp"
#include "bloommap/bounds.hpp"

namespace bloommap {

// Fixed-length random byte strings standing in for a universe much larger
// than any stored set.
class KeyStream {
 public:
  explicit KeyStream(std::uint64_t seed, std::size_t key_bytes = 16) : rng_(seed), key_bytes_(key_bytes) {}

  std::string next();

  // Uniform integer in [0, bound) by multiply-shift on a 64-bit draw.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 rng_;
  std::size_t key_bytes_;
};

struct PMapSpec {
  std::uint64_t n = 0;
  ValueDistribution dist;
  std::uint64_t seed = 0;
  std::size_t key_bytes = 16;
};

// n distinct keys with value multiplicities integer_counts(dist, n), in a
// seeded shuffled order.
std::vector<KeyValue> generate_pmap(const PMapSpec& spec);

struct ErrorReport {
  double f_plus = 0.0;
  std::vector<double> f_star;
  std::vector<double> f_minus;
  double rho = 0.0;
  double neg_probes_mean = 0.0;
  std::vector<double> pos_probes_mean;
  std::vector<std::uint64_t> value_counts;
  std::uint64_t stored_queries = 0;
  std::uint64_t negative_queries = 0;
  // Wrong answers on stored keys that pointed to a smaller value index.
  std::uint64_t lower_misassignments = 0;

  double max_f_star() const;
  double max_f_minus() const;
};

// Queries every stored pair, plus `neg_samples` fresh keys drawn from a
// KeyStream seeded by `seed` (stored keys rejected). `threads` = 0 uses all
// hardware threads; results do not depend on it.
ErrorReport measure(const BloomMap& map, std::span<const KeyValue> pairs, std::uint64_t neg_samples,
                    std::uint64_t seed, unsigned threads = 0);

struct DiscardBuild {
  BloomMap map;
  std::vector<KeyValue> kept;
  std::vector<KeyValue> dropped;
};

// Drops floor(rate * count_i) seeded-random keys of each value, then builds.
// `discard_rate` defaults to `epsilon`.
DiscardBuild build_with_discard(std::span<const KeyValue> pairs, const ValueDistribution& dist, double epsilon,
                                std::uint64_t seed, MapKind kind, std::optional<double> discard_rate = std::nullopt);

struct SweepConfig {
  ValueDistribution dist;
  std::uint64_t n = 0;
  double epsilon = 0.0;
  MapKind kind = MapKind::Fast;
  std::uint64_t neg_samples = 100000;
  std::uint64_t seed = 1;
  bool discard = false;
};

struct SweepRow {
  std::size_t b = 0;
  std::uint64_t n = 0;
  double epsilon = 0.0;
  MapKind kind = MapKind::Fast;
  std::uint64_t seed = 0;
  bool discard = false;
  std::uint64_t m = 0;
  BoundReport bounds;
  ErrorReport errors;
};

// One build + measure + space_report per config. Throws InvalidArgument on an
// empty list.
std::vector<SweepRow> sweep(std::span<const SweepConfig> configs);

std::string format_error_report(const ErrorReport& r, const ValueDistribution& dist);
std::string format_sweep_table(std::span<const SweepRow> rows);
std::string format_sweep_csv(std::span<const SweepRow> rows);

}  // namespace bloommap
