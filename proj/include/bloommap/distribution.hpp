#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bloommap {

// Distribution of values over keys, p_1 >= p_2 >= ... >= p_b > 0.
//
// Value indices used throughout the library are 0-based positions in this
// sorted order, so index 0 is the most frequent value.
class ValueDistribution {
 public:
  // Normalizes `weights` and co-sorts `labels` by non-increasing probability.
  // Equal weights keep their input order. Throws InvalidDistribution on
  // negative/non-finite weights, all-zero weights, mismatched lengths,
  // duplicate labels or an empty input.
  ValueDistribution(std::span<const double> weights, std::vector<std::string> labels);

  // Reconstructs from already-normalized, sorted probabilities (file loader).
  // Validates every invariant.
  static ValueDistribution from_sorted(std::vector<double> probs, std::vector<std::string> labels);

  std::size_t size() const noexcept { return probs_.size(); }
  const std::vector<double>& probs() const noexcept { return probs_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  double prob(std::size_t i) const { return probs_.at(i); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }

  std::optional<std::size_t> index_of(std::string_view label) const;

  // -sum p_i log2 p_i.
  double entropy() const;

  // Largest-remainder apportionment of n keys; sums to n exactly. Ties on the
  // remainder go to the lower index.
  std::vector<std::uint64_t> integer_counts(std::uint64_t n) const;

 private:
  ValueDistribution() = default;
  void validate() const;

  std::vector<double> probs_;
  std::vector<std::string> labels_;
};

// Entropy of an arbitrary probability vector with 0 log 0 = 0.
double entropy_bits(std::span<const double> probs);

// One `label<TAB>weight` record per line. Blank lines are skipped.
ValueDistribution parse_distribution_tsv(std::istream& in);

}  // namespace bloommap
