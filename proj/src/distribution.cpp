#include "bloommap/distribution.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <unordered_set>

#include "bloommap/errors.hpp"

namespace bloommap {

namespace {

constexpr double kSumTolerance = 1e-9;

}  // namespace

ValueDistribution::ValueDistribution(std::span<const double> weights, std::vector<std::string> labels) {
  if (weights.size() != labels.size())
    throw InvalidDistribution("weights and labels differ in length");
  if (weights.empty()) throw InvalidDistribution("distribution needs at least one value");

  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw InvalidDistribution("weights must be finite and non-negative");
    total += w;
  }
  if (total <= 0.0) throw InvalidDistribution("at least one weight must be positive");

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] > 0.0) order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });

  // Zero-weight values have no keys; they are dropped so min p_i > 0 holds.
  probs_.reserve(order.size());
  labels_.reserve(order.size());
  for (std::size_t i : order) {
    probs_.push_back(weights[i] / total);
    labels_.push_back(std::move(labels[i]));
  }
  validate();
}

ValueDistribution ValueDistribution::from_sorted(std::vector<double> probs, std::vector<std::string> labels) {
  if (probs.size() != labels.size())
    throw InvalidDistribution("probabilities and labels differ in length");
  ValueDistribution d;
  d.probs_ = std::move(probs);
  d.labels_ = std::move(labels);
  d.validate();
  return d;
}

void ValueDistribution::validate() const {
  if (probs_.empty()) throw InvalidDistribution("distribution needs at least one value");
  double sum = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double p = probs_[i];
    if (!std::isfinite(p) || p <= 0.0 || p > 1.0) throw InvalidDistribution("probabilities must lie in (0,1]");
    if (i > 0 && p > probs_[i - 1]) throw InvalidDistribution("probabilities must be non-increasing");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) throw InvalidDistribution("probabilities must sum to 1");
  std::unordered_set<std::string_view> seen;
  for (const auto& l : labels_)
    if (!seen.insert(l).second) throw InvalidDistribution("duplicate value label '" + l + "'");
}

std::optional<std::size_t> ValueDistribution::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return i;
  return std::nullopt;
}

double ValueDistribution::entropy() const { return entropy_bits(probs_); }

std::vector<std::uint64_t> ValueDistribution::integer_counts(std::uint64_t n) const {
  const std::size_t b = probs_.size();
  std::vector<std::uint64_t> counts(b);
  std::vector<double> remainder(b);
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < b; ++i) {
    const double exact = probs_[i] * static_cast<double>(n);
    const double fl = std::floor(exact);
    counts[i] = static_cast<std::uint64_t>(fl);
    remainder[i] = exact - fl;
    assigned += counts[i];
  }
  // Rounding in p_i * n can push the floor sum over n by a key or two.
  while (assigned > n) {
    std::size_t victim = b;
    for (std::size_t i = 0; i < b; ++i)
      if (counts[i] > 0 && (victim == b || remainder[i] < remainder[victim])) victim = i;
    --counts[victim];
    remainder[victim] += 1.0;
    --assigned;
  }
  std::vector<std::size_t> order(b);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t c) { return remainder[a] > remainder[c]; });
  for (std::size_t r = 0; assigned < n; r = (r + 1) % b) {
    ++counts[order[r]];
    ++assigned;
  }
  return counts;
}

double entropy_bits(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

ValueDistribution parse_distribution_tsv(std::istream& in) {
  std::vector<double> weights;
  std::vector<std::string> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos)
      throw InvalidDistribution("line " + std::to_string(lineno) + ": expected label<TAB>weight");
    const std::string_view field(line.data() + tab + 1, line.size() - tab - 1);
    double w = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), w);
    if (ec != std::errc{} || ptr != field.data() + field.size())
      throw InvalidDistribution("line " + std::to_string(lineno) + ": bad weight '" + std::string(field) + "'");
    labels.emplace_back(line.substr(0, tab));
    weights.push_back(w);
  }
  return ValueDistribution(weights, std::move(labels));
}

}  // namespace bloommap
