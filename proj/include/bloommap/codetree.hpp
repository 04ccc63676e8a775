#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bloommap/distribution.hpp"

namespace bloommap {

inline constexpr int kNoNode = -1;

struct TreeNode {
  int parent = kNoNode;
  int left = kNoNode;
  int right = kNoNode;
  std::uint32_t depth = 0;
  // Level-order index, root = 0.
  std::uint32_t offset = 0;
  std::uint32_t hash_count = 1;
  // Sum of hash_count over the strict ancestors; base hash indices used at
  // this node are hash_prefix + 1 ... hash_prefix + hash_count.
  std::uint32_t hash_prefix = 0;
  // 0-based value index for leaves, -1 for internal nodes.
  int leaf_value = -1;

  bool is_leaf() const noexcept { return left == kNoNode; }
};

// Preorder serialization record.
struct PreorderRecord {
  bool is_leaf = true;
  std::uint32_t hash_count = 1;
  std::uint32_t leaf_value = 0;
};

// Full binary tree whose leaves, read left to right, are values 0 .. b-1.
class CodeTree {
 public:
  // Builds the unique alphabetic full binary tree with the given leaf depths.
  // Throws InvalidScheme if the depths do not describe one.
  static CodeTree from_depths(std::span<const std::uint32_t> leaf_depths);

  // Inverse of preorder(). Throws InvalidScheme on malformed input.
  static CodeTree from_preorder(std::span<const PreorderRecord> records);

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const TreeNode& node(int w) const { return nodes_.at(static_cast<std::size_t>(w)); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t leaf_count() const noexcept { return leaves_.size(); }
  int root() const noexcept { return root_; }
  int leaf_node(std::size_t value) const { return leaves_.at(value); }

  std::vector<std::uint32_t> leaf_depths() const;
  std::vector<std::uint32_t> hash_counts() const;

  // Returns a copy with per-node hash counts replaced (indexed like nodes()).
  CodeTree with_hash_counts(std::span<const std::uint32_t> counts) const;

  // Root-to-leaf node list for the leaf carrying `value`, inclusive.
  std::vector<int> path(std::size_t value) const;
  std::size_t left_branch_count(std::size_t value) const;

  // t_i: total hashes along the path to `value`.
  std::uint64_t path_hash_total(std::size_t value) const;
  // t_{i,j}: hashes on the part of path(j) not shared with path(i).
  std::uint64_t disjoint_hash_total(std::size_t i, std::size_t j) const;

  std::vector<PreorderRecord> preorder() const;

  // Sum over leaves of p_i * depth_i.
  double expected_depth(std::span<const double> probs) const;

 private:
  void finalize();  // depths, offsets, prefixes and leaf table

  std::vector<TreeNode> nodes_;
  std::vector<int> leaves_;
  int root_ = kNoNode;
};

// Optimal alphabetic leaf depths for `weights` (any order, all > 0), by the
// Garsia-Wachs algorithm. Leftmost minimal pair wins ties.
std::vector<std::uint32_t> garsia_wachs_depths(std::span<const double> weights);

CodeTree build_alphabetic_tree(const ValueDistribution& dist);

// Level-order numbering left to right, root first. Trees produced by this
// library already carry offsets; this returns them explicitly.
std::vector<std::uint32_t> assign_offsets(const CodeTree& tree);

enum class SchemeKind : std::uint8_t { Standard, Fast, Custom };

struct HashScheme {
  SchemeKind kind = SchemeKind::Fast;
  // Per-node hash counts for Custom, indexed like CodeTree::nodes().
  std::vector<std::uint32_t> custom;

  static HashScheme standard() { return {SchemeKind::Standard, {}}; }
  static HashScheme fast() { return {SchemeKind::Fast, {}}; }
  static HashScheme custom_counts(std::vector<std::uint32_t> counts) { return {SchemeKind::Custom, std::move(counts)}; }
};

// ceil(log2(1/eps)) with a small slack so exact powers of two are not bumped
// by rounding noise.
std::uint32_t leaf_floor(double epsilon);

// H_b = 1 + 1/2 + ... + 1/b.
double harmonic_number(std::size_t b);

// Hash counts a scheme prescribes for `tree` before certification.
std::vector<std::uint32_t> scheme_hash_counts(const CodeTree& tree, double epsilon, const HashScheme& scheme);

// Fast scheme counts with `s` extra hashes on the root.
HashScheme fast_root_boost(const CodeTree& tree, double epsilon, std::uint32_t s);

struct LeafBump {
  std::size_t value = 0;
  std::uint32_t new_hash_count = 0;
};

struct Certification {
  CodeTree tree;
  // sum_i 2^-t_i
  double false_positive_bound = 0.0;
  // sum_{j>i} 2^-t_{i,j}, per value i
  std::vector<double> misassignment_bounds;
  std::vector<LeafBump> bumps;
};

// Analytic bounds of `tree` as-is, no bumping.
Certification analytic_bounds(const CodeTree& tree);

// Raises leaf hash counts one at a time until both analytic bounds are <= eps.
Certification certify_error_bounds(CodeTree tree, double epsilon);

// Applies the scheme then certifies. Throws InvalidEpsilon / InvalidScheme.
CodeTree assign_hash_counts(const CodeTree& tree, double epsilon, const HashScheme& scheme);

struct Geometry {
  std::uint64_t m = 0;
  std::uint64_t k = 0;
  std::vector<std::uint64_t> path_totals;
  double budget_limit = 0.0;  // 2 n log2(e) log2(b/eps)
  bool budget_ok = true;
};

// m = ceil(log2(e) * sum_i count_i * t_i). Throws EmptyMap if all counts are 0.
Geometry compute_geometry(const CodeTree& tree, std::span<const std::uint64_t> counts, double epsilon);

struct Lemma1Report {
  bool depth_ordered = true;
  // Clauses (a) and (c) are only evaluated on depth-ordered trees.
  bool a_checked = true;
  bool c_checked = true;
  bool a = true;
  bool b = true;
  bool c = true;

  bool all() const noexcept { return a && b && c; }
};

Lemma1Report lemma1_checks(const CodeTree& tree);

}  // namespace bloommap
