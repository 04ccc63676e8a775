#include "bloommap/codetree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <string>

#include "bloommap/errors.hpp"

namespace bloommap {

namespace {

std::uint32_t ceil_with_slack(double x) {
  const double c = std::ceil(x - 1e-9);
  return c < 0.0 ? 0u : static_cast<std::uint32_t>(c);
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidEpsilon("epsilon must lie in (0,1), got " + std::to_string(epsilon));
}

}  // namespace

CodeTree CodeTree::from_depths(std::span<const std::uint32_t> leaf_depths) {
  if (leaf_depths.empty()) throw InvalidScheme("tree needs at least one leaf");
  CodeTree t;
  struct Pending {
    int node;
    std::uint32_t depth;
  };
  std::vector<Pending> stack;
  for (std::size_t v = 0; v < leaf_depths.size(); ++v) {
    TreeNode leaf;
    leaf.leaf_value = static_cast<int>(v);
    t.nodes_.push_back(leaf);
    stack.push_back({static_cast<int>(t.nodes_.size() - 1), leaf_depths[v]});
    while (stack.size() >= 2 && stack[stack.size() - 1].depth == stack[stack.size() - 2].depth) {
      const Pending r = stack.back();
      stack.pop_back();
      const Pending l = stack.back();
      stack.pop_back();
      if (l.depth == 0) throw InvalidScheme("leaf depths do not form a full binary tree");
      TreeNode inner;
      inner.left = l.node;
      inner.right = r.node;
      t.nodes_.push_back(inner);
      stack.push_back({static_cast<int>(t.nodes_.size() - 1), l.depth - 1});
    }
  }
  if (stack.size() != 1 || stack.front().depth != 0)
    throw InvalidScheme("leaf depths do not form a full binary tree");
  t.root_ = stack.front().node;
  t.finalize();
  return t;
}

CodeTree CodeTree::from_preorder(std::span<const PreorderRecord> records) {
  CodeTree t;
  std::size_t pos = 0;
  // Explicit stack: depth is bounded only by the record count.
  struct Frame {
    int node;
    int filled;
  };
  std::vector<Frame> stack;
  if (records.empty()) throw InvalidScheme("empty preorder");
  while (pos < records.size()) {
    const PreorderRecord& rec = records[pos++];
    TreeNode n;
    n.hash_count = rec.hash_count;
    if (rec.is_leaf) n.leaf_value = static_cast<int>(rec.leaf_value);
    t.nodes_.push_back(n);
    const int id = static_cast<int>(t.nodes_.size() - 1);
    if (stack.empty()) {
      if (t.root_ != kNoNode) throw InvalidScheme("trailing records after complete tree");
      t.root_ = id;
    } else {
      Frame& top = stack.back();
      TreeNode& parent = t.nodes_[static_cast<std::size_t>(top.node)];
      (top.filled == 0 ? parent.left : parent.right) = id;
      ++top.filled;
    }
    if (!rec.is_leaf) {
      // Mark as internal until children arrive.
      t.nodes_[static_cast<std::size_t>(id)].left = std::numeric_limits<int>::max();
      t.nodes_[static_cast<std::size_t>(id)].right = std::numeric_limits<int>::max();
      stack.push_back({id, 0});
    }
    while (!stack.empty() && stack.back().filled == 2) stack.pop_back();
  }
  if (!stack.empty() || t.root_ == kNoNode) throw InvalidScheme("preorder ended inside the tree");
  t.finalize();
  return t;
}

void CodeTree::finalize() {
  for (auto& n : nodes_) n.parent = kNoNode;
  for (std::size_t w = 0; w < nodes_.size(); ++w) {
    const TreeNode& n = nodes_[w];
    if ((n.left == kNoNode) != (n.right == kNoNode)) throw InvalidScheme("node with a single child");
    if (!n.is_leaf()) {
      nodes_[static_cast<std::size_t>(n.left)].parent = static_cast<int>(w);
      nodes_[static_cast<std::size_t>(n.right)].parent = static_cast<int>(w);
    }
  }

  // Level order: left child before right child.
  std::deque<int> queue{root_};
  std::uint32_t next_offset = 0;
  while (!queue.empty()) {
    const int w = queue.front();
    queue.pop_front();
    TreeNode& n = nodes_[static_cast<std::size_t>(w)];
    n.offset = next_offset++;
    if (n.parent == kNoNode) {
      n.depth = 0;
      n.hash_prefix = 0;
    } else {
      const TreeNode& p = nodes_[static_cast<std::size_t>(n.parent)];
      n.depth = p.depth + 1;
      n.hash_prefix = p.hash_prefix + p.hash_count;
    }
    if (n.hash_count < 1) throw InvalidScheme("every node needs at least one hash");
    if (!n.is_leaf()) {
      queue.push_back(n.left);
      queue.push_back(n.right);
    }
  }
  if (next_offset != nodes_.size()) throw InvalidScheme("tree contains unreachable nodes");

  // In-order leaves must carry 0, 1, ..., b-1.
  leaves_.clear();
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    const int w = stack.back();
    stack.pop_back();
    const TreeNode& n = nodes_[static_cast<std::size_t>(w)];
    if (n.is_leaf()) {
      if (n.leaf_value != static_cast<int>(leaves_.size())) throw InvalidScheme("leaves are not in value order");
      leaves_.push_back(w);
    } else {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
}

std::vector<std::uint32_t> CodeTree::leaf_depths() const {
  std::vector<std::uint32_t> d;
  d.reserve(leaves_.size());
  for (int w : leaves_) d.push_back(node(w).depth);
  return d;
}

std::vector<std::uint32_t> CodeTree::hash_counts() const {
  std::vector<std::uint32_t> k;
  k.reserve(nodes_.size());
  for (const auto& n : nodes_) k.push_back(n.hash_count);
  return k;
}

CodeTree CodeTree::with_hash_counts(std::span<const std::uint32_t> counts) const {
  if (counts.size() != nodes_.size()) throw InvalidScheme("hash count list does not match node count");
  CodeTree t = *this;
  for (std::size_t w = 0; w < counts.size(); ++w) t.nodes_[w].hash_count = counts[w];
  t.finalize();
  return t;
}

std::vector<int> CodeTree::path(std::size_t value) const {
  std::vector<int> p;
  for (int w = leaf_node(value); w != kNoNode; w = node(w).parent) p.push_back(w);
  std::reverse(p.begin(), p.end());
  return p;
}

std::size_t CodeTree::left_branch_count(std::size_t value) const {
  std::size_t count = 0;
  for (int w = leaf_node(value); node(w).parent != kNoNode; w = node(w).parent)
    if (node(node(w).parent).left == w) ++count;
  return count;
}

std::uint64_t CodeTree::path_hash_total(std::size_t value) const {
  const TreeNode& leaf = node(leaf_node(value));
  return std::uint64_t{leaf.hash_prefix} + leaf.hash_count;
}

std::uint64_t CodeTree::disjoint_hash_total(std::size_t i, std::size_t j) const {
  const auto pi = path(i);
  const auto pj = path(j);
  std::size_t shared = 0;
  while (shared < pi.size() && shared < pj.size() && pi[shared] == pj[shared]) ++shared;
  std::uint64_t total = 0;
  for (std::size_t d = shared; d < pj.size(); ++d) total += node(pj[d]).hash_count;
  return total;
}

std::vector<PreorderRecord> CodeTree::preorder() const {
  std::vector<PreorderRecord> out;
  out.reserve(nodes_.size());
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    const int w = stack.back();
    stack.pop_back();
    const TreeNode& n = node(w);
    PreorderRecord rec;
    rec.is_leaf = n.is_leaf();
    rec.hash_count = n.hash_count;
    rec.leaf_value = n.is_leaf() ? static_cast<std::uint32_t>(n.leaf_value) : 0u;
    out.push_back(rec);
    if (!n.is_leaf()) {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  return out;
}

double CodeTree::expected_depth(std::span<const double> probs) const {
  double cost = 0.0;
  for (std::size_t i = 0; i < leaves_.size() && i < probs.size(); ++i) cost += probs[i] * node(leaves_[i]).depth;
  return cost;
}

std::vector<std::uint32_t> garsia_wachs_depths(std::span<const double> weights) {
  const std::size_t b = weights.size();
  if (b == 0) return {};
  // Combination forest: ids < b are leaves.
  std::vector<std::pair<int, int>> children(b, {kNoNode, kNoNode});
  struct Item {
    double weight;
    int node;
  };
  std::vector<Item> seq;
  seq.reserve(b);
  for (std::size_t i = 0; i < b; ++i) seq.push_back({weights[i], static_cast<int>(i)});

  constexpr double inf = std::numeric_limits<double>::infinity();
  while (seq.size() > 1) {
    // Leftmost i with w[i-1] <= w[i+1], sentinel +inf past the end.
    std::size_t i = 1;
    for (; i < seq.size(); ++i) {
      const double after = i + 1 < seq.size() ? seq[i + 1].weight : inf;
      if (seq[i - 1].weight <= after) break;
    }
    const Item merged{seq[i - 1].weight + seq[i].weight, static_cast<int>(children.size())};
    children.emplace_back(seq[i - 1].node, seq[i].node);
    seq.erase(seq.begin() + static_cast<std::ptrdiff_t>(i - 1), seq.begin() + static_cast<std::ptrdiff_t>(i + 1));
    // Move right of the nearest earlier item that is >= merged.
    std::size_t insert_at = 0;
    for (std::size_t j = i - 1; j-- > 0;) {
      if (seq[j].weight >= merged.weight) {
        insert_at = j + 1;
        break;
      }
    }
    seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(insert_at), merged);
  }

  std::vector<std::uint32_t> depths(b, 0);
  std::vector<std::pair<int, std::uint32_t>> stack{{seq.front().node, 0u}};
  while (!stack.empty()) {
    const auto [w, d] = stack.back();
    stack.pop_back();
    if (static_cast<std::size_t>(w) < b) {
      depths[static_cast<std::size_t>(w)] = d;
    } else {
      stack.emplace_back(children[static_cast<std::size_t>(w)].first, d + 1);
      stack.emplace_back(children[static_cast<std::size_t>(w)].second, d + 1);
    }
  }
  return depths;
}

CodeTree build_alphabetic_tree(const ValueDistribution& dist) {
  // Probabilities are non-increasing, so sorting the depths cannot raise the
  // cost and keeps the Kraft sum; the result is an optimal tree whose depths
  // are non-decreasing left to right.
  auto depths = garsia_wachs_depths(dist.probs());
  std::sort(depths.begin(), depths.end());
  return CodeTree::from_depths(depths);
}

std::vector<std::uint32_t> assign_offsets(const CodeTree& tree) {
  std::vector<std::uint32_t> offsets;
  offsets.reserve(tree.node_count());
  for (const auto& n : tree.nodes()) offsets.push_back(n.offset);
  return offsets;
}

std::uint32_t leaf_floor(double epsilon) {
  check_epsilon(epsilon);
  return std::max<std::uint32_t>(1, ceil_with_slack(std::log2(1.0 / epsilon)));
}

double harmonic_number(std::size_t b) {
  double h = 0.0;
  for (std::size_t l = b; l >= 1; --l) h += 1.0 / static_cast<double>(l);
  return h;
}

std::vector<std::uint32_t> scheme_hash_counts(const CodeTree& tree, double epsilon, const HashScheme& scheme) {
  const std::uint32_t floor_k = leaf_floor(epsilon);
  std::vector<std::uint32_t> counts(tree.node_count());
  switch (scheme.kind) {
    case SchemeKind::Standard: {
      std::uint32_t leaf_k = floor_k;
      const double h = harmonic_number(tree.leaf_count());
      if (tree.leaf_count() > 1)
        leaf_k = std::max(floor_k, ceil_with_slack(std::log2(1.0 / epsilon) + std::log2(h - 1.0) + 1.0));
      for (std::size_t w = 0; w < counts.size(); ++w) counts[w] = tree.nodes()[w].is_leaf() ? leaf_k : 1u;
      break;
    }
    case SchemeKind::Fast:
      for (std::size_t w = 0; w < counts.size(); ++w) counts[w] = tree.nodes()[w].is_leaf() ? floor_k + 2 : 2u;
      break;
    case SchemeKind::Custom:
      if (scheme.custom.size() != tree.node_count())
        throw InvalidScheme("custom scheme has " + std::to_string(scheme.custom.size()) + " counts for " +
                            std::to_string(tree.node_count()) + " nodes");
      for (std::size_t w = 0; w < counts.size(); ++w) {
        const std::uint32_t k = scheme.custom[w];
        if (k < 1) throw InvalidScheme("node " + std::to_string(w) + " has no hashes");
        if (tree.nodes()[w].is_leaf() && k < floor_k)
          throw InvalidScheme("leaf node " + std::to_string(w) + " has " + std::to_string(k) +
                              " hashes, below the floor " + std::to_string(floor_k));
        counts[w] = k;
      }
      break;
  }
  return counts;
}

HashScheme fast_root_boost(const CodeTree& tree, double epsilon, std::uint32_t s) {
  auto counts = scheme_hash_counts(tree, epsilon, HashScheme::fast());
  counts[static_cast<std::size_t>(tree.root())] += s;
  return HashScheme::custom_counts(std::move(counts));
}

Certification analytic_bounds(const CodeTree& tree) {
  const std::size_t b = tree.leaf_count();
  Certification c{tree, 0.0, std::vector<double>(b, 0.0), {}};
  for (std::size_t i = 0; i < b; ++i) {
    c.false_positive_bound += std::ldexp(1.0, -static_cast<int>(tree.path_hash_total(i)));
    for (std::size_t j = i + 1; j < b; ++j)
      c.misassignment_bounds[i] += std::ldexp(1.0, -static_cast<int>(tree.disjoint_hash_total(i, j)));
  }
  return c;
}

Certification certify_error_bounds(CodeTree tree, double epsilon) {
  check_epsilon(epsilon);
  std::vector<LeafBump> bumps;
  for (;;) {
    Certification c = analytic_bounds(tree);
    const std::size_t b = tree.leaf_count();
    std::size_t target = b;
    if (c.false_positive_bound > epsilon) {
      // Largest term: the smallest path total.
      for (std::size_t i = 0; i < b; ++i)
        if (target == b || tree.path_hash_total(i) < tree.path_hash_total(target)) target = i;
    } else {
      std::size_t worst = b;
      for (std::size_t i = 0; i < b; ++i)
        if (c.misassignment_bounds[i] > epsilon && (worst == b || c.misassignment_bounds[i] > c.misassignment_bounds[worst]))
          worst = i;
      if (worst != b) {
        for (std::size_t j = worst + 1; j < b; ++j)
          if (target == b || tree.disjoint_hash_total(worst, j) < tree.disjoint_hash_total(worst, target)) target = j;
      }
    }
    if (target == b) {
      c.bumps = std::move(bumps);
      return c;
    }
    auto counts = tree.hash_counts();
    const auto leaf = static_cast<std::size_t>(tree.leaf_node(target));
    ++counts[leaf];
    tree = tree.with_hash_counts(counts);
    bumps.push_back({target, counts[leaf]});
  }
}

CodeTree assign_hash_counts(const CodeTree& tree, double epsilon, const HashScheme& scheme) {
  check_epsilon(epsilon);
  auto counts = scheme_hash_counts(tree, epsilon, scheme);
  return certify_error_bounds(tree.with_hash_counts(counts), epsilon).tree;
}

Geometry compute_geometry(const CodeTree& tree, std::span<const std::uint64_t> counts, double epsilon) {
  check_epsilon(epsilon);
  if (counts.size() != tree.leaf_count()) throw InvalidScheme("count list does not match leaf count");
  Geometry g;
  std::uint64_t n = 0;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::uint64_t t = tree.path_hash_total(i);
    g.path_totals.push_back(t);
    g.k = std::max(g.k, t);
    n += counts[i];
    total += counts[i] * t;
  }
  if (n == 0) throw EmptyMap("cannot size a map with no keys");
  const long double bits = std::ceil(static_cast<long double>(total) * std::numbers::log2e_v<long double>);
  g.m = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(bits));
  g.budget_limit = 2.0 * static_cast<double>(n) * std::numbers::log2e *
                   std::log2(static_cast<double>(tree.leaf_count()) / epsilon);
  g.budget_ok = static_cast<double>(g.m) <= g.budget_limit;
  return g;
}

Lemma1Report lemma1_checks(const CodeTree& tree) {
  Lemma1Report r;
  const auto depths = tree.leaf_depths();
  const std::size_t b = depths.size();
  r.depth_ordered = std::is_sorted(depths.begin(), depths.end());
  r.a_checked = r.c_checked = r.depth_ordered;

  if (r.depth_ordered) {
    // With sorted depths sum_k 2^(l_j - l_k) is an integer, so the bound
    // |P_j \ P_i| >= log2(sum) is exactly 2^|P_j \ P_i| >= sum.
    for (std::size_t i = 0; i < b && r.a; ++i) {
      const auto pi = tree.path(i);
      for (std::size_t j = i + 1; j < b; ++j) {
        const auto pj = tree.path(j);
        std::size_t shared = 0;
        while (shared < pi.size() && shared < pj.size() && pi[shared] == pj[shared]) ++shared;
        const std::size_t disjoint = pj.size() - shared;
        double sum = 0.0;
        for (std::size_t k = i; k <= j; ++k) sum += std::ldexp(1.0, static_cast<int>(depths[j] - depths[k]));
        if (std::ldexp(1.0, static_cast<int>(disjoint)) < sum) {
          r.a = false;
          break;
        }
      }
    }
    for (std::size_t i = 0; i < b; ++i) {
      // 1-based index i+1: at most log2(b - i) left branches.
      if (std::ldexp(1.0, static_cast<int>(tree.left_branch_count(i))) > static_cast<double>(b - i)) {
        r.c = false;
        break;
      }
    }
  }

  double level_sum = 0.0;
  for (const auto& n : tree.nodes()) level_sum += std::ldexp(1.0, -static_cast<int>(n.depth));
  double rhs = 1.0;
  for (std::uint32_t l : depths) rhs += static_cast<double>(l) * std::ldexp(1.0, -static_cast<int>(l));
  r.b = level_sum <= rhs + 1e-12;
  return r;
}

}  // namespace bloommap
