#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "bloommap/codetree.hpp"
#include "bloommap/errors.hpp"
#include "oracles.hpp"

using namespace bloommap;

namespace {

ValueDistribution dist_of(std::vector<double> w) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < w.size(); ++i) labels.push_back("v" + std::to_string(i + 1));
  return ValueDistribution(w, labels);
}

// Offset of each leaf and the one internal node of the depths-(1,2,2) tree.
struct Tree122 {
  CodeTree tree = CodeTree::from_depths(std::vector<std::uint32_t>{1, 2, 2});
  int inner() const { return tree.node(tree.root()).right; }
};

}  // namespace

TEST_CASE("build_alphabetic_tree examples") {
  CHECK(build_alphabetic_tree(dist_of({1, 1, 1, 1})).leaf_depths() == std::vector<std::uint32_t>{2, 2, 2, 2});
  CHECK(build_alphabetic_tree(dist_of({0.5, 0.25, 0.25})).leaf_depths() == std::vector<std::uint32_t>{1, 2, 2});
  const auto single = build_alphabetic_tree(dist_of({1}));
  CHECK(single.node_count() == 1);
  CHECK(single.leaf_depths() == std::vector<std::uint32_t>{0});
}

TEST_CASE("three-leaf brute force: depths (1,2,2) beat (2,2,1)") {
  const std::vector<double> w{0.5, 0.25, 0.25};
  const auto trees = oracle::all_alphabetic_trees(3);
  REQUIRE(trees.size() == 2);
  std::vector<double> costs;
  for (const auto& t : trees) costs.push_back(oracle::tree_cost(w, t));
  CHECK(*std::min_element(costs.begin(), costs.end()) == 1.5);
  CHECK(*std::max_element(costs.begin(), costs.end()) == 1.75);
}

TEST_CASE("Garsia-Wachs is optimal against exhaustive enumeration on small random weights") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> weight(1, 40);
  for (std::size_t b = 1; b <= 9; ++b) {
    const auto trees = oracle::all_alphabetic_trees(b);
    for (int trial = 0; trial < 60; ++trial) {
      std::vector<double> w(b);
      for (auto& x : w) x = weight(rng);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& t : trees) best = std::min(best, oracle::tree_cost(w, t));
      const auto depths = garsia_wachs_depths(w);
      CHECK(oracle::tree_cost(w, depths) == best);
      CHECK(CodeTree::from_depths(depths).leaf_depths() == depths);
    }
  }
}

TEST_CASE("from_depths rejects sequences that are not full trees") {
  CHECK_THROWS_AS(CodeTree::from_depths(std::vector<std::uint32_t>{1, 1, 1}), InvalidScheme);
  CHECK_THROWS_AS(CodeTree::from_depths(std::vector<std::uint32_t>{1, 2}), InvalidScheme);
  CHECK_THROWS_AS(CodeTree::from_depths(std::vector<std::uint32_t>{}), InvalidScheme);
}

TEST_CASE("random split trees round-trip through depths and preorder") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t b = 1 + rng() % 16;
    const auto depths = oracle::random_split_tree(b, rng);
    const auto tree = CodeTree::from_depths(depths);
    CHECK(tree.leaf_depths() == depths);
    CHECK(tree.node_count() == 2 * b - 1);
    const auto again = CodeTree::from_preorder(tree.preorder());
    CHECK(again.leaf_depths() == depths);
    for (std::size_t v = 0; v < b; ++v)
      CHECK(again.node(again.leaf_node(v)).offset == tree.node(tree.leaf_node(v)).offset);
  }
}

TEST_CASE("assign_offsets examples") {
  const auto three = CodeTree::from_depths(std::vector<std::uint32_t>{1, 1});
  CHECK(three.node(three.root()).offset == 0);
  CHECK(three.node(three.leaf_node(0)).offset == 1);
  CHECK(three.node(three.leaf_node(1)).offset == 2);

  Tree122 t;
  CHECK(t.tree.node(t.tree.root()).offset == 0);
  CHECK(t.tree.node(t.tree.leaf_node(0)).offset == 1);
  CHECK(t.tree.node(t.inner()).offset == 2);
  CHECK(t.tree.node(t.tree.leaf_node(1)).offset == 3);
  CHECK(t.tree.node(t.tree.leaf_node(2)).offset == 4);

  CHECK(assign_offsets(CodeTree::from_depths(std::vector<std::uint32_t>{0})) == std::vector<std::uint32_t>{0});
}

TEST_CASE("offsets are a level-ordered bijection") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const auto tree = CodeTree::from_depths(oracle::random_split_tree(1 + rng() % 16, rng));
    const auto offsets = assign_offsets(tree);
    std::set<std::uint32_t> distinct(offsets.begin(), offsets.end());
    CHECK(distinct.size() == tree.node_count());
    CHECK(*distinct.rbegin() == tree.node_count() - 1);
    // Deeper nodes get larger offsets; within a level, leftmost codeword first.
    for (std::size_t u = 0; u < tree.node_count(); ++u)
      for (std::size_t w = 0; w < tree.node_count(); ++w)
        if (tree.nodes()[u].depth < tree.nodes()[w].depth) CHECK(offsets[u] < offsets[w]);
    const auto codes = oracle::codewords(tree);
    for (std::size_t i = 0; i + 1 < codes.size(); ++i)
      for (std::size_t j = i + 1; j < codes.size(); ++j)
        if (codes[i].size() == codes[j].size())
          CHECK(tree.node(tree.leaf_node(i)).offset < tree.node(tree.leaf_node(j)).offset);
  }
}

TEST_CASE("assign_hash_counts schemes") {
  SUBCASE("standard, b=2, eps=2^-5") {
    const auto t = assign_hash_counts(CodeTree::from_depths(std::vector<std::uint32_t>{1, 1}), 1.0 / 32,
                                      HashScheme::standard());
    CHECK(t.node(t.root()).hash_count == 1);
    CHECK(t.node(t.leaf_node(0)).hash_count == 5);
    CHECK(t.node(t.leaf_node(1)).hash_count == 5);
  }
  SUBCASE("fast, eps=2^-7") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
      const auto base = CodeTree::from_depths(oracle::random_split_tree(1 + rng() % 10, rng));
      const auto counts = scheme_hash_counts(base, 1.0 / 128, HashScheme::fast());
      for (std::size_t w = 0; w < counts.size(); ++w) CHECK(counts[w] == (base.nodes()[w].is_leaf() ? 9u : 2u));
    }
  }
  SUBCASE("fast, b=1, eps=2^-4") {
    const auto t = assign_hash_counts(CodeTree::from_depths(std::vector<std::uint32_t>{0}), 1.0 / 16, HashScheme::fast());
    CHECK(t.node(t.root()).hash_count == 6);
  }
  SUBCASE("standard, b=1 falls back to the plain leaf floor") {
    const auto t =
        assign_hash_counts(CodeTree::from_depths(std::vector<std::uint32_t>{0}), 1.0 / 16, HashScheme::standard());
    CHECK(t.node(t.root()).hash_count == 4);
  }
  SUBCASE("standard uses H_b") {
    // b = 4: ceil(7 + log2(H_4 - 1) + 1) = ceil(8.1155) = 9.
    CHECK(harmonic_number(4) == doctest::Approx(25.0 / 12.0));
    const auto counts = scheme_hash_counts(CodeTree::from_depths(std::vector<std::uint32_t>{2, 2, 2, 2}), 1.0 / 128,
                                           HashScheme::standard());
    CHECK(std::count(counts.begin(), counts.end(), 9u) == 4);
    CHECK(std::count(counts.begin(), counts.end(), 1u) == 3);
  }
  SUBCASE("errors") {
    const auto tree = CodeTree::from_depths(std::vector<std::uint32_t>{1, 1});
    CHECK_THROWS_AS(assign_hash_counts(tree, 0.0, HashScheme::fast()), InvalidEpsilon);
    CHECK_THROWS_AS(assign_hash_counts(tree, 1.0, HashScheme::fast()), InvalidEpsilon);
    CHECK_THROWS_AS(assign_hash_counts(tree, 0.01, HashScheme::custom_counts({1, 2})), InvalidScheme);
    // Leaf below ceil(log2(1/0.01)) = 7.
    std::vector<std::uint32_t> low(3, 7);
    low[static_cast<std::size_t>(tree.leaf_node(0))] = 6;
    CHECK_THROWS_AS(assign_hash_counts(tree, 0.01, HashScheme::custom_counts(low)), InvalidScheme);
    std::vector<std::uint32_t> zero(3, 7);
    zero[static_cast<std::size_t>(tree.root())] = 0;
    CHECK_THROWS_AS(assign_hash_counts(tree, 0.01, HashScheme::custom_counts(zero)), InvalidScheme);
  }
  SUBCASE("root boost through a custom scheme") {
    const auto tree = CodeTree::from_depths(std::vector<std::uint32_t>{1, 2, 2});
    const auto boosted = assign_hash_counts(tree, 1.0 / 128, fast_root_boost(tree, 1.0 / 128, 3));
    CHECK(boosted.node(boosted.root()).hash_count == 5);
  }
}

TEST_CASE("compute_geometry examples") {
  SUBCASE("single path") {
    const auto t = CodeTree::from_depths(std::vector<std::uint32_t>{0}).with_hash_counts(std::vector<std::uint32_t>{8});
    const auto g = compute_geometry(t, std::vector<std::uint64_t>{1000}, 1.0 / 256);
    CHECK(g.m == 11542);
    CHECK(g.k == 8);
  }
  SUBCASE("uniform b=2 fast") {
    const auto t =
        assign_hash_counts(CodeTree::from_depths(std::vector<std::uint32_t>{1, 1}), 1.0 / 128, HashScheme::fast());
    const auto g = compute_geometry(t, std::vector<std::uint64_t>{50, 50}, 1.0 / 128);
    CHECK(g.path_totals == std::vector<std::uint64_t>{11, 11});
    CHECK(g.m == 1587);
    CHECK(g.k == 11);
    CHECK(g.budget_ok);
  }
  SUBCASE("no keys") {
    const auto t = CodeTree::from_depths(std::vector<std::uint32_t>{1, 1});
    CHECK_THROWS_AS(compute_geometry(t, std::vector<std::uint64_t>{0, 0}, 0.01), EmptyMap);
  }
  SUBCASE("budget violation is reported, not raised") {
    const auto t = CodeTree::from_depths(std::vector<std::uint32_t>{0}).with_hash_counts(std::vector<std::uint32_t>{40});
    const auto g = compute_geometry(t, std::vector<std::uint64_t>{10}, 0.5);
    CHECK_FALSE(g.budget_ok);
  }
}

TEST_CASE("certify_error_bounds") {
  SUBCASE("single value") {
    const auto t = CodeTree::from_depths(std::vector<std::uint32_t>{0}).with_hash_counts(std::vector<std::uint32_t>{7});
    const auto c = certify_error_bounds(t, 1.0 / 128);
    CHECK(c.false_positive_bound == std::ldexp(1.0, -7));
    CHECK(c.misassignment_bounds == std::vector<double>{0.0});
    CHECK(c.bumps.empty());
  }
  SUBCASE("uniform b=2 fast") {
    const auto base = CodeTree::from_depths(std::vector<std::uint32_t>{1, 1});
    const auto c = certify_error_bounds(base.with_hash_counts(scheme_hash_counts(base, 1.0 / 128, HashScheme::fast())),
                                        1.0 / 128);
    CHECK(c.false_positive_bound == 2 * std::ldexp(1.0, -11));
    CHECK(c.misassignment_bounds[0] == std::ldexp(1.0, -9));
    CHECK(c.misassignment_bounds[1] == 0.0);
    CHECK(c.bumps.empty());
  }
  SUBCASE("deficient counts get bumped minimally until certified") {
    // Caterpillar with unit internal nodes and leaves one short of the floor.
    const auto base = CodeTree::from_depths(std::vector<std::uint32_t>{1, 2, 3, 4, 5, 6, 6});
    std::vector<std::uint32_t> counts(base.node_count(), 1);
    for (std::size_t v = 0; v < base.leaf_count(); ++v) counts[static_cast<std::size_t>(base.leaf_node(v))] = 4;
    const auto c = certify_error_bounds(base.with_hash_counts(counts), 1.0 / 32);
    REQUIRE_FALSE(c.bumps.empty());
    CHECK(c.false_positive_bound <= 1.0 / 32);
    for (double f : c.misassignment_bounds) CHECK(f <= 1.0 / 32);
    // Removing the last bump breaks certification again.
    auto undo = c.tree.hash_counts();
    const auto& last = c.bumps.back();
    --undo[static_cast<std::size_t>(c.tree.leaf_node(last.value))];
    const auto before = analytic_bounds(c.tree.with_hash_counts(undo));
    bool violated = before.false_positive_bound > 1.0 / 32;
    for (double f : before.misassignment_bounds) violated = violated || f > 1.0 / 32;
    CHECK(violated);
  }
  SUBCASE("post-state always certified for random trees and schemes") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
      const auto base = CodeTree::from_depths(oracle::random_split_tree(1 + rng() % 16, rng));
      const double eps = std::ldexp(1.0, -static_cast<int>(1 + rng() % 10)) * (1.0 + 0.5 * (rng() % 2));
      if (eps >= 1.0) continue;
      for (const auto& scheme : {HashScheme::standard(), HashScheme::fast()}) {
        const auto t = assign_hash_counts(base, eps, scheme);
        const auto c = analytic_bounds(t);
        CHECK(c.false_positive_bound <= eps);
        for (double f : c.misassignment_bounds) CHECK(f <= eps);
        for (std::size_t v = 0; v < t.leaf_count(); ++v) CHECK(t.node(t.leaf_node(v)).hash_count >= leaf_floor(eps));
      }
    }
  }
}

TEST_CASE("path_nodes and left_branch_count") {
  Tree122 t;
  CHECK(t.tree.path(2).size() == 3);
  CHECK(t.tree.left_branch_count(2) == 0);
  CHECK(t.tree.left_branch_count(0) == 1);
  CHECK(t.tree.left_branch_count(1) == 1);
  const auto single = CodeTree::from_depths(std::vector<std::uint32_t>{0});
  CHECK(single.path(0) == std::vector<int>{single.root()});
  CHECK(single.left_branch_count(0) == 0);
  CHECK_THROWS(t.tree.path(3));
}

TEST_CASE("path totals agree with codeword enumeration") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto base = CodeTree::from_depths(oracle::random_split_tree(1 + rng() % 12, rng));
    const auto t = assign_hash_counts(base, 0.01, HashScheme::fast());
    const auto codes = oracle::codewords(t);
    for (std::size_t i = 0; i < t.leaf_count(); ++i) {
      // Fast: 2 per internal node on the path plus the leaf.
      CHECK(t.path_hash_total(i) == 2 * codes[i].size() + t.node(t.leaf_node(i)).hash_count);
      CHECK(t.left_branch_count(i) == static_cast<std::size_t>(std::count(codes[i].begin(), codes[i].end(), '0')));
      for (std::size_t j = i + 1; j < t.leaf_count(); ++j) {
        std::size_t common = 0;
        while (common < codes[i].size() && common < codes[j].size() && codes[i][common] == codes[j][common]) ++common;
        const std::size_t internal_below = codes[j].size() - common - 1;
        CHECK(t.disjoint_hash_total(i, j) == 2 * internal_below + t.node(t.leaf_node(j)).hash_count);
      }
    }
  }
}

TEST_CASE("lemma1_checks") {
  SUBCASE("perfect tree") {
    const auto r = lemma1_checks(CodeTree::from_depths(std::vector<std::uint32_t>{2, 2, 2, 2}));
    CHECK(r.depth_ordered);
    CHECK(r.all());
  }
  SUBCASE("depths (1,2,2), pair (1,3)") {
    Tree122 t;
    // |P_3 \ P_1| = 2 >= log2(2^1 + 2^0 + 2^0) = 2.
    const auto codes = oracle::codewords(t.tree);
    CHECK(codes[2].size() == 2);
    CHECK(std::log2(2.0 + 1.0 + 1.0) == 2.0);
    CHECK(lemma1_checks(t.tree).all());
  }
  SUBCASE("unordered depths skip the ordered clauses") {
    const auto r = lemma1_checks(CodeTree::from_depths(std::vector<std::uint32_t>{2, 2, 1}));
    CHECK_FALSE(r.depth_ordered);
    CHECK_FALSE(r.a_checked);
    CHECK(r.b);
  }
  SUBCASE("random depth-ordered trees, clause by clause against codewords") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 100; ++trial) {
      auto depths = oracle::random_split_tree(1 + rng() % 16, rng);
      std::sort(depths.begin(), depths.end());
      const auto tree = CodeTree::from_depths(depths);
      const auto r = lemma1_checks(tree);
      CHECK(r.depth_ordered);
      CHECK(r.all());
      // Independent evaluation of (a) and (c) from codewords.
      const auto codes = oracle::codewords(tree);
      const std::size_t b = codes.size();
      for (std::size_t i = 0; i < b; ++i) {
        const auto lefts = std::count(codes[i].begin(), codes[i].end(), '0');
        CHECK(std::ldexp(1.0, static_cast<int>(lefts)) <= static_cast<double>(b - i));
        for (std::size_t j = i + 1; j < b; ++j) {
          std::size_t common = 0;
          while (common < codes[i].size() && codes[i][common] == codes[j][common]) ++common;
          double sum = 0.0;
          for (std::size_t k = i; k <= j; ++k) sum += std::ldexp(1.0, static_cast<int>(depths[j] - depths[k]));
          CHECK(static_cast<double>(codes[j].size() - common) >= std::log2(sum) - 1e-12);
        }
      }
    }
  }
}

TEST_CASE("constructed trees have non-decreasing depths and stay optimal") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t b = 1 + rng() % 8;
    std::vector<double> w(b);
    for (auto& x : w) x = 1 + static_cast<double>(rng() % 5);
    const auto dist = dist_of(w);
    const auto depths = build_alphabetic_tree(dist).leaf_depths();
    CHECK(std::is_sorted(depths.begin(), depths.end()));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : oracle::all_alphabetic_trees(b)) best = std::min(best, oracle::tree_cost(dist.probs(), t));
    CHECK(oracle::tree_cost(dist.probs(), depths) == doctest::Approx(best).epsilon(1e-12));
  }
}
