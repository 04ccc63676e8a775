// bloommap: build, query, inspect and benchmark Bloom map files.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "bloommap/bounds.hpp"
#include "bloommap/errors.hpp"
#include "bloommap/harness.hpp"
#include "bloommap/map_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

using namespace bloommap;

int cmd_build(const std::string& input, double epsilon, const std::string& variant, std::uint64_t seed,
              const std::string& out_path) {
  std::ifstream in(input);
  if (!in) throw IoError("cannot open " + input);
  const auto pairs = read_pairs_tsv(in);
  if (pairs.empty()) throw EmptyMap("no key/value pairs in " + input);
  const auto dist = infer_distribution(pairs);
  const auto map = build_map(pairs, dist, epsilon, parse_map_kind(variant), seed);
  save_file(map, out_path);
  std::cout << fmt::format("built {} map: n={} b={} m={} k={} bpk={:.4f}\n", to_string(map.variant()), map.n(),
                           dist.size(), map.m(), map.k(), static_cast<double>(map.m()) / static_cast<double>(map.n()));
  return kExitOk;
}

int cmd_query(const std::string& path, const std::string& key, bool show_probes) {
  const auto map = load_file(path);
  const auto q = map.query(key);
  std::cout << (q.bottom() ? std::string("BOTTOM") : map.label(*q.value));
  if (show_probes) std::cout << "\tprobes=" << q.probes;
  std::cout << '\n';
  return kExitOk;
}

int cmd_bench(const std::string& dist_path, std::uint64_t n, double epsilon, const std::string& variant,
              std::uint64_t neg_samples, std::uint64_t seed, bool discard, const std::string& format) {
  std::ifstream in(dist_path);
  if (!in) throw IoError("cannot open " + dist_path);
  SweepConfig config{parse_distribution_tsv(in), n, epsilon, parse_map_kind(variant), neg_samples, seed, discard};
  const auto rows = sweep(std::span<const SweepConfig>(&config, 1));
  const SweepRow& row = rows.front();
  if (format == "csv") {
    std::cout << format_sweep_csv(rows);
  } else if (format == "kv") {
    std::cout << format_bound_kv(row.bounds);
    std::cout << fmt::format("m={}\nf_plus={}\nmax_f_star={}\nmax_f_minus={}\nrho={}\nneg_probes_mean={}\n", row.m,
                             row.errors.f_plus, row.errors.max_f_star(), row.errors.max_f_minus(), row.errors.rho,
                             row.errors.neg_probes_mean);
  } else {
    std::cout << fmt::format("{} map, n={} b={} epsilon={} m={}{}\n\n", variant, n, config.dist.size(), epsilon, row.m,
                             discard ? " (discard)" : "");
    std::cout << format_error_report(row.errors, config.dist) << '\n' << format_bound_table(row.bounds);
  }
  return kExitOk;
}

int cmd_bounds(double eps_plus, double eps_star, double eps_minus, double entropy, const std::string& format) {
  const double t1 = lb_theorem1(eps_plus, entropy);
  const double t2 = lb_theorem2(eps_plus, eps_star, eps_minus, entropy);
  const double c3 = eps_plus < 1.0 ? lb_corollary3(eps_plus, entropy) : 0.0;
  if (lb_outside_assumed_range(eps_plus, eps_star, eps_minus))
    std::cerr << "warning: max error rate >= 1/8, outside the range the bounds assume\n";
  if (format == "kv") {
    std::cout << fmt::format("theorem1_bpk={}\ntheorem2_bpk={}\ncorollary3_bpk={}\nasymptotic=1\n", t1, t2, c3);
  } else {
    std::cout << fmt::format("{:<38}{:>12.6f}\n", "(eps+,0,0) lower bound", t1);
    std::cout << fmt::format("{:<38}{:>12.6f}\n", "(eps+,eps*,eps-) lower bound", t2);
    std::cout << fmt::format("{:<38}{:>12.6f}\n", "(eps,eps,0) relaxed bound, eps=eps+", c3);
    std::cout << "(bits per key, asymptotic, o(1) omitted)\n";
  }
  return kExitOk;
}

int cmd_inspect(const std::string& path) {
  const auto map = load_file(path);
  const auto& dist = map.distribution();
  std::cout << fmt::format("variant      {}\nm            {}\nn            {}\nb            {}\nk            {}\n",
                           to_string(map.variant()), map.m(), map.n(), dist.size(), map.k());
  std::cout << fmt::format("epsilon      {}\nseed         {}\nentropy      {:.6f}\nbits/key     {:.4f}\nzero frac    {:.6f}\n",
                           map.epsilon(), map.seed(), dist.entropy(),
                           map.n() ? static_cast<double>(map.m()) / static_cast<double>(map.n()) : 0.0,
                           map.zero_fraction());
  if (map.is_tree()) {
    const CodeTree& tree = *map.tree();
    const double budget = 2.0 * static_cast<double>(map.n()) * std::numbers::log2e *
                          std::log2(static_cast<double>(dist.size()) / map.epsilon());
    std::cout << fmt::format("budget       {} (m <= {:.0f})\n", static_cast<double>(map.m()) <= budget ? "ok" : "exceeded",
                             budget);
    std::cout << "\nnodes (level order)\n";
    std::cout << fmt::format("{:>7}{:>7}{:>7}{:>8}  {}\n", "offset", "depth", "k_w", "prefix", "leaf");
    std::vector<int> by_offset(tree.node_count());
    for (std::size_t w = 0; w < tree.node_count(); ++w) by_offset[tree.nodes()[w].offset] = static_cast<int>(w);
    for (int w : by_offset) {
      const TreeNode& node = tree.node(w);
      std::cout << fmt::format("{:>7}{:>7}{:>7}{:>8}  {}\n", node.offset, node.depth, node.hash_count, node.hash_prefix,
                               node.is_leaf() ? dist.label(static_cast<std::size_t>(node.leaf_value)) : "");
    }
    const auto cert = analytic_bounds(tree);
    std::cout << fmt::format("\nanalytic false-positive bound  {:.6g}\n", cert.false_positive_bound);
    std::cout << fmt::format("{:<16}{:>10}{:>8}{:>14}\n", "value", "p", "t_i", "f* bound");
    for (std::size_t i = 0; i < dist.size(); ++i)
      std::cout << fmt::format("{:<16}{:>10.5f}{:>8}{:>14.6g}\n", dist.label(i), dist.prob(i), tree.path_hash_total(i),
                               cert.misassignment_bounds[i]);
  } else {
    double fp = 0.0;
    std::cout << fmt::format("\n{:<16}{:>10}{:>8}\n", "value", "p", "k_i");
    for (std::size_t i = 0; i < dist.size(); ++i) {
      fp += std::ldexp(1.0, -static_cast<int>(map.simple_ks()[i]));
      std::cout << fmt::format("{:<16}{:>10.5f}{:>8}\n", dist.label(i), dist.prob(i), map.simple_ks()[i]);
    }
    std::cout << fmt::format("\nanalytic false-positive bound  {:.6g}\n", fp);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bloom maps: approximate key/value maps with bounded error"};
  app.require_subcommand(1);

  std::string input, out_path, variant = "fast", map_path, key, dist_path, format = "table";
  double epsilon = 0.01, eps_plus = 0.01, eps_star = 0.0, eps_minus = 0.0, entropy = 0.0;
  std::uint64_t seed = 1, n = 100000, neg_samples = 100000;
  bool show_probes = false, discard = false;

  auto* build = app.add_subcommand("build", "Build a map from key<TAB>value lines");
  build->add_option("--input", input, "Input pairs TSV")->required();
  build->add_option("--epsilon", epsilon, "Target error rate")->required();
  build->add_option("--variant", variant, "simple | standard | fast")->check(CLI::IsMember({"simple", "standard", "fast"}));
  build->add_option("--seed", seed, "Master hash seed");
  build->add_option("--out", out_path, "Output map file")->required();

  auto* query = app.add_subcommand("query", "Look up one key");
  query->add_option("map", map_path, "Map file")->required();
  query->add_option("--key", key, "Key to query")->required();
  query->add_flag("--probes", show_probes, "Print the number of bit probes");

  auto* bench = app.add_subcommand("bench", "Build a synthetic map and measure its errors");
  bench->add_option("--dist", dist_path, "Value distribution TSV (label<TAB>weight)")->required();
  bench->add_option("--n", n, "Number of keys");
  bench->add_option("--epsilon", epsilon, "Target error rate")->required();
  bench->add_option("--variant", variant, "simple | standard | fast")->check(CLI::IsMember({"simple", "standard", "fast"}));
  bench->add_option("--neg-samples", neg_samples, "Negative queries");
  bench->add_option("--seed", seed, "Seed");
  bench->add_flag("--discard", discard, "Drop floor(eps * count_i) keys of each value before building");
  bench->add_option("--format", format, "table | csv | kv")->check(CLI::IsMember({"table", "csv", "kv"}));

  auto* bounds = app.add_subcommand("bounds", "Print space lower bounds");
  bounds->add_option("--epsilon-plus", eps_plus, "False-positive rate")->required();
  bounds->add_option("--epsilon-star", eps_star, "Misassignment rate");
  bounds->add_option("--epsilon-minus", eps_minus, "False-negative rate");
  bounds->add_option("--entropy", entropy, "Value entropy in bits")->required();
  bounds->add_option("--format", format, "table | kv")->check(CLI::IsMember({"table", "kv"}));

  auto* inspect = app.add_subcommand("inspect", "Describe a map file");
  inspect->add_option("map", map_path, "Map file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*build) return cmd_build(input, epsilon, variant, seed, out_path);
    if (*query) return cmd_query(map_path, key, show_probes);
    if (*bench) return cmd_bench(dist_path, n, epsilon, variant, neg_samples, seed, discard, format);
    if (*bounds) return cmd_bounds(eps_plus, eps_star, eps_minus, entropy, format);
    if (*inspect) return cmd_inspect(map_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
