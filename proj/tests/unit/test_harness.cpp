#include <doctest.h>

#include <map>
#include <set>

#include "bloommap/errors.hpp"
#include "bloommap/harness.hpp"

using namespace bloommap;

namespace {

ValueDistribution dist_of(std::vector<double> w) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < w.size(); ++i) labels.push_back("v" + std::to_string(i + 1));
  return ValueDistribution(w, labels);
}

std::vector<std::uint64_t> value_counts(const std::vector<KeyValue>& pairs, const ValueDistribution& d) {
  std::vector<std::uint64_t> c(d.size(), 0);
  for (const auto& kv : pairs) ++c[*d.index_of(kv.value)];
  return c;
}

}  // namespace

TEST_CASE("generate_pmap") {
  const auto d = dist_of({0.5, 0.3, 0.2});
  const auto pairs = generate_pmap({10, d, 1, 16});
  CHECK(pairs.size() == 10);
  CHECK(value_counts(pairs, d) == std::vector<std::uint64_t>{5, 3, 2});
  CHECK(pairs[0].key.size() == 16);

  const auto again = generate_pmap({10, d, 1, 16});
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(pairs[i].key == again[i].key);
    CHECK(pairs[i].value == again[i].value);
  }

  const auto big = generate_pmap({100000, d, 2, 16});
  std::set<std::string> keys;
  for (const auto& kv : big) keys.insert(kv.key);
  CHECK(keys.size() == 100000);

  // Two-byte keys over 65536 keys forces collision regeneration.
  const auto dense = generate_pmap({60000, d, 3, 2});
  std::set<std::string> dense_keys;
  for (const auto& kv : dense) dense_keys.insert(kv.key);
  CHECK(dense_keys.size() == 60000);

  CHECK_THROWS_AS(generate_pmap({0, d, 1, 16}), InvalidArgument);
}

TEST_CASE("generate_pmap shuffles values") {
  const auto d = dist_of({1, 1});
  const auto pairs = generate_pmap({1000, d, 4, 16});
  std::size_t runs = 1;
  for (std::size_t i = 1; i < pairs.size(); ++i) runs += pairs[i].value != pairs[i - 1].value;
  CHECK(runs > 300);
}

TEST_CASE("measure on plain builds") {
  const auto d = dist_of({0.5, 0.25, 0.25});
  const auto pairs = generate_pmap({20000, d, 9, 16});
  for (auto kind : {MapKind::Simple, MapKind::Standard, MapKind::Fast}) {
    const auto map = build_map(pairs, d, 1.0 / 64, kind, 9);
    const auto r = measure(map, pairs, 20000, 3);
    CHECK(r.max_f_minus() == 0.0);
    CHECK(r.lower_misassignments == 0);
    CHECK(r.stored_queries == 20000);
    CHECK(r.negative_queries == 20000);
    CHECK(r.value_counts == std::vector<std::uint64_t>{10000, 5000, 5000});
    CHECK(r.f_plus >= 0.0);
    CHECK(r.f_plus <= 1.0);
    CHECK(r.rho == map.zero_fraction());
    CHECK(r.neg_probes_mean >= 1.0);

    // Thread count does not change the report.
    const auto one = measure(map, pairs, 20000, 3, 1);
    const auto many = measure(map, pairs, 20000, 3, 7);
    CHECK(one.f_plus == many.f_plus);
    CHECK(one.f_star == many.f_star);
    CHECK(one.neg_probes_mean == many.neg_probes_mean);
    CHECK(one.pos_probes_mean == many.pos_probes_mean);
  }
  const auto map = build_map(pairs, d, 0.01, MapKind::Fast, 1);
  CHECK_THROWS_AS(measure(map, pairs, 999, 1), InvalidArgument);
}

TEST_CASE("build_with_discard") {
  const auto d = dist_of({1, 1});
  const auto pairs = generate_pmap({320, d, 5, 16});
  const double eps = 1.0 / 16;

  const auto out = build_with_discard(pairs, d, eps, 5, MapKind::Fast);
  CHECK(out.dropped.size() == 20);
  CHECK(value_counts(out.dropped, d) == std::vector<std::uint64_t>{10, 10});
  CHECK(out.kept.size() == 300);
  CHECK(out.map.n() == 300);
  const auto again = build_with_discard(pairs, d, eps, 5, MapKind::Fast);
  CHECK(again.map.bits() == out.map.bits());

  const auto r = measure(out.map, pairs, 1000, 1);
  for (double f : r.f_minus) CHECK(f <= 10.0 / 160.0);

  const auto none = build_with_discard(pairs, d, eps, 5, MapKind::Fast, 0.0);
  CHECK(none.dropped.empty());
  CHECK(none.map.bits() == build_map(pairs, d, eps, MapKind::Fast, 5).bits());

  CHECK_THROWS_AS(build_with_discard(pairs, d, eps, 5, MapKind::Fast, 1.0), InvalidEpsilon);
}

TEST_CASE("sweep") {
  const auto d = dist_of({0.5, 0.5});
  std::vector<SweepConfig> configs{{d, 2000, 0.01, MapKind::Fast, 1000, 3, false}};
  const auto rows = sweep(configs);
  CHECK(rows.size() == 1);
  CHECK(rows[0].m > 0);
  CHECK(!format_sweep_table(rows).empty());
  const auto csv = format_sweep_csv(rows);
  CHECK(csv.rfind("b,n,epsilon,variant,seed,discard,m,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  const auto repeat = sweep(configs);
  CHECK(format_sweep_csv(repeat) == csv);
  CHECK_THROWS_AS(sweep(std::vector<SweepConfig>{}), InvalidArgument);
}
