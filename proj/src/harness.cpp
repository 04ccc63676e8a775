#include "bloommap/harness.hpp"

#include <algorithm>
#include <numeric>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <fmt/core.h>

#include "bloommap/errors.hpp"

namespace bloommap {

namespace {

// Seeded Fisher-Yates; std::shuffle's draw sequence is not portable.
template <class T>
void seeded_shuffle(std::vector<T>& items, KeyStream& rng) {
  for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[rng.below(i)]);
}

struct Tally {
  std::vector<std::uint64_t> count, wrong, missing, probes;
  std::uint64_t lower = 0;
  std::uint64_t neg_hits = 0;
  std::uint64_t neg_probes = 0;

  explicit Tally(std::size_t b) : count(b), wrong(b), missing(b), probes(b) {}

  void merge(const Tally& o) {
    for (std::size_t i = 0; i < count.size(); ++i) {
      count[i] += o.count[i];
      wrong[i] += o.wrong[i];
      missing[i] += o.missing[i];
      probes[i] += o.probes[i];
    }
    lower += o.lower;
    neg_hits += o.neg_hits;
    neg_probes += o.neg_probes;
  }
};

template <class Fn>
void parallel_chunks(std::size_t total, unsigned threads, Fn&& fn) {
  if (threads <= 1 || total < 4096) {
    fn(std::size_t{0}, total, 0u);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (total + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = std::min(total, t * chunk);
    const std::size_t hi = std::min(total, lo + chunk);
    pool.emplace_back([&fn, lo, hi, t] { fn(lo, hi, t); });
  }
}

}  // namespace

std::string KeyStream::next() {
  std::string key(key_bytes_, '\0');
  for (std::size_t i = 0; i < key_bytes_; i += 8) {
    std::uint64_t word = rng_();
    for (std::size_t b = i; b < std::min(key_bytes_, i + 8); ++b) {
      key[b] = static_cast<char>(word & 0xff);
      word >>= 8;
    }
  }
  return key;
}

std::uint64_t KeyStream::below(std::uint64_t bound) { return reduce_range(rng_(), bound); }

std::vector<KeyValue> generate_pmap(const PMapSpec& spec) {
  if (spec.n == 0) throw InvalidArgument("p-map needs at least one key");
  KeyStream rng(spec.seed, spec.key_bytes);
  const auto counts = spec.dist.integer_counts(spec.n);

  std::vector<std::size_t> values;
  values.reserve(spec.n);
  for (std::size_t i = 0; i < counts.size(); ++i) values.insert(values.end(), counts[i], i);
  seeded_shuffle(values, rng);

  std::unordered_set<std::string> seen;
  seen.reserve(spec.n * 2);
  std::vector<KeyValue> out;
  out.reserve(spec.n);
  for (std::size_t v : values) {
    std::string key = rng.next();
    while (!seen.insert(key).second) key = rng.next();
    out.push_back({std::move(key), spec.dist.label(v)});
  }
  return out;
}

double ErrorReport::max_f_star() const { return f_star.empty() ? 0.0 : *std::max_element(f_star.begin(), f_star.end()); }

double ErrorReport::max_f_minus() const {
  return f_minus.empty() ? 0.0 : *std::max_element(f_minus.begin(), f_minus.end());
}

ErrorReport measure(const BloomMap& map, std::span<const KeyValue> pairs, std::uint64_t neg_samples,
                    std::uint64_t seed, unsigned threads) {
  if (neg_samples < 1000) throw InvalidArgument("measure needs at least 1000 negative samples");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const ValueDistribution& dist = map.distribution();
  const std::size_t b = dist.size();

  std::vector<std::size_t> truth(pairs.size());
  std::unordered_set<std::string_view> stored;
  stored.reserve(pairs.size() * 2);
  {
    std::unordered_map<std::string_view, std::size_t> index;
    for (std::size_t i = 0; i < b; ++i) index.emplace(dist.label(i), i);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto it = index.find(pairs[p].value);
      if (it == index.end()) throw UnknownValue("value '" + pairs[p].value + "' is not in the map");
      truth[p] = it->second;
      stored.insert(pairs[p].key);
    }
  }

  KeyStream universe(seed);
  std::vector<std::string> negatives;
  negatives.reserve(neg_samples);
  while (negatives.size() < neg_samples) {
    std::string key = universe.next();
    if (!stored.contains(key)) negatives.push_back(std::move(key));
  }

  std::vector<Tally> partial(threads, Tally(b));
  parallel_chunks(pairs.size(), threads, [&](std::size_t lo, std::size_t hi, unsigned t) {
    Tally& tally = partial[t];
    for (std::size_t p = lo; p < hi; ++p) {
      const std::size_t want = truth[p];
      const QueryOutcome q = map.query(pairs[p].key);
      ++tally.count[want];
      tally.probes[want] += q.probes;
      if (q.bottom()) {
        ++tally.missing[want];
      } else if (*q.value != want) {
        ++tally.wrong[want];
        if (*q.value < want) ++tally.lower;
      }
    }
  });
  parallel_chunks(negatives.size(), threads, [&](std::size_t lo, std::size_t hi, unsigned t) {
    Tally& tally = partial[t];
    for (std::size_t s = lo; s < hi; ++s) {
      const QueryOutcome q = map.query(negatives[s]);
      tally.neg_probes += q.probes;
      if (!q.bottom()) ++tally.neg_hits;
    }
  });

  Tally total(b);
  for (const auto& t : partial) total.merge(t);

  ErrorReport r;
  r.value_counts = total.count;
  r.f_star.resize(b);
  r.f_minus.resize(b);
  r.pos_probes_mean.resize(b);
  for (std::size_t i = 0; i < b; ++i) {
    const double c = static_cast<double>(total.count[i]);
    if (total.count[i] == 0) continue;
    r.f_star[i] = static_cast<double>(total.wrong[i]) / c;
    r.f_minus[i] = static_cast<double>(total.missing[i]) / c;
    r.pos_probes_mean[i] = static_cast<double>(total.probes[i]) / c;
  }
  r.stored_queries = pairs.size();
  r.negative_queries = negatives.size();
  r.f_plus = static_cast<double>(total.neg_hits) / static_cast<double>(negatives.size());
  r.neg_probes_mean = static_cast<double>(total.neg_probes) / static_cast<double>(negatives.size());
  r.lower_misassignments = total.lower;
  r.rho = map.zero_fraction();
  return r;
}

DiscardBuild build_with_discard(std::span<const KeyValue> pairs, const ValueDistribution& dist, double epsilon,
                                std::uint64_t seed, MapKind kind, std::optional<double> discard_rate) {
  const double rate = discard_rate.value_or(epsilon);
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidEpsilon("discard rate must lie in [0,1)");

  std::vector<std::vector<std::size_t>> by_value(dist.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto v = dist.index_of(pairs[p].value);
    if (!v) throw UnknownValue("value '" + pairs[p].value + "' is not in the distribution");
    by_value[*v].push_back(p);
  }

  KeyStream rng(seed ^ 0x64697363617264ULL);  // "discard"
  std::vector<bool> drop(pairs.size(), false);
  for (auto& members : by_value) {
    const auto count = static_cast<std::size_t>(rate * static_cast<double>(members.size()));
    seeded_shuffle(members, rng);
    for (std::size_t d = 0; d < count; ++d) drop[members[d]] = true;
  }

  std::vector<KeyValue> kept;
  std::vector<KeyValue> dropped;
  for (std::size_t p = 0; p < pairs.size(); ++p) (drop[p] ? dropped : kept).push_back(pairs[p]);
  BloomMap map = build_map(kept, dist, epsilon, kind, seed);
  return {std::move(map), std::move(kept), std::move(dropped)};
}

std::vector<SweepRow> sweep(std::span<const SweepConfig> configs) {
  if (configs.empty()) throw InvalidArgument("sweep needs at least one configuration");
  std::vector<SweepRow> rows;
  rows.reserve(configs.size());
  for (const auto& c : configs) {
    const auto pairs = generate_pmap({c.n, c.dist, c.seed});
    SweepRow row;
    row.b = c.dist.size();
    row.n = c.n;
    row.epsilon = c.epsilon;
    row.kind = c.kind;
    row.seed = c.seed;
    row.discard = c.discard;
    const std::uint64_t measure_seed = c.seed ^ 0x6e65676174697665ULL;  // "negative"
    if (c.discard) {
      const auto built = build_with_discard(pairs, c.dist, c.epsilon, c.seed, c.kind);
      row.m = built.map.m();
      row.bounds = space_report(built.map);
      row.errors = measure(built.map, pairs, c.neg_samples, measure_seed);
    } else {
      const auto map = build_map(pairs, c.dist, c.epsilon, c.kind, c.seed);
      row.m = map.m();
      row.bounds = space_report(map);
      row.errors = measure(map, pairs, c.neg_samples, measure_seed);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_error_report(const ErrorReport& r, const ValueDistribution& dist) {
  std::string out;
  out += fmt::format("stored queries     {}\n", r.stored_queries);
  out += fmt::format("negative queries   {}\n", r.negative_queries);
  out += fmt::format("false positives    {:.6f}\n", r.f_plus);
  out += fmt::format("zero fraction      {:.6f}\n", r.rho);
  out += fmt::format("neg probes (mean)  {:.4f}\n", r.neg_probes_mean);
  out += fmt::format("lower misassigns   {}\n", r.lower_misassignments);
  out += fmt::format("{:<16}{:>10}{:>12}{:>12}{:>12}{:>12}\n", "value", "p", "count", "f*", "f-", "pos probes");
  for (std::size_t i = 0; i < r.f_star.size(); ++i)
    out += fmt::format("{:<16}{:>10.5f}{:>12}{:>12.6f}{:>12.6f}{:>12.4f}\n", dist.label(i), dist.prob(i),
                       r.value_counts[i], r.f_star[i], r.f_minus[i], r.pos_probes_mean[i]);
  return out;
}

std::string format_sweep_table(std::span<const SweepRow> rows) {
  std::string out = fmt::format("{:>4}{:>9}{:>11}{:>10}{:>8}{:>10}{:>10}{:>8}{:>10}{:>10}{:>9}{:>9}{:>9}\n", "b", "n",
                                "epsilon", "variant", "discard", "bpk", "bound", "ratio", "f+", "max f*", "rho",
                                "negbp", "posbp");
  for (const auto& r : rows) {
    double pos = 0.0;
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < r.errors.value_counts.size(); ++i) {
      pos += r.errors.pos_probes_mean[i] * static_cast<double>(r.errors.value_counts[i]);
      total += r.errors.value_counts[i];
    }
    out += fmt::format("{:>4}{:>9}{:>11.6f}{:>10}{:>8}{:>10.4f}{:>10.4f}{:>8.4f}{:>10.6f}{:>10.6f}{:>9.4f}{:>9.4f}{:>9.4f}\n",
                       r.b, r.n, r.epsilon, to_string(r.kind), r.discard ? "yes" : "no", r.bounds.achieved_bpk,
                       r.bounds.corollary3_bpk, r.bounds.ratio, r.errors.f_plus, r.errors.max_f_star(), r.errors.rho,
                       r.errors.neg_probes_mean, total ? pos / static_cast<double>(total) : 0.0);
  }
  return out;
}

std::string format_sweep_csv(std::span<const SweepRow> rows) {
  std::string out =
      "b,n,epsilon,variant,seed,discard,m,achieved_bpk,corollary3_bpk,ratio,f_plus,max_f_star,max_f_minus,rho,"
      "neg_probes_mean,pos_probes_mean\n";
  for (const auto& r : rows) {
    double pos = 0.0;
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < r.errors.value_counts.size(); ++i) {
      pos += r.errors.pos_probes_mean[i] * static_cast<double>(r.errors.value_counts[i]);
      total += r.errors.value_counts[i];
    }
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.b, r.n, r.epsilon, to_string(r.kind), r.seed,
                       r.discard ? 1 : 0, r.m, r.bounds.achieved_bpk, r.bounds.corollary3_bpk, r.bounds.ratio,
                       r.errors.f_plus, r.errors.max_f_star(), r.errors.max_f_minus(), r.errors.rho,
                       r.errors.neg_probes_mean, total ? pos / static_cast<double>(total) : 0.0);
  }
  return out;
}

}  // namespace bloommap
