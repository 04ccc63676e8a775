#include "bloommap/map_io.hpp"

#include <bit>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <unordered_map>

#include "bloommap/errors.hpp"

namespace bloommap {

namespace {

constexpr std::uint8_t kMagic[4] = {'B', 'M', 'A', 'P'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 8 + 8 + 4 + 8 + 8;

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void str(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t>& buffer() { return buf_; }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8(const char* field) { return static_cast<std::uint8_t>(le(1, field)); }
  std::uint16_t u16(const char* field) { return static_cast<std::uint16_t>(le(2, field)); }
  std::uint32_t u32(const char* field) { return static_cast<std::uint32_t>(le(4, field)); }
  std::uint64_t u64(const char* field) { return le(8, field); }
  double f64(const char* field) { return std::bit_cast<double>(le(8, field)); }

  std::span<const std::uint8_t> take(std::size_t n, const char* field) {
    need(n, field);
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const noexcept { return data_.size() - pos_; }

 private:
  void need(std::size_t n, const char* field) const {
    if (data_.size() - pos_ < n) throw FormatError(field, "file is truncated");
  }
  std::uint64_t le(int n, const char* field) {
    need(static_cast<std::size_t>(n), field);
    std::uint64_t v = 0;
    for (int i = n - 1; i >= 0; --i) v = (v << 8) | data_[pos_ + static_cast<std::size_t>(i)];
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::uint8_t> serialize(const BloomMap& map) {
  if (!map.frozen()) throw FrozenError("only frozen maps can be saved");
  const ValueDistribution& dist = map.distribution();
  Writer w;
  w.bytes(kMagic);
  w.u8(kFormatVersion);
  w.u8(static_cast<std::uint8_t>(map.variant()));
  w.u8(kHashMurmur64A);
  w.u8(0);
  w.u64(map.m());
  w.u64(map.n());
  w.u32(static_cast<std::uint32_t>(dist.size()));
  w.f64(map.epsilon());
  w.u64(map.seed());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const std::string& label = dist.label(i);
    if (label.size() > 0xffff) throw IoError("label longer than 65535 bytes");
    w.u16(static_cast<std::uint16_t>(label.size()));
    w.str(label);
    w.f64(dist.prob(i));
  }
  if (map.is_tree()) {
    for (const auto& rec : map.tree()->preorder()) {
      w.u8(rec.is_leaf ? 1 : 0);
      w.u32(rec.hash_count);
      w.u32(rec.leaf_value);
    }
  } else {
    for (std::uint32_t k : map.simple_ks()) w.u32(k);
  }
  w.bytes(map.bits().to_bytes());
  w.u64(fnv1a64(w.buffer()));
  return std::move(w.buffer());
}

BloomMap deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw FormatError("magic", "empty input");
  Reader r(bytes);
  const auto magic = r.take(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), std::begin(kMagic))) throw FormatError("magic", "not a bloom map file");
  const std::uint8_t version = r.u8("version");
  if (version != kFormatVersion) throw FormatError("version", "unsupported version " + std::to_string(version));
  if (bytes.size() < kHeaderBytes + 8) throw FormatError("header", "file is truncated");
  std::uint64_t stored_sum = 0;
  for (int i = 7; i >= 0; --i) stored_sum = (stored_sum << 8) | bytes[bytes.size() - 8 + static_cast<std::size_t>(i)];
  if (fnv1a64(bytes.first(bytes.size() - 8)) != stored_sum) throw FormatError("checksum", "checksum mismatch");

  const std::uint8_t variant_byte = r.u8("variant");
  if (variant_byte > 3) throw FormatError("variant", "unknown variant " + std::to_string(variant_byte));
  const auto variant = static_cast<Variant>(variant_byte);
  const std::uint8_t hash_algo = r.u8("hash_algo");
  if (hash_algo != kHashMurmur64A) throw FormatError("hash_algo", "unknown hash algorithm " + std::to_string(hash_algo));
  r.u8("reserved");
  const std::uint64_t m = r.u64("m");
  const std::uint64_t n = r.u64("n");
  const std::uint32_t b = r.u32("b");
  const double epsilon = r.f64("epsilon");
  const std::uint64_t seed = r.u64("master_seed");
  if (m == 0) throw FormatError("m", "bit array size is zero");
  if (b == 0 || b > r.remaining()) throw FormatError("b", "bad value count");

  std::vector<double> probs;
  std::vector<std::string> labels;
  for (std::uint32_t i = 0; i < b; ++i) {
    const std::uint16_t len = r.u16("distribution");
    const auto text = r.take(len, "distribution");
    labels.emplace_back(text.begin(), text.end());
    probs.push_back(r.f64("distribution"));
  }

  try {
    auto dist = ValueDistribution::from_sorted(std::move(probs), std::move(labels));
    std::optional<CodeTree> tree;
    std::vector<std::uint32_t> ks;
    if (variant == Variant::Simple) {
      for (std::uint32_t i = 0; i < b; ++i) ks.push_back(r.u32("simple_ks"));
    } else {
      // Preorder of a full tree with b leaves has 2b - 1 records.
      std::vector<PreorderRecord> records(2 * std::size_t{b} - 1);
      for (auto& rec : records) {
        const std::uint8_t leaf = r.u8("tree");
        if (leaf > 1) throw FormatError("tree", "bad leaf flag");
        rec.is_leaf = leaf == 1;
        rec.hash_count = r.u32("tree");
        rec.leaf_value = r.u32("tree");
      }
      tree = CodeTree::from_preorder(records);
    }
    const auto bit_bytes = r.take((m + 7) / 8, "bits");
    if (r.remaining() != 8) throw FormatError("bits", "unexpected trailing bytes");
    return BloomMap::restore(variant, std::move(dist), std::move(tree), std::move(ks), n, epsilon, seed,
                             BitArray::from_bytes(m, bit_bytes));
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError("structure", e.what());
  }
}

void save(const BloomMap& map, std::ostream& out) {
  const auto bytes = serialize(map);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed");
}

BloomMap load(std::istream& in) {
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw IoError("read failed");
  return deserialize(bytes);
}

void save_file(const BloomMap& map, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  save(map, out);
}

BloomMap load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return load(in);
}

std::vector<KeyValue> read_pairs_tsv(std::istream& in) {
  std::vector<KeyValue> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw InvalidArgument("line " + std::to_string(lineno) + ": expected key<TAB>value");
    out.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return out;
}

ValueDistribution infer_distribution(std::span<const KeyValue> pairs) {
  std::vector<std::string> labels;
  std::vector<double> weights;
  std::unordered_map<std::string, std::size_t> index;
  std::unordered_map<std::string_view, bool> seen_keys;
  for (const auto& kv : pairs) {
    if (!seen_keys.emplace(kv.key, true).second) continue;
    auto [it, inserted] = index.emplace(kv.value, labels.size());
    if (inserted) {
      labels.push_back(kv.value);
      weights.push_back(0.0);
    }
    weights[it->second] += 1.0;
  }
  return ValueDistribution(weights, std::move(labels));
}

}  // namespace bloommap
