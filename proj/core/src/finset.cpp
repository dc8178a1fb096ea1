#include "covcat/finset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace covcat {

FinMap::FinMap(int src, int tgt, std::vector<int> vals)
    : source_card(src), target_card(tgt), values(std::move(vals)) {
  if (src < 0 || tgt < 0) throw structural_error("FinMap: negative cardinality");
  if (static_cast<int>(values.size()) != src)
    throw structural_error("FinMap: value count does not match source cardinality");
  for (int v : values)
    if (v < 1 || v > tgt) throw structural_error("FinMap: value out of range");
}

FinMap FinMap::identity(int card) {
  std::vector<int> vals(static_cast<size_t>(card));
  for (int i = 0; i < card; ++i) vals[static_cast<size_t>(i)] = i + 1;
  return FinMap(card, card, std::move(vals));
}

bool FinMap::is_injective() const {
  std::vector<char> seen(static_cast<size_t>(target_card), 0);
  for (int v : values) {
    if (seen[static_cast<size_t>(v) - 1]) return false;
    seen[static_cast<size_t>(v) - 1] = 1;
  }
  return true;
}

bool FinMap::is_surjective() const {
  std::vector<char> seen(static_cast<size_t>(target_card), 0);
  for (int v : values) seen[static_cast<size_t>(v) - 1] = 1;
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

void Partition::canonicalize() {
  if (ground_card < 0) throw structural_error("Partition: negative cardinality");
  std::vector<char> seen(static_cast<size_t>(ground_card), 0);
  int total = 0;
  for (auto& b : blocks) {
    if (b.empty()) throw structural_error("Partition: empty block");
    std::sort(b.begin(), b.end());
    for (int e : b) {
      if (e < 1 || e > ground_card) throw structural_error("Partition: element out of range");
      if (seen[static_cast<size_t>(e) - 1]) throw structural_error("Partition: repeated element");
      seen[static_cast<size_t>(e) - 1] = 1;
      ++total;
    }
  }
  if (total != ground_card) throw structural_error("Partition: blocks do not cover the ground set");
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

FinMap compose(const FinMap& f, const FinMap& g) {
  if (f.target_card != g.source_card)
    throw structural_error("compose: middle cardinalities disagree");
  std::vector<int> vals(static_cast<size_t>(f.source_card));
  for (int i = 1; i <= f.source_card; ++i) vals[static_cast<size_t>(i) - 1] = g(f(i));
  return FinMap(f.source_card, g.target_card, std::move(vals));
}

bool is_selfic(const FinMap& f) {
  if (!f.is_surjective()) return false;
  // Surjective + first occurrences in increasing label order means the value
  // vector is a restricted growth string: v1 = 1 and each value exceeds the
  // running maximum by at most one.
  int max_seen = 0;
  for (int v : f.values) {
    if (v > max_seen + 1) return false;
    max_seen = std::max(max_seen, v);
  }
  return true;
}

FinMap selfic_from_partition(const Partition& p) {
  Partition q = p;
  q.canonicalize();
  std::vector<int> vals(static_cast<size_t>(q.ground_card));
  for (size_t j = 0; j < q.blocks.size(); ++j)
    for (int e : q.blocks[j]) vals[static_cast<size_t>(e) - 1] = static_cast<int>(j) + 1;
  return FinMap(q.ground_card, static_cast<int>(q.blocks.size()), std::move(vals));
}

Partition partition_from_selfic(const FinMap& f) {
  if (!is_selfic(f)) throw structural_error("partition_from_selfic: map is not selfic");
  Partition p;
  p.ground_card = f.source_card;
  p.blocks.assign(static_cast<size_t>(f.target_card), {});
  for (int i = 1; i <= f.source_card; ++i)
    p.blocks[static_cast<size_t>(f(i)) - 1].push_back(i);
  p.canonicalize();
  return p;
}

namespace {

void grow_selfic(int k, int l, std::vector<int>& vals, int max_seen,
                 std::vector<FinMap>& out) {
  int pos = static_cast<int>(vals.size());
  if (pos == k) {
    if (max_seen == l) out.emplace_back(k, l, vals);
    return;
  }
  // Remaining positions must still be able to reach l distinct values.
  int limit = std::min(l, max_seen + 1);
  for (int v = 1; v <= limit; ++v) {
    int reach = std::max(max_seen, v) + (k - pos - 1);
    if (reach < l) continue;
    vals.push_back(v);
    grow_selfic(k, l, vals, std::max(max_seen, v), out);
    vals.pop_back();
  }
}

}  // namespace

std::vector<FinMap> enumerate_maps(int k, int l) {
  if (k < 0 || l < 0) throw structural_error("enumerate_maps: negative cardinality");
  std::vector<FinMap> out;
  if (k == 0) {
    out.emplace_back(0, l, std::vector<int>{});
    return out;
  }
  if (l == 0) return out;
  std::vector<int> vals(static_cast<size_t>(k), 1);
  while (true) {
    out.emplace_back(k, l, vals);
    int pos = k - 1;
    while (pos >= 0 && vals[static_cast<size_t>(pos)] == l) {
      vals[static_cast<size_t>(pos)] = 1;
      --pos;
    }
    if (pos < 0) break;
    ++vals[static_cast<size_t>(pos)];
  }
  return out;
}

std::vector<FinMap> enumerate_selfic(int k, int l) {
  if (k < 0 || l < 0) throw structural_error("enumerate_selfic: negative cardinality");
  std::vector<FinMap> out;
  if (l > k) return out;
  if (k == 0) {
    if (l == 0) out.emplace_back();
    return out;
  }
  if (l == 0) return out;
  std::vector<int> vals;
  vals.reserve(static_cast<size_t>(k));
  grow_selfic(k, l, vals, 0, out);
  return out;
}

std::vector<Partition> enumerate_partitions(int k) {
  std::vector<Partition> out;
  for (int l = 0; l <= k; ++l)
    for (const FinMap& f : enumerate_selfic(k, l)) out.push_back(partition_from_selfic(f));
  return out;
}

std::string to_string(const FinMap& f) {
  std::ostringstream os;
  os << f.source_card << "->" << f.target_card << ":[";
  for (int i = 0; i < f.source_card; ++i) {
    if (i) os << ",";
    os << f.values[static_cast<size_t>(i)];
  }
  os << "]";
  return os.str();
}

namespace {

int parse_int(const std::string& s, size_t& pos) {
  size_t start = pos;
  while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])))) ++pos;
  int value = 0;
  auto res = std::from_chars(s.data() + start, s.data() + pos, value);
  if (pos == start || res.ec != std::errc())
    throw structural_error("parse_finmap: expected integer in '" + s + "'");
  return value;
}

void expect(const std::string& s, size_t& pos, const std::string& token) {
  if (s.compare(pos, token.size(), token) != 0)
    throw structural_error("parse_finmap: expected '" + token + "' in '" + s + "'");
  pos += token.size();
}

}  // namespace

FinMap parse_finmap(const std::string& text) {
  size_t pos = 0;
  int k = parse_int(text, pos);
  expect(text, pos, "->");
  int l = parse_int(text, pos);
  expect(text, pos, ":[");
  std::vector<int> vals;
  if (pos < text.size() && text[pos] != ']') {
    while (true) {
      vals.push_back(parse_int(text, pos));
      if (pos < text.size() && text[pos] == ',') {
        ++pos;
        continue;
      }
      break;
    }
  }
  expect(text, pos, "]");
  if (pos != text.size()) throw structural_error("parse_finmap: trailing characters in '" + text + "'");
  return FinMap(k, l, std::move(vals));
}

}  // namespace covcat
