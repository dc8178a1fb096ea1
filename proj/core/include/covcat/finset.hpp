#ifndef COVCAT_FINSET_HPP
#define COVCAT_FINSET_HPP

#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

namespace covcat {

// Thrown when input data is malformed (bad cardinalities, unparsable text,
// inconsistent tables). Distinct from a check legitimately returning false.
struct structural_error : std::runtime_error {
  explicit structural_error(const std::string& what) : std::runtime_error(what) {}
};

// A map between the finite sets {1,...,source_card} and {1,...,target_card}.
// values[i-1] is the image of i; entries are 1-based throughout.
// source_card == 0 gives the empty map, which is a valid input everywhere.
struct FinMap {
  int source_card = 0;
  int target_card = 0;
  std::vector<int> values;

  FinMap() = default;
  FinMap(int src, int tgt, std::vector<int> vals);

  static FinMap identity(int card);

  int operator()(int i) const { return values[static_cast<size_t>(i) - 1]; }

  bool is_injective() const;
  bool is_surjective() const;

  bool operator==(const FinMap&) const = default;
  auto operator<=>(const FinMap&) const = default;
};

// Partition of {1,...,ground_card} into disjoint nonempty blocks.
// Canonical form: each block ascending, blocks ordered by their minima.
struct Partition {
  int ground_card = 0;
  std::vector<std::vector<int>> blocks;

  // Reorders into canonical form; throws structural_error if the blocks do
  // not partition {1,...,ground_card}.
  void canonicalize();

  bool operator==(const Partition&) const = default;
  auto operator<=>(const Partition&) const = default;
};

// Diagrammatic composite: apply f first, then g.
// result(i) = g(f(i)); requires f.target_card == g.source_card.
FinMap compose(const FinMap& f, const FinMap& g);

// A surjection f is selfic when j -> min(f^{-1}(j)) is strictly increasing,
// i.e. first occurrences of the values 1,...,target_card appear in order.
bool is_selfic(const FinMap& f);

// The selfic surjection whose fibers are the blocks of p, with block j the
// one holding the j-th smallest block minimum.
FinMap selfic_from_partition(const Partition& p);

// Inverse of selfic_from_partition; requires is_selfic(f).
Partition partition_from_selfic(const FinMap& f);

// All maps {1..k} -> {1..l} in lexicographic value order (l^k of them;
// none when l = 0 < k).
std::vector<FinMap> enumerate_maps(int k, int l);

// All selfic surjections {1..k} -> {1..l}, ordered lexicographically by
// value vector. Count equals the number of partitions of k into l blocks.
std::vector<FinMap> enumerate_selfic(int k, int l);

// All partitions of {1..k} in canonical form, deterministic order.
std::vector<Partition> enumerate_partitions(int k);

// Text form "k->l:[v1,...,vk]", e.g. "3->2:[1,1,2]". Empty map: "0->l:[]".
std::string to_string(const FinMap& f);
FinMap parse_finmap(const std::string& text);

}  // namespace covcat

#endif
