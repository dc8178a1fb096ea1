#ifndef COVCAT_SCOMB_HPP
#define COVCAT_SCOMB_HPP

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "covcat/finset.hpp"

namespace covcat {

// ---------------------------------------------------------------------------
// Table-backed finite categories.
// ---------------------------------------------------------------------------

// Composition is stored diagrammatically: the entry for (f, g) with
// tgt(f) == src(g) is "f then g". In a bounded category a composable pair
// whose composite exceeds the stored size budget has no table entry;
// compose() reports it as kOverflow (the composite exists mathematically
// but is not an element of `morphisms`). Unbounded categories must have a
// defined entry for every composable pair.
struct FiniteCategory {
  static constexpr uint32_t kOverflow = 0xffffffffu;

  struct Mor {
    uint32_t src = 0;
    uint32_t tgt = 0;
  };

  uint32_t num_objects = 0;
  std::vector<Mor> morphisms;
  std::vector<uint32_t> identities;  // object -> identity morphism id
  bool bounded = false;

  std::vector<std::string> object_names;    // optional, for exports
  std::vector<std::string> morphism_names;  // optional, for exports

  uint32_t src(uint32_t m) const { return morphisms[m].src; }
  uint32_t tgt(uint32_t m) const { return morphisms[m].tgt; }
  uint32_t identity(uint32_t ob) const { return identities[ob]; }

  // Returns the composite id, or kOverflow in a bounded category when the
  // entry is absent. Throws structural_error if the pair is not composable,
  // or if the entry is missing in an unbounded category.
  uint32_t compose(uint32_t f, uint32_t g) const;
  void set_compose(uint32_t f, uint32_t g, uint32_t result);
  bool has_compose(uint32_t f, uint32_t g) const;

  std::unordered_map<uint64_t, uint32_t> compose_table;
};

// Checks the category laws: identity source/target, identity composition,
// totality of composition (unless bounded), associativity wherever all
// composites involved are defined. Throws structural_error on violation.
void validate_category(const FiniteCategory& C);

// Functor given by object and morphism tables.
struct CatFunctor {
  std::vector<uint32_t> ob_map;
  std::vector<uint32_t> mor_map;
};

// Checks src/tgt compatibility, preservation of identities, and
// F(f then g) == F(f) then F(g) for every pair whose composite is defined
// in C; the image composite must then be defined in D as well.
void validate_functor(const FiniteCategory& C, const FiniteCategory& D,
                      const CatFunctor& F);

// ---------------------------------------------------------------------------
// Truncated simplicial sets.
// ---------------------------------------------------------------------------

// Levels 0..max_dim of a simplicial set, with total face and degeneracy
// tables inside that range. Simplices are interned integers per level.
struct TruncatedSSet {
  struct Level {
    uint32_t count = 0;
    // face[i][s] for 0 <= i <= n, defined at levels n >= 1.
    std::vector<std::vector<uint32_t>> face;
    // degen[i][s] for 0 <= i <= n, defined when n + 1 <= max_dim.
    std::vector<std::vector<uint32_t>> degen;
  };

  int max_dim = 0;
  std::vector<Level> levels;  // size max_dim + 1

  uint32_t size(int n) const { return levels[static_cast<size_t>(n)].count; }
  uint32_t face(int n, int i, uint32_t s) const {
    return levels[static_cast<size_t>(n)].face[static_cast<size_t>(i)][s];
  }
  uint32_t degen(int n, int i, uint32_t s) const {
    return levels[static_cast<size_t>(n)].degen[static_cast<size_t>(i)][s];
  }
};

// Simplicial identities on every stored level; throws on violation.
void validate_sset(const TruncatedSSet& X);

// Operator X(alpha) : X_n -> X_m induced by a monotone map alpha: [m] -> [n]
// (alpha holds m+1 weakly increasing values in 0..n). Computed through the
// epi-mono factorization of alpha, so only the stored tables are used.
std::vector<uint32_t> simplicial_operator(const TruncatedSSet& X,
                                          const std::vector<int>& alpha, int n);

// Composite face operator d_1 d_2 ... d_r : X_r -> X_0. With the nerve
// convention below this sends a string of arrows to its final object; r = 0
// gives the identity table on X_0.
std::vector<uint32_t> ultimate_target_table(const TruncatedSSet& X, int r);

// ---------------------------------------------------------------------------
// Nerve.
// ---------------------------------------------------------------------------

// Nerve of C truncated at `depth`. Level n holds the composable strings
// (f_1,...,f_n) all of whose run composites are defined (no kOverflow);
// level 0 holds the objects. Orientation: d_i omits vertex n-i, hence d_0
// drops the last arrow, d_n drops the first, d_1 of an edge is its target,
// and d_1 d_2 ... d_r computes the ultimate target. s_i repeats vertex n-i.
// Ids are assigned in lexicographic order of the key strings.
struct BuiltNerve {
  static constexpr uint32_t kNotFound = 0xffffffffu;

  TruncatedSSet sset;
  // keys[n] is flat, n entries per simplex (morphism ids); keys[0] is empty
  // since level-0 simplex ids coincide with object ids.
  std::vector<std::vector<uint32_t>> keys;

  std::span<const uint32_t> key(int level, uint32_t s) const;
  uint32_t find(int level, std::span<const uint32_t> key) const;
};

BuiltNerve nerve(const FiniteCategory& C, int depth);

// Simplicial map between the nerves induced by a validated functor.
struct SimplicialMap {
  std::vector<std::vector<uint32_t>> level_map;
};

void validate_simplicial_map(const SimplicialMap& F, const TruncatedSSet& X,
                             const TruncatedSSet& Y);

SimplicialMap nerve_map(const CatFunctor& F, const BuiltNerve& NX,
                        const BuiltNerve& NY);

// ---------------------------------------------------------------------------
// Degenerate part (latching object).
// ---------------------------------------------------------------------------

// Sorted ids of the degenerate n-simplices, computed twice: as the union of
// the degeneracy images from level n-1, and as the union of the images of
// the operators induced by all non-bijective monotone surjections
// [n] ->> [p]. Throws structural_error if the two computations disagree.
std::vector<uint32_t> latching(const TruncatedSSet& X, int n);

// The two routes individually (exposed for reporting).
std::vector<uint32_t> latching_degeneracy_union(const TruncatedSSet& X, int n);
std::vector<uint32_t> latching_surjection_union(const TruncatedSSet& X, int n);

// ---------------------------------------------------------------------------
// Comma construction.
// ---------------------------------------------------------------------------

// (X over y): level r is the subset of X_{r+1} with ultimate target y; the
// operators are the restrictions of d_{i+1} and s_{i+1}. max_dim drops by 1.
struct CommaSSet {
  TruncatedSSet sset;
  std::vector<std::vector<uint32_t>> parent;  // level r id -> id in X_{r+1}
};

CommaSSet comma(const TruncatedSSet& X, uint32_t y);

// Slice category over an object: objects are the morphisms into y, a
// morphism (x,f) -> (x',g) is u: x -> x' with u then g == f. In a bounded
// category u qualifies only when the composite is defined. If out_proj is
// given it receives the projection functor to C.
FiniteCategory classical_comma(const FiniteCategory& C, uint32_t y,
                               CatFunctor* out_proj = nullptr,
                               std::vector<uint32_t>* out_object_arrows = nullptr);

// ---------------------------------------------------------------------------
// Fiber products and strict pullbacks.
// ---------------------------------------------------------------------------

struct FiberProduct {
  TruncatedSSet sset;
  SimplicialMap proj_left;   // to X
  SimplicialMap proj_right;  // to Y
  // pairs[n][s] = (id in X_n, id in Y_n), lexicographically ordered.
  std::vector<std::vector<std::pair<uint32_t, uint32_t>>> pairs;

  uint32_t find(int level, uint32_t x, uint32_t y) const;
};

// Levelwise fiber product of f: X -> Z and g: Y -> Z.
FiberProduct fiber_product(const TruncatedSSet& X, const SimplicialMap& f,
                           const TruncatedSSet& Y, const SimplicialMap& g,
                           const TruncatedSSet& Z);

// Terminal truncated simplicial set: one simplex per level.
TruncatedSSet point_sset(int max_dim);
SimplicialMap map_to_point(const TruncatedSSet& X);

// A commuting square of simplicial maps; A is the claimed pullback corner.
//         top
//      A ----> B
// left |       | right
//      v       v
//      C ----> D
//        bottom
struct SquareOfMaps {
  const TruncatedSSet* A;
  const TruncatedSSet* B;
  const TruncatedSSet* C;
  const TruncatedSSet* D;
  const SimplicialMap* top;
  const SimplicialMap* left;
  const SimplicialMap* right;
  const SimplicialMap* bottom;
};

struct PullbackReport {
  bool holds = false;
  int failed_level = -1;
  std::string detail;                  // counterexample description
  std::vector<uint32_t> corner_sizes;  // |A_n|
  std::vector<uint32_t> fiber_sizes;   // |B_n x_{D_n} C_n|
};

// Checks that a -> (top(a), left(a)) is a bijection onto the levelwise
// fiber product at levels 0..max_level. Throws structural_error if the
// square is malformed or does not commute.
PullbackReport strict_pullback_report(const SquareOfMaps& S, int max_level);
bool is_strict_pullback(const SquareOfMaps& S, int max_level);

// Set-level variant used by the simplicial one: comparison c -> (f(c), g(c))
// against pairs (b, d) with rb(b) == rd(d).
struct SetPullbackInput {
  std::span<const uint32_t> f;   // A -> B
  std::span<const uint32_t> g;   // A -> C
  std::span<const uint32_t> rb;  // B -> D
  std::span<const uint32_t> rd;  // C -> D
};
bool set_pullback_check(const SetPullbackInput& in, std::string* detail);

// ---------------------------------------------------------------------------
// Segal condition.
// ---------------------------------------------------------------------------

struct SegalReport {
  bool holds = false;
  std::string detail;
};

// Spine comparison X_n -> X_1 x_{X_0} ... x_{X_0} X_1 (n factors) at one
// level; n = 0 or 1 is trivially true. Requires n <= max_dim.
SegalReport segal_check(const TruncatedSSet& X, int n);

// ---------------------------------------------------------------------------
// Mutation (for negative tests and corrupted fixtures).
// ---------------------------------------------------------------------------

constexpr uint32_t kRemoved = 0xffffffffu;

// Removes the simplex (level, idx) together with every higher simplex that
// reaches it through iterated faces; degeneracy images of the removed
// simplex lie above it, so the result is again a valid truncated simplicial
// set. old_to_new (if given) receives per-level translation tables with
// kRemoved for dropped simplices.
TruncatedSSet drop_simplex(const TruncatedSSet& X, int level, uint32_t idx,
                           std::vector<std::vector<uint32_t>>* old_to_new = nullptr);

}  // namespace covcat

#endif
