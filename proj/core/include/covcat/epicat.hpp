#ifndef COVCAT_EPICAT_HPP
#define COVCAT_EPICAT_HPP

#include <string>
#include <utility>
#include <vector>

#include "covcat/finset.hpp"
#include "covcat/outcome.hpp"
#include "covcat/scomb.hpp"

namespace covcat {

// Object: a selfic surjection p. The empty map 0 -> 0 is a valid object.
struct EpiFinObject {
  FinMap p;

  EpiFinObject() = default;
  explicit EpiFinObject(FinMap map);

  bool operator==(const EpiFinObject&) const = default;
  auto operator<=>(const EpiFinObject&) const = default;
};

// Morphism: a commuting square
//
//        src.p
//   k  ------->  l
//   |            |
//   | top        | bottom
//   v            v
//   m  ------->  n
//        tgt.p
//
// subject to the requirement that i -> (top(i), src.p(i)) is injective into
// the fiber product of tgt.p and bottom.
struct EpiFinMorphism {
  EpiFinObject src;
  EpiFinObject tgt;
  FinMap top;     // k -> m
  FinMap bottom;  // l -> n

  bool operator==(const EpiFinMorphism&) const = default;
};

// True iff the square commutes and the joint map is injective. Throws
// structural_error when the cardinalities of top/bottom do not line up with
// the objects (malformed data, distinct from a sound false).
bool validate_epifin_morphism(const EpiFinMorphism& m);

// Pastes two squares; requires f.tgt == g.src. The composite is validated
// before being returned (closure is checked at every use, never assumed).
EpiFinMorphism compose_epifin(const EpiFinMorphism& f, const EpiFinMorphism& g);

EpiFinMorphism identity_epifin(const EpiFinObject& x);

// All valid squares src -> tgt, ordered lexicographically by
// (top.values, bottom.values).
std::vector<EpiFinMorphism> enumerate_epifin_morphisms(const EpiFinObject& src,
                                                       const EpiFinObject& tgt);

// Full subcategory of objects with target cardinality exactly 1; the empty
// object 0 -> 0 does not qualify.
bool is_in_epifin_one(const EpiFinObject& x);

// Object: a chain of selfic surjections  k2 --fine_to_mid--> k1 --mid_to_coarse--> k0.
struct TriFinObject {
  FinMap fine_to_mid;    // k2 -> k1
  FinMap mid_to_coarse;  // k1 -> k0

  TriFinObject() = default;
  TriFinObject(FinMap fine, FinMap coarse);

  bool operator==(const TriFinObject&) const = default;
  auto operator<=>(const TriFinObject&) const = default;
};

// Morphism: three vertical maps level_maps[j]: k_j -> l_j (j = 0 coarse,
// 1 middle, 2 fine) such that both constituent squares are valid EpiFin
// morphisms.
struct TriFinMorphism {
  TriFinObject src;
  TriFinObject tgt;
  FinMap level_maps[3];

  bool operator==(const TriFinMorphism&) const = default;
};

bool validate_trifin_morphism(const TriFinMorphism& m);

// The two constituent squares: first the (k1 -> k0) square, then the
// (k2 -> k1) square. These are the actions of the two projection functors
// down to squares.
std::pair<EpiFinMorphism, EpiFinMorphism> trifin_source_target_functors(
    const TriFinMorphism& m);

// Underlying object in Fin of a chain: its finest cardinality k2.
int trifin_underlying_card(const TriFinObject& x);

// ---------------------------------------------------------------------------
// Table-category builders (deterministic object/morphism order).
// ---------------------------------------------------------------------------

// The category of all maps between {1..0},...,{1..max_card}.
struct BuiltFin {
  FiniteCategory cat;
  std::vector<int> object_card;  // object id -> cardinality (= id)
  std::vector<FinMap> arrows;    // morphism id -> map
  uint32_t find_arrow(const FinMap& f) const;
};
BuiltFin fin_category(int max_card);

// Squares category restricted to objects with source cardinality <= max_card
// (restrict_to_one: only objects with target cardinality 1).
struct BuiltEpiFin {
  FiniteCategory cat;
  std::vector<EpiFinObject> objects;
  std::vector<EpiFinMorphism> arrows;
  uint32_t find_object(const EpiFinObject& x) const;
  uint32_t find_arrow(const EpiFinMorphism& m) const;
};
BuiltEpiFin epifin_category(int max_source_card, bool restrict_to_one = false);

// Functors to Fin taking a square to its top / bottom arrow.
CatFunctor epifin_source_functor(const BuiltEpiFin& E, const BuiltFin& F);
CatFunctor epifin_target_functor(const BuiltEpiFin& E, const BuiltFin& F);

// Exhaustive category-law sweep over all squares between objects with
// source cardinality <= max_card, done blockwise without a composition
// table. Closure revalidates every pairwise composite as a square;
// identity checks both unit laws; associativity compares the two
// bracketings of every composable triple through precomputed per-block
// composite indices.
struct AxiomSweepReport {
  long long objects = 0;
  long long morphisms = 0;
  long long pairs = 0;        // composable pairs checked for closure
  long long triples = 0;      // composable triples checked for associativity
  long long violations = 0;
  std::string first_violation;
  bool completed = true;  // false when the budget expired mid-sweep
};
AxiomSweepReport epifin_axiom_sweep(int max_card, const Budget* budget = nullptr);

}  // namespace covcat

#endif
