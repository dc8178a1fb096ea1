#ifndef COVCAT_CONFCAT_HPP
#define COVCAT_CONFCAT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "covcat/epicat.hpp"
#include "covcat/finset.hpp"
#include "covcat/graphcov.hpp"
#include "covcat/outcome.hpp"
#include "covcat/scomb.hpp"

namespace covcat {

// Carrier graphs of configuration categories must be simple: a tick table
// stores vertex rows only, so "cross one edge" has to be unambiguous.

// points[i-1] is the vertex index occupied by point i.
using VertexTuple = std::vector<int>;

// Discrete homotopy: rows are time slices 0..length. Per tick every point
// stays or crosses one edge. Sticky: coincident points stay coincident.
struct TickTable {
  int points = 0;
  std::vector<VertexTuple> rows;

  int length() const { return static_cast<int>(rows.size()) - 1; }
  bool operator==(const TickTable&) const = default;
  auto operator<=>(const TickTable&) const = default;
};

bool legal_step(const Graph& G, const VertexTuple& from, const VertexTuple& to);
bool is_sticky(const TickTable& h);
bool legal_tick_table(const Graph& G, const TickTable& h);

// Flavor of a configuration-style category. The strict flavor keeps every
// tuple injective at every tick; the weak flavor admits colliding labels
// but homotopies stay sticky, so only the injectivity condition is
// relaxed. In the strict flavor stickiness is vacuous (nothing ever
// coincides); it is listed separately so the weak flavor states it.
struct ConfFlavor {
  bool injective = true;
  bool sticky = true;
};
inline constexpr ConfFlavor kStrictFlavor{true, true};
inline constexpr ConfFlavor kWeakFlavor{false, true};

// ---------------------------------------------------------------------------
// Configurations in one graph.
// ---------------------------------------------------------------------------

struct ConfObjectData {
  VertexTuple points;
};

// Morphism src -> tgt: relabeling u together with a tick table h whose first
// row is src.points and whose last row is tgt.points ∘ u. Identities are the
// length-0 tables. Composition concatenates; a composite longer than the
// tick budget is recorded as kOverflow in the category table.
struct ConfMorphismData {
  FinMap u;
  TickTable h;
};

struct BuiltConf {
  Graph carrier;
  ConfFlavor flavor;
  int max_points = 0;
  int tick_budget = 0;

  FiniteCategory cat;
  std::vector<ConfObjectData> objects;
  std::vector<ConfMorphismData> arrows;
  BuiltNerve nrv;

  uint32_t find_object(const VertexTuple& points) const;
  uint32_t find_arrow(uint32_t src, uint32_t tgt, const FinMap& u,
                      const TickTable& h) const;
};

// Enumerates all objects with at most max_points labels and all morphisms
// with length at most tick_budget; builds the nerve to `depth`. Closure of
// every stored composite and both unit laws are checked during
// construction; full law validation is exercised by the test suite on
// small instances.
BuiltConf build_conf(const Graph& G, ConfFlavor flavor, int max_points,
                     int tick_budget, int depth);

// Functor to Fin sending an object to its label count and a morphism to u.
CatFunctor conf_to_fin(const BuiltConf& C, const BuiltFin& F);

// Inclusion of the strict flavor into the weak one (same carrier, bounds).
CatFunctor conf_inclusion(const BuiltConf& strict, const BuiltConf& weak);

// Category of single-point walks: objects are the vertices, morphisms the
// walks of length <= tick_budget. Equals the one-point part of the strict
// flavor, without the empty configuration.
BuiltConf build_walk_category(const Graph& G, int tick_budget, int depth);

// Matched pairs: a configuration together with a label object whose target
// cardinality equals the configuration's label count, morphisms matching
// the relabeling map against the bottom of the square. Composition is
// componentwise; overflow follows the configuration side.
struct BuiltMatched {
  FiniteCategory cat;
  std::vector<std::pair<uint32_t, uint32_t>> objects;  // (conf ob, label ob)
  std::vector<std::pair<uint32_t, uint32_t>> arrows;
  BuiltNerve nrv;

  uint32_t find_object(uint32_t conf_ob, uint32_t label_ob) const;
  uint32_t find_arrow(uint32_t conf_mor, uint32_t label_mor) const;
};
BuiltMatched build_conf_times_epifin(const BuiltConf& C, const BuiltEpiFin& E,
                                     int depth);

// Projection functors of the matched category.
CatFunctor matched_to_conf(const BuiltMatched& Y);
CatFunctor matched_to_epifin(const BuiltMatched& Y);

// ---------------------------------------------------------------------------
// Configurations in a covering.
// ---------------------------------------------------------------------------

// Object: upstairs tuple, downstairs tuple, selfic p with
// proj ∘ up == down ∘ p. Strict flavor: both tuples injective (then p and
// down are recomputable from up). Weak flavor: arbitrary tuples subject to
// i -> (up(i), p(i)) being injective.
struct ConfPiObjectData {
  FinMap p;
  VertexTuple up;
  VertexTuple down;
};

// Morphism: a square (top, bottom) between the p's that validates in the
// squares category, plus a pair of tick tables of equal length with
// proj(up_h[t][i]) == down_h[t][p(i)] at every tick, every slice satisfying
// the object condition of the flavor.
struct ConfPiMorphismData {
  FinMap top;
  FinMap bottom;
  TickTable up_h;
  TickTable down_h;
};

struct BuiltConfPi {
  CoveringSpace cov;
  ConfFlavor flavor;
  int max_points = 0;  // bound on the upstairs cardinality
  int tick_budget = 0;

  FiniteCategory cat;
  std::vector<ConfPiObjectData> objects;
  std::vector<ConfPiMorphismData> arrows;
  BuiltNerve nrv;

  uint32_t find_object(const ConfPiObjectData& ob) const;
  uint32_t find_arrow(uint32_t src, uint32_t tgt,
                      const ConfPiMorphismData& m) const;
};

BuiltConfPi build_conf_pi(const CoveringSpace& cov, ConfFlavor flavor,
                          int max_points, int tick_budget, int depth);

// Recovers the unique strict object over an injective upstairs tuple: p is
// the selfic normalization of the downstairs incidence, down the induced
// injective tuple.
ConfPiObjectData strict_object_from_upstairs(const CoveringSpace& cov,
                                             const VertexTuple& up);

// Reference functors.
CatFunctor conf_pi_to_squares(const BuiltConfPi& P, const BuiltEpiFin& E);
CatFunctor conf_pi_to_upstairs(const BuiltConfPi& P, const BuiltConf& CE);
CatFunctor conf_pi_to_downstairs(const BuiltConfPi& P, const BuiltConf& CM);
CatFunctor conf_pi_inclusion(const BuiltConfPi& strict, const BuiltConfPi& weak);

// Comparison into the matched category: an object maps to its base
// configuration paired with its label object; a morphism to its base part
// paired with its square.
CatFunctor conf_pi_to_matched(const BuiltConfPi& P, const BuiltConf& CM,
                              const BuiltEpiFin& E, const BuiltMatched& Y);

// ---------------------------------------------------------------------------
// Stratum labels.
// ---------------------------------------------------------------------------

// Label of an injective tuple in the total space: the selfic normalization
// of coincidence downstairs.
EpiFinObject stratum_label(const CoveringSpace& cov, const VertexTuple& points);

// Label through a tower: nested coincidence at the middle and coarse
// stages, as a chain of selfic surjections.
TriFinObject stratum_label(const Tower& t, const VertexTuple& points);

struct StratumCensus {
  std::vector<std::pair<EpiFinObject, long long>> counts;  // sorted by label
  long long total = 0;
};
StratumCensus strata_census(const CoveringSpace& cov, int k);

struct TowerStratumCensus {
  std::vector<std::pair<TriFinObject, long long>> counts;
  long long total = 0;
};
TowerStratumCensus strata_census(const Tower& t, int k);

// All labels that could occur at cardinality k (for gap reporting).
std::vector<EpiFinObject> possible_labels(int k);
std::vector<TriFinObject> possible_tower_labels(int k);

// ---------------------------------------------------------------------------
// Local (anchored) variant.
// ---------------------------------------------------------------------------

// Level r: strings of r+1 composable morphisms whose ultimate target is a
// single point (p = id_1 in the covering case); operators are the
// restrictions of d_{i+1}, s_{i+1}. parent[r] gives the id in the source
// nerve at level r+1; anchor[r] the vertex of the ultimate target point.
struct LocSSet {
  TruncatedSSet sset;
  std::vector<std::vector<uint32_t>> parent;
  std::vector<std::vector<int>> anchor;
};

LocSSet build_conf_pi_loc(const BuiltConfPi& P, int r_max);
LocSSet build_conf_loc(const BuiltConf& C, int r_max);

// ---------------------------------------------------------------------------
// Configurations in a tower.
// ---------------------------------------------------------------------------

// Object: injective tuples pts[2] (fine), pts[1], pts[0] (coarse) joined by
// the selfic chain; everything below the fine level is recomputable.
struct ConfTowerObjectData {
  TriFinObject chain;
  VertexTuple pts[3];  // index 0 coarse .. 2 fine
};

// Morphism: three tick tables of one common length; level j >= 1 is the
// unique multi-path lift of level j-1 with the source tuple as initial
// datum. Triples whose lift misses the stored target are not morphisms.
struct ConfTowerMorphismData {
  FinMap u[3];
  TickTable h[3];
};

struct BuiltConfTower {
  Tower tower;
  int max_points = 0;  // bound on the fine cardinality
  int tick_budget = 0;

  FiniteCategory cat;
  std::vector<ConfTowerObjectData> objects;
  std::vector<ConfTowerMorphismData> arrows;
  BuiltNerve nrv;

  uint32_t find_object(const VertexTuple& fine_points) const;
};

BuiltConfTower build_conf_tower(const Tower& t, int max_points,
                                int tick_budget, int depth);

ConfTowerObjectData tower_object_from_fine(const Tower& t,
                                           const VertexTuple& fine);

// Multi-path lift: each point j of `start` follows the base path of its
// image under p; returns nothing if some step has no (or no unique)
// preimage ending, or if the lift is not a legal tick table.
std::optional<TickTable> lift_tick_table(const CoveringSpace& cov,
                                         const TickTable& base,
                                         const FinMap& p,
                                         const VertexTuple& start);

}  // namespace covcat

#endif
