// Configuration categories on graphs, coverings, and towers.
//
// Oracles at the top are independent of the builders: a direct
// (source, relabeling, table) morphism counter using inline step rules, a
// lazy-walk counter by matrix powers, stratum labels via union-find on
// downstairs coincidence, and a recursive tick-table lifter. Builder output
// is compared against all of them.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "covcat/confcat.hpp"
#include "covcat/epicat.hpp"
#include "covcat/finset.hpp"
#include "covcat/graphcov.hpp"
#include "covcat/scomb.hpp"

namespace {

using covcat::BuiltConf;
using covcat::BuiltConfPi;
using covcat::CoveringSpace;
using covcat::FinMap;
using covcat::Graph;
using covcat::TickTable;
using covcat::Tower;
using covcat::VertexTuple;

// Oracle: all injective tuples of k distinct vertices, by odometer.
std::vector<VertexTuple> oracle_injective_tuples(const Graph& G, int k) {
  std::vector<VertexTuple> out;
  VertexTuple cur(static_cast<size_t>(k));
  auto rec = [&](auto&& self, int i) -> void {
    if (i == k) {
      out.push_back(cur);
      return;
    }
    for (int v = 0; v < G.vertex_count(); ++v) {
      bool used = false;
      for (int j = 0; j < i; ++j) used = used || cur[static_cast<size_t>(j)] == v;
      if (used) continue;
      cur[static_cast<size_t>(i)] = v;
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  return out;
}

// Oracle: per tick each point stays or crosses one edge; in the strict
// reading every slice stays injective. Written against adjacency directly.
bool oracle_strict_step(const Graph& G, const VertexTuple& a, const VertexTuple& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    bool adjacent = false;
    for (const Graph::Edge& e : G.edges) {
      adjacent = adjacent || (e.u == a[i] && e.v == b[i]) || (e.v == a[i] && e.u == b[i]);
    }
    if (!adjacent) return false;
  }
  std::set<int> distinct(b.begin(), b.end());
  return distinct.size() == b.size();
}

// Oracle: number of strict configuration morphisms with at most max_points
// labels and table length at most T. A morphism is a legal table h from a
// source tuple plus a choice of target tuple whose value set contains the
// final row (the relabeling is then forced by injectivity).
long long oracle_strict_conf_morphisms(const Graph& G, int max_points, int T) {
  std::vector<VertexTuple> all_tuples;
  for (int k = 0; k <= max_points; ++k) {
    for (const VertexTuple& t : oracle_injective_tuples(G, k)) all_tuples.push_back(t);
  }
  long long count = 0;
  for (const VertexTuple& src : all_tuples) {
    std::vector<VertexTuple> rows{src};
    auto count_targets = [&]() {
      const VertexTuple& fin = rows.back();
      std::set<int> fin_set(fin.begin(), fin.end());
      for (const VertexTuple& tgt : all_tuples) {
        std::set<int> tgt_set(tgt.begin(), tgt.end());
        bool contains = std::includes(tgt_set.begin(), tgt_set.end(), fin_set.begin(),
                                      fin_set.end());
        if (contains) ++count;
      }
    };
    auto rec = [&](auto&& self, int left) -> void {
      count_targets();
      if (left == 0) return;
      // enumerate all successor rows of the last row
      std::vector<VertexTuple> nexts{rows.back()};
      for (size_t i = 0; i < src.size(); ++i) {
        std::vector<VertexTuple> grown;
        for (const VertexTuple& partial : nexts) {
          VertexTuple stay = partial;
          grown.push_back(stay);
          for (const Graph::Edge& e : G.edges) {
            int at = rows.back()[i];
            if (e.u == at || e.v == at) {
              VertexTuple moved = partial;
              moved[i] = (e.u == at) ? e.v : e.u;
              grown.push_back(moved);
            }
          }
        }
        nexts = grown;
      }
      std::sort(nexts.begin(), nexts.end());
      nexts.erase(std::unique(nexts.begin(), nexts.end()), nexts.end());
      for (const VertexTuple& nxt : nexts) {
        if (!oracle_strict_step(G, rows.back(), nxt)) continue;
        rows.push_back(nxt);
        self(self, left - 1);
        rows.pop_back();
      }
    };
    rec(rec, T);
  }
  return count;
}

// Oracle: lazy walks (stay or cross) of length exactly t, counted through
// powers of adjacency-plus-identity, summed over all endpoints.
long long oracle_lazy_walks(const Graph& G, int T) {
  int n = G.vertex_count();
  std::vector<std::vector<long long>> step(
      static_cast<size_t>(n), std::vector<long long>(static_cast<size_t>(n), 0));
  for (int i = 0; i < n; ++i) step[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1;
  for (const Graph::Edge& e : G.edges) {
    step[static_cast<size_t>(e.u)][static_cast<size_t>(e.v)] += 1;
    step[static_cast<size_t>(e.v)][static_cast<size_t>(e.u)] += 1;
  }
  std::vector<std::vector<long long>> acc = step;
  long long total = n;  // length-0 walks
  for (int t = 1; t <= T; ++t) {
    if (t > 1) {
      std::vector<std::vector<long long>> nxt(
          static_cast<size_t>(n), std::vector<long long>(static_cast<size_t>(n), 0));
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            nxt[static_cast<size_t>(i)][static_cast<size_t>(j)] +=
                acc[static_cast<size_t>(i)][static_cast<size_t>(k)] *
                step[static_cast<size_t>(k)][static_cast<size_t>(j)];
          }
        }
      }
      acc = nxt;
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        total += acc[static_cast<size_t>(i)][static_cast<size_t>(j)];
      }
    }
  }
  return total;
}

// Oracle: stratum label of an injective total tuple by union-find over
// downstairs coincidence, blocks ordered by least member.
covcat::EpiFinObject oracle_stratum_label(const CoveringSpace& cov,
                                          const VertexTuple& points) {
  int k = static_cast<int>(points.size());
  std::vector<int> parent(static_cast<size_t>(k));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)];
    return x;
  };
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      int zi = cov.proj.vertex_map[static_cast<size_t>(points[static_cast<size_t>(i)])];
      int zj = cov.proj.vertex_map[static_cast<size_t>(points[static_cast<size_t>(j)])];
      if (zi == zj) {
        int a = find(i), b = find(j);
        if (a != b) parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
      }
    }
  }
  // name blocks in order of first appearance
  std::map<int, int> block_of_root;
  std::vector<int> values;
  for (int i = 0; i < k; ++i) {
    int r = find(i);
    auto it = block_of_root.find(r);
    if (it == block_of_root.end()) {
      int fresh = static_cast<int>(block_of_root.size()) + 1;
      block_of_root[r] = fresh;
      values.push_back(fresh);
    } else {
      values.push_back(it->second);
    }
  }
  return covcat::EpiFinObject{
      FinMap(k, static_cast<int>(block_of_root.size()), values)};
}

// Oracle: tick-table lift by recursion over ticks and points, trying every
// candidate vertex over the required base vertex.
int oracle_count_lifts(const CoveringSpace& cov, const TickTable& base,
                       const FinMap& p, const VertexTuple& start,
                       TickTable* out) {
  TickTable work;
  work.points = static_cast<int>(start.size());
  work.rows = {start};
  int found = 0;
  auto rec = [&](auto&& self, size_t tick) -> void {
    if (tick + 1 >= base.rows.size()) {
      if (covcat::legal_tick_table(cov.total, work)) {
        ++found;
        if (out != nullptr) *out = work;
      }
      return;
    }
    const VertexTuple cur = work.rows.back();  // copy, recursion reallocates
    VertexTuple next(cur.size());
    auto pick = [&](auto&& inner, size_t i) -> void {
      if (i == cur.size()) {
        work.rows.push_back(next);
        self(self, tick + 1);
        work.rows.pop_back();
        return;
      }
      int need = base.rows[tick + 1][static_cast<size_t>(p(static_cast<int>(i) + 1)) - 1];
      std::vector<int> candidates{cur[i]};
      for (const Graph::Edge& e : cov.total.edges) {
        if (e.u == cur[i]) candidates.push_back(e.v);
        if (e.v == cur[i]) candidates.push_back(e.u);
      }
      for (int c : candidates) {
        if (cov.proj.vertex_map[static_cast<size_t>(c)] != need) continue;
        next[i] = c;
        inner(inner, i + 1);
      }
    };
    pick(pick, 0);
  };
  rec(rec, 0);
  return found;
}

}  // namespace

TEST_CASE("step and table legality") {
  Graph c3 = covcat::cycle_graph(3);
  CHECK(covcat::legal_step(c3, {0, 1}, {0, 1}));
  CHECK(covcat::legal_step(c3, {0, 1}, {1, 2}));
  CHECK_FALSE(covcat::legal_step(c3, {0}, {0, 1}));

  TickTable h;
  h.points = 2;
  h.rows = {{0, 1}, {1, 1}};
  CHECK(covcat::is_sticky(h));  // separate points may merge
  h.rows = {{1, 1}, {1, 2}};
  CHECK_FALSE(covcat::is_sticky(h));  // coincident points may not split
  h.rows = {{1, 1}, {2, 2}};
  CHECK(covcat::is_sticky(h));
  CHECK(covcat::legal_tick_table(c3, h));

  TickTable jump;
  jump.points = 1;
  jump.rows = {{0}, {0}};
  Graph p3 = covcat::path_graph(3);
  CHECK(covcat::legal_tick_table(p3, jump));
  jump.rows = {{0}, {2}};  // not adjacent in the path
  CHECK_FALSE(covcat::legal_tick_table(p3, jump));

  // agreement with the oracle's step rule on all strict pairs
  for (const VertexTuple& a : oracle_injective_tuples(c3, 2)) {
    for (const VertexTuple& b : oracle_injective_tuples(c3, 2)) {
      CHECK(covcat::legal_step(c3, a, b) == oracle_strict_step(c3, a, b));
    }
  }
}

TEST_CASE("strict configuration category on a triangle, frozen counts") {
  Graph c3 = covcat::cycle_graph(3);
  BuiltConf S = covcat::build_conf(c3, covcat::kStrictFlavor, 2, 2, 2);
  CHECK(S.objects.size() == 10);  // empty, 3 singles, 6 ordered pairs
  CHECK(S.arrows.size() == 741);
  CHECK(S.nrv.sset.size(0) == 10);
  CHECK(S.nrv.sset.size(1) == 741);
  CHECK(S.nrv.sset.size(2) == 6108);
  CHECK_NOTHROW(covcat::validate_category(S.cat));
  covcat::validate_sset(S.nrv.sset);

  CHECK(oracle_strict_conf_morphisms(c3, 2, 2) == 741);

  // nerve level 2 counts exactly the pairs whose composite is stored
  long long pairs = 0;
  for (uint32_t f = 0; f < S.arrows.size(); ++f) {
    for (uint32_t g = 0; g < S.arrows.size(); ++g) {
      if (S.cat.tgt(f) != S.cat.src(g)) continue;
      if (S.cat.compose(f, g) != covcat::FiniteCategory::kOverflow) ++pairs;
    }
  }
  CHECK(pairs == 6108);

  // overflow happens exactly when the concatenated length exceeds the budget
  for (uint32_t f = 0; f < S.arrows.size(); ++f) {
    for (uint32_t g = 0; g < S.arrows.size(); ++g) {
      if (S.cat.tgt(f) != S.cat.src(g)) continue;
      bool fits = S.arrows[f].h.length() + S.arrows[g].h.length() <= S.tick_budget;
      CHECK((S.cat.compose(f, g) != covcat::FiniteCategory::kOverflow) == fits);
    }
  }

  for (uint32_t i = 0; i < S.objects.size(); ++i) {
    CHECK(S.find_object(S.objects[i].points) == i);
  }
  for (uint32_t m = 0; m < S.arrows.size(); ++m) {
    CHECK(S.find_arrow(S.cat.src(m), S.cat.tgt(m), S.arrows[m].u, S.arrows[m].h) == m);
  }

  // morphism shape: first row is the source, last row is target after
  // relabeling, and every row is an injective legal step away
  for (uint32_t m = 0; m < S.arrows.size(); ++m) {
    const covcat::ConfMorphismData& d = S.arrows[m];
    const VertexTuple& src = S.objects[S.cat.src(m)].points;
    const VertexTuple& tgt = S.objects[S.cat.tgt(m)].points;
    CHECK(d.h.rows.front() == src);
    VertexTuple relabeled(src.size());
    for (size_t i = 0; i < src.size(); ++i) {
      relabeled[i] = tgt[static_cast<size_t>(d.u(static_cast<int>(i) + 1)) - 1];
    }
    CHECK(d.h.rows.back() == relabeled);
    for (size_t r = 0; r + 1 < d.h.rows.size(); ++r) {
      CHECK(oracle_strict_step(S.carrier, d.h.rows[r], d.h.rows[r + 1]));
    }
  }
}

TEST_CASE("small strict categories match the independent morphism counter") {
  CHECK(oracle_strict_conf_morphisms(covcat::path_graph(3), 1, 1) == 18);
  BuiltConf P = covcat::build_conf(covcat::path_graph(3), covcat::kStrictFlavor, 1, 1, 2);
  CHECK(P.objects.size() == 4);
  CHECK(P.arrows.size() == 18);

  BuiltConf single =
      covcat::build_conf(covcat::single_vertex_graph(), covcat::kStrictFlavor, 1, 2, 2);
  CHECK(single.objects.size() == 2);
  CHECK(single.arrows.size() == 9);
  CHECK(oracle_strict_conf_morphisms(covcat::single_vertex_graph(), 1, 2) == 9);
  // with no edges every table row repeats the source
  for (const covcat::ConfMorphismData& m : single.arrows) {
    for (const VertexTuple& row : m.h.rows) CHECK(row == m.h.rows.front());
  }
}

TEST_CASE("weak flavor admits collisions but stays sticky") {
  Graph c3 = covcat::cycle_graph(3);
  BuiltConf W = covcat::build_conf(c3, covcat::kWeakFlavor, 2, 2, 2);
  CHECK(W.objects.size() == 13);  // 10 injective tuples plus 3 diagonals
  CHECK(W.arrows.size() == 2799);
  CHECK_NOTHROW(covcat::validate_category(W.cat));
  for (const covcat::ConfMorphismData& m : W.arrows) {
    CHECK(covcat::is_sticky(m.h));
    CHECK(covcat::legal_tick_table(c3, m.h));
  }

  BuiltConf S = covcat::build_conf(c3, covcat::kStrictFlavor, 2, 2, 2);
  covcat::CatFunctor inc = covcat::conf_inclusion(S, W);
  CHECK_NOTHROW(covcat::validate_functor(S.cat, W.cat, inc));
  // inclusion is injective on objects and morphisms
  std::set<uint32_t> ob_images(inc.ob_map.begin(), inc.ob_map.end());
  CHECK(ob_images.size() == S.objects.size());
  std::set<uint32_t> mor_images(inc.mor_map.begin(), inc.mor_map.end());
  CHECK(mor_images.size() == S.arrows.size());
}

TEST_CASE("label-count functor to Fin") {
  Graph c3 = covcat::cycle_graph(3);
  BuiltConf S = covcat::build_conf(c3, covcat::kStrictFlavor, 2, 2, 2);
  covcat::BuiltFin F = covcat::fin_category(2);
  covcat::CatFunctor to_fin = covcat::conf_to_fin(S, F);
  CHECK_NOTHROW(covcat::validate_functor(S.cat, F.cat, to_fin));
  for (uint32_t ob = 0; ob < S.objects.size(); ++ob) {
    CHECK(F.object_card[to_fin.ob_map[ob]] ==
          static_cast<int>(S.objects[ob].points.size()));
  }
  for (uint32_t m = 0; m < S.arrows.size(); ++m) {
    CHECK(F.arrows[to_fin.mor_map[m]] == S.arrows[m].u);
  }
}

TEST_CASE("walk category equals lazy walk counting") {
  Graph p3 = covcat::path_graph(3);
  BuiltConf W = covcat::build_walk_category(p3, 1, 2);
  CHECK(W.objects.size() == 3);
  CHECK(W.arrows.size() == 10);
  CHECK(oracle_lazy_walks(p3, 1) == 10);
  int moves = 0;
  for (const covcat::ConfMorphismData& m : W.arrows) {
    if (m.h.length() == 1 && m.h.rows[0] != m.h.rows[1]) ++moves;
  }
  CHECK(moves == 4);  // frozen: one move per dart of the path

  Graph c3 = covcat::cycle_graph(3);
  BuiltConf W3 = covcat::build_walk_category(c3, 2, 2);
  CHECK(static_cast<long long>(W3.arrows.size()) == oracle_lazy_walks(c3, 2));
  CHECK_NOTHROW(covcat::validate_category(W3.cat));

  // agreement with the one-point strict part: same number of single-point
  // objects and morphisms between them
  BuiltConf S1 = covcat::build_conf(c3, covcat::kStrictFlavor, 1, 2, 2);
  CHECK(S1.objects.size() == W3.objects.size() + 1);  // strict adds the empty object
  long long nonempty = 0;
  for (uint32_t m = 0; m < S1.arrows.size(); ++m) {
    if (!S1.objects[S1.cat.src(m)].points.empty()) ++nonempty;
  }
  CHECK(nonempty == static_cast<long long>(W3.arrows.size()));
}

TEST_CASE("matched pairs category, frozen counts and projections") {
  Graph c3 = covcat::cycle_graph(3);
  BuiltConf S = covcat::build_conf(c3, covcat::kStrictFlavor, 2, 2, 2);
  covcat::BuiltEpiFin E = covcat::epifin_category(2);
  covcat::BuiltMatched Y = covcat::build_conf_times_epifin(S, E, 2);
  CHECK(Y.objects.size() == 13);
  CHECK(Y.arrows.size() == 906);
  CHECK_NOTHROW(covcat::validate_category(Y.cat));

  // object matching: the label object's target cardinality is the label count
  long long expected_obs = 0;
  for (const covcat::ConfObjectData& c : S.objects) {
    for (const covcat::EpiFinObject& e : E.objects) {
      if (e.p.target_card == static_cast<int>(c.points.size())) ++expected_obs;
    }
  }
  CHECK(expected_obs == static_cast<long long>(Y.objects.size()));

  // morphism matching: endpoints pair up by label count and the square's
  // bottom is the relabeling map
  long long expected_arrows = 0;
  for (uint32_t cm = 0; cm < S.arrows.size(); ++cm) {
    size_t src_pts = S.objects[S.cat.src(cm)].points.size();
    size_t tgt_pts = S.objects[S.cat.tgt(cm)].points.size();
    for (uint32_t em = 0; em < E.arrows.size(); ++em) {
      if (E.arrows[em].src.p.target_card != static_cast<int>(src_pts)) continue;
      if (E.arrows[em].tgt.p.target_card != static_cast<int>(tgt_pts)) continue;
      if (E.arrows[em].bottom == S.arrows[cm].u) ++expected_arrows;
    }
  }
  CHECK(expected_arrows == static_cast<long long>(Y.arrows.size()));
  for (const auto& [cm, em] : Y.arrows) {
    CHECK(E.arrows[em].bottom == S.arrows[cm].u);
  }

  covcat::CatFunctor pc = covcat::matched_to_conf(Y);
  covcat::CatFunctor pe = covcat::matched_to_epifin(Y);
  CHECK_NOTHROW(covcat::validate_functor(Y.cat, S.cat, pc));
  CHECK_NOTHROW(covcat::validate_functor(Y.cat, E.cat, pe));
}

TEST_CASE("covering configuration category, frozen counts and morphism shape") {
  CoveringSpace cov = covcat::cyclic_cover(6, 3);
  BuiltConfPi P = covcat::build_conf_pi(cov, covcat::kStrictFlavor, 2, 2, 2);
  CHECK(P.objects.size() == 37);  // 1 empty + 6 singles + 30 ordered pairs
  CHECK(P.arrows.size() == 3189);
  CHECK_NOTHROW(covcat::validate_category(P.cat));
  covcat::validate_sset(P.nrv.sset);

  for (uint32_t i = 0; i < P.objects.size(); ++i) {
    const covcat::ConfPiObjectData& ob = P.objects[i];
    // strict objects are recomputable from the upstairs tuple alone
    covcat::ConfPiObjectData again = covcat::strict_object_from_upstairs(cov, ob.up);
    CHECK(again.p == ob.p);
    CHECK(again.up == ob.up);
    CHECK(again.down == ob.down);
    CHECK(P.find_object(ob) == i);
    // projection compatibility of the object data
    for (size_t j = 0; j < ob.up.size(); ++j) {
      CHECK(cov.proj.vertex_map[static_cast<size_t>(ob.up[j])] ==
            ob.down[static_cast<size_t>(ob.p(static_cast<int>(j) + 1)) - 1]);
    }
  }

  for (uint32_t m = 0; m < P.arrows.size(); ++m) {
    const covcat::ConfPiMorphismData& d = P.arrows[m];
    const covcat::ConfPiObjectData& src = P.objects[P.cat.src(m)];
    const covcat::ConfPiObjectData& tgt = P.objects[P.cat.tgt(m)];
    covcat::EpiFinMorphism square{covcat::EpiFinObject{src.p},
                                  covcat::EpiFinObject{tgt.p}, d.top, d.bottom};
    CHECK(covcat::validate_epifin_morphism(square));
    REQUIRE(d.up_h.rows.size() == d.down_h.rows.size());
    CHECK(d.up_h.rows.front() == src.up);
    CHECK(d.down_h.rows.front() == src.down);
    for (size_t t = 0; t < d.up_h.rows.size(); ++t) {
      for (size_t i = 0; i < d.up_h.rows[t].size(); ++i) {
        CHECK(cov.proj.vertex_map[static_cast<size_t>(d.up_h.rows[t][i])] ==
              d.down_h.rows[t][static_cast<size_t>(src.p(static_cast<int>(i) + 1)) - 1]);
      }
    }
    // upstairs rows stay injective in the strict flavor
    for (const VertexTuple& row : d.up_h.rows) {
      std::set<int> s(row.begin(), row.end());
      CHECK(s.size() == row.size());
    }
    // the upstairs table is the forced lift of the downstairs one
    std::optional<TickTable> lifted =
        covcat::lift_tick_table(cov, d.down_h, src.p, src.up);
    REQUIRE(lifted.has_value());
    CHECK(*lifted == d.up_h);
  }
}

TEST_CASE("reference functors out of the covering configuration category") {
  CoveringSpace cov = covcat::cyclic_cover(6, 3);
  BuiltConfPi P = covcat::build_conf_pi(cov, covcat::kStrictFlavor, 2, 2, 2);
  BuiltConfPi Pw = covcat::build_conf_pi(cov, covcat::kWeakFlavor, 2, 2, 2);
  BuiltConf CM = covcat::build_conf(cov.base, covcat::kStrictFlavor, 2, 2, 2);
  BuiltConf CE = covcat::build_conf(cov.total, covcat::kStrictFlavor, 2, 2, 2);
  covcat::BuiltEpiFin E = covcat::epifin_category(2);
  covcat::BuiltFin F = covcat::fin_category(2);

  CHECK_NOTHROW(covcat::validate_functor(P.cat, E.cat, covcat::conf_pi_to_squares(P, E)));
  CHECK_NOTHROW(
      covcat::validate_functor(P.cat, CE.cat, covcat::conf_pi_to_upstairs(P, CE)));
  CHECK_NOTHROW(
      covcat::validate_functor(P.cat, CM.cat, covcat::conf_pi_to_downstairs(P, CM)));
  CHECK_NOTHROW(
      covcat::validate_functor(P.cat, Pw.cat, covcat::conf_pi_inclusion(P, Pw)));

  covcat::BuiltMatched Y = covcat::build_conf_times_epifin(CM, E, 2);
  covcat::CatFunctor cmp = covcat::conf_pi_to_matched(P, CM, E, Y);
  CHECK_NOTHROW(covcat::validate_functor(P.cat, Y.cat, cmp));

  // the matched image projects back to the downstairs functor
  covcat::CatFunctor down = covcat::conf_pi_to_downstairs(P, CM);
  covcat::CatFunctor pc = covcat::matched_to_conf(Y);
  for (uint32_t ob = 0; ob < P.objects.size(); ++ob) {
    CHECK(pc.ob_map[cmp.ob_map[ob]] == down.ob_map[ob]);
  }
  for (uint32_t m = 0; m < P.arrows.size(); ++m) {
    CHECK(pc.mor_map[cmp.mor_map[m]] == down.mor_map[m]);
  }
  (void)F;
}

TEST_CASE("stratum labels agree with union-find coincidence") {
  for (auto [total_n, base_n] : std::vector<std::pair<int, int>>{{6, 3}, {12, 3}}) {
    CoveringSpace cov = covcat::cyclic_cover(total_n, base_n);
    for (int k = 0; k <= 3; ++k) {
      std::map<FinMap, long long> recount;
      for (const VertexTuple& t : oracle_injective_tuples(cov.total, k)) {
        covcat::EpiFinObject expect = oracle_stratum_label(cov, t);
        covcat::EpiFinObject got = covcat::stratum_label(cov, t);
        CHECK(got == expect);
        ++recount[got.p];
      }
      covcat::StratumCensus census = covcat::strata_census(cov, k);
      REQUIRE(census.counts.size() == recount.size());
      long long total = 0;
      for (const auto& [label, count] : census.counts) {
        CHECK(recount[label.p] == count);
        total += count;
      }
      CHECK(census.total == total);
      CHECK(std::is_sorted(census.counts.begin(), census.counts.end(),
                           [](const auto& a, const auto& b) { return a.first < b.first; }));
    }
  }

  // frozen censuses at two points
  covcat::StratumCensus c6 = covcat::strata_census(covcat::cyclic_cover(6, 3), 2);
  REQUIRE(c6.counts.size() == 2);
  CHECK(c6.counts[0].first.p == FinMap(2, 1, {1, 1}));
  CHECK(c6.counts[0].second == 6);
  CHECK(c6.counts[1].first.p == FinMap(2, 2, {1, 2}));
  CHECK(c6.counts[1].second == 24);
  CHECK(c6.total == 30);

  covcat::StratumCensus c12 = covcat::strata_census(covcat::cyclic_cover(12, 3), 2);
  REQUIRE(c12.counts.size() == 2);
  CHECK(c12.counts[0].second == 36);
  CHECK(c12.counts[1].second == 96);
  CHECK(c12.total == 132);

  // every possible label occurs in the twelve over three cover at k = 2
  std::vector<covcat::EpiFinObject> possible = covcat::possible_labels(2);
  CHECK(possible.size() == 2);
  CHECK(covcat::possible_labels(3).size() == 5);
}

TEST_CASE("tower labels and census") {
  Tower t = covcat::build_cyclic_tower(3);
  REQUIRE(covcat::validate_tower(t));

  for (int k = 0; k <= 2; ++k) {
    std::map<std::pair<FinMap, FinMap>, long long> recount;
    for (const VertexTuple& fine : oracle_injective_tuples(t.fine.total, k)) {
      // chain the two union-find labels: fine stage first, then the
      // residual coincidence of the middle stage tuple
      covcat::EpiFinObject fine_label = oracle_stratum_label(t.fine, fine);
      covcat::TriFinObject got = covcat::stratum_label(t, fine);
      CHECK(got.fine_to_mid == fine_label.p);
      // the middle tuple consists of middle-stage vertices of block leaders
      VertexTuple mid(static_cast<size_t>(fine_label.p.target_card));
      for (int i = static_cast<int>(fine.size()); i >= 1; --i) {
        mid[static_cast<size_t>(fine_label.p(i)) - 1] = t.fine.proj.vertex_map
            [static_cast<size_t>(fine[static_cast<size_t>(i) - 1])];
      }
      covcat::EpiFinObject mid_label = oracle_stratum_label(t.coarse, mid);
      CHECK(got.mid_to_coarse == mid_label.p);
      ++recount[{got.fine_to_mid, got.mid_to_coarse}];
    }
    covcat::TowerStratumCensus census = covcat::strata_census(t, k);
    REQUIRE(census.counts.size() == recount.size());
    for (const auto& [label, count] : census.counts) {
      CHECK(recount[{label.fine_to_mid, label.mid_to_coarse}] == count);
    }
  }

  covcat::TowerStratumCensus k2 = covcat::strata_census(t, 2);
  REQUIRE(k2.counts.size() == 3);
  CHECK(k2.counts[0].first == covcat::TriFinObject(FinMap(2, 1, {1, 1}), FinMap::identity(1)));
  CHECK(k2.counts[0].second == 12);
  CHECK(k2.counts[1].first == covcat::TriFinObject(FinMap::identity(2), FinMap(2, 1, {1, 1})));
  CHECK(k2.counts[1].second == 24);
  CHECK(k2.counts[2].first == covcat::TriFinObject(FinMap::identity(2), FinMap::identity(2)));
  CHECK(k2.counts[2].second == 96);
  CHECK(k2.total == 132);

  CHECK(covcat::possible_tower_labels(2).size() == 3);
}

TEST_CASE("tick-table lifting matches the recursive oracle") {
  CoveringSpace cov = covcat::cyclic_cover(6, 3);
  // all one and two point strict downstairs tables of length <= 2
  BuiltConf CM = covcat::build_conf(cov.base, covcat::kStrictFlavor, 2, 2, 0);
  auto fib = covcat::fibers(cov);
  long long tables = 0;
  for (const covcat::ConfMorphismData& m : CM.arrows) {
    const TickTable& base = m.h;
    if (base.points == 0) continue;
    FinMap p = FinMap::identity(base.points);
    // starts: all injective upstairs tuples over the first row
    std::vector<VertexTuple> starts;
    VertexTuple cur(static_cast<size_t>(base.points));
    auto rec = [&](auto&& self, int i) -> void {
      if (i == base.points) {
        starts.push_back(cur);
        return;
      }
      for (int v : fib[static_cast<size_t>(base.rows[0][static_cast<size_t>(i)])]) {
        bool used = false;
        for (int j = 0; j < i; ++j) used = used || cur[static_cast<size_t>(j)] == v;
        if (!used) {
          cur[static_cast<size_t>(i)] = v;
          self(self, i + 1);
        }
      }
    };
    rec(rec, 0);
    for (const VertexTuple& start : starts) {
      TickTable expect_table;
      int n = oracle_count_lifts(cov, base, p, start, &expect_table);
      CHECK(n == 1);  // lifting is unique from first principles
      std::optional<TickTable> got = covcat::lift_tick_table(cov, base, p, start);
      REQUIRE(got.has_value());
      CHECK(*got == expect_table);
      ++tables;
    }
  }
  CHECK(tables > 100);
}

TEST_CASE("anchored variant keeps only strings ending at one point") {
  CoveringSpace cov = covcat::cyclic_cover(6, 3);
  BuiltConfPi P = covcat::build_conf_pi(cov, covcat::kStrictFlavor, 2, 2, 3);
  covcat::LocSSet L = covcat::build_conf_pi_loc(P, 2);
  covcat::validate_sset(L.sset);
  CHECK(L.sset.size(0) == 96);
  CHECK(L.sset.size(1) == 348);
  CHECK(L.sset.size(2) == 840);

  for (int r = 0; r <= 2; ++r) {
    std::vector<uint32_t> ult = covcat::ultimate_target_table(P.nrv.sset, r + 1);
    // parents are exactly the strings of length r+1 with one point at the end
    std::set<uint32_t> parents(L.parent[static_cast<size_t>(r)].begin(),
                               L.parent[static_cast<size_t>(r)].end());
    CHECK(parents.size() == L.sset.size(r));
    for (uint32_t s = 0; s < P.nrv.sset.size(r + 1); ++s) {
      bool anchored = P.objects[ult[s]].up.size() == 1;
      CHECK(parents.count(s) == static_cast<size_t>(anchored));
    }
    // anchor records the single point's vertex
    for (uint32_t c = 0; c < L.sset.size(r); ++c) {
      uint32_t par = L.parent[static_cast<size_t>(r)][c];
      CHECK(L.anchor[static_cast<size_t>(r)][c] == P.objects[ult[par]].up[0]);
    }
  }

  BuiltConf S3 = covcat::build_conf(covcat::cycle_graph(3), covcat::kStrictFlavor, 2, 2, 3);
  covcat::LocSSet LC = covcat::build_conf_loc(S3, 2);
  covcat::validate_sset(LC.sset);
  CHECK(LC.sset.size(0) == 48);
  CHECK(LC.sset.size(1) == 174);
  CHECK(LC.sset.size(2) == 420);

  // a nerve too shallow for the requested level count is rejected
  BuiltConfPi shallow = covcat::build_conf_pi(cov, covcat::kStrictFlavor, 2, 2, 2);
  CHECK_THROWS_AS(covcat::build_conf_pi_loc(shallow, 2), covcat::structural_error);
}

TEST_CASE("tower configuration category") {
  Tower t = covcat::build_cyclic_tower(3);
  covcat::BuiltConfTower T = covcat::build_conf_tower(t, 2, 1, 2);
  CHECK(T.objects.size() == 145);  // 1 empty + 12 singles + 132 ordered pairs
  CHECK(T.arrows.size() == 3026);
  CHECK_NOTHROW(covcat::validate_category(T.cat));

  for (uint32_t i = 0; i < T.objects.size(); ++i) {
    const covcat::ConfTowerObjectData& ob = T.objects[i];
    covcat::ConfTowerObjectData again = covcat::tower_object_from_fine(t, ob.pts[2]);
    CHECK(again.chain == ob.chain);
    CHECK(again.pts[0] == ob.pts[0]);
    CHECK(again.pts[1] == ob.pts[1]);
    CHECK(T.find_object(ob.pts[2]) == i);
    CHECK(ob.chain == covcat::stratum_label(t, ob.pts[2]));
  }

  // each morphism's upper tables are the forced lifts of the one below
  for (uint32_t m = 0; m < T.arrows.size(); ++m) {
    const covcat::ConfTowerMorphismData& d = T.arrows[m];
    const covcat::ConfTowerObjectData& src = T.objects[T.cat.src(m)];
    std::optional<TickTable> mid =
        covcat::lift_tick_table(t.coarse, d.h[0], src.chain.mid_to_coarse, src.pts[1]);
    REQUIRE(mid.has_value());
    CHECK(*mid == d.h[1]);
    std::optional<TickTable> fine =
        covcat::lift_tick_table(t.fine, d.h[1], src.chain.fine_to_mid, src.pts[2]);
    REQUIRE(fine.has_value());
    CHECK(*fine == d.h[2]);
  }
}
