#include "covcat/checks.hpp"

#include <algorithm>
#include <map>
#include <thread>

#include "covcat/confcat.hpp"
#include "covcat/epicat.hpp"
#include "covcat/scomb.hpp"
#include "covcat_registry_data.hpp"
#include "json.hpp"

namespace covcat {

namespace {

int iclamp(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }

std::string ll_str(long long v) { return std::to_string(v); }

std::vector<std::vector<int>> neighbor_lists(const Graph& G) {
  std::vector<std::vector<int>> nbrs(static_cast<size_t>(G.vertex_count()));
  for (const auto& e : G.edges) {
    nbrs[static_cast<size_t>(e.u)].push_back(e.v);
    nbrs[static_cast<size_t>(e.v)].push_back(e.u);
  }
  for (auto& list : nbrs) std::sort(list.begin(), list.end());
  return nbrs;
}

template <typename F>
void each_tuple(int num_vertices, int k, F&& f) {
  if (k == 0) {
    VertexTuple empty;
    f(empty);
    return;
  }
  if (num_vertices == 0) return;
  VertexTuple t(static_cast<size_t>(k), 0);
  while (true) {
    f(t);
    int i = k - 1;
    while (i >= 0 && t[static_cast<size_t>(i)] == num_vertices - 1) {
      t[static_cast<size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
    ++t[static_cast<size_t>(i)];
  }
}

bool tuple_injective(const VertexTuple& t) {
  for (size_t i = 0; i < t.size(); ++i)
    for (size_t j = i + 1; j < t.size(); ++j)
      if (t[i] == t[j]) return false;
  return true;
}

std::string tuple_text(const Graph& G, const VertexTuple& t) {
  std::string out = "(";
  for (size_t i = 0; i < t.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(G.vertex_ids[static_cast<size_t>(t[i])]);
  }
  return out + ")";
}

// ---------------------------------------------------------------------------
// prop-3.2
// ---------------------------------------------------------------------------

// Locates the idx-th nondegenerate simplex at `level` and removes it.
TruncatedSSet drop_nondegenerate(const TruncatedSSet& X, int level, int index,
                                 std::vector<std::vector<uint32_t>>* trans) {
  if (level < 0 || level > X.max_dim)
    throw structural_error("mutation: level out of range");
  if (index < 0) throw structural_error("mutation: negative index");
  uint32_t id = kRemoved;
  if (level == 0) {
    if (static_cast<uint32_t>(index) >= X.size(0))
      throw structural_error("mutation: index out of range");
    id = static_cast<uint32_t>(index);
  } else {
    auto degen_ids = latching_degeneracy_union(X, level);
    int seen = 0;
    for (uint32_t s = 0; s < X.size(level); ++s) {
      if (std::binary_search(degen_ids.begin(), degen_ids.end(), s)) continue;
      if (seen == index) {
        id = s;
        break;
      }
      ++seen;
    }
    if (id == kRemoved) throw structural_error("mutation: index out of range");
  }
  return drop_simplex(X, level, id, trans);
}

void restrict_map_from(SimplicialMap& f,
                       const std::vector<std::vector<uint32_t>>& trans,
                       const TruncatedSSet& mutated) {
  for (size_t n = 0; n < f.level_map.size() && n < trans.size(); ++n) {
    std::vector<uint32_t> table(mutated.levels[n].count, 0);
    for (uint32_t s = 0; s < trans[n].size(); ++s)
      if (trans[n][s] != kRemoved) table[trans[n][s]] = f.level_map[n][s];
    f.level_map[n] = std::move(table);
  }
}

}  // namespace

CheckOutcome check_prop_3_2(const InstanceSpec& inst, const Bounds& b,
                            const Budget* budget) {
  if (!inst.covering)
    return CheckOutcome::inconclusive("requires a covering instance");
  const CoveringSpace& cov = *inst.covering;
  const int k = iclamp(b.max_points, 0, 2);
  const int T = iclamp(b.tick_budget, 0, 2);
  const int d = iclamp(b.depth, 0, 2);
  if (budget_expired(budget))
    return CheckOutcome::inconclusive("budget expired before the build");
  BuiltConfPi A = build_conf_pi(cov, kStrictFlavor, k, T, d);
  if (budget_expired(budget))
    return CheckOutcome::inconclusive("budget expired after the strict build");
  BuiltConfPi B = build_conf_pi(cov, kWeakFlavor, k, T, d);
  if (budget_expired(budget))
    return CheckOutcome::inconclusive("budget expired after the weak build");
  BuiltConf C = build_conf(cov.base, kStrictFlavor, k, T, d);
  BuiltConf D = build_conf(cov.base, kWeakFlavor, k, T, d);

  CatFunctor top = conf_pi_inclusion(A, B);
  CatFunctor left = conf_pi_to_downstairs(A, C);
  CatFunctor right = conf_pi_to_downstairs(B, D);
  CatFunctor bottom = conf_inclusion(C, D);
  validate_functor(A.cat, B.cat, top);
  validate_functor(A.cat, C.cat, left);
  validate_functor(B.cat, D.cat, right);
  validate_functor(C.cat, D.cat, bottom);

  SimplicialMap mtop = nerve_map(top, A.nrv, B.nrv);
  SimplicialMap mleft = nerve_map(left, A.nrv, C.nrv);
  SimplicialMap mright = nerve_map(right, B.nrv, D.nrv);
  SimplicialMap mbottom = nerve_map(bottom, C.nrv, D.nrv);

  TruncatedSSet Asset = A.nrv.sset;
  bool mutated = false;
  if (inst.mutation && inst.mutation->target == "config-pi-nerve") {
    if (inst.mutation->kind != "drop-simplex")
      throw structural_error("mutation: unknown kind " + inst.mutation->kind);
    std::vector<std::vector<uint32_t>> trans;
    Asset = drop_nondegenerate(Asset, inst.mutation->level, inst.mutation->index,
                               &trans);
    restrict_map_from(mtop, trans, Asset);
    restrict_map_from(mleft, trans, Asset);
    mutated = true;
  }
  if (budget_expired(budget))
    return CheckOutcome::inconclusive("budget expired before the comparison");

  SquareOfMaps S{&Asset,  &B.nrv.sset, &C.nrv.sset, &D.nrv.sset,
                 &mtop,   &mleft,      &mright,     &mbottom};
  PullbackReport rep = strict_pullback_report(S, d);

  CheckOutcome out =
      rep.holds
          ? CheckOutcome::pass(
                "the strict corner is the levelwise fiber product of the weak "
                "corner against the strict base")
          : CheckOutcome::fail(rep.detail);
  out.fact("max-points", ll_str(k))
      .fact("tick-budget", ll_str(T))
      .fact("depth", ll_str(d))
      .fact("mutated", mutated ? "yes" : "no");
  for (size_t r = 0; r < rep.corner_sizes.size(); ++r)
    out.fact("level-" + ll_str(static_cast<long long>(r)),
             ll_str(rep.corner_sizes[r]) + " of " + ll_str(rep.fiber_sizes[r]));
  return out;
}

namespace {

// Comparison of a plain configuration category with its matched pairing:
// a configuration goes to itself labeled by the identity surjection, a
// morphism to itself paired with the square whose top and bottom are u.
CatFunctor conf_self_matched(const BuiltConf& C, const BuiltEpiFin& E,
                             const BuiltMatched& Y) {
  CatFunctor F;
  F.ob_map.reserve(C.cat.num_objects);
  for (uint32_t c = 0; c < C.cat.num_objects; ++c) {
    int k = static_cast<int>(C.objects[c].points.size());
    F.ob_map.push_back(
        Y.find_object(c, E.find_object(EpiFinObject(FinMap::identity(k)))));
  }
  F.mor_map.reserve(C.cat.morphisms.size());
  for (uint32_t m = 0; m < C.cat.morphisms.size(); ++m) {
    int ka = static_cast<int>(C.objects[C.cat.src(m)].points.size());
    int kb = static_cast<int>(C.objects[C.cat.tgt(m)].points.size());
    EpiFinMorphism sq{EpiFinObject(FinMap::identity(ka)),
                      EpiFinObject(FinMap::identity(kb)), C.arrows[m].u,
                      C.arrows[m].u};
    F.mor_map.push_back(Y.find_arrow(m, E.find_arrow(sq)));
  }
  return F;
}

// Checks that level r against level 0 through the composite last-vertex
// operator forms a strict pullback, for every r <= d.
bool ult_pullback_levels(const BuiltNerve& NX, const BuiltNerve& NY,
                         const CatFunctor& F, int d, const std::string& tag,
                         CheckOutcome& out, std::string* failure) {
  SimplicialMap FM = nerve_map(F, NX, NY);
  for (int r = 0; r <= d; ++r) {
    auto ultX = ultimate_target_table(NX.sset, r);
    auto ultY = ultimate_target_table(NY.sset, r);
    SetPullbackInput in{FM.level_map[static_cast<size_t>(r)], ultX, ultY,
                        F.ob_map};
    std::string detail;
    if (!set_pullback_check(in, &detail)) {
      *failure = tag + " level " + ll_str(r) + ": " + detail;
      return false;
    }
    out.fact(tag + "-level-" + ll_str(r),
             ll_str(NX.sset.size(r)) + " over " + ll_str(NY.sset.size(r)));
  }
  return true;
}

}  // namespace

CheckOutcome check_prop_3_7a(const InstanceSpec& inst, const Bounds& b,
                             const Budget* budget) {
  if (!inst.covering)
    return CheckOutcome::inconclusive("requires a covering instance");
  const CoveringSpace& cov = *inst.covering;
  const int k = iclamp(b.max_points, 0, 2);
  const int T = iclamp(b.tick_budget, 0, 2);
  const int d = iclamp(b.depth, 0, 2);
  if (budget_expired(budget))
    return CheckOutcome::inconclusive("budget expired before the build");
  BuiltEpiFin E = epifin_category(k);
  CheckOutcome out = CheckOutcome::pass(
      "every last-vertex square of the covering comparison and of both "
      "single-carrier comparisons is a strict pullback of finite sets");
  std::string failure;

  BuiltConfPi P = build_conf_pi(cov, kStrictFlavor, k, T, d);
  BuiltConf CM = build_conf(cov.base, kStrictFlavor, k, T, d);
  BuiltMatched YM = build_conf_times_epifin(CM, E, d);
  CatFunctor F = conf_pi_to_matched(P, CM, E, YM);
  validate_functor(P.cat, YM.cat, F);
  if (!ult_pullback_levels(P.nrv, YM.nrv, F, d, "covering", out, &failure))
    return CheckOutcome::fail(failure);
  if (budget_expired(budget))
    return CheckOutcome::inconclusive("budget expired after the covering part");

  CatFunctor FB = conf_self_matched(CM, E, YM);
  validate_functor(CM.cat, YM.cat, FB);
  if (!ult_pullback_levels(CM.nrv, YM.nrv, FB, d, "base", out, &failure))
    return CheckOutcome::fail(failure);
  if (budget_expired(budget))
    return CheckOutcome::inconclusive("budget expired after the base part");

  BuiltConf CE = build_conf(cov.total, kStrictFlavor, k, T, d);
  BuiltMatched YE = build_conf_times_epifin(CE, E, d);
  CatFunctor FE = conf_self_matched(CE, E, YE);
  validate_functor(CE.cat, YE.cat, FE);
  if (!ult_pullback_levels(CE.nrv, YE.nrv, FE, d, "total", out, &failure))
    return CheckOutcome::fail(failure);
  return out;
}

// ---------------------------------------------------------------------------
// def-2.2-determinacy
// ---------------------------------------------------------------------------

namespace {

// Exhaustive count of relabelings t with tgt_tup ∘ t == goal, iterating
// every map of the given source cardinality into the target tuple.
long long count_matching_maps(int ka, const VertexTuple& tgt_tup,
                              const VertexTuple& goal) {
  if (ka == 0) return 1;
  const int kb = static_cast<int>(tgt_tup.size());
  if (kb == 0) return 0;
  long long count = 0;
  std::vector<int> t(static_cast<size_t>(ka), 0);
  while (true) {
    bool ok = true;
    for (int i = 0; i < ka && ok; ++i)
      ok = tgt_tup[static_cast<size_t>(t[static_cast<size_t>(i)])] ==
           goal[static_cast<size_t>(i)];
    if (ok) ++count;
    int i = ka - 1;
    while (i >= 0 && t[static_cast<size_t>(i)] == kb - 1) {
      t[static_cast<size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
    ++t[static_cast<size_t>(i)];
  }
  return count;
}

// Exhaustive count of tick tables over the total graph that stay
// projection-compatible with `base` through p; uses only adjacency, never
// the star bijections. Records the first solution found.
long long brute_count_lifts(const CoveringSpace& cov,
                            const std::vector<std::vector<int>>& total_nbrs,
                            const TickTable& base, const FinMap& p,
                            const VertexTuple& start, TickTable* found) {
  const int k = p.source_card;
  TickTable work;
  work.points = k;
  work.rows.push_back(start);
  long long count = 0;
  std::function<void()> tick = [&]() {
    size_t t = work.rows.size() - 1;
    if (t + 1 == base.rows.size()) {
      ++count;
      if (count == 1 && found != nullptr) *found = work;
      return;
    }
    const VertexTuple cur = work.rows.back();  // copy, recursion reallocates
    VertexTuple next(static_cast<size_t>(k));
    std::function<void(int)> point = [&](int i) {
      if (i == k) {
        work.rows.push_back(next);
        tick();
        work.rows.pop_back();
        return;
      }
      int goal = base.rows[t + 1][static_cast<size_t>(p(i + 1)) - 1];
      auto consider = [&](int w) {
        if (cov.proj.vertex_map[static_cast<size_t>(w)] != goal) return;
        next[static_cast<size_t>(i)] = w;
        point(i + 1);
      };
      consider(cur[static_cast<size_t>(i)]);
      for (int w : total_nbrs[static_cast<size_t>(cur[static_cast<size_t>(i)])])
        consider(w);
    };
    point(0);
  };
  tick();
  return count;
}

}  // namespace

CheckOutcome check_def_2_2_determinacy(const InstanceSpec& inst, const Bounds& b,
                                       const Budget* budget) {
  if (!inst.covering)
    return CheckOutcome::inconclusive("requires a covering instance");
  const CoveringSpace& cov = *inst.covering;
  if (!validate_covering(cov))
    return CheckOutcome::fail("the projection is not a covering");
  if (!cov.total.is_simple() || !cov.base.is_simple())
    return CheckOutcome::inconclusive("carrier graphs must be simple");
  // Triple size caps the sweep at 6 total vertices; the table count per
  // extra vertex grows too fast beyond that.
  const int kcap = cov.total.vertex_count() <= 6 ? 3 : 2;
  const int kmax = iclamp(b.max_points, 0, kcap);
  const int tmax = iclamp(b.tick_budget, 0, 4);

  std::vector<ConfPiObjectData> objs;
  for (int k = 0; k <= kmax; ++k)
    each_tuple(cov.total.vertex_count(), k, [&](const VertexTuple& up) {
      if (tuple_injective(up))
        objs.push_back(strict_object_from_upstairs(cov, up));
    });

  auto base_nbrs = neighbor_lists(cov.base);
  auto total_nbrs = neighbor_lists(cov.total);
  long long tables = 0, lifts = 0, endpoints = 0;

  for (const auto& src : objs) {
    TickTable base;
    base.points = src.p.target_card;
    base.rows.push_back(src.down);
    std::string failure;
    std::function<bool()> extend = [&]() -> bool {
      ++tables;
      if ((tables & 1023) == 0 && budget_expired(budget)) return false;
      auto expect = lift_tick_table(cov, base, src.p, src.up);
      TickTable found;
      long long n =
          brute_count_lifts(cov, total_nbrs, base, src.p, src.up, &found);
      if (expect.has_value()) {
        if (n != 1 || found != *expect) {
          failure = "base table from " + tuple_text(cov.base, src.down) +
                    " with start " + tuple_text(cov.total, src.up) + " admits " +
                    ll_str(n) + " lifts, expected exactly 1";
          return false;
        }
        for (const auto& row : expect->rows)
          if (!tuple_injective(row)) {
            failure = "a lifted slice lost injectivity from " +
                      tuple_text(cov.total, src.up);
            return false;
          }
        ++lifts;
        // Target determinacy: with the lift unique, a candidate morphism to
        // any target is pinned by counting every relabeling against the
        // lifted endpoint. At most one may survive per side.
        const VertexTuple& fu = expect->rows.back();
        const VertexTuple& fd = base.rows.back();
        bool endpoint_seen = false;
        for (const auto& tgt : objs) {
          long long tops = count_matching_maps(src.p.source_card, tgt.up, fu);
          long long bots = count_matching_maps(src.p.target_card, tgt.down, fd);
          if (tops > 1 || bots > 1) {
            failure = "a source, target, base-morphism triple admits " +
                      ll_str(tops * bots) + " relabelings";
            return false;
          }
          if (tgt.up == fu) endpoint_seen = tops == 1 && bots == 1;
        }
        if (!endpoint_seen) {
          failure = "the lifted endpoint " + tuple_text(cov.total, fu) +
                    " is not reachable as a target";
          return false;
        }
        ++endpoints;
      } else if (n != 0) {
        failure = "the star-bijection lift missed " + ll_str(n) +
                  " brute-force lifts from " + tuple_text(cov.total, src.up);
        return false;
      }
      if (base.length() == tmax) return true;
      const VertexTuple cur = base.rows.back();  // copy, recursion reallocates
      const int l = base.points;
      VertexTuple next(static_cast<size_t>(l));
      std::function<bool(int)> point = [&](int i) -> bool {
        if (i == l) {
          for (int a = 0; a < l; ++a)
            for (int c = a + 1; c < l; ++c)
              if (next[static_cast<size_t>(a)] == next[static_cast<size_t>(c)])
                return true;  // strict rows only
          base.rows.push_back(next);
          bool ok = extend();
          base.rows.pop_back();
          return ok;
        }
        next[static_cast<size_t>(i)] = cur[static_cast<size_t>(i)];
        if (!point(i + 1)) return false;
        for (int w : base_nbrs[static_cast<size_t>(cur[static_cast<size_t>(i)])]) {
          next[static_cast<size_t>(i)] = w;
          if (!point(i + 1)) return false;
        }
        return true;
      };
      return point(0);
    };
    if (!extend()) {
      if (!failure.empty()) return CheckOutcome::fail(failure);
      return CheckOutcome::inconclusive("budget expired during the sweep")
          .fact("tables-before-expiry", ll_str(tables));
    }
  }

  // Every stored morphism of the bounded category equals its recomputation
  // from (source, target, base morphism).
  const int kb2 = std::min(kmax, 2);
  const int tb2 = std::min(tmax, 2);
  BuiltConfPi P = build_conf_pi(cov, kStrictFlavor, kb2, tb2, 0);
  for (uint32_t m = 0; m < P.cat.morphisms.size(); ++m) {
    const ConfPiMorphismData& a = P.arrows[m];
    const ConfPiObjectData& sob = P.objects[P.cat.src(m)];
    const ConfPiObjectData& tob = P.objects[P.cat.tgt(m)];
    auto lifted = lift_tick_table(cov, a.down_h, sob.p, sob.up);
    if (!lifted || *lifted != a.up_h)
      return CheckOutcome::fail(
          "a stored morphism deviates from the recomputed lift");
    for (int i = 1; i <= a.top.source_card; ++i)
      if (tob.up[static_cast<size_t>(a.top(i)) - 1] !=
          a.up_h.rows.back()[static_cast<size_t>(i) - 1])
        return CheckOutcome::fail(
            "a stored relabeling deviates from the forced one");
  }

  return CheckOutcome::pass(
             "every base homotopy admits exactly one lift from each start, "
             "targets pin the relabeling, and stored morphisms match their "
             "recomputation")
      .fact("max-points", ll_str(kmax))
      .fact("tick-cap", ll_str(tmax))
      .fact("start-data", ll_str(static_cast<long long>(objs.size())))
      .fact("base-tables", ll_str(tables))
      .fact("lifts", ll_str(lifts))
      .fact("determined-endpoints", ll_str(endpoints))
      .fact("stored-morphisms",
            ll_str(static_cast<long long>(P.cat.morphisms.size())));
}

// ---------------------------------------------------------------------------
// thm-4.1-strata / thm-7.4-strata
// ---------------------------------------------------------------------------

namespace {

// Partition-route label: group indices by base vertex, then canonicalize.
// Independent of the first-occurrence normalization used by the census.
EpiFinObject partition_label(const GraphMap& proj, const VertexTuple& tup) {
  Partition P;
  P.ground_card = static_cast<int>(tup.size());
  std::vector<int> rep_value;
  for (int i = 1; i <= P.ground_card; ++i) {
    int z = proj.vertex_map[static_cast<size_t>(tup[static_cast<size_t>(i) - 1])];
    size_t block = 0;
    while (block < rep_value.size() && rep_value[block] != z) ++block;
    if (block == rep_value.size()) {
      rep_value.push_back(z);
      P.blocks.push_back({i});
    } else {
      P.blocks[block].push_back(i);
    }
  }
  return EpiFinObject(selfic_from_partition(P));
}

std::string census_text(const StratumCensus& census) {
  std::string out;
  for (const auto& [label, count] : census.counts) {
    if (!out.empty()) out += ", ";
    out += to_string(label.p) + ": " + ll_str(count);
  }
  return out.empty() ? "(empty)" : out;
}

std::string chain_text(const TriFinObject& x) {
  return to_string(x.fine_to_mid) + " then " + to_string(x.mid_to_coarse);
}

long long falling_factorial(int V, int k) {
  long long out = 1;
  for (int i = 0; i < k; ++i) out *= V - i;
  return out;
}

}  // namespace

CheckOutcome check_thm_4_1_strata(const InstanceSpec& inst, const Bounds& b,
                                  const Budget* budget) {
  if (!inst.covering)
    return CheckOutcome::inconclusive("requires a covering instance");
  const CoveringSpace& cov = *inst.covering;
  const int kmax = iclamp(b.max_points, 0, 4);
  CheckOutcome out = CheckOutcome::pass(
      "stratum labels are canonical surjections and the census survives an "
      "independent recount");
  std::vector<StratumCensus> censuses;
  for (int k = 0; k <= kmax; ++k) {
    if (budget_expired(budget))
      return CheckOutcome::inconclusive("budget expired at size " + ll_str(k));
    StratumCensus census = strata_census(cov, k);
    censuses.push_back(census);
    std::map<EpiFinObject, long long> recount;
    long long total = 0;
    bool bad_label = false;
    each_tuple(cov.total.vertex_count(), k, [&](const VertexTuple& t) {
      if (!tuple_injective(t)) return;
      ++total;
      EpiFinObject label = partition_label(cov.proj, t);
      if (!is_selfic(label.p) || label.p.source_card != k) bad_label = true;
      ++recount[label];
    });
    if (bad_label)
      return CheckOutcome::fail("a recounted label is not a canonical surjection");
    std::vector<std::pair<EpiFinObject, long long>> flat(recount.begin(),
                                                         recount.end());
    if (flat != census.counts || total != census.total)
      return CheckOutcome::fail("census and partition-route recount disagree at "
                                "size " +
                                ll_str(k));
    if (census.total != falling_factorial(cov.total.vertex_count(), k))
      return CheckOutcome::fail("census total is not the injective-tuple count "
                                "at size " +
                                ll_str(k));
  }
  if (inst.name == "c6-over-c3" && kmax >= 2) {
    std::vector<std::pair<EpiFinObject, long long>> expect{
        {EpiFinObject(FinMap(2, 1, {1, 1})), 6},
        {EpiFinObject(FinMap(2, 2, {1, 2})), 24}};
    if (censuses[2].counts != expect || censuses[2].total != 30)
      return CheckOutcome::fail("pair census deviates from the pinned table: " +
                                census_text(censuses[2]));
  }
  if (inst.name == "c12-over-c3" && kmax >= 2) {
    std::vector<std::pair<EpiFinObject, long long>> expect{
        {EpiFinObject(FinMap(2, 1, {1, 1})), 36},
        {EpiFinObject(FinMap(2, 2, {1, 2})), 96}};
    if (censuses[2].counts != expect || censuses[2].total != 132)
      return CheckOutcome::fail("pair census deviates from the pinned table: " +
                                census_text(censuses[2]));
  }
  out.fact("max-points", ll_str(kmax));
  for (int k = 0; k <= kmax; ++k)
    out.fact("census-" + ll_str(k), census_text(censuses[static_cast<size_t>(k)]));
  std::string absent;
  for (const auto& label : possible_labels(kmax)) {
    bool present = false;
    for (const auto& [have, n] : censuses[static_cast<size_t>(kmax)].counts)
      present = present || have == label;
    if (!present) absent += (absent.empty() ? "" : ", ") + to_string(label.p);
  }
  out.fact("absent-labels-" + ll_str(kmax), absent.empty() ? "none" : absent);
  return out;
}

CheckOutcome check_thm_7_4_strata(const InstanceSpec& inst, const Bounds& b,
                                  const Budget* budget) {
  if (!inst.tower) return CheckOutcome::inconclusive("requires a tower instance");
  const Tower& t = *inst.tower;
  if (!validate_tower(t))
    return CheckOutcome::fail("the tower stages do not validate");
  const int kmax = iclamp(b.max_points, 0, 3);
  CoveringSpace comp = t.composite();
  CheckOutcome out = CheckOutcome::pass(
      "tower labels are chains of canonical surjections; the census, the "
      "double-incidence recount, and the composite marginal all agree");
  std::vector<TowerStratumCensus> censuses;
  for (int k = 0; k <= kmax; ++k) {
    if (budget_expired(budget))
      return CheckOutcome::inconclusive("budget expired at size " + ll_str(k));
    TowerStratumCensus census = strata_census(t, k);
    censuses.push_back(census);
    std::map<TriFinObject, long long> recount;
    std::map<EpiFinObject, long long> marginal;
    long long total = 0;
    std::string bad;
    each_tuple(t.fine.total.vertex_count(), k, [&](const VertexTuple& tup) {
      if (!tuple_injective(tup) || !bad.empty()) return;
      ++total;
      // Double partition route: indices by middle vertex, then by base.
      Partition P1, P0;
      P1.ground_card = P0.ground_card = k;
      std::vector<int> mid_rep, base_rep;
      for (int i = 1; i <= k; ++i) {
        int m = t.fine.proj.vertex_map[static_cast<size_t>(
            tup[static_cast<size_t>(i) - 1])];
        int z = t.coarse.proj.vertex_map[static_cast<size_t>(m)];
        size_t bm = 0;
        while (bm < mid_rep.size() && mid_rep[bm] != m) ++bm;
        if (bm == mid_rep.size()) {
          mid_rep.push_back(m);
          P1.blocks.push_back({i});
        } else {
          P1.blocks[bm].push_back(i);
        }
        size_t bz = 0;
        while (bz < base_rep.size() && base_rep[bz] != z) ++bz;
        if (bz == base_rep.size()) {
          base_rep.push_back(z);
          P0.blocks.push_back({i});
        } else {
          P0.blocks[bz].push_back(i);
        }
      }
      FinMap sp1 = selfic_from_partition(P1);
      FinMap sp0 = selfic_from_partition(P0);
      std::vector<int> vals(static_cast<size_t>(sp1.target_card), 0);
      for (int i = 1; i <= k; ++i)
        if (vals[static_cast<size_t>(sp1(i)) - 1] == 0)
          vals[static_cast<size_t>(sp1(i)) - 1] = sp0(i);
      TriFinObject label(sp1,
                         FinMap(sp1.target_card, sp0.target_card, std::move(vals)));
      if (trifin_underlying_card(label) != k) bad = "label cardinality drifted";
      ++recount[label];
      EpiFinObject through =
          EpiFinObject(compose(label.fine_to_mid, label.mid_to_coarse));
      if (!(through == stratum_label(comp, tup)))
        bad = "chain composite disagrees with the composite-covering label at " +
              tuple_text(t.fine.total, tup);
      ++marginal[through];
    });
    if (!bad.empty()) return CheckOutcome::fail(bad);
    std::vector<std::pair<TriFinObject, long long>> flat(recount.begin(),
                                                         recount.end());
    if (flat != census.counts || total != census.total)
      return CheckOutcome::fail(
          "tower census and double-incidence recount disagree at size " +
          ll_str(k));
    std::vector<std::pair<EpiFinObject, long long>> flat_marginal(
        marginal.begin(), marginal.end());
    if (flat_marginal != strata_census(comp, k).counts)
      return CheckOutcome::fail(
          "composite marginal disagrees with the composite-covering census at "
          "size " +
          ll_str(k));
  }
  if (inst.name == "tower-c12-c6-c3" && kmax >= 2) {
    std::vector<std::pair<TriFinObject, long long>> expect{
        {TriFinObject(FinMap(2, 1, {1, 1}), FinMap(1, 1, {1})), 12},
        {TriFinObject(FinMap(2, 2, {1, 2}), FinMap(2, 1, {1, 1})), 24},
        {TriFinObject(FinMap(2, 2, {1, 2}), FinMap(2, 2, {1, 2})), 96}};
    if (censuses[2].counts != expect || censuses[2].total != 132)
      return CheckOutcome::fail("pair census deviates from the pinned table");
  }
  out.fact("max-points", ll_str(kmax));
  for (int k = 0; k <= kmax; ++k) {
    std::string text;
    for (const auto& [label, count] : censuses[static_cast<size_t>(k)].counts) {
      if (!text.empty()) text += ", ";
      text += chain_text(label) + ": " + ll_str(count);
    }
    out.fact("census-" + ll_str(k), text.empty() ? "(empty)" : text);
  }
  return out;
}

// ---------------------------------------------------------------------------
// def-6.1-lift / eq-6.2-decomp
// ---------------------------------------------------------------------------

namespace {

// Position of `parent_id` in the ascending parent table of an anchored or
// comma level; kRemoved when the simplex is not in the fiber.
uint32_t parent_position(const std::vector<uint32_t>& parents, uint32_t parent_id) {
  auto it = std::lower_bound(parents.begin(), parents.end(), parent_id);
  if (it == parents.end() || *it != parent_id) return kRemoved;
  return static_cast<uint32_t>(it - parents.begin());
}

std::vector<uint32_t> mapped_string(const BuiltNerve& src, int level, uint32_t s,
                                    const CatFunctor& F) {
  auto key = src.key(level, s);
  std::vector<uint32_t> out;
  out.reserve(key.size());
  for (uint32_t m : key) out.push_back(F.mor_map[m]);
  return out;
}

}  // namespace

CheckOutcome check_def_6_1_lift(const InstanceSpec& inst, const Bounds& b,
                                const Budget* budget) {
  if (!inst.covering)
    return CheckOutcome::inconclusive("requires a covering instance");
  const CoveringSpace& cov = *inst.covering;
  const int k = iclamp(b.max_points, 1, 2);
  const int T = iclamp(b.tick_budget, 0, 2);
  const int r_max = iclamp(b.depth, 0, 2);
  if (budget_expired(budget))
    return CheckOutcome::inconclusive("budget expired before the build");
  BuiltConfPi P = build_conf_pi(cov, kStrictFlavor, k, T, r_max + 1);
  BuiltConf CM = build_conf(cov.base, kStrictFlavor, k, T, r_max + 1);
  if (budget_expired(budget))
    return CheckOutcome::inconclusive("budget expired during the build");
  BuiltConf CE = build_conf(cov.total, kStrictFlavor, k, T, r_max + 1);
  LocSSet locP = build_conf_pi_loc(P, r_max);
  LocSSet locM = build_conf_loc(CM, r_max);
  LocSSet locE = build_conf_loc(CE, r_max);
  CatFunctor Fdown = conf_pi_to_downstairs(P, CM);
  CatFunctor Fup = conf_pi_to_upstairs(P, CE);
  auto fibs = fibers(cov);

  CheckOutcome out = CheckOutcome::pass(
      "each anchored base string lifts exactly once per fiber point, and the "
      "total-space comparison is levelwise injective");
  for (int r = 0; r <= r_max; ++r) {
    if (budget_expired(budget))
      return CheckOutcome::inconclusive("budget expired at level " + ll_str(r));
    const uint32_t nP = locP.sset.size(r);
    std::vector<std::map<int, int>> per_anchor(locM.sset.size(r));
    std::vector<char> hitE(locE.sset.size(r), 0);
    for (uint32_t c = 0; c < nP; ++c) {
      uint32_t s = locP.parent[static_cast<size_t>(r)][c];
      auto km = mapped_string(P.nrv, r + 1, s, Fdown);
      uint32_t tm = CM.nrv.find(r + 1, km);
      uint32_t posm = tm == BuiltNerve::kNotFound
                          ? kRemoved
                          : parent_position(locM.parent[static_cast<size_t>(r)], tm);
      if (posm == kRemoved)
        return CheckOutcome::fail(
            "a lifted string does not project into the anchored base part at "
            "level " +
            ll_str(r));
      auto ke = mapped_string(P.nrv, r + 1, s, Fup);
      uint32_t te = CE.nrv.find(r + 1, ke);
      uint32_t pose = te == BuiltNerve::kNotFound
                          ? kRemoved
                          : parent_position(locE.parent[static_cast<size_t>(r)], te);
      if (pose == kRemoved)
        return CheckOutcome::fail(
            "a lifted string has no anchored image in the total space at level " +
            ll_str(r));
      if (hitE[pose])
        return CheckOutcome::fail(
            "the total-space comparison is not injective at level " + ll_str(r));
      hitE[pose] = 1;
      ++per_anchor[posm][locP.anchor[static_cast<size_t>(r)][c]];
    }
    for (uint32_t mI = 0; mI < locM.sset.size(r); ++mI) {
      int z = locM.anchor[static_cast<size_t>(r)][mI];
      const auto& fib = fibs[static_cast<size_t>(z)];
      if (per_anchor[mI].size() != fib.size())
        return CheckOutcome::fail("a base string at level " + ll_str(r) +
                                  " has lifts at " +
                                  ll_str(static_cast<long long>(per_anchor[mI].size())) +
                                  " anchors, expected the fiber size " +
                                  ll_str(static_cast<long long>(fib.size())));
      for (int x : fib) {
        auto it = per_anchor[mI].find(x);
        if (it == per_anchor[mI].end() || it->second != 1)
          return CheckOutcome::fail(
              "expected exactly one lift at each fiber point over base vertex " +
              std::to_string(cov.base.vertex_ids[static_cast<size_t>(z)]));
      }
    }
    out.fact("level-" + ll_str(r),
             ll_str(nP) + " anchored over " + ll_str(locM.sset.size(r)));
  }
  return out;
}

CheckOutcome check_eq_6_2_decomp(const InstanceSpec& inst, const Bounds& b,
                                 const Budget* budget) {
  if (!inst.covering)
    return CheckOutcome::inconclusive("requires a covering instance");
  const CoveringSpace& cov = *inst.covering;
  const int k = iclamp(b.max_points, 1, 2);
  const int T = iclamp(b.tick_budget, 0, 2);
  const int r_max = iclamp(b.depth, 0, 2);
  if (budget_expired(budget))
    return CheckOutcome::inconclusive("budget expired before the build");
  BuiltConfPi P = build_conf_pi(cov, kStrictFlavor, k, T, r_max + 1);
  BuiltConf CM = build_conf(cov.base, kStrictFlavor, k, T, r_max + 1);
  LocSSet locP = build_conf_pi_loc(P, r_max);
  CatFunctor Fdown = conf_pi_to_downstairs(P, CM);
  auto fibs = fibers(cov);

  CheckOutcome out = CheckOutcome::pass(
      "over every base vertex the anchored covering strings split into one "
      "base slice per fiber point, compatibly with all faces");
  for (int z = 0; z < cov.base.vertex_count(); ++z) {
    if (budget_expired(budget))
      return CheckOutcome::inconclusive("budget expired at base vertex " +
                                        std::to_string(z));
    uint32_t y = CM.find_object({z});
    CommaSSet cz = comma(CM.nrv.sset, y);
    const auto& fib = fibs[static_cast<size_t>(z)];
    // phi[r][c] = comma position of the anchored string c, kRemoved when the
    // anchor of c does not sit over z.
    std::vector<std::vector<uint32_t>> phi(static_cast<size_t>(r_max) + 1);
    for (int r = 0; r <= r_max; ++r) {
      phi[static_cast<size_t>(r)].assign(locP.sset.size(r), kRemoved);
      std::vector<std::vector<char>> hit;
      hit.assign(fib.size(), std::vector<char>(cz.sset.size(r), 0));
      std::vector<long long> counts(fib.size(), 0);
      for (uint32_t c = 0; c < locP.sset.size(r); ++c) {
        int x = locP.anchor[static_cast<size_t>(r)][c];
        if (cov.proj.vertex_map[static_cast<size_t>(x)] != z) continue;
        size_t slot = 0;
        while (slot < fib.size() && fib[slot] != x) ++slot;
        if (slot == fib.size())
          return CheckOutcome::fail("anchor outside the fiber over vertex " +
                                    std::to_string(z));
        auto km = mapped_string(P.nrv, r + 1,
                                locP.parent[static_cast<size_t>(r)][c], Fdown);
        uint32_t tm = CM.nrv.find(r + 1, km);
        uint32_t pos = tm == BuiltNerve::kNotFound
                           ? kRemoved
                           : parent_position(cz.parent[static_cast<size_t>(r)], tm);
        if (pos == kRemoved)
          return CheckOutcome::fail(
              "an anchored string does not project into the base slice at "
              "level " +
              ll_str(r));
        if (hit[slot][pos])
          return CheckOutcome::fail("two anchored strings share a base slice "
                                    "cell at level " +
                                    ll_str(r));
        hit[slot][pos] = 1;
        ++counts[slot];
        phi[static_cast<size_t>(r)][c] = pos;
      }
      for (size_t slot = 0; slot < fib.size(); ++slot)
        if (counts[slot] != static_cast<long long>(cz.sset.size(r)))
          return CheckOutcome::fail(
              "summand at a fiber point has " + ll_str(counts[slot]) +
              " cells at level " + ll_str(r) + ", the base slice has " +
              ll_str(cz.sset.size(r)));
      if (r >= 1) {
        for (uint32_t c = 0; c < locP.sset.size(r); ++c) {
          if (phi[static_cast<size_t>(r)][c] == kRemoved) continue;
          for (int i = 0; i <= r; ++i) {
            uint32_t fc = locP.sset.face(r, i, c);
            if (phi[static_cast<size_t>(r) - 1][fc] !=
                cz.sset.face(r, i, phi[static_cast<size_t>(r)][c]))
              return CheckOutcome::fail(
                  "the identification does not commute with face " + ll_str(i) +
                  " at level " + ll_str(r));
          }
        }
      }
    }
    out.fact("base-" + std::to_string(cov.base.vertex_ids[static_cast<size_t>(z)]),
             ll_str(static_cast<long long>(fib.size())) + " summands of " +
                 ll_str(cz.sset.size(r_max)) + " cells at level " +
                 ll_str(r_max));
  }
  return out;
}

// ---------------------------------------------------------------------------
// epifin-closure / lifting-uniqueness
// ---------------------------------------------------------------------------

CheckOutcome check_epifin_closure(const InstanceSpec& inst, const Bounds& b,
                                  const Budget* budget) {
  (void)inst;
  const int card = iclamp(b.max_points + 1, 2, 4);
  AxiomSweepReport rep = epifin_axiom_sweep(card, budget);
  if (!rep.completed)
    return CheckOutcome::inconclusive("budget expired during the axiom sweep")
        .fact("pairs-before-expiry", ll_str(rep.pairs));
  if (rep.violations > 0)
    return CheckOutcome::fail(rep.first_violation)
        .fact("violations", ll_str(rep.violations));
  long long selfic_pairs = 0;
  for (int k = 0; k <= card; ++k)
    for (int l = (k == 0 ? 0 : 1); l <= k; ++l)
      for (const FinMap& f : enumerate_selfic(k, l))
        for (int m = (l == 0 ? 0 : 1); m <= l; ++m)
          for (const FinMap& g : enumerate_selfic(l, m)) {
            ++selfic_pairs;
            if (!is_selfic(compose(f, g)))
              return CheckOutcome::fail(
                  "canonical surjections are not closed under composition: " +
                  to_string(f) + " then " + to_string(g));
          }
  return CheckOutcome::pass(
             "squares up to cardinality " + ll_str(card) +
             " satisfy closure, the unit laws, and associativity; canonical "
             "surjections compose to canonical surjections")
      .fact("card", ll_str(card))
      .fact("objects", ll_str(rep.objects))
      .fact("squares", ll_str(rep.morphisms))
      .fact("pairs", ll_str(rep.pairs))
      .fact("triples", ll_str(rep.triples))
      .fact("surjection-pairs", ll_str(selfic_pairs));
}

namespace {

long long brute_count_path_lifts(const CoveringSpace& cov,
                                 const std::vector<std::vector<uint32_t>>& stars,
                                 const EdgePath& p, int start,
                                 std::vector<uint32_t>* found) {
  long long count = 0;
  std::vector<uint32_t> steps;
  std::function<void(int, size_t)> rec = [&](int at, size_t idx) {
    if (idx == p.steps.size()) {
      ++count;
      if (count == 1 && found != nullptr) *found = steps;
      return;
    }
    for (uint32_t d : stars[static_cast<size_t>(at)])
      if (dart_image(cov.total, cov.base, cov.proj, d) == p.steps[idx]) {
        steps.push_back(d);
        rec(cov.total.dart_head(d), idx + 1);
        steps.pop_back();
      }
  };
  rec(start, 0);
  return count;
}

}  // namespace

CheckOutcome check_lifting_uniqueness(const InstanceSpec& inst, const Bounds& b,
                                      const Budget* budget) {
  (void)b;
  std::vector<std::pair<std::string, CoveringSpace>> covs;
  if (inst.covering) covs.emplace_back("covering", *inst.covering);
  if (inst.tower) {
    covs.emplace_back("fine", inst.tower->fine);
    covs.emplace_back("coarse", inst.tower->coarse);
    covs.emplace_back("composite", inst.tower->composite());
  }
  if (inst.left) covs.emplace_back("left", *inst.left);
  if (inst.right) covs.emplace_back("right", *inst.right);
  if (covs.empty())
    return CheckOutcome::inconclusive("instance carries no covering");
  const int len_max = 8;

  CheckOutcome out = CheckOutcome::pass(
      "every base path lifts uniquely from every fiber point, matching the "
      "exhaustive dart search");
  for (const auto& [nm, cov] : covs) {
    if (!validate_covering(cov))
      return CheckOutcome::fail(nm + ": the projection is not a covering");
    auto base_stars = cov.base.stars();
    auto total_stars = cov.total.stars();
    auto fibs = fibers(cov);
    long long paths = 0, lifts = 0;
    std::string failure;
    for (int v0 = 0; v0 < cov.base.vertex_count() && failure.empty(); ++v0) {
      EdgePath p{v0, {}};
      std::function<bool()> visit = [&]() -> bool {
        ++paths;
        if ((paths & 255) == 0 && budget_expired(budget)) return false;
        for (int start : fibs[static_cast<size_t>(v0)]) {
          EdgePath lifted;
          try {
            lifted = lift_path(cov, p, start);
          } catch (const structural_error& e) {
            failure = nm + ": " + e.what();
            return false;
          }
          std::vector<uint32_t> brute;
          long long n =
              brute_count_path_lifts(cov, total_stars, p, start, &brute);
          if (n != 1 || brute != lifted.steps) {
            failure = nm + ": a length-" + ll_str(static_cast<long long>(p.steps.size())) +
                      " path admits " + ll_str(n) + " lifts";
            return false;
          }
          if (cov.proj.vertex_map[static_cast<size_t>(edge_path_end(
                  cov.total, lifted))] != edge_path_end(cov.base, p)) {
            failure = nm + ": a lift ends off the fiber of the path end";
            return false;
          }
          ++lifts;
        }
        if (static_cast<int>(p.steps.size()) == len_max) return true;
        int end = edge_path_end(cov.base, p);
        for (uint32_t d : base_stars[static_cast<size_t>(end)]) {
          p.steps.push_back(d);
          bool ok = visit();
          p.steps.pop_back();
          if (!ok) return false;
        }
        return true;
      };
      if (!visit() && failure.empty())
        return CheckOutcome::inconclusive("budget expired during the path sweep")
            .fact("paths-before-expiry", ll_str(paths));
    }
    if (!failure.empty()) return CheckOutcome::fail(failure);
    out.fact(nm, ll_str(paths) + " paths, " + ll_str(lifts) + " lifts");
  }
  out.fact("max-length", ll_str(static_cast<long long>(len_max)));
  return out;
}

// ---------------------------------------------------------------------------
// Registry and runner.
// ---------------------------------------------------------------------------

namespace {

using CheckFn = CheckOutcome (*)(const InstanceSpec&, const Bounds&,
                                 const Budget*);

struct RegisteredCheck {
  RegistryEntry entry;
  CheckFn fn;
};

CheckFn fn_for_operation(const std::string& operation) {
  static const std::pair<const char*, CheckFn> table[] = {
      {"check_prop_3_2", &check_prop_3_2},
      {"check_prop_3_7a", &check_prop_3_7a},
      {"check_def_2_2_determinacy", &check_def_2_2_determinacy},
      {"check_thm_4_1_strata", &check_thm_4_1_strata},
      {"check_thm_7_4_strata", &check_thm_7_4_strata},
      {"check_def_6_1_lift", &check_def_6_1_lift},
      {"check_eq_6_2_decomp", &check_eq_6_2_decomp},
      {"check_epifin_closure", &check_epifin_closure},
      {"check_lifting_uniqueness", &check_lifting_uniqueness},
  };
  for (const auto& [name, fn] : table)
    if (operation == name) return fn;
  throw structural_error("registry names an unknown operation: " + operation);
}

const std::vector<RegisteredCheck>& registered_checks() {
  static const std::vector<RegisteredCheck> checks = [] {
    std::vector<RegisteredCheck> out;
    nlohmann::json j = nlohmann::json::parse(detail::kRegistryJson);
    for (const auto& c : j.at("checks")) {
      RegisteredCheck rc;
      rc.entry.id = c.at("id").get<std::string>();
      rc.entry.statement = c.at("statement").get<std::string>();
      rc.entry.description = c.at("description").get<std::string>();
      rc.entry.applies_to = c.at("applies_to").get<std::string>();
      rc.fn = fn_for_operation(c.at("operation").get<std::string>());
      out.push_back(std::move(rc));
    }
    return out;
  }();
  return checks;
}

bool applies(const std::string& applies_to, const InstanceSpec& inst) {
  if (applies_to == "any") return true;
  if (applies_to == "covering") return inst.covering.has_value();
  if (applies_to == "tower") return inst.tower.has_value();
  if (applies_to == "map-lift")
    return inst.left.has_value() && inst.right.has_value() &&
           inst.base_map.has_value();
  return false;
}

}  // namespace

const std::vector<RegistryEntry>& check_registry() {
  static const std::vector<RegistryEntry> entries = [] {
    std::vector<RegistryEntry> out;
    for (const auto& rc : registered_checks()) out.push_back(rc.entry);
    return out;
  }();
  return entries;
}

const RegistryEntry* find_check(const std::string& id) {
  for (const auto& e : check_registry())
    if (e.id == id) return &e;
  return nullptr;
}

std::vector<CheckRecord> run_checks(const InstanceSpec& inst,
                                    const RunOptions& opt) {
  for (const auto& id : opt.only)
    if (find_check(id) == nullptr)
      throw structural_error("unknown check id: " + id);

  std::vector<const RegisteredCheck*> jobs;
  for (const auto& rc : registered_checks()) {
    if (!opt.only.empty()) {
      if (std::find(opt.only.begin(), opt.only.end(), rc.entry.id) !=
          opt.only.end())
        jobs.push_back(&rc);
    } else if (applies(rc.entry.applies_to, inst)) {
      jobs.push_back(&rc);
    }
  }

  Budget budget;
  const Budget* bp = nullptr;
  if (opt.budget_ms > 0) {
    budget = Budget::from_ms(opt.budget_ms);
    bp = &budget;
  }

  std::vector<CheckRecord> out(jobs.size());
  auto run_one = [&](size_t i) {
    out[i].id = jobs[i]->entry.id;
    try {
      out[i].outcome = jobs[i]->fn(inst, opt.bounds, bp);
    } catch (const std::exception& e) {
      out[i].outcome = CheckOutcome::fail(std::string("error: ") + e.what());
    }
  };
  int workers = std::max(1, opt.jobs);
  workers = std::min<int>(workers, static_cast<int>(jobs.size()));
  if (workers <= 1) {
    for (size_t i = 0; i < jobs.size(); ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (size_t i = static_cast<size_t>(w); i < jobs.size();
             i += static_cast<size_t>(workers))
          run_one(i);
      });
    for (auto& th : pool) th.join();
  }
  return out;
}

}  // namespace covcat
