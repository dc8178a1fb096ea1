#include "covcat/confcat.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace covcat {

namespace {

bool tuple_injective(const VertexTuple& t) {
  for (size_t i = 0; i < t.size(); ++i)
    for (size_t j = i + 1; j < t.size(); ++j)
      if (t[i] == t[j]) return false;
  return true;
}

bool row_ok(const ConfFlavor& flavor, const VertexTuple& row) {
  return !flavor.injective || tuple_injective(row);
}

std::vector<std::vector<int>> neighbor_lists(const Graph& G) {
  std::vector<std::vector<int>> nbrs(static_cast<size_t>(G.vertex_count()));
  for (const auto& e : G.edges) {
    nbrs[static_cast<size_t>(e.u)].push_back(e.v);
    nbrs[static_cast<size_t>(e.v)].push_back(e.u);
  }
  for (auto& list : nbrs) std::sort(list.begin(), list.end());
  return nbrs;
}

// All rows reachable from cur in one tick under the flavor: every point
// stays or crosses one edge, sticky coincidences move together, and the
// injective flavor forbids collisions.
void next_rows(const std::vector<std::vector<int>>& nbrs, ConfFlavor flavor,
               const VertexTuple& cur, std::vector<VertexTuple>& out) {
  VertexTuple next(cur.size());
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == cur.size()) {
      out.push_back(next);
      return;
    }
    if (flavor.sticky) {
      for (size_t j = 0; j < i; ++j)
        if (cur[j] == cur[i]) {
          next[i] = next[j];
          rec(i + 1);
          return;
        }
    }
    auto consider = [&](int v) {
      if (flavor.injective)
        for (size_t j = 0; j < i; ++j)
          if (next[j] == v) return;
      next[i] = v;
      rec(i + 1);
    };
    consider(cur[i]);
    for (int v : nbrs[static_cast<size_t>(cur[i])]) consider(v);
  };
  rec(0);
}

// Depth-first emission of every tick table of length 0..budget starting at
// `start`; prefixes are emitted before their extensions.
void for_each_table(const std::vector<std::vector<int>>& nbrs, ConfFlavor flavor,
                    const VertexTuple& start, int budget,
                    const std::function<void(const TickTable&)>& emit) {
  TickTable work;
  work.points = static_cast<int>(start.size());
  work.rows.push_back(start);
  std::function<void()> rec = [&]() {
    emit(work);
    if (work.length() == budget) return;
    std::vector<VertexTuple> nexts;
    next_rows(nbrs, flavor, work.rows.back(), nexts);
    for (auto& r : nexts) {
      work.rows.push_back(std::move(r));
      rec();
      work.rows.pop_back();
    }
  };
  rec();
}

void for_each_tuple(int num_vertices, int k,
                    const std::function<void(const VertexTuple&)>& emit) {
  if (k == 0) {
    VertexTuple empty;
    emit(empty);
    return;
  }
  if (num_vertices == 0) return;
  VertexTuple t(static_cast<size_t>(k), 0);
  while (true) {
    emit(t);
    int i = k - 1;
    while (i >= 0 && t[static_cast<size_t>(i)] == num_vertices - 1) {
      t[static_cast<size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
    ++t[static_cast<size_t>(i)];
  }
}

// Selfic collapse of a value tuple: p sends each index to the rank of its
// value in order of first occurrence; reps lists the distinct values in
// that order.
std::pair<FinMap, VertexTuple> collapse(const VertexTuple& images) {
  VertexTuple reps;
  std::vector<int> vals;
  for (int v : images) {
    size_t idx = 0;
    while (idx < reps.size() && reps[idx] != v) ++idx;
    if (idx == reps.size()) reps.push_back(v);
    vals.push_back(static_cast<int>(idx) + 1);
  }
  return {FinMap(static_cast<int>(images.size()), static_cast<int>(reps.size()),
                 std::move(vals)),
          reps};
}

std::string tuple_name(const Graph& G, const VertexTuple& t) {
  std::string out = "(";
  for (size_t i = 0; i < t.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(G.vertex_ids[static_cast<size_t>(t[i])]);
  }
  out += ")";
  return out;
}

std::string values_name(const FinMap& f) {
  std::string out = "[";
  for (size_t i = 0; i < f.values.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(f.values[i]);
  }
  out += "]";
  return out;
}

using MapsCache = std::vector<std::vector<std::vector<FinMap>>>;

MapsCache make_maps_cache(int max_card) {
  MapsCache cache(static_cast<size_t>(max_card) + 1);
  for (int k = 0; k <= max_card; ++k) {
    cache[static_cast<size_t>(k)].resize(static_cast<size_t>(max_card) + 1);
    for (int l = 0; l <= max_card; ++l)
      cache[static_cast<size_t>(k)][static_cast<size_t>(l)] = enumerate_maps(k, l);
  }
  return cache;
}

// Arrow ids grouped by source object and tick length, for budget-aware
// composition table construction.
std::vector<std::vector<std::vector<uint32_t>>> group_by_src_len(
    const FiniteCategory& cat, int budget,
    const std::function<int(uint32_t)>& length_of) {
  std::vector<std::vector<std::vector<uint32_t>>> out(cat.num_objects);
  for (auto& per : out) per.resize(static_cast<size_t>(budget) + 1);
  for (uint32_t m = 0; m < cat.morphisms.size(); ++m)
    out[cat.morphisms[m].src][static_cast<size_t>(length_of(m))].push_back(m);
  return out;
}

void check_unit_laws(const FiniteCategory& cat) {
  for (uint32_t m = 0; m < cat.morphisms.size(); ++m) {
    if (cat.compose(cat.identities[cat.morphisms[m].src], m) != m ||
        cat.compose(m, cat.identities[cat.morphisms[m].tgt]) != m)
      throw structural_error("conf build: unit law failed");
  }
}

}  // namespace

bool legal_step(const Graph& G, const VertexTuple& from, const VertexTuple& to) {
  if (from.size() != to.size()) return false;
  for (size_t i = 0; i < from.size(); ++i) {
    if (from[i] == to[i]) continue;
    if (G.edge_between(from[i], to[i]) < 0) return false;
  }
  return true;
}

bool is_sticky(const TickTable& h) {
  for (size_t t = 0; t + 1 < h.rows.size(); ++t)
    for (size_t i = 0; i < h.rows[t].size(); ++i)
      for (size_t j = i + 1; j < h.rows[t].size(); ++j)
        if (h.rows[t][i] == h.rows[t][j] &&
            h.rows[t + 1][i] != h.rows[t + 1][j])
          return false;
  return true;
}

bool legal_tick_table(const Graph& G, const TickTable& h) {
  if (h.points < 0 || h.rows.empty()) return false;
  for (const auto& row : h.rows) {
    if (row.size() != static_cast<size_t>(h.points)) return false;
    for (int v : row)
      if (v < 0 || v >= G.vertex_count()) return false;
  }
  for (size_t t = 0; t + 1 < h.rows.size(); ++t)
    if (!legal_step(G, h.rows[t], h.rows[t + 1])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Configurations in one graph.
// ---------------------------------------------------------------------------

uint32_t BuiltConf::find_object(const VertexTuple& points) const {
  auto below = [&](uint32_t id) {
    const auto& p = objects[id].points;
    if (p.size() != points.size()) return p.size() < points.size();
    return p < points;
  };
  uint32_t lo = 0, hi = static_cast<uint32_t>(objects.size());
  while (lo < hi) {
    uint32_t mid = lo + (hi - lo) / 2;
    if (below(mid))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo == objects.size() || objects[lo].points != points)
    throw structural_error("conf: object not stored");
  return lo;
}

uint32_t BuiltConf::find_arrow(uint32_t src, uint32_t tgt, const FinMap& u,
                               const TickTable& h) const {
  auto below = [&](uint32_t id) {
    const auto& m = cat.morphisms[id];
    if (m.src != src) return m.src < src;
    if (m.tgt != tgt) return m.tgt < tgt;
    const auto& d = arrows[id];
    if (d.u != u) return d.u < u;
    return d.h < h;
  };
  uint32_t lo = 0, hi = static_cast<uint32_t>(arrows.size());
  while (lo < hi) {
    uint32_t mid = lo + (hi - lo) / 2;
    if (below(mid))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo == arrows.size() || cat.morphisms[lo].src != src ||
      cat.morphisms[lo].tgt != tgt || arrows[lo].u != u || arrows[lo].h != h)
    throw structural_error("conf: arrow not stored");
  return lo;
}

namespace {

struct ConfArrowRec {
  uint32_t src, tgt;
  ConfMorphismData data;
};

ConfMorphismData compose_conf_data(const ConfMorphismData& f,
                                   const ConfMorphismData& g) {
  ConfMorphismData out;
  out.u = compose(f.u, g.u);
  out.h.points = f.h.points;
  out.h.rows = f.h.rows;
  for (size_t t = 1; t < g.h.rows.size(); ++t) {
    VertexTuple row(static_cast<size_t>(f.h.points));
    for (int i = 1; i <= f.h.points; ++i)
      row[static_cast<size_t>(i) - 1] = g.h.rows[t][static_cast<size_t>(f.u(i)) - 1];
    out.h.rows.push_back(std::move(row));
  }
  return out;
}

BuiltConf build_conf_impl(const Graph& G, ConfFlavor flavor, int min_points,
                          int max_points, int tick_budget, int depth) {
  if (!G.is_simple())
    throw structural_error("conf: carrier graph must be simple");
  if (min_points < 0 || max_points < min_points || tick_budget < 0 || depth < 0)
    throw structural_error("conf: bad bounds");
  BuiltConf out;
  out.carrier = G;
  out.flavor = flavor;
  out.max_points = max_points;
  out.tick_budget = tick_budget;

  for (int k = min_points; k <= max_points; ++k)
    for_each_tuple(G.vertex_count(), k, [&](const VertexTuple& t) {
      if (row_ok(flavor, t)) out.objects.push_back({t});
    });

  auto nbrs = neighbor_lists(G);
  auto maps = make_maps_cache(max_points);
  std::vector<ConfArrowRec> recs;
  for (uint32_t s = 0; s < out.objects.size(); ++s) {
    const int ks = static_cast<int>(out.objects[s].points.size());
    for_each_table(nbrs, flavor, out.objects[s].points, tick_budget,
                   [&](const TickTable& h) {
                     const VertexTuple& final_row = h.rows.back();
                     for (uint32_t t = 0; t < out.objects.size(); ++t) {
                       const auto& tp = out.objects[t].points;
                       const int kt = static_cast<int>(tp.size());
                       for (const FinMap& u : maps[static_cast<size_t>(ks)]
                                                  [static_cast<size_t>(kt)]) {
                         bool match = true;
                         for (int i = 1; i <= ks && match; ++i)
                           match = tp[static_cast<size_t>(u(i)) - 1] ==
                                   final_row[static_cast<size_t>(i) - 1];
                         if (match) recs.push_back({s, t, {u, h}});
                       }
                     }
                   });
  }
  std::sort(recs.begin(), recs.end(), [](const ConfArrowRec& a, const ConfArrowRec& b) {
    if (a.src != b.src) return a.src < b.src;
    if (a.tgt != b.tgt) return a.tgt < b.tgt;
    if (a.data.u != b.data.u) return a.data.u < b.data.u;
    return a.data.h < b.data.h;
  });

  out.cat.num_objects = static_cast<uint32_t>(out.objects.size());
  out.cat.bounded = true;
  for (const auto& rec : recs) {
    out.cat.morphisms.push_back({rec.src, rec.tgt});
    out.arrows.push_back(rec.data);
  }
  out.cat.identities.resize(out.objects.size());
  for (uint32_t ob = 0; ob < out.objects.size(); ++ob) {
    const auto& pts = out.objects[ob].points;
    TickTable idh{static_cast<int>(pts.size()), {pts}};
    out.cat.identities[ob] = out.find_arrow(
        ob, ob, FinMap::identity(static_cast<int>(pts.size())), idh);
  }
  auto by_src_len = group_by_src_len(out.cat, tick_budget, [&](uint32_t m) {
    return out.arrows[m].h.length();
  });
  for (uint32_t f = 0; f < out.arrows.size(); ++f) {
    const uint32_t mid = out.cat.morphisms[f].tgt;
    const int lf = out.arrows[f].h.length();
    for (int lg = 0; lf + lg <= tick_budget; ++lg)
      for (uint32_t g : by_src_len[mid][static_cast<size_t>(lg)]) {
        ConfMorphismData comp = compose_conf_data(out.arrows[f], out.arrows[g]);
        out.cat.set_compose(
            f, g,
            out.find_arrow(out.cat.morphisms[f].src, out.cat.morphisms[g].tgt,
                           comp.u, comp.h));
      }
  }
  check_unit_laws(out.cat);
  for (const auto& ob : out.objects)
    out.cat.object_names.push_back(tuple_name(G, ob.points));
  out.nrv = nerve(out.cat, depth);
  return out;
}

}  // namespace

BuiltConf build_conf(const Graph& G, ConfFlavor flavor, int max_points,
                     int tick_budget, int depth) {
  return build_conf_impl(G, flavor, 0, max_points, tick_budget, depth);
}

BuiltConf build_walk_category(const Graph& G, int tick_budget, int depth) {
  return build_conf_impl(G, kStrictFlavor, 1, 1, tick_budget, depth);
}

CatFunctor conf_to_fin(const BuiltConf& C, const BuiltFin& F) {
  CatFunctor out;
  for (const auto& ob : C.objects) {
    int k = static_cast<int>(ob.points.size());
    if (k >= static_cast<int>(F.object_card.size()))
      throw structural_error("conf_to_fin: label category too small");
    out.ob_map.push_back(static_cast<uint32_t>(k));
  }
  for (const auto& m : C.arrows) out.mor_map.push_back(F.find_arrow(m.u));
  return out;
}

CatFunctor conf_inclusion(const BuiltConf& strict, const BuiltConf& weak) {
  if (!(strict.carrier == weak.carrier) ||
      strict.tick_budget != weak.tick_budget)
    throw structural_error("conf inclusion: carriers or budgets disagree");
  CatFunctor out;
  for (const auto& ob : strict.objects)
    out.ob_map.push_back(weak.find_object(ob.points));
  for (uint32_t m = 0; m < strict.arrows.size(); ++m)
    out.mor_map.push_back(weak.find_arrow(
        out.ob_map[strict.cat.morphisms[m].src],
        out.ob_map[strict.cat.morphisms[m].tgt], strict.arrows[m].u,
        strict.arrows[m].h));
  return out;
}

// ---------------------------------------------------------------------------
// Matched pairs.
// ---------------------------------------------------------------------------

uint32_t BuiltMatched::find_object(uint32_t conf_ob, uint32_t label_ob) const {
  auto it = std::lower_bound(objects.begin(), objects.end(),
                             std::make_pair(conf_ob, label_ob));
  if (it == objects.end() || *it != std::make_pair(conf_ob, label_ob))
    throw structural_error("matched: object not stored");
  return static_cast<uint32_t>(it - objects.begin());
}

uint32_t BuiltMatched::find_arrow(uint32_t conf_mor, uint32_t label_mor) const {
  auto it = std::lower_bound(arrows.begin(), arrows.end(),
                             std::make_pair(conf_mor, label_mor));
  if (it == arrows.end() || *it != std::make_pair(conf_mor, label_mor))
    throw structural_error("matched: arrow not stored");
  return static_cast<uint32_t>(it - arrows.begin());
}

BuiltMatched build_conf_times_epifin(const BuiltConf& C, const BuiltEpiFin& E,
                                     int depth) {
  BuiltMatched Y;
  std::vector<uint32_t> ob_of_pair;  // parallel to Y.objects
  for (uint32_t c = 0; c < C.objects.size(); ++c) {
    int k = static_cast<int>(C.objects[c].points.size());
    for (uint32_t e = 0; e < E.objects.size(); ++e)
      if (E.objects[e].p.target_card == k) Y.objects.emplace_back(c, e);
  }
  for (uint32_t m = 0; m < C.arrows.size(); ++m) {
    const FinMap& u = C.arrows[m].u;
    for (uint32_t s = 0; s < E.arrows.size(); ++s)
      if (E.arrows[s].bottom == u) Y.arrows.emplace_back(m, s);
  }
  Y.cat.num_objects = static_cast<uint32_t>(Y.objects.size());
  Y.cat.bounded = true;
  for (const auto& [m, s] : Y.arrows) {
    uint32_t src = Y.find_object(C.cat.morphisms[m].src, E.cat.morphisms[s].src);
    uint32_t tgt = Y.find_object(C.cat.morphisms[m].tgt, E.cat.morphisms[s].tgt);
    Y.cat.morphisms.push_back({src, tgt});
  }
  Y.cat.identities.resize(Y.objects.size());
  for (uint32_t ob = 0; ob < Y.objects.size(); ++ob)
    Y.cat.identities[ob] = Y.find_arrow(C.cat.identities[Y.objects[ob].first],
                                        E.cat.identities[Y.objects[ob].second]);
  std::vector<std::vector<uint32_t>> by_src(Y.objects.size());
  for (uint32_t a = 0; a < Y.arrows.size(); ++a)
    by_src[Y.cat.morphisms[a].src].push_back(a);
  for (uint32_t f = 0; f < Y.arrows.size(); ++f)
    for (uint32_t g : by_src[Y.cat.morphisms[f].tgt]) {
      uint32_t cm = C.cat.compose(Y.arrows[f].first, Y.arrows[g].first);
      if (cm == FiniteCategory::kOverflow) continue;
      uint32_t es = E.cat.compose(Y.arrows[f].second, Y.arrows[g].second);
      Y.cat.set_compose(f, g, Y.find_arrow(cm, es));
    }
  check_unit_laws(Y.cat);
  for (const auto& [c, e] : Y.objects) {
    std::string cname = c < C.cat.object_names.size()
                            ? C.cat.object_names[c]
                            : std::to_string(c);
    Y.cat.object_names.push_back(cname + "*" + to_string(E.objects[e].p));
  }
  Y.nrv = nerve(Y.cat, depth);
  return Y;
}

CatFunctor matched_to_conf(const BuiltMatched& Y) {
  CatFunctor out;
  for (const auto& [c, e] : Y.objects) out.ob_map.push_back(c);
  for (const auto& [m, s] : Y.arrows) out.mor_map.push_back(m);
  return out;
}

CatFunctor matched_to_epifin(const BuiltMatched& Y) {
  CatFunctor out;
  for (const auto& [c, e] : Y.objects) out.ob_map.push_back(e);
  for (const auto& [m, s] : Y.arrows) out.mor_map.push_back(s);
  return out;
}

// ---------------------------------------------------------------------------
// Configurations in a covering.
// ---------------------------------------------------------------------------

ConfPiObjectData strict_object_from_upstairs(const CoveringSpace& cov,
                                             const VertexTuple& up) {
  if (!tuple_injective(up))
    throw structural_error("conf-pi: upstairs tuple must be injective");
  VertexTuple images;
  for (int x : up)
    images.push_back(cov.proj.vertex_map[static_cast<size_t>(x)]);
  auto [p, down] = collapse(images);
  return {std::move(p), up, std::move(down)};
}

uint32_t BuiltConfPi::find_object(const ConfPiObjectData& ob) const {
  auto less_than = [](const ConfPiObjectData& a, const ConfPiObjectData& b) {
    if (a.up.size() != b.up.size()) return a.up.size() < b.up.size();
    if (a.up != b.up) return a.up < b.up;
    return a.p < b.p;
  };
  auto it = std::lower_bound(objects.begin(), objects.end(), ob, less_than);
  if (it == objects.end() || it->up != ob.up || it->p != ob.p)
    throw structural_error("conf-pi: object not stored");
  return static_cast<uint32_t>(it - objects.begin());
}

uint32_t BuiltConfPi::find_arrow(uint32_t src, uint32_t tgt,
                                 const ConfPiMorphismData& m) const {
  auto below = [&](uint32_t id) {
    const auto& mor = cat.morphisms[id];
    if (mor.src != src) return mor.src < src;
    if (mor.tgt != tgt) return mor.tgt < tgt;
    const auto& d = arrows[id];
    if (d.top != m.top) return d.top < m.top;
    if (d.bottom != m.bottom) return d.bottom < m.bottom;
    if (d.up_h != m.up_h) return d.up_h < m.up_h;
    return d.down_h < m.down_h;
  };
  uint32_t lo = 0, hi = static_cast<uint32_t>(arrows.size());
  while (lo < hi) {
    uint32_t mid = lo + (hi - lo) / 2;
    if (below(mid))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo == arrows.size() || cat.morphisms[lo].src != src ||
      cat.morphisms[lo].tgt != tgt || arrows[lo].top != m.top ||
      arrows[lo].bottom != m.bottom || arrows[lo].up_h != m.up_h ||
      arrows[lo].down_h != m.down_h)
    throw structural_error("conf-pi: arrow not stored");
  return lo;
}

namespace {

struct ConfPiArrowRec {
  uint32_t src, tgt;
  ConfPiMorphismData data;
};

ConfPiMorphismData compose_conf_pi_data(const ConfPiMorphismData& f,
                                        const ConfPiMorphismData& g) {
  ConfPiMorphismData out;
  out.top = compose(f.top, g.top);
  out.bottom = compose(f.bottom, g.bottom);
  out.up_h.points = f.up_h.points;
  out.up_h.rows = f.up_h.rows;
  for (size_t t = 1; t < g.up_h.rows.size(); ++t) {
    VertexTuple row(static_cast<size_t>(f.up_h.points));
    for (int i = 1; i <= f.up_h.points; ++i)
      row[static_cast<size_t>(i) - 1] =
          g.up_h.rows[t][static_cast<size_t>(f.top(i)) - 1];
    out.up_h.rows.push_back(std::move(row));
  }
  out.down_h.points = f.down_h.points;
  out.down_h.rows = f.down_h.rows;
  for (size_t t = 1; t < g.down_h.rows.size(); ++t) {
    VertexTuple row(static_cast<size_t>(f.down_h.points));
    for (int i = 1; i <= f.down_h.points; ++i)
      row[static_cast<size_t>(i) - 1] =
          g.down_h.rows[t][static_cast<size_t>(f.bottom(i)) - 1];
    out.down_h.rows.push_back(std::move(row));
  }
  return out;
}

// Tickwise object condition on one slice of a lifted pair.
void check_conf_pi_slice(const ConfFlavor& flavor, const FinMap& p,
                         const VertexTuple& up_row, const VertexTuple& down_row) {
  if (flavor.injective) {
    if (!tuple_injective(up_row) || !tuple_injective(down_row))
      throw structural_error("conf-pi: lifted slice lost injectivity");
    return;
  }
  for (size_t i = 0; i < up_row.size(); ++i)
    for (size_t j = i + 1; j < up_row.size(); ++j)
      if (up_row[i] == up_row[j] &&
          p(static_cast<int>(i) + 1) == p(static_cast<int>(j) + 1))
        throw structural_error("conf-pi: lifted slice lost joint injectivity");
}

}  // namespace

BuiltConfPi build_conf_pi(const CoveringSpace& cov, ConfFlavor flavor,
                          int max_points, int tick_budget, int depth) {
  if (!validate_covering(cov))
    throw structural_error("conf-pi: projection is not a covering");
  if (!cov.total.is_simple() || !cov.base.is_simple())
    throw structural_error("conf-pi: carrier graphs must be simple");
  if (max_points < 0 || tick_budget < 0 || depth < 0)
    throw structural_error("conf-pi: bad bounds");
  BuiltConfPi out;
  out.cov = cov;
  out.flavor = flavor;
  out.max_points = max_points;
  out.tick_budget = tick_budget;

  for (int k = 0; k <= max_points; ++k)
    for_each_tuple(cov.total.vertex_count(), k, [&](const VertexTuple& up) {
      if (flavor.injective) {
        if (tuple_injective(up))
          out.objects.push_back(strict_object_from_upstairs(cov, up));
        return;
      }
      VertexTuple images;
      for (int x : up)
        images.push_back(cov.proj.vertex_map[static_cast<size_t>(x)]);
      const int lo = k == 0 ? 0 : 1;
      for (int l = lo; l <= k; ++l)
        for (const FinMap& p : enumerate_selfic(k, l)) {
          VertexTuple down(static_cast<size_t>(l), -1);
          bool ok = true;
          for (int i = 1; i <= k && ok; ++i) {
            int c = p(i);
            if (down[static_cast<size_t>(c) - 1] == -1)
              down[static_cast<size_t>(c) - 1] = images[static_cast<size_t>(i) - 1];
            else if (down[static_cast<size_t>(c) - 1] !=
                     images[static_cast<size_t>(i) - 1])
              ok = false;
          }
          for (int i = 1; i <= k && ok; ++i)
            for (int j = i + 1; j <= k && ok; ++j)
              if (up[static_cast<size_t>(i) - 1] == up[static_cast<size_t>(j) - 1] &&
                  p(i) == p(j))
                ok = false;
          if (ok) out.objects.push_back({p, up, down});
        }
    });

  auto base_nbrs = neighbor_lists(cov.base);
  auto maps = make_maps_cache(max_points);
  std::vector<ConfPiArrowRec> recs;
  for (uint32_t a = 0; a < out.objects.size(); ++a) {
    const auto& src = out.objects[a];
    const int ka = src.p.source_card;
    const int la = src.p.target_card;
    for_each_table(
        base_nbrs, flavor, src.down, tick_budget, [&](const TickTable& dh) {
          auto lifted = lift_tick_table(cov, dh, src.p, src.up);
          if (!lifted)
            throw structural_error("conf-pi: downstairs table failed to lift");
          const TickTable& uh = *lifted;
          for (size_t t = 0; t < uh.rows.size(); ++t)
            check_conf_pi_slice(flavor, src.p, uh.rows[t], dh.rows[t]);
          if (!is_sticky(uh))
            throw structural_error("conf-pi: lifted table is not sticky");
          const VertexTuple& fu = uh.rows.back();
          const VertexTuple& fd = dh.rows.back();
          for (uint32_t b = 0; b < out.objects.size(); ++b) {
            const auto& tgt = out.objects[b];
            const int kb = tgt.p.source_card;
            const int lb = tgt.p.target_card;
            for (const FinMap& top : maps[static_cast<size_t>(ka)]
                                        [static_cast<size_t>(kb)]) {
              bool tmatch = true;
              for (int i = 1; i <= ka && tmatch; ++i)
                tmatch = tgt.up[static_cast<size_t>(top(i)) - 1] ==
                         fu[static_cast<size_t>(i) - 1];
              if (!tmatch) continue;
              for (const FinMap& bottom : maps[static_cast<size_t>(la)]
                                              [static_cast<size_t>(lb)]) {
                bool bmatch = true;
                for (int j = 1; j <= la && bmatch; ++j)
                  bmatch = tgt.down[static_cast<size_t>(bottom(j)) - 1] ==
                           fd[static_cast<size_t>(j) - 1];
                if (!bmatch) continue;
                EpiFinMorphism square{EpiFinObject(src.p), EpiFinObject(tgt.p),
                                      top, bottom};
                if (!validate_epifin_morphism(square)) continue;
                recs.push_back({a, b, {top, bottom, uh, dh}});
              }
            }
          }
        });
  }
  std::sort(recs.begin(), recs.end(),
            [](const ConfPiArrowRec& x, const ConfPiArrowRec& y) {
              if (x.src != y.src) return x.src < y.src;
              if (x.tgt != y.tgt) return x.tgt < y.tgt;
              if (x.data.top != y.data.top) return x.data.top < y.data.top;
              if (x.data.bottom != y.data.bottom)
                return x.data.bottom < y.data.bottom;
              if (x.data.up_h != y.data.up_h) return x.data.up_h < y.data.up_h;
              return x.data.down_h < y.data.down_h;
            });

  out.cat.num_objects = static_cast<uint32_t>(out.objects.size());
  out.cat.bounded = true;
  for (const auto& rec : recs) {
    out.cat.morphisms.push_back({rec.src, rec.tgt});
    out.arrows.push_back(rec.data);
  }
  out.cat.identities.resize(out.objects.size());
  for (uint32_t ob = 0; ob < out.objects.size(); ++ob) {
    const auto& o = out.objects[ob];
    ConfPiMorphismData idm;
    idm.top = FinMap::identity(o.p.source_card);
    idm.bottom = FinMap::identity(o.p.target_card);
    idm.up_h = TickTable{o.p.source_card, {o.up}};
    idm.down_h = TickTable{o.p.target_card, {o.down}};
    out.cat.identities[ob] = out.find_arrow(ob, ob, idm);
  }
  auto by_src_len = group_by_src_len(out.cat, tick_budget, [&](uint32_t m) {
    return out.arrows[m].down_h.length();
  });
  for (uint32_t f = 0; f < out.arrows.size(); ++f) {
    const uint32_t mid = out.cat.morphisms[f].tgt;
    const int lf = out.arrows[f].down_h.length();
    for (int lg = 0; lf + lg <= tick_budget; ++lg)
      for (uint32_t g : by_src_len[mid][static_cast<size_t>(lg)]) {
        ConfPiMorphismData comp =
            compose_conf_pi_data(out.arrows[f], out.arrows[g]);
        out.cat.set_compose(f, g,
                            out.find_arrow(out.cat.morphisms[f].src,
                                           out.cat.morphisms[g].tgt, comp));
      }
  }
  check_unit_laws(out.cat);
  for (const auto& o : out.objects)
    out.cat.object_names.push_back(tuple_name(cov.total, o.up) + ":" +
                                   values_name(o.p));
  out.nrv = nerve(out.cat, depth);
  return out;
}

CatFunctor conf_pi_to_squares(const BuiltConfPi& P, const BuiltEpiFin& E) {
  CatFunctor out;
  for (const auto& o : P.objects)
    out.ob_map.push_back(E.find_object(EpiFinObject(o.p)));
  for (uint32_t m = 0; m < P.arrows.size(); ++m) {
    const auto& d = P.arrows[m];
    out.mor_map.push_back(E.find_arrow(
        {EpiFinObject(P.objects[P.cat.morphisms[m].src].p),
         EpiFinObject(P.objects[P.cat.morphisms[m].tgt].p), d.top, d.bottom}));
  }
  return out;
}

CatFunctor conf_pi_to_upstairs(const BuiltConfPi& P, const BuiltConf& CE) {
  CatFunctor out;
  for (const auto& o : P.objects) out.ob_map.push_back(CE.find_object(o.up));
  for (uint32_t m = 0; m < P.arrows.size(); ++m)
    out.mor_map.push_back(CE.find_arrow(out.ob_map[P.cat.morphisms[m].src],
                                        out.ob_map[P.cat.morphisms[m].tgt],
                                        P.arrows[m].top, P.arrows[m].up_h));
  return out;
}

CatFunctor conf_pi_to_downstairs(const BuiltConfPi& P, const BuiltConf& CM) {
  CatFunctor out;
  for (const auto& o : P.objects) out.ob_map.push_back(CM.find_object(o.down));
  for (uint32_t m = 0; m < P.arrows.size(); ++m)
    out.mor_map.push_back(CM.find_arrow(out.ob_map[P.cat.morphisms[m].src],
                                        out.ob_map[P.cat.morphisms[m].tgt],
                                        P.arrows[m].bottom, P.arrows[m].down_h));
  return out;
}

CatFunctor conf_pi_inclusion(const BuiltConfPi& strict, const BuiltConfPi& weak) {
  if (!(strict.cov == weak.cov) || strict.tick_budget != weak.tick_budget)
    throw structural_error("conf-pi inclusion: coverings or budgets disagree");
  CatFunctor out;
  for (const auto& o : strict.objects) out.ob_map.push_back(weak.find_object(o));
  for (uint32_t m = 0; m < strict.arrows.size(); ++m)
    out.mor_map.push_back(weak.find_arrow(out.ob_map[strict.cat.morphisms[m].src],
                                          out.ob_map[strict.cat.morphisms[m].tgt],
                                          strict.arrows[m]));
  return out;
}

CatFunctor conf_pi_to_matched(const BuiltConfPi& P, const BuiltConf& CM,
                              const BuiltEpiFin& E, const BuiltMatched& Y) {
  CatFunctor down = conf_pi_to_downstairs(P, CM);
  CatFunctor squares = conf_pi_to_squares(P, E);
  CatFunctor out;
  for (uint32_t ob = 0; ob < P.objects.size(); ++ob)
    out.ob_map.push_back(Y.find_object(down.ob_map[ob], squares.ob_map[ob]));
  for (uint32_t m = 0; m < P.arrows.size(); ++m)
    out.mor_map.push_back(Y.find_arrow(down.mor_map[m], squares.mor_map[m]));
  return out;
}

// ---------------------------------------------------------------------------
// Stratum labels.
// ---------------------------------------------------------------------------

EpiFinObject stratum_label(const CoveringSpace& cov, const VertexTuple& points) {
  if (!tuple_injective(points))
    throw structural_error("stratum: tuple must be injective");
  VertexTuple images;
  for (int x : points)
    images.push_back(cov.proj.vertex_map[static_cast<size_t>(x)]);
  return EpiFinObject(collapse(images).first);
}

TriFinObject stratum_label(const Tower& t, const VertexTuple& points) {
  if (!tuple_injective(points))
    throw structural_error("stratum: tuple must be injective");
  VertexTuple mid_images;
  for (int x : points)
    mid_images.push_back(t.fine.proj.vertex_map[static_cast<size_t>(x)]);
  auto [fine_to_mid, mid_reps] = collapse(mid_images);
  VertexTuple coarse_images;
  for (int x : mid_reps)
    coarse_images.push_back(t.coarse.proj.vertex_map[static_cast<size_t>(x)]);
  auto [mid_to_coarse, coarse_reps] = collapse(coarse_images);
  (void)coarse_reps;
  return TriFinObject(fine_to_mid, mid_to_coarse);
}

StratumCensus strata_census(const CoveringSpace& cov, int k) {
  std::map<EpiFinObject, long long> acc;
  long long total = 0;
  for_each_tuple(cov.total.vertex_count(), k, [&](const VertexTuple& t) {
    if (!tuple_injective(t)) return;
    ++total;
    ++acc[stratum_label(cov, t)];
  });
  StratumCensus out;
  out.total = total;
  for (auto& [label, count] : acc) out.counts.emplace_back(label, count);
  return out;
}

TowerStratumCensus strata_census(const Tower& t, int k) {
  std::map<TriFinObject, long long> acc;
  long long total = 0;
  for_each_tuple(t.fine.total.vertex_count(), k, [&](const VertexTuple& tup) {
    if (!tuple_injective(tup)) return;
    ++total;
    ++acc[stratum_label(t, tup)];
  });
  TowerStratumCensus out;
  out.total = total;
  for (auto& [label, count] : acc) out.counts.emplace_back(label, count);
  return out;
}

std::vector<EpiFinObject> possible_labels(int k) {
  std::vector<EpiFinObject> out;
  const int lo = k == 0 ? 0 : 1;
  for (int l = lo; l <= k; ++l)
    for (const FinMap& p : enumerate_selfic(k, l)) out.push_back(EpiFinObject(p));
  return out;
}

std::vector<TriFinObject> possible_tower_labels(int k) {
  std::vector<TriFinObject> out;
  const int mlo = k == 0 ? 0 : 1;
  for (int m = mlo; m <= k; ++m)
    for (const FinMap& fine : enumerate_selfic(k, m)) {
      const int clo = m == 0 ? 0 : 1;
      for (int c = clo; c <= m; ++c)
        for (const FinMap& coarse : enumerate_selfic(m, c))
          out.emplace_back(fine, coarse);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Local (anchored) variant.
// ---------------------------------------------------------------------------

namespace {

LocSSet build_loc_impl(const TruncatedSSet& X, int r_max,
                       const std::function<bool(uint32_t)>& pred,
                       const std::function<int(uint32_t)>& anchor_of) {
  if (r_max < 0 || r_max + 1 > X.max_dim)
    throw structural_error("loc: nerve too shallow for the requested depth");
  LocSSet out;
  out.sset.max_dim = r_max;
  out.sset.levels.resize(static_cast<size_t>(r_max) + 1);
  out.parent.resize(static_cast<size_t>(r_max) + 1);
  out.anchor.resize(static_cast<size_t>(r_max) + 1);

  std::vector<std::vector<uint32_t>> pos(static_cast<size_t>(r_max) + 2);
  for (int r = 0; r <= r_max; ++r) {
    auto ult = ultimate_target_table(X, r + 1);
    auto& level_pos = pos[static_cast<size_t>(r) + 1];
    level_pos.assign(X.size(r + 1), kRemoved);
    for (uint32_t s = 0; s < X.size(r + 1); ++s) {
      if (!pred(ult[s])) continue;
      level_pos[s] = static_cast<uint32_t>(out.parent[static_cast<size_t>(r)].size());
      out.parent[static_cast<size_t>(r)].push_back(s);
      out.anchor[static_cast<size_t>(r)].push_back(anchor_of(ult[s]));
    }
    out.sset.levels[static_cast<size_t>(r)].count =
        static_cast<uint32_t>(out.parent[static_cast<size_t>(r)].size());
  }
  for (int r = 1; r <= r_max; ++r) {
    auto& L = out.sset.levels[static_cast<size_t>(r)];
    L.face.assign(static_cast<size_t>(r) + 1, {});
    for (auto& tab : L.face) tab.resize(L.count);
    for (uint32_t c = 0; c < L.count; ++c) {
      uint32_t par = out.parent[static_cast<size_t>(r)][c];
      for (int i = 0; i <= r; ++i) {
        uint32_t image = pos[static_cast<size_t>(r)][X.face(r + 1, i + 1, par)];
        if (image == kRemoved)
          throw structural_error("loc: face left the anchored part");
        L.face[static_cast<size_t>(i)][c] = image;
      }
    }
  }
  for (int r = 0; r + 1 <= r_max; ++r) {
    auto& L = out.sset.levels[static_cast<size_t>(r)];
    L.degen.assign(static_cast<size_t>(r) + 1, {});
    for (auto& tab : L.degen) tab.resize(L.count);
    for (uint32_t c = 0; c < L.count; ++c) {
      uint32_t par = out.parent[static_cast<size_t>(r)][c];
      for (int i = 0; i <= r; ++i) {
        uint32_t image =
            pos[static_cast<size_t>(r) + 2][X.degen(r + 1, i + 1, par)];
        if (image == kRemoved)
          throw structural_error("loc: degeneracy left the anchored part");
        L.degen[static_cast<size_t>(i)][c] = image;
      }
    }
  }
  return out;
}

}  // namespace

LocSSet build_conf_pi_loc(const BuiltConfPi& P, int r_max) {
  return build_loc_impl(
      P.nrv.sset, r_max,
      [&](uint32_t ob) {
        return P.objects[ob].p.source_card == 1 &&
               P.objects[ob].p.target_card == 1;
      },
      [&](uint32_t ob) { return P.objects[ob].up[0]; });
}

LocSSet build_conf_loc(const BuiltConf& C, int r_max) {
  return build_loc_impl(
      C.nrv.sset, r_max,
      [&](uint32_t ob) { return C.objects[ob].points.size() == 1; },
      [&](uint32_t ob) { return C.objects[ob].points[0]; });
}

// ---------------------------------------------------------------------------
// Configurations in a tower.
// ---------------------------------------------------------------------------

ConfTowerObjectData tower_object_from_fine(const Tower& t,
                                           const VertexTuple& fine) {
  if (!tuple_injective(fine))
    throw structural_error("tower conf: fine tuple must be injective");
  ConfTowerObjectData out;
  VertexTuple mid_images;
  for (int x : fine)
    mid_images.push_back(t.fine.proj.vertex_map[static_cast<size_t>(x)]);
  auto [fine_to_mid, mid_reps] = collapse(mid_images);
  VertexTuple coarse_images;
  for (int x : mid_reps)
    coarse_images.push_back(t.coarse.proj.vertex_map[static_cast<size_t>(x)]);
  auto [mid_to_coarse, coarse_reps] = collapse(coarse_images);
  out.chain = TriFinObject(fine_to_mid, mid_to_coarse);
  out.pts[2] = fine;
  out.pts[1] = mid_reps;
  out.pts[0] = coarse_reps;
  return out;
}

uint32_t BuiltConfTower::find_object(const VertexTuple& fine_points) const {
  auto below = [&](uint32_t id) {
    const auto& p = objects[id].pts[2];
    if (p.size() != fine_points.size()) return p.size() < fine_points.size();
    return p < fine_points;
  };
  uint32_t lo = 0, hi = static_cast<uint32_t>(objects.size());
  while (lo < hi) {
    uint32_t mid = lo + (hi - lo) / 2;
    if (below(mid))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo == objects.size() || objects[lo].pts[2] != fine_points)
    throw structural_error("tower conf: object not stored");
  return lo;
}

namespace {

struct TowerArrowRec {
  uint32_t src, tgt;
  ConfTowerMorphismData data;
};

// w with w(src_step(i)) == tgt_step(upper(i)); src_step is surjective, so w
// is determined; returns nothing on inconsistency.
std::optional<FinMap> derive_lower_map(const FinMap& src_step,
                                       const FinMap& tgt_step,
                                       const FinMap& upper) {
  std::vector<int> vals(static_cast<size_t>(src_step.target_card), 0);
  for (int i = 1; i <= src_step.source_card; ++i) {
    int c = src_step(i);
    int v = tgt_step(upper(i));
    if (vals[static_cast<size_t>(c) - 1] == 0)
      vals[static_cast<size_t>(c) - 1] = v;
    else if (vals[static_cast<size_t>(c) - 1] != v)
      return std::nullopt;
  }
  return FinMap(src_step.target_card, tgt_step.target_card, std::move(vals));
}

int tower_arrow_cmp(const ConfTowerMorphismData& a,
                    const ConfTowerMorphismData& b) {
  for (int j = 2; j >= 0; --j) {
    if (a.u[j] != b.u[j]) return a.u[j] < b.u[j] ? -1 : 1;
    if (a.h[j] != b.h[j]) return a.h[j] < b.h[j] ? -1 : 1;
  }
  return 0;
}

}  // namespace

BuiltConfTower build_conf_tower(const Tower& t, int max_points, int tick_budget,
                                int depth) {
  if (!validate_tower(t))
    throw structural_error("tower conf: stages do not validate");
  if (!t.fine.total.is_simple() || !t.fine.base.is_simple() ||
      !t.coarse.base.is_simple())
    throw structural_error("tower conf: stage graphs must be simple");
  if (max_points < 0 || tick_budget < 0 || depth < 0)
    throw structural_error("tower conf: bad bounds");
  BuiltConfTower out;
  out.tower = t;
  out.max_points = max_points;
  out.tick_budget = tick_budget;

  for (int k = 0; k <= max_points; ++k)
    for_each_tuple(t.fine.total.vertex_count(), k, [&](const VertexTuple& tup) {
      if (tuple_injective(tup))
        out.objects.push_back(tower_object_from_fine(t, tup));
    });

  auto coarse_nbrs = neighbor_lists(t.coarse.base);
  auto maps = make_maps_cache(max_points);
  std::vector<TowerArrowRec> recs;
  for (uint32_t a = 0; a < out.objects.size(); ++a) {
    const auto& src = out.objects[a];
    const int ka = static_cast<int>(src.pts[2].size());
    for_each_table(
        coarse_nbrs, kStrictFlavor, src.pts[0], tick_budget,
        [&](const TickTable& h0) {
          auto h1 = lift_tick_table(t.coarse, h0, src.chain.mid_to_coarse,
                                    src.pts[1]);
          if (!h1)
            throw structural_error("tower conf: middle lift failed");
          auto h2 =
              lift_tick_table(t.fine, *h1, src.chain.fine_to_mid, src.pts[2]);
          if (!h2)
            throw structural_error("tower conf: fine lift failed");
          for (const auto& row : h1->rows)
            if (!tuple_injective(row))
              throw structural_error("tower conf: middle lift collided");
          for (const auto& row : h2->rows)
            if (!tuple_injective(row))
              throw structural_error("tower conf: fine lift collided");
          const VertexTuple& f2 = h2->rows.back();
          for (uint32_t b = 0; b < out.objects.size(); ++b) {
            const auto& tgt = out.objects[b];
            const int kb = static_cast<int>(tgt.pts[2].size());
            for (const FinMap& u2 : maps[static_cast<size_t>(ka)]
                                      [static_cast<size_t>(kb)]) {
              bool match = true;
              for (int i = 1; i <= ka && match; ++i)
                match = tgt.pts[2][static_cast<size_t>(u2(i)) - 1] ==
                        f2[static_cast<size_t>(i) - 1];
              if (!match) continue;
              auto u1 = derive_lower_map(src.chain.fine_to_mid,
                                         tgt.chain.fine_to_mid, u2);
              if (!u1)
                throw structural_error(
                    "tower conf: derived middle relabeling inconsistent");
              auto u0 = derive_lower_map(src.chain.mid_to_coarse,
                                         tgt.chain.mid_to_coarse, *u1);
              if (!u0)
                throw structural_error(
                    "tower conf: derived coarse relabeling inconsistent");
              for (int c = 1; c <= u1->source_card; ++c)
                if (tgt.pts[1][static_cast<size_t>((*u1)(c)) - 1] !=
                    h1->rows.back()[static_cast<size_t>(c) - 1])
                  throw structural_error("tower conf: middle endpoint drifted");
              for (int c = 1; c <= u0->source_card; ++c)
                if (tgt.pts[0][static_cast<size_t>((*u0)(c)) - 1] !=
                    h0.rows.back()[static_cast<size_t>(c) - 1])
                  throw structural_error("tower conf: coarse endpoint drifted");
              if (!validate_epifin_morphism(
                      {EpiFinObject(src.chain.fine_to_mid),
                       EpiFinObject(tgt.chain.fine_to_mid), u2, *u1}) ||
                  !validate_epifin_morphism(
                      {EpiFinObject(src.chain.mid_to_coarse),
                       EpiFinObject(tgt.chain.mid_to_coarse), *u1, *u0}))
                throw structural_error("tower conf: derived squares invalid");
              TowerArrowRec rec;
              rec.src = a;
              rec.tgt = b;
              rec.data.u[0] = *u0;
              rec.data.u[1] = *u1;
              rec.data.u[2] = u2;
              rec.data.h[0] = h0;
              rec.data.h[1] = *h1;
              rec.data.h[2] = *h2;
              recs.push_back(std::move(rec));
            }
          }
        });
  }
  std::sort(recs.begin(), recs.end(),
            [](const TowerArrowRec& x, const TowerArrowRec& y) {
              if (x.src != y.src) return x.src < y.src;
              if (x.tgt != y.tgt) return x.tgt < y.tgt;
              return tower_arrow_cmp(x.data, y.data) < 0;
            });

  out.cat.num_objects = static_cast<uint32_t>(out.objects.size());
  out.cat.bounded = true;
  for (const auto& rec : recs) {
    out.cat.morphisms.push_back({rec.src, rec.tgt});
    out.arrows.push_back(rec.data);
  }
  auto find_tower_arrow = [&](uint32_t src, uint32_t tgt,
                              const ConfTowerMorphismData& m) -> uint32_t {
    auto below = [&](uint32_t id) {
      const auto& mor = out.cat.morphisms[id];
      if (mor.src != src) return mor.src < src;
      if (mor.tgt != tgt) return mor.tgt < tgt;
      return tower_arrow_cmp(out.arrows[id], m) < 0;
    };
    uint32_t lo = 0, hi = static_cast<uint32_t>(out.arrows.size());
    while (lo < hi) {
      uint32_t mid = lo + (hi - lo) / 2;
      if (below(mid))
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo == out.arrows.size() || out.cat.morphisms[lo].src != src ||
        out.cat.morphisms[lo].tgt != tgt ||
        tower_arrow_cmp(out.arrows[lo], m) != 0)
      throw structural_error("tower conf: arrow not stored");
    return lo;
  };
  out.cat.identities.resize(out.objects.size());
  for (uint32_t ob = 0; ob < out.objects.size(); ++ob) {
    const auto& o = out.objects[ob];
    ConfTowerMorphismData idm;
    idm.u[2] = FinMap::identity(static_cast<int>(o.pts[2].size()));
    idm.u[1] = FinMap::identity(static_cast<int>(o.pts[1].size()));
    idm.u[0] = FinMap::identity(static_cast<int>(o.pts[0].size()));
    for (int j = 0; j < 3; ++j)
      idm.h[j] = TickTable{static_cast<int>(o.pts[j].size()), {o.pts[j]}};
    out.cat.identities[ob] = find_tower_arrow(ob, ob, idm);
  }
  auto by_src_len = group_by_src_len(out.cat, tick_budget, [&](uint32_t m) {
    return out.arrows[m].h[0].length();
  });
  for (uint32_t f = 0; f < out.arrows.size(); ++f) {
    const uint32_t mid = out.cat.morphisms[f].tgt;
    const int lf = out.arrows[f].h[0].length();
    for (int lg = 0; lf + lg <= tick_budget; ++lg)
      for (uint32_t g : by_src_len[mid][static_cast<size_t>(lg)]) {
        ConfTowerMorphismData comp;
        for (int j = 0; j < 3; ++j) {
          comp.u[j] = compose(out.arrows[f].u[j], out.arrows[g].u[j]);
          comp.h[j].points = out.arrows[f].h[j].points;
          comp.h[j].rows = out.arrows[f].h[j].rows;
          for (size_t tt = 1; tt < out.arrows[g].h[j].rows.size(); ++tt) {
            VertexTuple row(static_cast<size_t>(comp.h[j].points));
            for (int i = 1; i <= comp.h[j].points; ++i)
              row[static_cast<size_t>(i) - 1] =
                  out.arrows[g].h[j]
                      .rows[tt][static_cast<size_t>(out.arrows[f].u[j](i)) - 1];
            comp.h[j].rows.push_back(std::move(row));
          }
        }
        out.cat.set_compose(f, g,
                            find_tower_arrow(out.cat.morphisms[f].src,
                                             out.cat.morphisms[g].tgt, comp));
      }
  }
  check_unit_laws(out.cat);
  for (const auto& o : out.objects)
    out.cat.object_names.push_back(tuple_name(t.fine.total, o.pts[2]));
  out.nrv = nerve(out.cat, depth);
  return out;
}

// ---------------------------------------------------------------------------
// Multi-path lifting of tick tables.
// ---------------------------------------------------------------------------

std::optional<TickTable> lift_tick_table(const CoveringSpace& cov,
                                         const TickTable& base,
                                         const FinMap& p,
                                         const VertexTuple& start) {
  if (!cov.base.is_simple())
    throw structural_error("lift: base graph must be simple");
  if (base.points != p.target_card ||
      static_cast<int>(start.size()) != p.source_card || base.rows.empty())
    return std::nullopt;
  const int k = p.source_card;
  for (int i = 1; i <= k; ++i)
    if (cov.proj.vertex_map[static_cast<size_t>(start[static_cast<size_t>(i) - 1])] !=
        base.rows[0][static_cast<size_t>(p(i)) - 1])
      return std::nullopt;
  auto total_stars = cov.total.stars();
  TickTable out;
  out.points = k;
  out.rows.push_back(start);
  for (size_t tt = 0; tt + 1 < base.rows.size(); ++tt) {
    const VertexTuple& cur = out.rows.back();
    VertexTuple next(static_cast<size_t>(k));
    for (int i = 1; i <= k; ++i) {
      int z = base.rows[tt][static_cast<size_t>(p(i)) - 1];
      int z2 = base.rows[tt + 1][static_cast<size_t>(p(i)) - 1];
      int at = cur[static_cast<size_t>(i) - 1];
      if (z == z2) {
        next[static_cast<size_t>(i) - 1] = at;
        continue;
      }
      int e = cov.base.edge_between(z, z2);
      if (e < 0) return std::nullopt;
      uint32_t base_dart = cov.base.edges[static_cast<size_t>(e)].u == z
                               ? 2 * static_cast<uint32_t>(e)
                               : 2 * static_cast<uint32_t>(e) + 1;
      uint32_t chosen = 0;
      int matches = 0;
      for (uint32_t cand : total_stars[static_cast<size_t>(at)])
        if (dart_image(cov.total, cov.base, cov.proj, cand) == base_dart) {
          chosen = cand;
          ++matches;
        }
      if (matches != 1) return std::nullopt;
      next[static_cast<size_t>(i) - 1] = cov.total.dart_head(chosen);
    }
    out.rows.push_back(std::move(next));
  }
  return out;
}

}  // namespace covcat
