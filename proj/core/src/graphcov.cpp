#include "covcat/graphcov.hpp"

#include <algorithm>
#include <set>

namespace covcat {

int Graph::vertex_index(int external_id) const {
  for (int i = 0; i < vertex_count(); ++i)
    if (vertex_ids[static_cast<size_t>(i)] == external_id) return i;
  throw structural_error("graph: unknown vertex id " + std::to_string(external_id));
}

bool Graph::is_simple() const {
  std::set<std::pair<int, int>> seen;
  for (const auto& e : edges) {
    if (e.u == e.v) return false;
    auto norm = std::minmax(e.u, e.v);
    if (!seen.insert({norm.first, norm.second}).second) return false;
  }
  return true;
}

int Graph::dart_tail(uint32_t d) const {
  const Edge& e = edges[d >> 1];
  return (d & 1u) ? e.v : e.u;
}

int Graph::dart_head(uint32_t d) const { return dart_tail(dart_reverse(d)); }

std::vector<std::vector<uint32_t>> Graph::stars() const {
  std::vector<std::vector<uint32_t>> out(static_cast<size_t>(vertex_count()));
  for (uint32_t d = 0; d < 2 * static_cast<uint32_t>(edge_count()); ++d)
    out[static_cast<size_t>(dart_tail(d))].push_back(d);
  return out;
}

int Graph::edge_between(int x, int y) const {
  if (!is_simple())
    throw structural_error("edge_between: graph is not simple");
  for (int e = 0; e < edge_count(); ++e) {
    const Edge& ed = edges[static_cast<size_t>(e)];
    if ((ed.u == x && ed.v == y) || (ed.u == y && ed.v == x)) return e;
  }
  return -1;
}

Graph make_graph(std::vector<int> vertex_ids,
                 const std::vector<std::pair<int, int>>& edges_by_id) {
  Graph G;
  G.vertex_ids = std::move(vertex_ids);
  std::set<int> distinct(G.vertex_ids.begin(), G.vertex_ids.end());
  if (distinct.size() != G.vertex_ids.size())
    throw structural_error("graph: duplicate vertex id");
  for (const auto& [u, v] : edges_by_id)
    G.edges.push_back({G.vertex_index(u), G.vertex_index(v)});
  return G;
}

void validate_graph_map(const Graph& src, const Graph& tgt, const GraphMap& f) {
  if (f.vertex_map.size() != static_cast<size_t>(src.vertex_count()))
    throw structural_error("graph map: vertex table size mismatch");
  if (f.edge_map.size() != static_cast<size_t>(src.edge_count()))
    throw structural_error("graph map: edge table size mismatch");
  if (!f.flip.empty() && f.flip.size() != static_cast<size_t>(src.edge_count()))
    throw structural_error("graph map: flip table size mismatch");
  for (int v : f.vertex_map)
    if (v < 0 || v >= tgt.vertex_count())
      throw structural_error("graph map: vertex image out of range");
  for (int e : f.edge_map)
    if (e < 0 || e >= tgt.edge_count())
      throw structural_error("graph map: edge image out of range");
  for (char b : f.flip)
    if (b != 0 && b != 1)
      throw structural_error("graph map: flip entry must be 0 or 1");
  for (int e = 0; e < src.edge_count(); ++e) {
    const auto& ed = src.edges[static_cast<size_t>(e)];
    const auto& im = tgt.edges[static_cast<size_t>(f.edge_map[static_cast<size_t>(e)])];
    int fu = f.vertex_map[static_cast<size_t>(ed.u)];
    int fv = f.vertex_map[static_cast<size_t>(ed.v)];
    bool ok = (fu == im.u && fv == im.v) || (fu == im.v && fv == im.u);
    if (!ok)
      throw structural_error("graph map: edge " + std::to_string(e) +
                             " does not land on its image's endpoints");
  }
}

uint32_t dart_image(const Graph& src, const Graph& tgt, const GraphMap& f,
                    uint32_t dart) {
  const uint32_t e = dart >> 1;
  const uint32_t ei = static_cast<uint32_t>(f.edge_map[e]);
  const auto& im = tgt.edges[ei];
  const int fa = f.vertex_map[static_cast<size_t>(src.dart_tail(dart))];
  const int fb = f.vertex_map[static_cast<size_t>(src.dart_head(dart))];
  if (im.u == im.v) {
    // Image is a loop; only the flip bit can orient the image dart.
    const uint32_t fl = f.flip.empty() ? 0u : static_cast<uint32_t>(f.flip[e]);
    return 2 * ei + ((dart & 1u) ^ fl);
  }
  if (fa == im.u && fb == im.v) return 2 * ei;
  if (fa == im.v && fb == im.u) return 2 * ei + 1;
  throw structural_error("dart image: endpoints do not match the image edge");
}

GraphMap identity_graph_map(const Graph& G) {
  GraphMap f;
  f.vertex_map.resize(static_cast<size_t>(G.vertex_count()));
  for (int i = 0; i < G.vertex_count(); ++i) f.vertex_map[static_cast<size_t>(i)] = i;
  f.edge_map.resize(static_cast<size_t>(G.edge_count()));
  for (int e = 0; e < G.edge_count(); ++e) f.edge_map[static_cast<size_t>(e)] = e;
  return f;
}

GraphMap compose_graph_maps(const Graph& A, const Graph& B, const Graph& C,
                            const GraphMap& f, const GraphMap& g) {
  GraphMap h;
  h.vertex_map.resize(f.vertex_map.size());
  for (size_t a = 0; a < f.vertex_map.size(); ++a)
    h.vertex_map[a] = g.vertex_map[static_cast<size_t>(f.vertex_map[a])];
  h.edge_map.resize(f.edge_map.size());
  h.flip.assign(f.edge_map.size(), 0);
  for (size_t e = 0; e < f.edge_map.size(); ++e) {
    h.edge_map[e] = g.edge_map[static_cast<size_t>(f.edge_map[e])];
    const auto& im = C.edges[static_cast<size_t>(h.edge_map[e])];
    if (im.u == im.v) {
      uint32_t d2 = dart_image(B, C, g,
                               dart_image(A, B, f, 2 * static_cast<uint32_t>(e)));
      h.flip[e] = static_cast<char>(d2 & 1u);
    }
  }
  return h;
}

// ---------------------------------------------------------------------------
// Coverings.
// ---------------------------------------------------------------------------

namespace {

// Connected components by vertex; returns component index per vertex and
// the smallest vertex of each component, components ordered by that root.
std::vector<int> graph_components(const Graph& G, std::vector<int>* roots) {
  std::vector<int> comp(static_cast<size_t>(G.vertex_count()), -1);
  auto st = G.stars();
  int next = 0;
  for (int v = 0; v < G.vertex_count(); ++v) {
    if (comp[static_cast<size_t>(v)] != -1) continue;
    if (roots != nullptr) roots->push_back(v);
    std::vector<int> stack{v};
    comp[static_cast<size_t>(v)] = next;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (uint32_t d : st[static_cast<size_t>(x)]) {
        int y = G.dart_head(d);
        if (comp[static_cast<size_t>(y)] == -1) {
          comp[static_cast<size_t>(y)] = next;
          stack.push_back(y);
        }
      }
    }
    ++next;
  }
  return comp;
}

}  // namespace

bool validate_covering(const CoveringSpace& pi) {
  validate_graph_map(pi.total, pi.base, pi.proj);
  auto total_stars = pi.total.stars();
  auto base_stars = pi.base.stars();
  for (int x = 0; x < pi.total.vertex_count(); ++x) {
    std::vector<uint32_t> images;
    for (uint32_t d : total_stars[static_cast<size_t>(x)])
      images.push_back(dart_image(pi.total, pi.base, pi.proj, d));
    std::sort(images.begin(), images.end());
    if (images != base_stars[static_cast<size_t>(pi.proj.vertex_map[static_cast<size_t>(x)])])
      return false;
  }
  // Fiber cardinality is constant over each base component.
  std::vector<int> comp = graph_components(pi.base, nullptr);
  int num_comp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<int> fiber_size(static_cast<size_t>(pi.base.vertex_count()), 0);
  for (int v : pi.proj.vertex_map) ++fiber_size[static_cast<size_t>(v)];
  for (int c = 0; c < num_comp; ++c) {
    int size = -1;
    for (int z = 0; z < pi.base.vertex_count(); ++z) {
      if (comp[static_cast<size_t>(z)] != c) continue;
      if (size == -1) size = fiber_size[static_cast<size_t>(z)];
      if (size != fiber_size[static_cast<size_t>(z)]) return false;
    }
  }
  return true;
}

std::vector<std::vector<int>> fibers(const CoveringSpace& pi) {
  std::vector<std::vector<int>> out(static_cast<size_t>(pi.base.vertex_count()));
  for (int x = 0; x < pi.total.vertex_count(); ++x)
    out[static_cast<size_t>(pi.proj.vertex_map[static_cast<size_t>(x)])].push_back(x);
  return out;
}

// ---------------------------------------------------------------------------
// Paths and lifting.
// ---------------------------------------------------------------------------

void validate_edge_path(const Graph& G, const EdgePath& p) {
  if (p.start < 0 || p.start >= G.vertex_count())
    throw structural_error("path: start vertex out of range");
  int at = p.start;
  for (uint32_t d : p.steps) {
    if (d >= 2 * static_cast<uint32_t>(G.edge_count()))
      throw structural_error("path: dart out of range");
    if (G.dart_tail(d) != at)
      throw structural_error("path: dart tail does not continue the walk");
    at = G.dart_head(d);
  }
}

int edge_path_end(const Graph& G, const EdgePath& p) {
  return p.steps.empty() ? p.start
                         : G.dart_head(p.steps.back());
}

EdgePath lift_path(const CoveringSpace& pi, const EdgePath& p, int start_total) {
  validate_edge_path(pi.base, p);
  if (start_total < 0 || start_total >= pi.total.vertex_count())
    throw structural_error("lift: start vertex out of range");
  if (pi.proj.vertex_map[static_cast<size_t>(start_total)] != p.start)
    throw structural_error("lift: start vertex does not sit over the path start");
  auto total_stars = pi.total.stars();
  EdgePath out;
  out.start = start_total;
  int at = start_total;
  for (uint32_t d : p.steps) {
    uint32_t chosen = 0;
    int matches = 0;
    for (uint32_t cand : total_stars[static_cast<size_t>(at)])
      if (dart_image(pi.total, pi.base, pi.proj, cand) == d) {
        chosen = cand;
        ++matches;
      }
    if (matches != 1)
      throw structural_error("lift: step has " + std::to_string(matches) +
                             " preimage darts, expected exactly 1");
    out.steps.push_back(chosen);
    at = pi.total.dart_head(chosen);
  }
  return out;
}

std::vector<EdgePath> lift_multipath(const CoveringSpace& pi,
                                     const std::vector<EdgePath>& paths,
                                     const std::vector<int>& starts) {
  if (paths.size() != starts.size())
    throw structural_error("lift: one start per path required");
  std::vector<EdgePath> out;
  for (size_t i = 0; i < paths.size(); ++i)
    out.push_back(lift_path(pi, paths[i], starts[i]));
  return out;
}

// ---------------------------------------------------------------------------
// Deck transformations and fiberwise maps.
// ---------------------------------------------------------------------------

namespace {

// Shared propagation core. Given target star data and a per-dart goal in
// the base of the target covering, extend a partial vertex assignment from
// the component roots; returns false when a step is not uniquely matched
// or assignments conflict.
struct Propagation {
  const Graph& src;
  const Graph& tgt;
  const CoveringSpace& tgt_cov;  // covering out of tgt
  std::vector<std::vector<uint32_t>> src_stars;
  std::vector<std::vector<uint32_t>> tgt_stars;

  Propagation(const Graph& s, const Graph& t, const CoveringSpace& tc)
      : src(s), tgt(t), tgt_cov(tc), src_stars(s.stars()), tgt_stars(t.stars()) {}

  // goal(d) = required dart image in tgt_cov.base of the image of dart d.
  template <typename Goal>
  bool run(const std::vector<int>& roots, const std::vector<int>& root_images,
           const Goal& goal, std::vector<int>& vertex_map,
           std::vector<uint32_t>& dart_map) const {
    vertex_map.assign(static_cast<size_t>(src.vertex_count()), -1);
    dart_map.assign(static_cast<size_t>(2 * src.edge_count()), 0xffffffffu);
    for (size_t c = 0; c < roots.size(); ++c) {
      std::vector<int> stack{roots[c]};
      vertex_map[static_cast<size_t>(roots[c])] = root_images[c];
      while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        int gx = vertex_map[static_cast<size_t>(x)];
        for (uint32_t d : src_stars[static_cast<size_t>(x)]) {
          uint32_t want = goal(d);
          uint32_t chosen = 0;
          int matches = 0;
          for (uint32_t cand : tgt_stars[static_cast<size_t>(gx)])
            if (dart_image(tgt_cov.total, tgt_cov.base, tgt_cov.proj, cand) ==
                want) {
              chosen = cand;
              ++matches;
            }
          if (matches != 1) return false;
          if (dart_map[d] == 0xffffffffu) {
            dart_map[d] = chosen;
          } else if (dart_map[d] != chosen) {
            return false;
          }
          int y = src.dart_head(d);
          int gy = tgt.dart_head(chosen);
          if (vertex_map[static_cast<size_t>(y)] == -1) {
            vertex_map[static_cast<size_t>(y)] = gy;
            stack.push_back(y);
          } else if (vertex_map[static_cast<size_t>(y)] != gy) {
            return false;
          }
        }
      }
    }
    return true;
  }
};

// Assemble a GraphMap from a full dart assignment. flip bits are only set
// where the image edge is a loop.
GraphMap map_from_darts(const Graph& src, const Graph& tgt,
                        const std::vector<int>& vertex_map,
                        const std::vector<uint32_t>& dart_map) {
  GraphMap g;
  g.vertex_map = vertex_map;
  g.edge_map.resize(static_cast<size_t>(src.edge_count()));
  g.flip.assign(static_cast<size_t>(src.edge_count()), 0);
  for (int e = 0; e < src.edge_count(); ++e) {
    uint32_t d = dart_map[static_cast<size_t>(2 * e)];
    g.edge_map[static_cast<size_t>(e)] = static_cast<int>(d >> 1);
    const auto& im = tgt.edges[d >> 1];
    if (im.u == im.v) g.flip[static_cast<size_t>(e)] = static_cast<char>(d & 1u);
  }
  return g;
}

bool darts_commute(const Graph& A, const CoveringSpace& down_A,
                   const Graph& B, const CoveringSpace& down_B,
                   const GraphMap& g, const GraphMap& base_map) {
  for (uint32_t d = 0; d < 2 * static_cast<uint32_t>(A.edge_count()); ++d) {
    uint32_t lhs = dart_image(down_B.total, down_B.base, down_B.proj,
                              dart_image(A, B, g, d));
    uint32_t rhs = dart_image(down_A.base, down_B.base, base_map,
                              dart_image(A, down_A.base, down_A.proj, d));
    if (lhs != rhs) return false;
  }
  return true;
}

}  // namespace

std::vector<GraphMap> deck_transformations(const CoveringSpace& pi) {
  if (!validate_covering(pi))
    throw structural_error("deck: projection is not a covering");
  std::vector<int> roots;
  graph_components(pi.total, &roots);
  auto fib = fibers(pi);
  // Candidate images per root: its own fiber, ascending.
  std::vector<std::vector<int>> choices;
  for (int r : roots)
    choices.push_back(fib[static_cast<size_t>(pi.proj.vertex_map[static_cast<size_t>(r)])]);

  Propagation prop(pi.total, pi.total, pi);
  auto goal = [&](uint32_t d) {
    return dart_image(pi.total, pi.base, pi.proj, d);
  };
  GraphMap base_id = identity_graph_map(pi.base);

  std::vector<GraphMap> out;
  std::vector<size_t> odo(roots.size(), 0);
  std::vector<int> vertex_map;
  std::vector<uint32_t> dart_map;
  while (true) {
    std::vector<int> root_images;
    for (size_t c = 0; c < roots.size(); ++c)
      root_images.push_back(choices[c][odo[c]]);
    if (prop.run(roots, root_images, goal, vertex_map, dart_map)) {
      GraphMap h = map_from_darts(pi.total, pi.total, vertex_map, dart_map);
      bool keep = true;
      try {
        validate_graph_map(pi.total, pi.total, h);
      } catch (const structural_error&) {
        keep = false;
      }
      if (keep && !darts_commute(pi.total, pi, pi.total, pi, h, base_id))
        keep = false;
      if (keep) {
        // Deck maps must be automorphisms.
        std::vector<char> seen(static_cast<size_t>(pi.total.vertex_count()), 0);
        for (int v : h.vertex_map) {
          if (seen[static_cast<size_t>(v)]) keep = false;
          seen[static_cast<size_t>(v)] = 1;
        }
        std::vector<char> eseen(static_cast<size_t>(pi.total.edge_count()), 0);
        for (int e : h.edge_map) {
          if (eseen[static_cast<size_t>(e)]) keep = false;
          eseen[static_cast<size_t>(e)] = 1;
        }
      }
      if (keep) out.push_back(std::move(h));
    }
    size_t c = 0;
    while (c < odo.size() && ++odo[c] == choices[c].size()) {
      odo[c] = 0;
      ++c;
    }
    if (c == odo.size()) break;
  }
  return out;
}

std::vector<GraphMap> enumerate_mapcov(const CoveringSpace& pi_L,
                                       const CoveringSpace& pi_M,
                                       const GraphMap& f) {
  if (!validate_covering(pi_L) || !validate_covering(pi_M))
    throw structural_error("mapcov: projections are not coverings");
  validate_graph_map(pi_L.base, pi_M.base, f);

  std::vector<int> roots;
  graph_components(pi_L.total, &roots);
  auto fib_M = fibers(pi_M);
  std::vector<std::vector<int>> choices;
  for (int r : roots) {
    int base_image =
        f.vertex_map[static_cast<size_t>(pi_L.proj.vertex_map[static_cast<size_t>(r)])];
    choices.push_back(fib_M[static_cast<size_t>(base_image)]);
  }
  for (const auto& c : choices)
    if (c.empty()) return {};

  Propagation prop(pi_L.total, pi_M.total, pi_M);
  auto goal = [&](uint32_t d) {
    return dart_image(pi_L.base, pi_M.base, f,
                      dart_image(pi_L.total, pi_L.base, pi_L.proj, d));
  };

  auto fib_L = fibers(pi_L);
  std::vector<GraphMap> out;
  if (roots.empty()) {
    out.push_back(GraphMap{{}, {}, {}});
    return out;
  }
  std::vector<size_t> odo(roots.size(), 0);
  std::vector<int> vertex_map;
  std::vector<uint32_t> dart_map;
  while (true) {
    std::vector<int> root_images;
    for (size_t c = 0; c < roots.size(); ++c)
      root_images.push_back(choices[c][odo[c]]);
    if (prop.run(roots, root_images, goal, vertex_map, dart_map)) {
      GraphMap g = map_from_darts(pi_L.total, pi_M.total, vertex_map, dart_map);
      bool keep = true;
      try {
        validate_graph_map(pi_L.total, pi_M.total, g);
      } catch (const structural_error&) {
        keep = false;
      }
      if (keep && !darts_commute(pi_L.total, pi_L, pi_M.total, pi_M, g, f))
        keep = false;
      if (keep) {
        // Fiberwise injectivity over every base vertex of L.
        for (const auto& fiber : fib_L) {
          std::set<int> images;
          for (int x : fiber) images.insert(g.vertex_map[static_cast<size_t>(x)]);
          if (images.size() != fiber.size()) {
            keep = false;
            break;
          }
        }
      }
      if (keep) out.push_back(std::move(g));
    }
    size_t c = 0;
    while (c < odo.size() && ++odo[c] == choices[c].size()) {
      odo[c] = 0;
      ++c;
    }
    if (c == odo.size()) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Towers.
// ---------------------------------------------------------------------------

CoveringSpace Tower::composite() const {
  if (!(fine.base == coarse.total))
    throw structural_error("tower: stage graphs disagree");
  CoveringSpace out;
  out.total = fine.total;
  out.base = coarse.base;
  out.proj = compose_graph_maps(fine.total, fine.base, coarse.base, fine.proj,
                                coarse.proj);
  return out;
}

bool validate_tower(const Tower& t) {
  if (!(t.fine.base == t.coarse.total)) return false;
  return validate_covering(t.fine) && validate_covering(t.coarse) &&
         validate_covering(t.composite());
}

// ---------------------------------------------------------------------------
// Builders.
// ---------------------------------------------------------------------------

Graph cycle_graph(int n) {
  if (n < 1) throw structural_error("cycle: need at least one vertex");
  std::vector<int> ids(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) ids[static_cast<size_t>(i)] = i;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return make_graph(std::move(ids), edges);
}

Graph path_graph(int vertices) {
  if (vertices < 1) throw structural_error("path: need at least one vertex");
  std::vector<int> ids(static_cast<size_t>(vertices));
  for (int i = 0; i < vertices; ++i) ids[static_cast<size_t>(i)] = i;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < vertices; ++i) edges.emplace_back(i, i + 1);
  return make_graph(std::move(ids), edges);
}

Graph single_vertex_graph() { return make_graph({0}, {}); }

CoveringSpace cyclic_cover(int total_n, int base_n) {
  if (base_n < 1 || total_n < base_n || total_n % base_n != 0)
    throw structural_error("cyclic cover: base size must divide total size");
  CoveringSpace pi;
  pi.total = cycle_graph(total_n);
  pi.base = cycle_graph(base_n);
  pi.proj.vertex_map.resize(static_cast<size_t>(total_n));
  pi.proj.edge_map.resize(static_cast<size_t>(total_n));
  for (int i = 0; i < total_n; ++i) {
    pi.proj.vertex_map[static_cast<size_t>(i)] = i % base_n;
    pi.proj.edge_map[static_cast<size_t>(i)] = i % base_n;
  }
  return pi;
}

CoveringSpace identity_cover(const Graph& G) {
  return {G, G, identity_graph_map(G)};
}

Tower build_cyclic_tower(int n) {
  Tower t;
  t.fine = cyclic_cover(4 * n, 2 * n);
  t.coarse = cyclic_cover(2 * n, n);
  return t;
}

}  // namespace covcat
