#ifndef COVCAT_GRAPHCOV_HPP
#define COVCAT_GRAPHCOV_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "covcat/finset.hpp"

namespace covcat {

// Undirected multigraph. Vertices carry external ids (arbitrary unique
// integers); edges are stored with an orientation (u, v) given by the input
// order, which fixes the two darts of the edge: dart 2e has tail u, dart
// 2e+1 has tail v. Self-loops and parallel edges are allowed.
struct Graph {
  struct Edge {
    int u = 0;  // internal vertex index
    int v = 0;

    bool operator==(const Edge&) const = default;
  };

  std::vector<int> vertex_ids;
  std::vector<Edge> edges;

  int vertex_count() const { return static_cast<int>(vertex_ids.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  int vertex_index(int external_id) const;  // throws if unknown

  bool is_simple() const;  // no loops, no parallel edges

  // Dart d: tail/head vertex indices. d = 2e (+1 for the reversed dart).
  int dart_tail(uint32_t d) const;
  int dart_head(uint32_t d) const;
  static uint32_t dart_reverse(uint32_t d) { return d ^ 1u; }

  // stars()[x] lists the darts with tail x, ascending.
  std::vector<std::vector<uint32_t>> stars() const;

  // Edge index joining two distinct adjacent vertices; requires a simple
  // graph. Returns -1 if not adjacent.
  int edge_between(int x, int y) const;

  bool operator==(const Graph&) const = default;
};

Graph make_graph(std::vector<int> vertex_ids,
                 const std::vector<std::pair<int, int>>& edges_by_id);

// Strict graph map: vertices to vertices, edges to edges joining the
// images. flip[e] = 1 swaps the dart orientation over edge e; it only
// carries information when the image edge is a self-loop, and defaults to
// the orientation matching the stored endpoint order.
struct GraphMap {
  std::vector<int> vertex_map;
  std::vector<int> edge_map;
  std::vector<char> flip;  // optional; empty means all zero

  bool operator==(const GraphMap&) const = default;
};

// Throws structural_error if f is not a well-formed map src -> tgt.
void validate_graph_map(const Graph& src, const Graph& tgt, const GraphMap& f);

uint32_t dart_image(const Graph& src, const Graph& tgt, const GraphMap& f,
                    uint32_t dart);

GraphMap identity_graph_map(const Graph& G);
GraphMap compose_graph_maps(const Graph& A, const Graph& B, const Graph& C,
                            const GraphMap& f, const GraphMap& g);

// ---------------------------------------------------------------------------
// Coverings.
// ---------------------------------------------------------------------------

struct CoveringSpace {
  Graph total;
  Graph base;
  GraphMap proj;

  bool operator==(const CoveringSpace&) const = default;
};

// True iff proj maps the dart star of every total vertex bijectively onto
// the dart star of its image. Also recomputes that fibers over any one base
// component share a cardinality (implied by star bijectivity; checked
// anyway). Throws structural_error if proj is not a graph map at all.
bool validate_covering(const CoveringSpace& pi);

// fibers()[z] = ascending total vertex indices over base vertex z.
std::vector<std::vector<int>> fibers(const CoveringSpace& pi);

// ---------------------------------------------------------------------------
// Paths and lifting.
// ---------------------------------------------------------------------------

// Walk given by a start vertex and consecutive darts (tail of each dart is
// the head of the previous one).
struct EdgePath {
  int start = 0;
  std::vector<uint32_t> steps;

  bool operator==(const EdgePath&) const = default;
};

void validate_edge_path(const Graph& G, const EdgePath& p);
int edge_path_end(const Graph& G, const EdgePath& p);

// Unique lift of a base path through a validated covering, starting at the
// given total vertex (which must sit over p.start). Star bijectivity makes
// each step forced; throws structural_error if the covering data breaks
// that promise or the start is inadmissible.
EdgePath lift_path(const CoveringSpace& pi, const EdgePath& p, int start_total);

// Componentwise lift of several base paths.
std::vector<EdgePath> lift_multipath(const CoveringSpace& pi,
                                     const std::vector<EdgePath>& paths,
                                     const std::vector<int>& starts);

// ---------------------------------------------------------------------------
// Deck transformations and fiberwise maps between coverings.
// ---------------------------------------------------------------------------

// All automorphisms h of the total graph with proj ∘ h == proj,
// deterministic order. Uses propagation from one vertex per component;
// every returned map is re-validated.
std::vector<GraphMap> deck_transformations(const CoveringSpace& pi);

// All lifts g of f: every graph map g: total_L -> total_M with
// proj_M ∘ g == f ∘ proj_L that is injective on each fiber of proj_L.
std::vector<GraphMap> enumerate_mapcov(const CoveringSpace& pi_L,
                                       const CoveringSpace& pi_M,
                                       const GraphMap& f);

// ---------------------------------------------------------------------------
// Towers.
// ---------------------------------------------------------------------------

// Two stacked coverings  M2 --fine--> M1 --coarse--> M0, with the composite
// projection validated as a covering as well.
struct Tower {
  CoveringSpace fine;    // M2 -> M1
  CoveringSpace coarse;  // M1 -> M0

  CoveringSpace composite() const;  // M2 -> M0
};

// Stage graphs must agree and all three projections must validate.
bool validate_tower(const Tower& t);

// ---------------------------------------------------------------------------
// Builders.
// ---------------------------------------------------------------------------

// Cycle with n vertices 0..n-1 and edges i -> i+1 (mod n); n = 1 is a
// single vertex with a loop, n = 2 a double edge.
Graph cycle_graph(int n);
Graph path_graph(int vertices);
Graph single_vertex_graph();

// i mod base_n covering; requires base_n dividing total_n, both >= 1.
CoveringSpace cyclic_cover(int total_n, int base_n);
CoveringSpace identity_cover(const Graph& G);

// C_{4n} -> C_{2n} -> C_n.
Tower build_cyclic_tower(int n);

}  // namespace covcat

#endif
