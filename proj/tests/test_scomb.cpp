// Table categories, truncated simplicial sets, nerves, comma and pullback
// machinery.
//
// Oracles at the top, independent of the code under test: a recursive
// composable-string counter working straight off src/tgt tables, and a
// degenerate-simplex counter that counts strings containing an identity
// arrow. Nerve level sizes and latching sets are compared against these.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "covcat/epicat.hpp"
#include "covcat/finset.hpp"
#include "covcat/scomb.hpp"

namespace {

using covcat::BuiltNerve;
using covcat::CatFunctor;
using covcat::FiniteCategory;
using covcat::SimplicialMap;
using covcat::TruncatedSSet;

// Oracle: number of composable strings of length n, counted by direct
// recursion over the src/tgt tables. Valid for unbounded categories, where
// every string is a nerve simplex.
long long oracle_string_count(const FiniteCategory& C, int n) {
  if (n == 0) return C.num_objects;
  long long total = 0;
  auto rec = [&](auto&& self, uint32_t at, int left) -> void {
    if (left == 0) {
      ++total;
      return;
    }
    for (uint32_t m = 0; m < C.morphisms.size(); ++m) {
      if (C.src(m) == at) self(self, C.tgt(m), left - 1);
    }
  };
  for (uint32_t x = 0; x < C.num_objects; ++x) rec(rec, x, n);
  return total;
}

bool is_identity_arrow(const FiniteCategory& C, uint32_t m) {
  return C.identities[C.src(m)] == m;
}

// Oracle: a nerve simplex is degenerate exactly when its string contains an
// identity arrow, so the degenerate count is (all strings) minus (strings
// of non-identity arrows only).
long long oracle_degenerate_count(const FiniteCategory& C, int n) {
  if (n == 0) return 0;
  long long nondegen = 0;
  auto rec = [&](auto&& self, uint32_t at, int left) -> void {
    if (left == 0) {
      ++nondegen;
      return;
    }
    for (uint32_t m = 0; m < C.morphisms.size(); ++m) {
      if (C.src(m) == at && !is_identity_arrow(C, m)) self(self, C.tgt(m), left - 1);
    }
  };
  for (uint32_t x = 0; x < C.num_objects; ++x) rec(rec, x, n);
  return oracle_string_count(C, n) - nondegen;
}

// The poset 0 < 1 < ... < n-1 as an unbounded table category: one arrow
// i -> j for every i <= j.
FiniteCategory chain_poset(int n) {
  FiniteCategory C;
  C.num_objects = static_cast<uint32_t>(n);
  std::map<std::pair<int, int>, uint32_t> arrow;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      arrow[{i, j}] = static_cast<uint32_t>(C.morphisms.size());
      C.morphisms.push_back({static_cast<uint32_t>(i), static_cast<uint32_t>(j)});
    }
  }
  C.identities.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) C.identities[static_cast<size_t>(i)] = arrow[{i, i}];
  for (auto& [ij, f] : arrow) {
    for (auto& [jk, g] : arrow) {
      if (ij.second == jk.first) C.set_compose(f, g, arrow[{ij.first, jk.second}]);
    }
  }
  return C;
}

SimplicialMap identity_map(const TruncatedSSet& X) {
  SimplicialMap F;
  F.level_map.resize(static_cast<size_t>(X.max_dim) + 1);
  for (int n = 0; n <= X.max_dim; ++n) {
    F.level_map[static_cast<size_t>(n)].resize(X.size(n));
    std::iota(F.level_map[static_cast<size_t>(n)].begin(),
              F.level_map[static_cast<size_t>(n)].end(), 0u);
  }
  return F;
}

}  // namespace

TEST_CASE("compose table semantics: bounded overflow vs unbounded totality") {
  FiniteCategory C = chain_poset(3);
  CHECK_NOTHROW(covcat::validate_category(C));

  uint32_t f01 = 1;  // arrows are (0,0),(0,1),(0,2),(1,1),(1,2),(2,2)
  CHECK(C.src(f01) == 0);
  CHECK(C.tgt(f01) == 1);
  uint32_t f12 = 4;
  CHECK(C.src(f12) == 1);
  CHECK(C.tgt(f12) == 2);
  CHECK(C.compose(f01, f12) == 2);  // the arrow 0 -> 2
  CHECK_THROWS_AS(C.compose(f12, f01), covcat::structural_error);  // not composable

  // deleting an entry from an unbounded category is an error on use
  FiniteCategory broken = C;
  broken.compose_table.clear();
  CHECK_THROWS_AS(broken.compose(f01, f12), covcat::structural_error);
  CHECK_THROWS_AS(covcat::validate_category(broken), covcat::structural_error);

  // the same gap in a bounded category reads as overflow
  FiniteCategory bounded = C;
  bounded.bounded = true;
  bounded.compose_table.erase((static_cast<uint64_t>(f01) << 32) | f12);
  CHECK(bounded.compose(f01, f12) == FiniteCategory::kOverflow);
  CHECK_FALSE(bounded.has_compose(f01, f12));
  CHECK_NOTHROW(covcat::validate_category(bounded));
}

TEST_CASE("validate_category rejects broken laws") {
  FiniteCategory C = chain_poset(3);
  // wrong unit: id then f must be f
  FiniteCategory bad_unit = C;
  bad_unit.set_compose(bad_unit.identities[0], 1, 2);
  CHECK_THROWS_AS(covcat::validate_category(bad_unit), covcat::structural_error);

  // associativity breach needs a genuinely wrong middle composite
  FiniteCategory bad_assoc = chain_poset(4);
  // arrows of chain_poset(4): (0,0),(0,1),(0,2),(0,3),(1,1),(1,2),(1,3),(2,2),(2,3),(3,3)
  // redirect (0,1) then (1,2) to the arrow (0,3): source/target no longer match
  bad_assoc.set_compose(1, 5, 3);
  CHECK_THROWS_AS(covcat::validate_category(bad_assoc), covcat::structural_error);
}

TEST_CASE("nerve of a chain poset: sizes, orientation, keys") {
  FiniteCategory C = chain_poset(3);
  BuiltNerve N = covcat::nerve(C, 3);
  covcat::validate_sset(N.sset);

  for (int n = 0; n <= 3; ++n) {
    CHECK(static_cast<long long>(N.sset.size(n)) == oracle_string_count(C, n));
  }
  CHECK(N.sset.size(0) == 3);
  CHECK(N.sset.size(1) == 6);

  // orientation: at level 1 face 0 is the source and face 1 the target
  for (uint32_t e = 0; e < N.sset.size(1); ++e) {
    uint32_t m = N.key(1, e)[0];
    CHECK(N.sset.face(1, 0, e) == C.src(m));
    CHECK(N.sset.face(1, 1, e) == C.tgt(m));
  }

  // at level 2 the string (f, g) has faces: drop last arrow, compose, drop first
  for (uint32_t s = 0; s < N.sset.size(2); ++s) {
    auto key = N.key(2, s);
    uint32_t f = key[0], g = key[1];
    CHECK(C.tgt(f) == C.src(g));
    uint32_t d0 = N.sset.face(2, 0, s);
    uint32_t d1 = N.sset.face(2, 1, s);
    uint32_t d2 = N.sset.face(2, 2, s);
    CHECK(N.key(1, d0)[0] == f);
    CHECK(N.key(1, d1)[0] == C.compose(f, g));
    CHECK(N.key(1, d2)[0] == g);
  }

  // find is the inverse of key, and misses cleanly
  for (int n = 1; n <= 3; ++n) {
    for (uint32_t s = 0; s < N.sset.size(n); ++s) {
      CHECK(N.find(n, N.key(n, s)) == s);
    }
  }
  std::vector<uint32_t> bogus{9999u};
  CHECK(N.find(1, bogus) == BuiltNerve::kNotFound);

  // ids are ordered by key string
  for (int n = 1; n <= 3; ++n) {
    for (uint32_t s = 0; s + 1 < N.sset.size(n); ++s) {
      auto a = N.key(n, s);
      auto b = N.key(n, s + 1);
      CHECK(std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end()));
    }
  }
}

TEST_CASE("frozen nerve sizes for the arrow poset") {
  FiniteCategory C = chain_poset(2);  // objects 0 < 1
  BuiltNerve N = covcat::nerve(C, 2);
  CHECK(N.sset.size(0) == 2);
  CHECK(N.sset.size(1) == 3);
  CHECK(N.sset.size(2) == 4);
}

TEST_CASE("ultimate target composes the right faces") {
  FiniteCategory C = chain_poset(4);
  BuiltNerve N = covcat::nerve(C, 3);
  for (int r = 0; r <= 3; ++r) {
    std::vector<uint32_t> table = covcat::ultimate_target_table(N.sset, r);
    REQUIRE(table.size() == N.sset.size(r));
    for (uint32_t s = 0; s < N.sset.size(r); ++s) {
      if (r == 0) {
        CHECK(table[s] == s);
      } else {
        uint32_t last = N.key(r, s)[static_cast<size_t>(r) - 1];
        CHECK(table[s] == C.tgt(last));
      }
    }
  }
}

TEST_CASE("simplicial operators through monotone maps") {
  FiniteCategory C = chain_poset(3);
  BuiltNerve N = covcat::nerve(C, 2);

  // identity operator
  std::vector<uint32_t> ident = covcat::simplicial_operator(N.sset, {0, 1}, 1);
  for (uint32_t e = 0; e < N.sset.size(1); ++e) CHECK(ident[e] == e);

  // the long edge of a triangle is the composite
  std::vector<uint32_t> long_edge = covcat::simplicial_operator(N.sset, {0, 2}, 2);
  for (uint32_t s = 0; s < N.sset.size(2); ++s) {
    auto key = N.key(2, s);
    CHECK(N.key(1, long_edge[s])[0] == C.compose(key[0], key[1]));
  }

  // collapsing [1] -> [0] gives the degeneracy rows
  std::vector<uint32_t> collapse = covcat::simplicial_operator(N.sset, {0, 0}, 0);
  for (uint32_t v = 0; v < N.sset.size(0); ++v) {
    CHECK(collapse[v] == N.sset.degen(0, 0, v));
  }

  CHECK_THROWS_AS(covcat::simplicial_operator(N.sset, {1, 0}, 1), covcat::structural_error);
  CHECK_THROWS_AS(covcat::simplicial_operator(N.sset, {0, 3}, 2), covcat::structural_error);
}

TEST_CASE("validate_sset catches a corrupted face table") {
  FiniteCategory C = chain_poset(3);
  BuiltNerve N = covcat::nerve(C, 2);
  TruncatedSSet X = N.sset;
  covcat::validate_sset(X);
  X.levels[2].face[1][0] = (X.levels[2].face[1][0] + 1) % X.size(1);
  CHECK_THROWS_AS(covcat::validate_sset(X), covcat::structural_error);
}

TEST_CASE("latching agrees with the identity-containing-string oracle") {
  for (int n_obj : {2, 3}) {
    FiniteCategory C = chain_poset(n_obj);
    BuiltNerve N = covcat::nerve(C, 3);
    for (int n = 1; n <= 3; ++n) {
      std::vector<uint32_t> via_degen = covcat::latching_degeneracy_union(N.sset, n);
      std::vector<uint32_t> via_surj = covcat::latching_surjection_union(N.sset, n);
      CHECK(via_degen == via_surj);
      std::vector<uint32_t> both = covcat::latching(N.sset, n);
      CHECK(both == via_degen);
      CHECK(static_cast<long long>(both.size()) == oracle_degenerate_count(C, n));
      CHECK(std::is_sorted(both.begin(), both.end()));
      // membership check: a simplex is listed iff its string has an identity
      std::set<uint32_t> listed(both.begin(), both.end());
      for (uint32_t s = 0; s < N.sset.size(n); ++s) {
        bool has_id = false;
        for (uint32_t m : N.key(n, s)) has_id = has_id || is_identity_arrow(C, m);
        CHECK(listed.count(s) == static_cast<size_t>(has_id));
      }
    }
  }
}

TEST_CASE("comma construction matches the slice category nerve") {
  covcat::BuiltEpiFin E = covcat::epifin_category(2);
  BuiltNerve N = covcat::nerve(E.cat, 3);
  uint32_t y = E.find_object(covcat::EpiFinObject{covcat::FinMap::identity(1)});

  covcat::CommaSSet over = covcat::comma(N.sset, y);
  covcat::validate_sset(over.sset);
  CHECK(over.sset.max_dim == 2);
  CHECK(over.sset.size(0) == 3);  // frozen: three squares end at the one-point object

  CatFunctor proj;
  std::vector<uint32_t> object_arrows;
  FiniteCategory slice = covcat::classical_comma(E.cat, y, &proj, &object_arrows);
  CHECK_NOTHROW(covcat::validate_category(slice));
  CHECK_NOTHROW(covcat::validate_functor(slice, E.cat, proj));
  BuiltNerve NS = covcat::nerve(slice, 2);
  for (int r = 0; r <= 2; ++r) {
    CHECK(over.sset.size(r) == NS.sset.size(r));
  }
  // slice objects are exactly the arrows into y
  CHECK(object_arrows.size() == over.sset.size(0));
  for (uint32_t a : object_arrows) CHECK(E.cat.tgt(a) == y);

  // parent tables point at genuine simplices one level up with ultimate target y
  for (int r = 0; r <= 2; ++r) {
    std::vector<uint32_t> ult = covcat::ultimate_target_table(N.sset, r + 1);
    for (uint32_t s = 0; s < over.sset.size(r); ++s) {
      uint32_t p = over.parent[static_cast<size_t>(r)][s];
      REQUIRE(p < N.sset.size(r + 1));
      CHECK(ult[p] == y);
    }
  }
}

TEST_CASE("point and fiber product") {
  TruncatedSSet P = covcat::point_sset(2);
  covcat::validate_sset(P);
  for (int n = 0; n <= 2; ++n) CHECK(P.size(n) == 1);

  FiniteCategory C = chain_poset(3);
  BuiltNerve N = covcat::nerve(C, 2);
  SimplicialMap to_pt = covcat::map_to_point(N.sset);
  CHECK_NOTHROW(covcat::validate_simplicial_map(to_pt, N.sset, P));

  // X x_pt pt recovers X levelwise
  SimplicialMap pt_id = identity_map(P);
  covcat::FiberProduct FP =
      covcat::fiber_product(N.sset, to_pt, P, pt_id, P);
  covcat::validate_sset(FP.sset);
  CHECK_NOTHROW(covcat::validate_simplicial_map(FP.proj_left, FP.sset, N.sset));
  CHECK_NOTHROW(covcat::validate_simplicial_map(FP.proj_right, FP.sset, P));
  for (int n = 0; n <= 2; ++n) {
    CHECK(FP.sset.size(n) == N.sset.size(n));
    CHECK(std::is_sorted(FP.pairs[static_cast<size_t>(n)].begin(),
                         FP.pairs[static_cast<size_t>(n)].end()));
    for (uint32_t s = 0; s < FP.sset.size(n); ++s) {
      auto [x, y2] = FP.pairs[static_cast<size_t>(n)][s];
      CHECK(FP.find(n, x, y2) == s);
    }
  }
}

TEST_CASE("strict pullback report on the tautological square") {
  FiniteCategory C = chain_poset(3);
  BuiltNerve N = covcat::nerve(C, 2);
  TruncatedSSet P = covcat::point_sset(2);
  SimplicialMap idX = identity_map(N.sset);
  SimplicialMap to_pt = covcat::map_to_point(N.sset);
  SimplicialMap pt_id = identity_map(P);

  // X as pullback of X -> pt <- pt
  covcat::SquareOfMaps S{&N.sset, &N.sset, &P, &P, &idX, &to_pt, &to_pt, &pt_id};
  covcat::PullbackReport rep = covcat::strict_pullback_report(S, 2);
  CHECK(rep.holds);
  CHECK(rep.failed_level == -1);
  for (int n = 0; n <= 2; ++n) {
    CHECK(rep.corner_sizes[static_cast<size_t>(n)] ==
          rep.fiber_sizes[static_cast<size_t>(n)]);
  }
  CHECK(covcat::is_strict_pullback(S, 2));

  // removing a corner simplex breaks surjectivity onto the fiber product;
  // edge id 1 is the arrow 0 -> 1, not an identity, so it may be dropped
  std::vector<std::vector<uint32_t>> trans;
  TruncatedSSet damaged = covcat::drop_simplex(N.sset, 1, 1, &trans);
  SimplicialMap top_d, left_d;
  top_d.level_map.resize(3);
  left_d.level_map.resize(3);
  for (int n = 0; n <= 2; ++n) {
    for (uint32_t s = 0; s < N.sset.size(n); ++s) {
      if (trans[static_cast<size_t>(n)][s] == covcat::kRemoved) continue;
      top_d.level_map[static_cast<size_t>(n)].push_back(s);
      left_d.level_map[static_cast<size_t>(n)].push_back(0);
    }
  }
  covcat::SquareOfMaps S2{&damaged, &N.sset, &P, &P, &top_d, &left_d, &to_pt, &pt_id};
  covcat::PullbackReport rep2 = covcat::strict_pullback_report(S2, 2);
  CHECK_FALSE(rep2.holds);
  CHECK(rep2.failed_level >= 0);
  CHECK_FALSE(rep2.detail.empty());
}

TEST_CASE("set-level pullback check") {
  // B = {0,1}, C = {0}, D = {0}; A must be the two pairs
  std::vector<uint32_t> rb{0, 0}, rd{0};
  {
    std::vector<uint32_t> f{0, 1}, g{0, 0};
    covcat::SetPullbackInput in{f, g, rb, rd};
    std::string detail;
    CHECK(covcat::set_pullback_check(in, &detail));
  }
  {
    std::vector<uint32_t> f{0}, g{0};  // missing the pair (1, 0)
    covcat::SetPullbackInput in{f, g, rb, rd};
    std::string detail;
    CHECK_FALSE(covcat::set_pullback_check(in, &detail));
    CHECK_FALSE(detail.empty());
  }
  {
    std::vector<uint32_t> f{0, 0}, g{0, 0};  // duplicate pair
    covcat::SetPullbackInput in{f, g, rb, rd};
    std::string detail;
    CHECK_FALSE(covcat::set_pullback_check(in, &detail));
  }
}

TEST_CASE("Segal condition holds for nerves and fails after surgery") {
  FiniteCategory C = chain_poset(4);
  BuiltNerve N = covcat::nerve(C, 3);
  for (int n = 0; n <= 3; ++n) {
    covcat::SegalReport rep = covcat::segal_check(N.sset, n);
    CHECK(rep.holds);
  }

  // drop the composite edge 0 -> 2; the pair (0->1, 1->2) keeps matching
  // endpoints but loses its filler
  uint32_t e02 = BuiltNerve::kNotFound;
  for (uint32_t e = 0; e < N.sset.size(1); ++e) {
    uint32_t m = N.key(1, e)[0];
    if (C.src(m) == 0 && C.tgt(m) == 2 && !is_identity_arrow(C, m)) e02 = e;
  }
  REQUIRE(e02 != BuiltNerve::kNotFound);
  TruncatedSSet damaged = covcat::drop_simplex(N.sset, 1, e02);
  covcat::validate_sset(damaged);
  covcat::SegalReport rep = covcat::segal_check(damaged, 2);
  CHECK_FALSE(rep.holds);
  CHECK_FALSE(rep.detail.empty());
}

TEST_CASE("drop_simplex removes the closure above and nothing else") {
  FiniteCategory C = chain_poset(3);
  BuiltNerve N = covcat::nerve(C, 2);
  std::vector<std::vector<uint32_t>> trans;
  TruncatedSSet X = covcat::drop_simplex(N.sset, 0, 0, &trans);
  covcat::validate_sset(X);
  CHECK(X.size(0) == N.sset.size(0) - 1);
  // every surviving simplex keeps its faces among survivors
  for (int n = 1; n <= 2; ++n) {
    long long expected_survivors = 0;
    for (uint32_t s = 0; s < N.sset.size(n); ++s) {
      bool touches = false;
      std::vector<uint32_t> verts(static_cast<size_t>(n) + 1);
      for (int v = 0; v <= n; ++v) {
        std::vector<int> alpha{v};
        verts[static_cast<size_t>(v)] = covcat::simplicial_operator(N.sset, alpha, n)[s];
      }
      for (uint32_t v : verts) touches = touches || (v == 0);
      if (!touches) ++expected_survivors;
      CHECK((trans[static_cast<size_t>(n)][s] == covcat::kRemoved) == touches);
    }
    CHECK(static_cast<long long>(X.size(n)) == expected_survivors);
  }

  CHECK_THROWS_AS(covcat::drop_simplex(N.sset, 0, 99), covcat::structural_error);
  CHECK_THROWS_AS(covcat::drop_simplex(N.sset, 5, 0), covcat::structural_error);
}

TEST_CASE("nerve_map transports functors to simplicial maps") {
  covcat::BuiltEpiFin E = covcat::epifin_category(2);
  covcat::BuiltFin F = covcat::fin_category(2);
  CatFunctor src_f = covcat::epifin_source_functor(E, F);
  BuiltNerve NE = covcat::nerve(E.cat, 2);
  BuiltNerve NF = covcat::nerve(F.cat, 2);
  SimplicialMap M = covcat::nerve_map(src_f, NE, NF);
  CHECK_NOTHROW(covcat::validate_simplicial_map(M, NE.sset, NF.sset));
  // level 1 agrees with the morphism table
  for (uint32_t e = 0; e < NE.sset.size(1); ++e) {
    uint32_t m = NE.key(1, e)[0];
    uint32_t image_edge = M.level_map[1][e];
    CHECK(NF.key(1, image_edge)[0] == src_f.mor_map[m]);
  }
}
