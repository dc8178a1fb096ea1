// The category of selfic surjections and commuting squares.
//
// The oracle at the top enumerates squares by brute force directly from the
// definition (all pairs of vertical maps, commutation and joint injectivity
// checked inline), independently of enumerate_epifin_morphisms.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "covcat/epicat.hpp"
#include "covcat/finset.hpp"
#include "covcat/scomb.hpp"

namespace {

using covcat::EpiFinMorphism;
using covcat::EpiFinObject;
using covcat::FinMap;
using covcat::TriFinMorphism;
using covcat::TriFinObject;

// Oracle: all squares src -> tgt from first principles. For every pair
// (top, bottom) of maps with matching cardinalities, keep those where the
// square commutes and i -> (top(i), src.p(i)) is injective.
std::vector<std::pair<FinMap, FinMap>> oracle_squares(const EpiFinObject& src,
                                                      const EpiFinObject& tgt) {
  std::vector<std::pair<FinMap, FinMap>> out;
  int k = src.p.source_card, l = src.p.target_card;
  int m = tgt.p.source_card, n = tgt.p.target_card;
  for (const FinMap& top : covcat::enumerate_maps(k, m)) {
    for (const FinMap& bottom : covcat::enumerate_maps(l, n)) {
      bool commutes = true;
      for (int i = 1; i <= k; ++i) {
        if (tgt.p(top(i)) != bottom(src.p(i))) {
          commutes = false;
          break;
        }
      }
      if (!commutes) continue;
      std::set<std::pair<int, int>> seen;
      bool joint_injective = true;
      for (int i = 1; i <= k; ++i) {
        if (!seen.insert({top(i), src.p(i)}).second) {
          joint_injective = false;
          break;
        }
      }
      if (joint_injective) out.emplace_back(top, bottom);
    }
  }
  return out;
}

std::vector<EpiFinObject> all_objects(int max_card) {
  std::vector<EpiFinObject> out;
  for (int k = 0; k <= max_card; ++k) {
    for (int l = 0; l <= k; ++l) {
      for (const FinMap& f : covcat::enumerate_selfic(k, l)) {
        out.emplace_back(f);
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("object construction accepts exactly the selfic surjections") {
  CHECK_NOTHROW(EpiFinObject(FinMap(0, 0, {})));
  CHECK_NOTHROW(EpiFinObject(FinMap::identity(3)));
  CHECK_NOTHROW(EpiFinObject(FinMap(2, 1, {1, 1})));
  CHECK_THROWS_AS(EpiFinObject(FinMap(2, 2, {2, 1})), covcat::structural_error);  // not selfic
  CHECK_THROWS_AS(EpiFinObject(FinMap(1, 2, {2})), covcat::structural_error);     // not onto
}

TEST_CASE("enumerate_epifin_morphisms agrees with the brute-force oracle") {
  std::vector<EpiFinObject> objs = all_objects(3);
  for (const EpiFinObject& src : objs) {
    for (const EpiFinObject& tgt : objs) {
      auto expected = oracle_squares(src, tgt);
      std::vector<EpiFinMorphism> got = covcat::enumerate_epifin_morphisms(src, tgt);
      REQUIRE(got.size() == expected.size());
      std::set<std::pair<std::vector<int>, std::vector<int>>> expected_set, got_set;
      for (const auto& [top, bottom] : expected) {
        expected_set.insert({top.values, bottom.values});
      }
      for (const EpiFinMorphism& m : got) {
        CHECK(covcat::validate_epifin_morphism(m));
        CHECK(m.src == src);
        CHECK(m.tgt == tgt);
        got_set.insert({m.top.values, m.bottom.values});
      }
      CHECK(got_set == expected_set);
    }
  }
}

TEST_CASE("frozen hom-set sizes") {
  EpiFinObject id1{FinMap::identity(1)};
  EpiFinObject merge2{FinMap(2, 1, {1, 1})};
  CHECK(covcat::enumerate_epifin_morphisms(id1, id1).size() == 1);
  CHECK(covcat::enumerate_epifin_morphisms(id1, merge2).size() == 2);
  // a merged source has nowhere injective to go over a discrete target
  CHECK(covcat::enumerate_epifin_morphisms(merge2, id1).empty());

  // between identity objects the bottom map determines everything:
  // hom(id_k, id_m) has exactly m^k elements
  for (int k = 0; k <= 3; ++k) {
    for (int m = 0; m <= 3; ++m) {
      long long expected = 1;
      for (int i = 0; i < k; ++i) expected *= m;
      EpiFinObject a{FinMap::identity(k)};
      EpiFinObject b{FinMap::identity(m)};
      CHECK(static_cast<long long>(covcat::enumerate_epifin_morphisms(a, b).size()) ==
            expected);
    }
  }
}

TEST_CASE("merged points can never separate") {
  // if src.p merges i and j then any valid square's top must keep them
  // merged under tgt.p's fibers... stronger: top(i) != top(j) is required
  // by joint injectivity when src.p(i) == src.p(j).
  std::vector<EpiFinObject> objs = all_objects(3);
  for (const EpiFinObject& src : objs) {
    for (const EpiFinObject& tgt : objs) {
      for (const EpiFinMorphism& m : covcat::enumerate_epifin_morphisms(src, tgt)) {
        int k = src.p.source_card;
        for (int i = 1; i <= k; ++i) {
          for (int j = i + 1; j <= k; ++j) {
            if (src.p(i) == src.p(j)) CHECK(m.top(i) != m.top(j));
          }
        }
      }
    }
  }
}

TEST_CASE("validate_epifin_morphism distinguishes malformed from invalid") {
  EpiFinObject id1{FinMap::identity(1)};
  EpiFinObject id2{FinMap::identity(2)};
  EpiFinMorphism bad_arity{id1, id2, FinMap::identity(1), FinMap::identity(2)};
  CHECK_THROWS_AS(covcat::validate_epifin_morphism(bad_arity), covcat::structural_error);

  // well-formed but non-commuting square: sound false, no throw
  EpiFinObject merge2{FinMap(2, 1, {1, 1})};
  EpiFinMorphism square{merge2, merge2, FinMap(2, 2, {1, 1}), FinMap::identity(1)};
  CHECK_FALSE(covcat::validate_epifin_morphism(square));
}

TEST_CASE("composition pastes squares and has identities") {
  std::vector<EpiFinObject> objs = all_objects(3);
  for (const EpiFinObject& x : objs) {
    EpiFinMorphism idx = covcat::identity_epifin(x);
    CHECK(covcat::validate_epifin_morphism(idx));
    CHECK(idx.top == FinMap::identity(x.p.source_card));
    CHECK(idx.bottom == FinMap::identity(x.p.target_card));
  }
  // unit laws and closure on a sample of composable pairs
  for (const EpiFinObject& a : objs) {
    for (const EpiFinObject& b : objs) {
      std::vector<EpiFinMorphism> fs = covcat::enumerate_epifin_morphisms(a, b);
      for (const EpiFinMorphism& f : fs) {
        CHECK(covcat::compose_epifin(covcat::identity_epifin(a), f) == f);
        CHECK(covcat::compose_epifin(f, covcat::identity_epifin(b)) == f);
      }
    }
  }
  EpiFinObject id1{FinMap::identity(1)};
  EpiFinObject merge2{FinMap(2, 1, {1, 1})};
  std::vector<EpiFinMorphism> fs = covcat::enumerate_epifin_morphisms(id1, merge2);
  std::vector<EpiFinMorphism> gs = covcat::enumerate_epifin_morphisms(merge2, merge2);
  for (const EpiFinMorphism& f : fs) {
    for (const EpiFinMorphism& g : gs) {
      EpiFinMorphism h = covcat::compose_epifin(f, g);
      CHECK(covcat::validate_epifin_morphism(h));
      CHECK(h.src == id1);
      CHECK(h.tgt == merge2);
    }
  }
}

TEST_CASE("axiom sweep is clean at cardinality 3") {
  covcat::AxiomSweepReport rep = covcat::epifin_axiom_sweep(3);
  CHECK(rep.completed);
  CHECK(rep.violations == 0);
  CHECK(rep.first_violation.empty());
  CHECK(rep.objects == 9);
  CHECK(rep.morphisms > 0);
  CHECK(rep.pairs > 0);
  CHECK(rep.triples > rep.pairs);
}

TEST_CASE("axiom sweep respects an expired budget") {
  covcat::Budget b = covcat::Budget::from_ms(0);
  covcat::AxiomSweepReport rep = covcat::epifin_axiom_sweep(4, &b);
  CHECK_FALSE(rep.completed);
  CHECK(rep.violations == 0);
}

TEST_CASE("built category matches the enumerators and passes the law check") {
  covcat::BuiltEpiFin E = covcat::epifin_category(3);
  CHECK(E.objects.size() == 9);
  CHECK(std::is_sorted(E.objects.begin(), E.objects.end()));
  size_t expected_arrows = 0;
  for (const EpiFinObject& a : E.objects) {
    for (const EpiFinObject& b : E.objects) {
      expected_arrows += covcat::enumerate_epifin_morphisms(a, b).size();
    }
  }
  CHECK(E.arrows.size() == expected_arrows);
  CHECK_NOTHROW(covcat::validate_category(E.cat));

  for (size_t i = 0; i < E.arrows.size(); ++i) {
    CHECK(E.find_arrow(E.arrows[i]) == i);
  }
  for (size_t i = 0; i < E.objects.size(); ++i) {
    CHECK(E.find_object(E.objects[i]) == i);
  }
}

TEST_CASE("one-target subcategory") {
  CHECK(covcat::is_in_epifin_one(EpiFinObject{FinMap(2, 1, {1, 1})}));
  CHECK(covcat::is_in_epifin_one(EpiFinObject{FinMap::identity(1)}));
  CHECK_FALSE(covcat::is_in_epifin_one(EpiFinObject{FinMap::identity(2)}));
  CHECK_FALSE(covcat::is_in_epifin_one(EpiFinObject{FinMap(0, 0, {})}));

  covcat::BuiltEpiFin E1 = covcat::epifin_category(1, true);
  CHECK(E1.objects.size() == 1);
  CHECK(E1.arrows.size() == 1);
  CHECK(E1.objects[0].p == FinMap::identity(1));

  covcat::BuiltEpiFin E2 = covcat::epifin_category(2, true);
  CHECK(E2.objects.size() == 2);
  for (const EpiFinObject& x : E2.objects) CHECK(covcat::is_in_epifin_one(x));
  CHECK_NOTHROW(covcat::validate_category(E2.cat));
  // frozen homs inside the subcategory
  uint32_t a = E2.find_object(EpiFinObject{FinMap::identity(1)});
  uint32_t b = E2.find_object(EpiFinObject{FinMap(2, 1, {1, 1})});
  int a_to_b = 0, b_to_a = 0, a_to_a = 0;
  for (const EpiFinMorphism& m : E2.arrows) {
    uint32_t s = E2.find_object(m.src), t = E2.find_object(m.tgt);
    if (s == a && t == b) ++a_to_b;
    if (s == b && t == a) ++b_to_a;
    if (s == a && t == a) ++a_to_a;
  }
  CHECK(a_to_a == 1);
  CHECK(a_to_b == 2);
  CHECK(b_to_a == 0);
}

TEST_CASE("source and target functors to Fin") {
  covcat::BuiltEpiFin E = covcat::epifin_category(3);
  covcat::BuiltFin F = covcat::fin_category(3);
  CHECK_NOTHROW(covcat::validate_category(F.cat));
  covcat::CatFunctor src_f = covcat::epifin_source_functor(E, F);
  covcat::CatFunctor tgt_f = covcat::epifin_target_functor(E, F);
  CHECK_NOTHROW(covcat::validate_functor(E.cat, F.cat, src_f));
  CHECK_NOTHROW(covcat::validate_functor(E.cat, F.cat, tgt_f));
  for (size_t i = 0; i < E.arrows.size(); ++i) {
    CHECK(F.arrows[src_f.mor_map[i]] == E.arrows[i].top);
    CHECK(F.arrows[tgt_f.mor_map[i]] == E.arrows[i].bottom);
  }
}

TEST_CASE("chains of squares") {
  FinMap merge2(2, 1, {1, 1});
  CHECK_NOTHROW(TriFinObject(FinMap::identity(2), merge2));
  // cardinalities must chain: fine target equals coarse source
  CHECK_THROWS_AS(TriFinObject(FinMap::identity(2), FinMap::identity(1)),
                  covcat::structural_error);
  TriFinObject x(FinMap::identity(2), merge2);
  CHECK(covcat::trifin_underlying_card(x) == 2);

  TriFinMorphism m;
  m.src = x;
  m.tgt = x;
  m.level_maps[0] = FinMap::identity(1);
  m.level_maps[1] = FinMap::identity(2);
  m.level_maps[2] = FinMap::identity(2);
  CHECK(covcat::validate_trifin_morphism(m));
  auto [coarse_square, fine_square] = covcat::trifin_source_target_functors(m);
  CHECK(covcat::validate_epifin_morphism(coarse_square));
  CHECK(covcat::validate_epifin_morphism(fine_square));
  CHECK(fine_square.top == m.level_maps[2]);
  CHECK(fine_square.bottom == m.level_maps[1]);
  CHECK(coarse_square.top == m.level_maps[1]);
  CHECK(coarse_square.bottom == m.level_maps[0]);

  // swapping the middle map against only one square breaks validity
  TriFinMorphism bad = m;
  bad.level_maps[1] = FinMap(2, 2, {1, 2});
  CHECK(covcat::validate_trifin_morphism(bad));  // identity in disguise
  TriFinObject y(FinMap(2, 2, {1, 2}), FinMap(2, 1, {1, 1}));
  TriFinMorphism cross;
  cross.src = y;
  cross.tgt = y;
  cross.level_maps[0] = FinMap::identity(1);
  cross.level_maps[1] = FinMap(2, 2, {2, 1});
  cross.level_maps[2] = FinMap(2, 2, {2, 1});
  // both squares commute here and are jointly injective
  CHECK(covcat::validate_trifin_morphism(cross));
  TriFinMorphism broken = cross;
  broken.level_maps[2] = FinMap::identity(2);  // fine square no longer commutes
  CHECK_FALSE(covcat::validate_trifin_morphism(broken));
}
