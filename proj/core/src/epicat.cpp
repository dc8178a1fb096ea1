#include "covcat/epicat.hpp"

#include <algorithm>
#include <utility>

namespace covcat {

EpiFinObject::EpiFinObject(FinMap map) : p(std::move(map)) {
  if (!is_selfic(p))
    throw structural_error("EpiFinObject: map is not selfic: " + to_string(p));
}

bool validate_epifin_morphism(const EpiFinMorphism& m) {
  const FinMap& p = m.src.p;
  const FinMap& q = m.tgt.p;
  if (m.top.source_card != p.source_card || m.top.target_card != q.source_card ||
      m.bottom.source_card != p.target_card ||
      m.bottom.target_card != q.target_card)
    throw structural_error("epifin morphism: cardinalities do not line up");
  for (int i = 1; i <= p.source_card; ++i)
    if (q(m.top(i)) != m.bottom(p(i))) return false;
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<size_t>(p.source_card));
  for (int i = 1; i <= p.source_card; ++i) pairs.emplace_back(m.top(i), p(i));
  std::sort(pairs.begin(), pairs.end());
  return std::adjacent_find(pairs.begin(), pairs.end()) == pairs.end();
}

EpiFinMorphism compose_epifin(const EpiFinMorphism& f, const EpiFinMorphism& g) {
  if (!(f.tgt == g.src))
    throw structural_error("compose_epifin: middle objects differ");
  EpiFinMorphism h{f.src, g.tgt, compose(f.top, g.top),
                   compose(f.bottom, g.bottom)};
  if (!validate_epifin_morphism(h))
    throw structural_error("compose_epifin: composite square is not valid");
  return h;
}

EpiFinMorphism identity_epifin(const EpiFinObject& x) {
  return {x, x, FinMap::identity(x.p.source_card),
          FinMap::identity(x.p.target_card)};
}

std::vector<EpiFinMorphism> enumerate_epifin_morphisms(const EpiFinObject& src,
                                                       const EpiFinObject& tgt) {
  std::vector<EpiFinMorphism> out;
  for (const FinMap& top :
       enumerate_maps(src.p.source_card, tgt.p.source_card))
    for (const FinMap& bottom :
         enumerate_maps(src.p.target_card, tgt.p.target_card)) {
      EpiFinMorphism m{src, tgt, top, bottom};
      if (validate_epifin_morphism(m)) out.push_back(std::move(m));
    }
  return out;
}

bool is_in_epifin_one(const EpiFinObject& x) { return x.p.target_card == 1; }

TriFinObject::TriFinObject(FinMap fine, FinMap coarse)
    : fine_to_mid(std::move(fine)), mid_to_coarse(std::move(coarse)) {
  if (fine_to_mid.target_card != mid_to_coarse.source_card)
    throw structural_error("TriFinObject: middle cardinalities disagree");
  if (!is_selfic(fine_to_mid) || !is_selfic(mid_to_coarse))
    throw structural_error("TriFinObject: stage map is not selfic");
}

std::pair<EpiFinMorphism, EpiFinMorphism> trifin_source_target_functors(
    const TriFinMorphism& m) {
  EpiFinMorphism coarse_square{EpiFinObject(m.src.mid_to_coarse),
                               EpiFinObject(m.tgt.mid_to_coarse),
                               m.level_maps[1], m.level_maps[0]};
  EpiFinMorphism fine_square{EpiFinObject(m.src.fine_to_mid),
                             EpiFinObject(m.tgt.fine_to_mid), m.level_maps[2],
                             m.level_maps[1]};
  return {std::move(coarse_square), std::move(fine_square)};
}

bool validate_trifin_morphism(const TriFinMorphism& m) {
  auto [coarse_square, fine_square] = trifin_source_target_functors(m);
  return validate_epifin_morphism(coarse_square) &&
         validate_epifin_morphism(fine_square);
}

int trifin_underlying_card(const TriFinObject& x) {
  return x.fine_to_mid.source_card;
}

// ---------------------------------------------------------------------------
// Table categories.
// ---------------------------------------------------------------------------

uint32_t BuiltFin::find_arrow(const FinMap& f) const {
  auto it = std::lower_bound(arrows.begin(), arrows.end(), f);
  if (it == arrows.end() || !(*it == f))
    throw structural_error("BuiltFin: arrow not stored: " + to_string(f));
  return static_cast<uint32_t>(it - arrows.begin());
}

BuiltFin fin_category(int max_card) {
  if (max_card < 0) throw structural_error("fin_category: negative bound");
  BuiltFin B;
  FiniteCategory& C = B.cat;
  C.num_objects = static_cast<uint32_t>(max_card) + 1;
  C.bounded = false;
  C.identities.assign(C.num_objects, 0);
  B.object_card.resize(C.num_objects);
  for (int k = 0; k <= max_card; ++k) {
    B.object_card[static_cast<size_t>(k)] = k;
    C.object_names.push_back(std::to_string(k));
  }
  for (int k = 0; k <= max_card; ++k)
    for (int l = 0; l <= max_card; ++l)
      for (FinMap& f : enumerate_maps(k, l)) {
        uint32_t id = static_cast<uint32_t>(B.arrows.size());
        if (k == l && f == FinMap::identity(k))
          C.identities[static_cast<size_t>(k)] = id;
        C.morphisms.push_back({static_cast<uint32_t>(k), static_cast<uint32_t>(l)});
        C.morphism_names.push_back(to_string(f));
        B.arrows.push_back(std::move(f));
      }
  for (uint32_t a = 0; a < B.arrows.size(); ++a)
    for (uint32_t b = 0; b < B.arrows.size(); ++b)
      if (C.morphisms[a].tgt == C.morphisms[b].src)
        C.set_compose(a, b, B.find_arrow(compose(B.arrows[a], B.arrows[b])));
  return B;
}

uint32_t BuiltEpiFin::find_object(const EpiFinObject& x) const {
  auto it = std::lower_bound(objects.begin(), objects.end(), x);
  if (it == objects.end() || !(*it == x))
    throw structural_error("BuiltEpiFin: object not stored: " + to_string(x.p));
  return static_cast<uint32_t>(it - objects.begin());
}

uint32_t BuiltEpiFin::find_arrow(const EpiFinMorphism& m) const {
  const uint32_t src = find_object(m.src);
  const uint32_t tgt = find_object(m.tgt);
  auto below = [&](uint32_t id) {
    if (cat.morphisms[id].src != src) return cat.morphisms[id].src < src;
    if (cat.morphisms[id].tgt != tgt) return cat.morphisms[id].tgt < tgt;
    if (!(arrows[id].top == m.top)) return arrows[id].top < m.top;
    return arrows[id].bottom < m.bottom;
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
      cat.morphisms[lo].tgt != tgt || !(arrows[lo].top == m.top) ||
      !(arrows[lo].bottom == m.bottom))
    throw structural_error("BuiltEpiFin: arrow not stored");
  return lo;
}

BuiltEpiFin epifin_category(int max_source_card, bool restrict_to_one) {
  if (max_source_card < 0)
    throw structural_error("epifin_category: negative bound");
  BuiltEpiFin B;
  for (int k = 0; k <= max_source_card; ++k)
    for (int l = 0; l <= k; ++l)
      for (FinMap& p : enumerate_selfic(k, l)) {
        EpiFinObject ob{std::move(p)};
        if (restrict_to_one && !is_in_epifin_one(ob)) continue;
        B.objects.push_back(std::move(ob));
      }
  FiniteCategory& C = B.cat;
  C.num_objects = static_cast<uint32_t>(B.objects.size());
  C.bounded = false;
  C.identities.assign(C.num_objects, 0);
  for (const EpiFinObject& ob : B.objects)
    C.object_names.push_back(to_string(ob.p));
  for (uint32_t s = 0; s < C.num_objects; ++s)
    for (uint32_t t = 0; t < C.num_objects; ++t)
      for (EpiFinMorphism& m :
           enumerate_epifin_morphisms(B.objects[s], B.objects[t])) {
        uint32_t id = static_cast<uint32_t>(B.arrows.size());
        if (s == t && m == identity_epifin(B.objects[s])) C.identities[s] = id;
        C.morphisms.push_back({s, t});
        C.morphism_names.push_back(to_string(m.top) + ";" + to_string(m.bottom));
        B.arrows.push_back(std::move(m));
      }
  for (uint32_t a = 0; a < B.arrows.size(); ++a)
    for (uint32_t b = 0; b < B.arrows.size(); ++b)
      if (C.morphisms[a].tgt == C.morphisms[b].src)
        C.set_compose(a, b,
                      B.find_arrow(compose_epifin(B.arrows[a], B.arrows[b])));
  return B;
}

CatFunctor epifin_source_functor(const BuiltEpiFin& E, const BuiltFin& F) {
  CatFunctor out;
  for (const EpiFinObject& ob : E.objects)
    out.ob_map.push_back(static_cast<uint32_t>(ob.p.source_card));
  for (const EpiFinMorphism& m : E.arrows)
    out.mor_map.push_back(F.find_arrow(m.top));
  return out;
}

CatFunctor epifin_target_functor(const BuiltEpiFin& E, const BuiltFin& F) {
  CatFunctor out;
  for (const EpiFinObject& ob : E.objects)
    out.ob_map.push_back(static_cast<uint32_t>(ob.p.target_card));
  for (const EpiFinMorphism& m : E.arrows)
    out.mor_map.push_back(F.find_arrow(m.bottom));
  return out;
}

// ---------------------------------------------------------------------------
// Axiom sweep.
// ---------------------------------------------------------------------------

namespace {

// Compact square between fixed objects: value vectors only.
struct SweepArrow {
  std::vector<int> top;
  std::vector<int> bottom;
  bool operator<(const SweepArrow& o) const {
    if (top != o.top) return top < o.top;
    return bottom < o.bottom;
  }
  bool operator==(const SweepArrow& o) const {
    return top == o.top && bottom == o.bottom;
  }
};

void note_violation(AxiomSweepReport& rep, const std::string& what) {
  ++rep.violations;
  if (rep.first_violation.empty()) rep.first_violation = what;
}

}  // namespace

AxiomSweepReport epifin_axiom_sweep(int max_card, const Budget* budget) {
  AxiomSweepReport rep;
  std::vector<EpiFinObject> obs;
  for (int k = 0; k <= max_card; ++k)
    for (int l = 0; l <= k; ++l)
      for (FinMap& p : enumerate_selfic(k, l)) obs.emplace_back(std::move(p));
  const size_t n = obs.size();
  rep.objects = static_cast<long long>(n);

  std::vector<std::vector<std::vector<SweepArrow>>> hom(
      n, std::vector<std::vector<SweepArrow>>(n));
  for (size_t a = 0; a < n; ++a)
    for (size_t b = 0; b < n; ++b) {
      auto ms = enumerate_epifin_morphisms(obs[a], obs[b]);
      auto& block = hom[a][b];
      block.reserve(ms.size());
      for (auto& m : ms)
        block.push_back({std::move(m.top.values), std::move(m.bottom.values)});
      rep.morphisms += static_cast<long long>(block.size());
    }

  // Identity squares must be stored endomorphisms; the unit laws themselves
  // are checked through the composite matrices further down.
  std::vector<uint32_t> id_index(n, 0xffffffffu);
  for (size_t a = 0; a < n; ++a) {
    SweepArrow id;
    id.top.resize(static_cast<size_t>(obs[a].p.source_card));
    for (int i = 0; i < obs[a].p.source_card; ++i) id.top[static_cast<size_t>(i)] = i + 1;
    id.bottom.resize(static_cast<size_t>(obs[a].p.target_card));
    for (int i = 0; i < obs[a].p.target_card; ++i) id.bottom[static_cast<size_t>(i)] = i + 1;
    auto it = std::lower_bound(hom[a][a].begin(), hom[a][a].end(), id);
    if (it == hom[a][a].end() || !(*it == id))
      note_violation(rep, "identity square missing on " + to_string(obs[a].p));
    else
      id_index[a] = static_cast<uint32_t>(it - hom[a][a].begin());
  }

  // Composition of value vectors: out[i] = second[first[i]].
  auto comp_vals = [](const std::vector<int>& first, const std::vector<int>& second,
                      std::vector<int>& out) {
    out.resize(first.size());
    for (size_t i = 0; i < first.size(); ++i)
      out[i] = second[static_cast<size_t>(first[i]) - 1];
  };

  // Closure pass doubling as a precompute: for every (a, b, c) the matrix of
  // composite indices into hom[a][c]. Every entry is one composable pair, so
  // the total footprint is 4 bytes per pair. Composites are revalidated as
  // squares; a missing or invalid composite is a closure violation.
  std::vector<std::vector<uint32_t>> mats(n * n * n);
  auto mat_at = [&](size_t a, size_t b, size_t c) -> std::vector<uint32_t>& {
    return mats[(a * n + b) * n + c];
  };
  SweepArrow composite;
  for (size_t a = 0; a < n && rep.completed; ++a)
    for (size_t b = 0; b < n && rep.completed; ++b) {
      if (hom[a][b].empty()) continue;
      for (size_t c = 0; c < n; ++c) {
        if (hom[b][c].empty()) continue;
        if (budget_expired(budget)) {
          rep.completed = false;
          break;
        }
        const auto& AB = hom[a][b];
        const auto& BC = hom[b][c];
        const auto& AC = hom[a][c];
        auto& mat = mat_at(a, b, c);
        mat.assign(AB.size() * BC.size(), 0);
        for (size_t f = 0; f < AB.size(); ++f)
          for (size_t g = 0; g < BC.size(); ++g) {
            comp_vals(AB[f].top, BC[g].top, composite.top);
            comp_vals(AB[f].bottom, BC[g].bottom, composite.bottom);
            ++rep.pairs;
            auto it = std::lower_bound(AC.begin(), AC.end(), composite);
            bool ok = it != AC.end() && *it == composite;
            if (ok) {
              EpiFinMorphism check{
                  obs[a], obs[c],
                  FinMap(obs[a].p.source_card, obs[c].p.source_card, composite.top),
                  FinMap(obs[a].p.target_card, obs[c].p.target_card,
                         composite.bottom)};
              ok = validate_epifin_morphism(check);
            }
            if (!ok) {
              note_violation(rep, "composite not closed: " + to_string(obs[a].p) +
                                      " -> " + to_string(obs[b].p) + " -> " +
                                      to_string(obs[c].p));
              mat[f * BC.size() + g] = 0xffffffffu;
            } else {
              mat[f * BC.size() + g] = static_cast<uint32_t>(it - AC.begin());
            }
          }
      }
    }

  // Unit laws through the matrices: the identity row and column act as the
  // identity permutation on arrow indices.
  for (size_t a = 0; a < n && rep.completed; ++a)
    for (size_t b = 0; b < n; ++b) {
      const size_t nab = hom[a][b].size();
      if (nab == 0) continue;
      if (id_index[a] != 0xffffffffu) {
        const auto& left_mat = mat_at(a, a, b);
        for (size_t g = 0; g < nab; ++g)
          if (left_mat[id_index[a] * nab + g] != g)
            note_violation(rep, "left unit law failed at " + to_string(obs[a].p));
      }
      if (id_index[b] != 0xffffffffu) {
        const auto& right_mat = mat_at(a, b, b);
        const size_t nbb = hom[b][b].size();
        for (size_t f = 0; f < nab; ++f)
          if (right_mat[f * nbb + id_index[b]] != f)
            note_violation(rep, "right unit law failed at " + to_string(obs[b].p));
      }
    }

  // Associativity: pure index lookups through the precomputed matrices.
  for (size_t a = 0; a < n && rep.completed; ++a)
    for (size_t b = 0; b < n && rep.completed; ++b) {
      if (hom[a][b].empty()) continue;
      for (size_t c = 0; c < n; ++c) {
        if (hom[b][c].empty()) continue;
        if (budget_expired(budget)) {
          rep.completed = false;
          break;
        }
        for (size_t d = 0; d < n; ++d) {
          if (hom[c][d].empty()) continue;
          const auto& ab_c = mat_at(a, b, c);
          const auto& bc_d = mat_at(b, c, d);
          const auto& ac_d = mat_at(a, c, d);
          const auto& ab_d = mat_at(a, b, d);
          const size_t nab = hom[a][b].size();
          const size_t nbc = hom[b][c].size();
          const size_t ncd = hom[c][d].size();
          const size_t nbd = hom[b][d].size();
          for (size_t f = 0; f < nab; ++f)
            for (size_t g = 0; g < nbc; ++g) {
              const uint32_t fg = ab_c[f * nbc + g];
              const uint32_t* gh_row = bc_d.data() + g * ncd;
              const uint32_t* lhs_row =
                  fg == 0xffffffffu ? nullptr : ac_d.data() + fg * ncd;
              const uint32_t* rhs_base = ab_d.data() + f * nbd;
              rep.triples += static_cast<long long>(ncd);
              if (lhs_row == nullptr) continue;
              for (size_t h = 0; h < ncd; ++h) {
                const uint32_t gh = gh_row[h];
                if (gh == 0xffffffffu) continue;
                if (lhs_row[h] != rhs_base[gh])
                  note_violation(rep, "associativity failed through " +
                                          to_string(obs[b].p) + ", " +
                                          to_string(obs[c].p));
              }
            }
        }
      }
    }
  return rep;
}

}  // namespace covcat
