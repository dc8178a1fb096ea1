#include "covcat/scomb.hpp"

#include <algorithm>
#include <unordered_set>

namespace covcat {

namespace {

uint64_t pair_key(uint32_t f, uint32_t g) {
  return (static_cast<uint64_t>(f) << 32) | g;
}

std::vector<std::vector<uint32_t>> out_adjacency(const FiniteCategory& C) {
  std::vector<std::vector<uint32_t>> adj(C.num_objects);
  for (uint32_t m = 0; m < C.morphisms.size(); ++m)
    adj[C.morphisms[m].src].push_back(m);
  return adj;
}

}  // namespace

uint32_t FiniteCategory::compose(uint32_t f, uint32_t g) const {
  if (morphisms[f].tgt != morphisms[g].src)
    throw structural_error("compose: pair is not composable");
  auto it = compose_table.find(pair_key(f, g));
  if (it == compose_table.end()) {
    if (bounded) return kOverflow;
    throw structural_error("compose: missing table entry");
  }
  return it->second;
}

void FiniteCategory::set_compose(uint32_t f, uint32_t g, uint32_t result) {
  compose_table[pair_key(f, g)] = result;
}

bool FiniteCategory::has_compose(uint32_t f, uint32_t g) const {
  if (morphisms[f].tgt != morphisms[g].src) return false;
  auto it = compose_table.find(pair_key(f, g));
  return it != compose_table.end() && it->second != kOverflow;
}

void validate_category(const FiniteCategory& C) {
  if (C.identities.size() != C.num_objects)
    throw structural_error("category: identity table size mismatch");
  for (const auto& m : C.morphisms)
    if (m.src >= C.num_objects || m.tgt >= C.num_objects)
      throw structural_error("category: morphism endpoint out of range");
  for (uint32_t ob = 0; ob < C.num_objects; ++ob) {
    uint32_t e = C.identities[ob];
    if (e >= C.morphisms.size() || C.morphisms[e].src != ob ||
        C.morphisms[e].tgt != ob)
      throw structural_error("category: bad identity morphism");
  }
  for (uint32_t m = 0; m < C.morphisms.size(); ++m) {
    if (C.compose(C.identities[C.morphisms[m].src], m) != m)
      throw structural_error("category: left identity law failed");
    if (C.compose(m, C.identities[C.morphisms[m].tgt]) != m)
      throw structural_error("category: right identity law failed");
  }
  auto adj = out_adjacency(C);
  for (uint32_t f = 0; f < C.morphisms.size(); ++f)
    for (uint32_t g : adj[C.morphisms[f].tgt]) {
      uint32_t e = C.compose(f, g);
      if (e == FiniteCategory::kOverflow) {
        if (!C.bounded)
          throw structural_error("category: overflow entry in unbounded category");
        continue;
      }
      if (e >= C.morphisms.size() || C.morphisms[e].src != C.morphisms[f].src ||
          C.morphisms[e].tgt != C.morphisms[g].tgt)
        throw structural_error("category: composite has wrong endpoints");
    }
  for (uint32_t f = 0; f < C.morphisms.size(); ++f)
    for (uint32_t g : adj[C.morphisms[f].tgt]) {
      uint32_t fg = C.compose(f, g);
      for (uint32_t h : adj[C.morphisms[g].tgt]) {
        uint32_t gh = C.compose(g, h);
        if (fg == FiniteCategory::kOverflow || gh == FiniteCategory::kOverflow)
          continue;
        if (C.compose(fg, h) != C.compose(f, gh))
          throw structural_error("category: associativity failed");
      }
    }
}

void validate_functor(const FiniteCategory& C, const FiniteCategory& D,
                      const CatFunctor& F) {
  if (F.ob_map.size() != C.num_objects ||
      F.mor_map.size() != C.morphisms.size())
    throw structural_error("functor: table size mismatch");
  for (uint32_t ob : F.ob_map)
    if (ob >= D.num_objects) throw structural_error("functor: object out of range");
  for (uint32_t m = 0; m < C.morphisms.size(); ++m) {
    uint32_t fm = F.mor_map[m];
    if (fm >= D.morphisms.size())
      throw structural_error("functor: morphism out of range");
    if (D.morphisms[fm].src != F.ob_map[C.morphisms[m].src] ||
        D.morphisms[fm].tgt != F.ob_map[C.morphisms[m].tgt])
      throw structural_error("functor: endpoints not preserved");
  }
  for (uint32_t ob = 0; ob < C.num_objects; ++ob)
    if (F.mor_map[C.identities[ob]] != D.identities[F.ob_map[ob]])
      throw structural_error("functor: identities not preserved");
  auto adj = out_adjacency(C);
  for (uint32_t f = 0; f < C.morphisms.size(); ++f)
    for (uint32_t g : adj[C.morphisms[f].tgt]) {
      uint32_t e = C.compose(f, g);
      if (e == FiniteCategory::kOverflow) continue;
      uint32_t image = D.compose(F.mor_map[f], F.mor_map[g]);
      if (image == FiniteCategory::kOverflow || image != F.mor_map[e])
        throw structural_error("functor: composition not preserved");
    }
}

// ---------------------------------------------------------------------------
// Simplicial sets.
// ---------------------------------------------------------------------------

void validate_sset(const TruncatedSSet& X) {
  if (X.max_dim < 0 ||
      X.levels.size() != static_cast<size_t>(X.max_dim) + 1)
    throw structural_error("sset: level count mismatch");
  for (int n = 0; n <= X.max_dim; ++n) {
    const auto& L = X.levels[static_cast<size_t>(n)];
    size_t want_faces = n >= 1 ? static_cast<size_t>(n) + 1 : 0;
    if (L.face.size() != want_faces)
      throw structural_error("sset: face operator count wrong at level " +
                             std::to_string(n));
    for (const auto& tab : L.face) {
      if (tab.size() != L.count)
        throw structural_error("sset: face table size wrong");
      for (uint32_t v : tab)
        if (v >= X.levels[static_cast<size_t>(n) - 1].count)
          throw structural_error("sset: face value out of range");
    }
    size_t want_degens = n + 1 <= X.max_dim ? static_cast<size_t>(n) + 1 : 0;
    if (L.degen.size() != want_degens)
      throw structural_error("sset: degeneracy operator count wrong at level " +
                             std::to_string(n));
    for (const auto& tab : L.degen) {
      if (tab.size() != L.count)
        throw structural_error("sset: degeneracy table size wrong");
      for (uint32_t v : tab)
        if (v >= X.levels[static_cast<size_t>(n) + 1].count)
          throw structural_error("sset: degeneracy value out of range");
    }
  }
  // d_i d_j = d_{j-1} d_i for i < j.
  for (int n = 2; n <= X.max_dim; ++n)
    for (int j = 1; j <= n; ++j)
      for (int i = 0; i < j; ++i)
        for (uint32_t s = 0; s < X.size(n); ++s)
          if (X.face(n - 1, i, X.face(n, j, s)) !=
              X.face(n - 1, j - 1, X.face(n, i, s)))
            throw structural_error("sset: face-face identity failed at level " +
                                   std::to_string(n));
  // s_i s_j = s_{j+1} s_i for i <= j.
  for (int n = 0; n + 2 <= X.max_dim; ++n)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= j; ++i)
        for (uint32_t s = 0; s < X.size(n); ++s)
          if (X.degen(n + 1, i, X.degen(n, j, s)) !=
              X.degen(n + 1, j + 1, X.degen(n, i, s)))
            throw structural_error(
                "sset: degeneracy-degeneracy identity failed at level " +
                std::to_string(n));
  // d_i s_j identities.
  for (int n = 0; n + 1 <= X.max_dim; ++n)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n + 1; ++i)
        for (uint32_t s = 0; s < X.size(n); ++s) {
          uint32_t t = X.degen(n, j, s);
          uint32_t got = X.face(n + 1, i, t);
          uint32_t want;
          if (i == j || i == j + 1)
            want = s;
          else if (i < j)
            want = X.degen(n - 1, j - 1, X.face(n, i, s));
          else
            want = X.degen(n - 1, j, X.face(n, i - 1, s));
          if (got != want)
            throw structural_error("sset: face-degeneracy identity failed at level " +
                                   std::to_string(n));
        }
}

std::vector<uint32_t> simplicial_operator(const TruncatedSSet& X,
                                          const std::vector<int>& alpha, int n) {
  if (alpha.empty()) throw structural_error("operator: empty map");
  const int m = static_cast<int>(alpha.size()) - 1;
  if (n < 0 || n > X.max_dim || m > X.max_dim)
    throw structural_error("operator: level out of stored range");
  for (size_t t = 0; t < alpha.size(); ++t) {
    if (alpha[t] < 0 || alpha[t] > n)
      throw structural_error("operator: value out of range");
    if (t > 0 && alpha[t] < alpha[t - 1])
      throw structural_error("operator: map not monotone");
  }

  std::vector<uint32_t> table(X.size(n));
  for (uint32_t s = 0; s < table.size(); ++s) table[s] = s;

  // Epi-mono factorization: faces for the missing values (largest first),
  // then degeneracies for the duplicated positions (innermost first).
  std::vector<char> in_image(static_cast<size_t>(n) + 1, 0);
  for (int v : alpha) in_image[static_cast<size_t>(v)] = 1;
  int cur = n;
  for (int j = n; j >= 0; --j) {
    if (in_image[static_cast<size_t>(j)]) continue;
    for (auto& entry : table) entry = X.face(cur, j, entry);
    --cur;
  }

  std::vector<int> image;
  for (int v = 0; v <= n; ++v)
    if (in_image[static_cast<size_t>(v)]) image.push_back(v);
  std::vector<int> sigma(alpha.size());
  for (size_t t = 0; t < alpha.size(); ++t)
    sigma[t] = static_cast<int>(std::lower_bound(image.begin(), image.end(),
                                                 alpha[t]) -
                                image.begin());
  std::vector<int> peel;
  while (static_cast<int>(sigma.size()) > cur + 1) {
    // First duplicated position: smallest j with sigma[j] == sigma[j+1].
    size_t j = 0;
    while (sigma[j + 1] != sigma[j]) ++j;
    peel.push_back(static_cast<int>(j));
    sigma.erase(sigma.begin() + static_cast<long>(j) + 1);
  }
  for (auto it = peel.rbegin(); it != peel.rend(); ++it) {
    for (auto& entry : table) entry = X.degen(cur, *it, entry);
    ++cur;
  }
  return table;
}

std::vector<uint32_t> ultimate_target_table(const TruncatedSSet& X, int r) {
  if (r < 0 || r > X.max_dim)
    throw structural_error("ultimate target: level out of range");
  std::vector<uint32_t> table(X.size(r));
  for (uint32_t s = 0; s < table.size(); ++s) table[s] = s;
  for (int level = r; level >= 1; --level)
    for (auto& entry : table) entry = X.face(level, level, entry);
  return table;
}

// ---------------------------------------------------------------------------
// Nerve.
// ---------------------------------------------------------------------------

std::span<const uint32_t> BuiltNerve::key(int level, uint32_t s) const {
  if (level == 0) return {};
  const auto& flat = keys[static_cast<size_t>(level)];
  return {flat.data() + static_cast<size_t>(s) * static_cast<size_t>(level),
          static_cast<size_t>(level)};
}

uint32_t BuiltNerve::find(int level, std::span<const uint32_t> want) const {
  if (level == 0) {
    if (want.size() != 1 || want[0] >= sset.size(0)) return kNotFound;
    return want[0];
  }
  if (want.size() != static_cast<size_t>(level)) return kNotFound;
  const auto& flat = keys[static_cast<size_t>(level)];
  const size_t width = static_cast<size_t>(level);
  uint32_t lo = 0, hi = sset.size(level);
  while (lo < hi) {
    uint32_t mid = lo + (hi - lo) / 2;
    const uint32_t* k = flat.data() + static_cast<size_t>(mid) * width;
    bool less = std::lexicographical_compare(k, k + width, want.begin(), want.end());
    if (less)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo == sset.size(level)) return kNotFound;
  const uint32_t* k = flat.data() + static_cast<size_t>(lo) * width;
  return std::equal(k, k + width, want.begin(), want.end()) ? lo : kNotFound;
}

BuiltNerve nerve(const FiniteCategory& C, int depth) {
  if (depth < 0) throw structural_error("nerve: negative depth");
  BuiltNerve N;
  TruncatedSSet& X = N.sset;
  X.max_dim = depth;
  X.levels.resize(static_cast<size_t>(depth) + 1);
  N.keys.resize(static_cast<size_t>(depth) + 1);

  X.levels[0].count = C.num_objects;
  if (depth >= 1) {
    X.levels[1].count = static_cast<uint32_t>(C.morphisms.size());
    auto& flat = N.keys[1];
    flat.resize(C.morphisms.size());
    for (uint32_t m = 0; m < C.morphisms.size(); ++m) flat[m] = m;
  }

  auto adj = out_adjacency(C);

  // run[s] = id of the full composite of string s at the current level;
  // extensions that overflow the stored budget are skipped.
  std::vector<uint32_t> run(C.morphisms.size());
  for (uint32_t m = 0; m < C.morphisms.size(); ++m) run[m] = m;
  for (int n = 2; n <= depth; ++n) {
    const auto& prev = N.keys[static_cast<size_t>(n) - 1];
    const size_t pw = static_cast<size_t>(n) - 1;
    auto& flat = N.keys[static_cast<size_t>(n)];
    std::vector<uint32_t> next_run;
    for (uint32_t s = 0; s < X.size(n - 1); ++s) {
      const uint32_t* k = prev.data() + static_cast<size_t>(s) * pw;
      const uint32_t last = k[pw - 1];
      for (uint32_t m2 : adj[C.morphisms[last].tgt]) {
        uint32_t composite = C.compose(run[s], m2);
        if (composite == FiniteCategory::kOverflow) continue;
        flat.insert(flat.end(), k, k + pw);
        flat.push_back(m2);
        next_run.push_back(composite);
      }
    }
    X.levels[static_cast<size_t>(n)].count =
        static_cast<uint32_t>(next_run.size());
    run = std::move(next_run);
  }

  // Operator tables. Orientation: the face with index i at level n omits
  // vertex n-i, so index n drops the first arrow, index 0 the last, and a
  // middle index composes the two arrows around the omitted vertex.
  std::vector<uint32_t> scratch;
  for (int n = 1; n <= depth; ++n) {
    auto& L = X.levels[static_cast<size_t>(n)];
    L.face.assign(static_cast<size_t>(n) + 1, {});
    for (auto& tab : L.face) tab.resize(L.count);
    for (uint32_t s = 0; s < L.count; ++s) {
      auto k = N.key(n, s);
      for (int i = 0; i <= n; ++i) {
        const int v = n - i;
        uint32_t result;
        if (n == 1) {
          result = v == 0 ? C.morphisms[k[0]].tgt : C.morphisms[k[0]].src;
        } else {
          scratch.clear();
          if (v == 0) {
            scratch.assign(k.begin() + 1, k.end());
          } else if (v == n) {
            scratch.assign(k.begin(), k.end() - 1);
          } else {
            scratch.assign(k.begin(), k.begin() + (v - 1));
            uint32_t composite = C.compose(k[v - 1], k[v]);
            if (composite == FiniteCategory::kOverflow)
              throw structural_error("nerve: inner composite overflowed");
            scratch.push_back(composite);
            scratch.insert(scratch.end(), k.begin() + (v + 1), k.end());
          }
          result = N.find(n - 1, scratch);
          if (result == BuiltNerve::kNotFound)
            throw structural_error("nerve: face string not stored");
        }
        L.face[static_cast<size_t>(i)][s] = result;
      }
    }
  }
  for (int n = 0; n + 1 <= depth; ++n) {
    auto& L = X.levels[static_cast<size_t>(n)];
    L.degen.assign(static_cast<size_t>(n) + 1, {});
    for (auto& tab : L.degen) tab.resize(L.count);
    for (uint32_t s = 0; s < L.count; ++s) {
      if (n == 0) {
        L.degen[0][s] = C.identities[s];
        continue;
      }
      auto k = N.key(n, s);
      for (int i = 0; i <= n; ++i) {
        const int v = n - i;
        const uint32_t vertex =
            v == 0 ? C.morphisms[k[0]].src : C.morphisms[k[v - 1]].tgt;
        scratch.clear();
        scratch.assign(k.begin(), k.begin() + v);
        scratch.push_back(C.identities[vertex]);
        scratch.insert(scratch.end(), k.begin() + v, k.end());
        uint32_t result = N.find(n + 1, scratch);
        if (result == BuiltNerve::kNotFound)
          throw structural_error("nerve: degenerate string not stored");
        L.degen[static_cast<size_t>(i)][s] = result;
      }
    }
  }
  return N;
}

void validate_simplicial_map(const SimplicialMap& F, const TruncatedSSet& X,
                             const TruncatedSSet& Y) {
  if (Y.max_dim < X.max_dim ||
      F.level_map.size() != static_cast<size_t>(X.max_dim) + 1)
    throw structural_error("simplicial map: level table mismatch");
  for (int n = 0; n <= X.max_dim; ++n) {
    const auto& tab = F.level_map[static_cast<size_t>(n)];
    if (tab.size() != X.size(n))
      throw structural_error("simplicial map: table size wrong at level " +
                             std::to_string(n));
    for (uint32_t v : tab)
      if (v >= Y.size(n))
        throw structural_error("simplicial map: value out of range");
  }
  for (int n = 1; n <= X.max_dim; ++n)
    for (int i = 0; i <= n; ++i)
      for (uint32_t s = 0; s < X.size(n); ++s)
        if (Y.face(n, i, F.level_map[static_cast<size_t>(n)][s]) !=
            F.level_map[static_cast<size_t>(n) - 1][X.face(n, i, s)])
          throw structural_error("simplicial map: does not commute with a face");
  for (int n = 0; n + 1 <= X.max_dim; ++n)
    for (int i = 0; i <= n; ++i)
      for (uint32_t s = 0; s < X.size(n); ++s)
        if (Y.degen(n, i, F.level_map[static_cast<size_t>(n)][s]) !=
            F.level_map[static_cast<size_t>(n) + 1][X.degen(n, i, s)])
          throw structural_error(
              "simplicial map: does not commute with a degeneracy");
}

SimplicialMap nerve_map(const CatFunctor& F, const BuiltNerve& NX,
                        const BuiltNerve& NY) {
  SimplicialMap out;
  const int depth = NX.sset.max_dim;
  out.level_map.resize(static_cast<size_t>(depth) + 1);
  out.level_map[0] = F.ob_map;
  std::vector<uint32_t> scratch;
  for (int n = 1; n <= depth; ++n) {
    auto& tab = out.level_map[static_cast<size_t>(n)];
    tab.resize(NX.sset.size(n));
    for (uint32_t s = 0; s < NX.sset.size(n); ++s) {
      auto k = NX.key(n, s);
      scratch.clear();
      for (uint32_t m : k) scratch.push_back(F.mor_map[m]);
      uint32_t t = NY.find(n, scratch);
      if (t == BuiltNerve::kNotFound)
        throw structural_error("nerve map: image string not stored");
      tab[s] = t;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Latching.
// ---------------------------------------------------------------------------

std::vector<uint32_t> latching_degeneracy_union(const TruncatedSSet& X, int n) {
  if (n < 1 || n > X.max_dim)
    throw structural_error("latching: level out of range");
  std::vector<char> hit(X.size(n), 0);
  for (int i = 0; i <= n - 1; ++i)
    for (uint32_t s = 0; s < X.size(n - 1); ++s)
      hit[X.degen(n - 1, i, s)] = 1;
  std::vector<uint32_t> out;
  for (uint32_t s = 0; s < X.size(n); ++s)
    if (hit[s]) out.push_back(s);
  return out;
}

namespace {

void grow_surjections(int remaining, int cur, int p,
                      std::vector<int>& word,
                      std::vector<std::vector<int>>& out) {
  if (remaining == 0) {
    if (cur == p) out.push_back(word);
    return;
  }
  if (cur > p) return;
  // Next value stays or steps by one; it can never exceed p.
  for (int step = 0; step <= 1; ++step) {
    if (cur + step > p) continue;
    word.push_back(cur + step);
    grow_surjections(remaining - 1, cur + step, p, word, out);
    word.pop_back();
  }
}

}  // namespace

std::vector<uint32_t> latching_surjection_union(const TruncatedSSet& X, int n) {
  if (n < 1 || n > X.max_dim)
    throw structural_error("latching: level out of range");
  std::vector<char> hit(X.size(n), 0);
  for (int p = 0; p < n; ++p) {
    std::vector<std::vector<int>> alphas;
    std::vector<int> word{0};
    grow_surjections(n, 0, p, word, alphas);
    for (const auto& alpha : alphas) {
      auto table = simplicial_operator(X, alpha, p);
      for (uint32_t v : table) hit[v] = 1;
    }
  }
  std::vector<uint32_t> out;
  for (uint32_t s = 0; s < X.size(n); ++s)
    if (hit[s]) out.push_back(s);
  return out;
}

std::vector<uint32_t> latching(const TruncatedSSet& X, int n) {
  auto via_degen = latching_degeneracy_union(X, n);
  auto via_surj = latching_surjection_union(X, n);
  if (via_degen != via_surj)
    throw structural_error("latching: the two computations disagree at level " +
                           std::to_string(n));
  return via_degen;
}

// ---------------------------------------------------------------------------
// Comma.
// ---------------------------------------------------------------------------

CommaSSet comma(const TruncatedSSet& X, uint32_t y) {
  if (X.max_dim < 1)
    throw structural_error("comma: need at least one stored level");
  if (y >= X.size(0)) throw structural_error("comma: vertex out of range");
  CommaSSet out;
  out.sset.max_dim = X.max_dim - 1;
  out.sset.levels.resize(static_cast<size_t>(X.max_dim));
  out.parent.resize(static_cast<size_t>(X.max_dim));

  std::vector<std::vector<uint32_t>> pos(static_cast<size_t>(X.max_dim) + 1);
  for (int r = 0; r <= out.sset.max_dim; ++r) {
    auto ult = ultimate_target_table(X, r + 1);
    auto& level_pos = pos[static_cast<size_t>(r) + 1];
    level_pos.assign(X.size(r + 1), kRemoved);
    auto& par = out.parent[static_cast<size_t>(r)];
    for (uint32_t s = 0; s < X.size(r + 1); ++s)
      if (ult[s] == y) {
        level_pos[s] = static_cast<uint32_t>(par.size());
        par.push_back(s);
      }
    out.sset.levels[static_cast<size_t>(r)].count =
        static_cast<uint32_t>(par.size());
  }
  for (int r = 1; r <= out.sset.max_dim; ++r) {
    auto& L = out.sset.levels[static_cast<size_t>(r)];
    L.face.assign(static_cast<size_t>(r) + 1, {});
    for (auto& tab : L.face) tab.resize(L.count);
    for (uint32_t c = 0; c < L.count; ++c) {
      uint32_t par = out.parent[static_cast<size_t>(r)][c];
      for (int i = 0; i <= r; ++i) {
        uint32_t image = pos[static_cast<size_t>(r)][X.face(r + 1, i + 1, par)];
        if (image == kRemoved)
          throw structural_error("comma: face left the fiber");
        L.face[static_cast<size_t>(i)][c] = image;
      }
    }
  }
  for (int r = 0; r + 1 <= out.sset.max_dim; ++r) {
    auto& L = out.sset.levels[static_cast<size_t>(r)];
    L.degen.assign(static_cast<size_t>(r) + 1, {});
    for (auto& tab : L.degen) tab.resize(L.count);
    for (uint32_t c = 0; c < L.count; ++c) {
      uint32_t par = out.parent[static_cast<size_t>(r)][c];
      for (int i = 0; i <= r; ++i) {
        uint32_t image =
            pos[static_cast<size_t>(r) + 2][X.degen(r + 1, i + 1, par)];
        if (image == kRemoved)
          throw structural_error("comma: degeneracy left the fiber");
        L.degen[static_cast<size_t>(i)][c] = image;
      }
    }
  }
  return out;
}

FiniteCategory classical_comma(const FiniteCategory& C, uint32_t y,
                               CatFunctor* out_proj,
                               std::vector<uint32_t>* out_object_arrows) {
  if (y >= C.num_objects) throw structural_error("comma: object out of range");
  std::vector<uint32_t> obj_arrows;
  std::vector<uint32_t> ob_of_arrow(C.morphisms.size(), kRemoved);
  for (uint32_t m = 0; m < C.morphisms.size(); ++m)
    if (C.morphisms[m].tgt == y) {
      ob_of_arrow[m] = static_cast<uint32_t>(obj_arrows.size());
      obj_arrows.push_back(m);
    }

  FiniteCategory D;
  D.bounded = C.bounded;
  D.num_objects = static_cast<uint32_t>(obj_arrows.size());
  D.identities.assign(D.num_objects, 0);

  struct SliceArrow {
    uint32_t a, b, u;
  };
  std::vector<SliceArrow> arrows;
  auto adj = out_adjacency(C);
  for (uint32_t a = 0; a < D.num_objects; ++a) {
    uint32_t fa = obj_arrows[a];
    for (uint32_t u : adj[C.morphisms[fa].src]) {
      // u: src(fa) -> some object x; it defines a slice arrow into every
      // object arrow fb out of x with u then fb == fa.
      for (uint32_t fb : adj[C.morphisms[u].tgt]) {
        if (ob_of_arrow[fb] == kRemoved) continue;
        if (C.compose(u, fb) != fa) continue;
        arrows.push_back({a, ob_of_arrow[fb], u});
      }
    }
  }
  std::sort(arrows.begin(), arrows.end(), [](const SliceArrow& x, const SliceArrow& y) {
    if (x.a != y.a) return x.a < y.a;
    if (x.b != y.b) return x.b < y.b;
    return x.u < y.u;
  });
  auto find_arrow = [&](uint32_t a, uint32_t b, uint32_t u) -> uint32_t {
    SliceArrow want{a, b, u};
    auto it = std::lower_bound(
        arrows.begin(), arrows.end(), want,
        [](const SliceArrow& x, const SliceArrow& y) {
          if (x.a != y.a) return x.a < y.a;
          if (x.b != y.b) return x.b < y.b;
          return x.u < y.u;
        });
    if (it == arrows.end() || it->a != a || it->b != b || it->u != u)
      throw structural_error("comma: arrow not stored");
    return static_cast<uint32_t>(it - arrows.begin());
  };

  for (uint32_t id = 0; id < arrows.size(); ++id) {
    const auto& ar = arrows[id];
    D.morphisms.push_back({ar.a, ar.b});
    if (ar.a == ar.b && ar.u == C.identities[C.morphisms[obj_arrows[ar.a]].src])
      D.identities[ar.a] = id;
  }
  for (uint32_t f = 0; f < arrows.size(); ++f)
    for (uint32_t g = 0; g < arrows.size(); ++g) {
      if (arrows[f].b != arrows[g].a) continue;
      uint32_t w = C.compose(arrows[f].u, arrows[g].u);
      if (w == FiniteCategory::kOverflow)
        throw structural_error("comma: inner composite overflowed");
      D.set_compose(f, g, find_arrow(arrows[f].a, arrows[g].b, w));
    }

  if (out_proj != nullptr) {
    out_proj->ob_map.clear();
    out_proj->mor_map.clear();
    for (uint32_t m : obj_arrows) out_proj->ob_map.push_back(C.morphisms[m].src);
    for (const auto& ar : arrows) out_proj->mor_map.push_back(ar.u);
  }
  if (out_object_arrows != nullptr) *out_object_arrows = obj_arrows;
  return D;
}

// ---------------------------------------------------------------------------
// Fiber products and pullbacks.
// ---------------------------------------------------------------------------

uint32_t FiberProduct::find(int level, uint32_t x, uint32_t y) const {
  const auto& tab = pairs[static_cast<size_t>(level)];
  auto it = std::lower_bound(tab.begin(), tab.end(), std::make_pair(x, y));
  if (it == tab.end() || it->first != x || it->second != y)
    return BuiltNerve::kNotFound;
  return static_cast<uint32_t>(it - tab.begin());
}

FiberProduct fiber_product(const TruncatedSSet& X, const SimplicialMap& f,
                           const TruncatedSSet& Y, const SimplicialMap& g,
                           const TruncatedSSet& Z) {
  validate_simplicial_map(f, X, Z);
  validate_simplicial_map(g, Y, Z);
  if (X.max_dim != Y.max_dim || X.max_dim != Z.max_dim)
    throw structural_error("fiber product: dimensions disagree");
  FiberProduct P;
  P.sset.max_dim = X.max_dim;
  P.sset.levels.resize(static_cast<size_t>(X.max_dim) + 1);
  P.pairs.resize(static_cast<size_t>(X.max_dim) + 1);
  P.proj_left.level_map.resize(static_cast<size_t>(X.max_dim) + 1);
  P.proj_right.level_map.resize(static_cast<size_t>(X.max_dim) + 1);

  for (int n = 0; n <= X.max_dim; ++n) {
    std::vector<std::vector<uint32_t>> bucket(Z.size(n));
    for (uint32_t y = 0; y < Y.size(n); ++y)
      bucket[g.level_map[static_cast<size_t>(n)][y]].push_back(y);
    auto& tab = P.pairs[static_cast<size_t>(n)];
    for (uint32_t x = 0; x < X.size(n); ++x)
      for (uint32_t y : bucket[f.level_map[static_cast<size_t>(n)][x]])
        tab.emplace_back(x, y);
    P.sset.levels[static_cast<size_t>(n)].count = static_cast<uint32_t>(tab.size());
    auto& pl = P.proj_left.level_map[static_cast<size_t>(n)];
    auto& pr = P.proj_right.level_map[static_cast<size_t>(n)];
    for (const auto& [x, y] : tab) {
      pl.push_back(x);
      pr.push_back(y);
    }
  }
  for (int n = 1; n <= X.max_dim; ++n) {
    auto& L = P.sset.levels[static_cast<size_t>(n)];
    L.face.assign(static_cast<size_t>(n) + 1, {});
    for (auto& tab : L.face) tab.resize(L.count);
    for (uint32_t s = 0; s < L.count; ++s) {
      const auto& [x, y] = P.pairs[static_cast<size_t>(n)][s];
      for (int i = 0; i <= n; ++i) {
        uint32_t image = P.find(n - 1, X.face(n, i, x), Y.face(n, i, y));
        if (image == BuiltNerve::kNotFound)
          throw structural_error("fiber product: face left the product");
        L.face[static_cast<size_t>(i)][s] = image;
      }
    }
  }
  for (int n = 0; n + 1 <= X.max_dim; ++n) {
    auto& L = P.sset.levels[static_cast<size_t>(n)];
    L.degen.assign(static_cast<size_t>(n) + 1, {});
    for (auto& tab : L.degen) tab.resize(L.count);
    for (uint32_t s = 0; s < L.count; ++s) {
      const auto& [x, y] = P.pairs[static_cast<size_t>(n)][s];
      for (int i = 0; i <= n; ++i) {
        uint32_t image = P.find(n + 1, X.degen(n, i, x), Y.degen(n, i, y));
        if (image == BuiltNerve::kNotFound)
          throw structural_error("fiber product: degeneracy left the product");
        L.degen[static_cast<size_t>(i)][s] = image;
      }
    }
  }
  return P;
}

TruncatedSSet point_sset(int max_dim) {
  TruncatedSSet X;
  X.max_dim = max_dim;
  X.levels.resize(static_cast<size_t>(max_dim) + 1);
  for (int n = 0; n <= max_dim; ++n) {
    auto& L = X.levels[static_cast<size_t>(n)];
    L.count = 1;
    if (n >= 1) L.face.assign(static_cast<size_t>(n) + 1, {0});
    if (n + 1 <= max_dim) L.degen.assign(static_cast<size_t>(n) + 1, {0});
  }
  return X;
}

SimplicialMap map_to_point(const TruncatedSSet& X) {
  SimplicialMap F;
  F.level_map.resize(static_cast<size_t>(X.max_dim) + 1);
  for (int n = 0; n <= X.max_dim; ++n)
    F.level_map[static_cast<size_t>(n)].assign(X.size(n), 0);
  return F;
}

bool set_pullback_check(const SetPullbackInput& in, std::string* detail) {
  auto set_detail = [&](const std::string& msg) {
    if (detail != nullptr) *detail = msg;
  };
  if (in.f.size() != in.g.size()) {
    set_detail("comparison maps have different domains");
    return false;
  }
  std::unordered_set<uint64_t> seen;
  seen.reserve(in.f.size() * 2);
  for (size_t a = 0; a < in.f.size(); ++a) {
    uint32_t b = in.f[a], c = in.g[a];
    if (in.rb[b] != in.rd[c]) {
      set_detail("element " + std::to_string(a) +
                 " maps outside the fiber product");
      return false;
    }
    uint64_t key = pair_key(b, c);
    if (!seen.insert(key).second) {
      set_detail("pair (" + std::to_string(b) + "," + std::to_string(c) +
                 ") is hit twice");
      return false;
    }
  }
  std::vector<std::vector<uint32_t>> bucket;
  uint32_t max_d = 0;
  for (uint32_t d : in.rb) max_d = std::max(max_d, d + 1);
  for (uint32_t d : in.rd) max_d = std::max(max_d, d + 1);
  bucket.resize(max_d);
  for (uint32_t c = 0; c < in.rd.size(); ++c) bucket[in.rd[c]].push_back(c);
  size_t total = 0;
  for (uint32_t b = 0; b < in.rb.size(); ++b)
    total += bucket[in.rb[b]].size();
  if (total != in.f.size()) {
    for (uint32_t b = 0; b < in.rb.size(); ++b)
      for (uint32_t c : bucket[in.rb[b]])
        if (seen.find(pair_key(b, c)) == seen.end()) {
          set_detail("pair (" + std::to_string(b) + "," + std::to_string(c) +
                     ") has no preimage");
          return false;
        }
    set_detail("fiber product size mismatch");
    return false;
  }
  return true;
}

PullbackReport strict_pullback_report(const SquareOfMaps& S, int max_level) {
  PullbackReport rep;
  const int top_level = std::min({max_level, S.A->max_dim, S.B->max_dim,
                                  S.C->max_dim, S.D->max_dim});
  if (top_level < 0) throw structural_error("pullback: no common levels");
  for (int n = 0; n <= top_level; ++n) {
    const auto& ft = S.top->level_map[static_cast<size_t>(n)];
    const auto& fl = S.left->level_map[static_cast<size_t>(n)];
    const auto& fr = S.right->level_map[static_cast<size_t>(n)];
    const auto& fb = S.bottom->level_map[static_cast<size_t>(n)];
    for (uint32_t a = 0; a < S.A->size(n); ++a)
      if (fr[ft[a]] != fb[fl[a]])
        throw structural_error("pullback: square does not commute at level " +
                               std::to_string(n));
    rep.corner_sizes.push_back(S.A->size(n));
    std::vector<std::vector<uint32_t>> bucket(S.D->size(n));
    for (uint32_t c = 0; c < S.C->size(n); ++c) bucket[fb[c]].push_back(c);
    size_t fiber = 0;
    for (uint32_t b = 0; b < S.B->size(n); ++b) fiber += bucket[fr[b]].size();
    rep.fiber_sizes.push_back(static_cast<uint32_t>(fiber));

    SetPullbackInput in{std::span<const uint32_t>(ft),
                        std::span<const uint32_t>(fl),
                        std::span<const uint32_t>(fr),
                        std::span<const uint32_t>(fb)};
    std::string detail;
    if (!set_pullback_check(in, &detail)) {
      rep.holds = false;
      rep.failed_level = n;
      rep.detail = "level " + std::to_string(n) + ": " + detail;
      return rep;
    }
  }
  rep.holds = true;
  return rep;
}

bool is_strict_pullback(const SquareOfMaps& S, int max_level) {
  return strict_pullback_report(S, max_level).holds;
}

// ---------------------------------------------------------------------------
// Segal condition.
// ---------------------------------------------------------------------------

SegalReport segal_check(const TruncatedSSet& X, int n) {
  if (n > X.max_dim) throw structural_error("segal: level out of range");
  if (n <= 1) return {true, "levels 0 and 1 are trivial"};
  std::vector<std::vector<uint32_t>> edges;
  for (int i = 1; i <= n; ++i)
    edges.push_back(simplicial_operator(X, {n - i, n - i + 1}, n));
  // Injectivity of the spine tuple.
  std::unordered_set<std::string> seen;
  for (uint32_t s = 0; s < X.size(n); ++s) {
    std::string key;
    for (const auto& e : edges) {
      key.append(reinterpret_cast<const char*>(&e[s]), sizeof(uint32_t));
    }
    if (!seen.insert(key).second)
      return {false, "two simplices share a spine at level " + std::to_string(n)};
  }
  // Matched tuples must also be hit: count them.
  const auto& src_of = X.levels[1].face[0];  // endpoint shared with the next edge
  const auto& tgt_of = X.levels[1].face[1];
  std::vector<long long> f(X.size(1), 1);
  for (int step = 1; step < n; ++step) {
    std::vector<long long> by_vertex(X.size(0), 0);
    for (uint32_t m = 0; m < X.size(1); ++m) by_vertex[tgt_of[m]] += f[m];
    std::vector<long long> next(X.size(1));
    for (uint32_t m = 0; m < X.size(1); ++m) next[m] = by_vertex[src_of[m]];
    f = std::move(next);
  }
  long long total = 0;
  for (long long v : f) total += v;
  if (total != static_cast<long long>(X.size(n)))
    return {false, "spine tuples: " + std::to_string(total) + ", simplices: " +
                       std::to_string(X.size(n))};
  return {true, "level " + std::to_string(n) + " matches " +
                    std::to_string(total) + " spine tuples"};
}

// ---------------------------------------------------------------------------
// Mutation.
// ---------------------------------------------------------------------------

TruncatedSSet drop_simplex(const TruncatedSSet& X, int level, uint32_t idx,
                           std::vector<std::vector<uint32_t>>* old_to_new) {
  if (level < 0 || level > X.max_dim || idx >= X.size(level))
    throw structural_error("drop: simplex out of range");
  if (level >= 1) {
    auto degenerate = latching_degeneracy_union(X, level);
    if (std::binary_search(degenerate.begin(), degenerate.end(), idx))
      throw structural_error("drop: target simplex is degenerate");
  }
  std::vector<std::vector<char>> removed(static_cast<size_t>(X.max_dim) + 1);
  for (int n = 0; n <= X.max_dim; ++n)
    removed[static_cast<size_t>(n)].assign(X.size(n), 0);
  removed[static_cast<size_t>(level)][idx] = 1;
  for (int n = level + 1; n <= X.max_dim; ++n)
    for (uint32_t s = 0; s < X.size(n); ++s)
      for (int i = 0; i <= n; ++i)
        if (removed[static_cast<size_t>(n) - 1][X.face(n, i, s)]) {
          removed[static_cast<size_t>(n)][s] = 1;
          break;
        }

  std::vector<std::vector<uint32_t>> trans(static_cast<size_t>(X.max_dim) + 1);
  TruncatedSSet Y;
  Y.max_dim = X.max_dim;
  Y.levels.resize(static_cast<size_t>(X.max_dim) + 1);
  for (int n = 0; n <= X.max_dim; ++n) {
    auto& t = trans[static_cast<size_t>(n)];
    t.assign(X.size(n), kRemoved);
    uint32_t next = 0;
    for (uint32_t s = 0; s < X.size(n); ++s)
      if (!removed[static_cast<size_t>(n)][s]) t[s] = next++;
    Y.levels[static_cast<size_t>(n)].count = next;
  }
  auto remap = [&](int n, uint32_t s) {
    uint32_t v = trans[static_cast<size_t>(n)][s];
    if (v == kRemoved)
      throw structural_error("drop: a kept simplex references a removed one");
    return v;
  };
  for (int n = 1; n <= X.max_dim; ++n) {
    auto& L = Y.levels[static_cast<size_t>(n)];
    L.face.assign(static_cast<size_t>(n) + 1, {});
    for (auto& tab : L.face) tab.resize(L.count);
    for (uint32_t s = 0; s < X.size(n); ++s) {
      if (removed[static_cast<size_t>(n)][s]) continue;
      uint32_t ns = trans[static_cast<size_t>(n)][s];
      for (int i = 0; i <= n; ++i)
        L.face[static_cast<size_t>(i)][ns] = remap(n - 1, X.face(n, i, s));
    }
  }
  for (int n = 0; n + 1 <= X.max_dim; ++n) {
    auto& L = Y.levels[static_cast<size_t>(n)];
    L.degen.assign(static_cast<size_t>(n) + 1, {});
    for (auto& tab : L.degen) tab.resize(L.count);
    for (uint32_t s = 0; s < X.size(n); ++s) {
      if (removed[static_cast<size_t>(n)][s]) continue;
      uint32_t ns = trans[static_cast<size_t>(n)][s];
      for (int i = 0; i <= n; ++i)
        L.degen[static_cast<size_t>(i)][ns] = remap(n + 1, X.degen(n, i, s));
    }
  }
  if (old_to_new != nullptr) *old_to_new = std::move(trans);
  return Y;
}

}  // namespace covcat
