#ifndef CHAINREP_SUBQUOTIENT_HPP
#define CHAINREP_SUBQUOTIENT_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "chainrep/group.hpp"

namespace chainrep {

// Left-coset decomposition of H inside S (classes xH); reps are the minimal
// packed element of each coset, found by ascending scan.
struct CosetTable {
  const Subgroup* S = nullptr;
  const Subgroup* H = nullptr;
  std::vector<uint32_t> coset_of;  // per S position
  std::vector<uint64_t> reps;      // coset id -> representative element

  uint32_t coset(uint64_t g) const { return coset_of[S->pos(g)]; }
  uint64_t num() const { return reps.size(); }
};

inline CosetTable coset_table(const Subgroup& S, const Subgroup& H) {
  require(is_subgroup_of(H, S), "coset_table: H is not contained in S");
  CosetTable t;
  t.S = &S;
  t.H = &H;
  t.coset_of.assign(S.size(), UINT32_MAX);
  for (uint32_t i = 0; i < S.size(); ++i) {
    if (t.coset_of[i] != UINT32_MAX) continue;
    uint32_t cid = (uint32_t)t.reps.size();
    uint64_t rep = S.elems()[i];
    t.reps.push_back(rep);
    for (auto h : H.elems()) t.coset_of[S.pos(S.ctx().mul(rep, h))] = cid;
  }
  require(t.reps.size() * H.size() == S.size(), "coset_table: bad partition");
  return t;
}

// A finite group presented on indices 0..n-1 (used for quotients and other
// derived groups so the abelian machinery has a single entry point).
struct IndexGroup {
  uint64_t n = 1;
  uint32_t id = 0;
  std::function<uint32_t(uint32_t, uint32_t)> mul;

  uint32_t power(uint32_t g, uint64_t e) const {
    uint32_t acc = id, b = g;
    while (e) {
      if (e & 1) acc = mul(acc, b);
      b = mul(b, b);
      e >>= 1;
    }
    return acc;
  }
  uint64_t order_of(uint32_t g) const {
    uint32_t x = g;
    uint64_t k = 1;
    while (x != id) {
      x = mul(x, g);
      ++k;
    }
    return k;
  }
};

// Quotient S/H for normal H, as an IndexGroup over coset ids.
struct QuotientGroup {
  CosetTable cosets;
  IndexGroup grp;
};

inline QuotientGroup quotient_group(const SubgroupPtr& S, const SubgroupPtr& H) {
  require(is_normal_in(*H, *S), "quotient_group: H not normal in S");
  QuotientGroup q;
  q.cosets = coset_table(*S, *H);
  const Subgroup* Sp = S.get();
  // keep the shared handles alive inside the lambda
  auto ct = std::make_shared<CosetTable>(q.cosets);
  q.grp.n = q.cosets.num();
  q.grp.id = q.cosets.coset(S->ctx().one());
  q.grp.mul = [Sp, ct, S, H](uint32_t a, uint32_t b) -> uint32_t {
    return ct->coset_of[Sp->pos(Sp->ctx().mul(ct->reps[a], ct->reps[b]))];
  };
  return q;
}

// Commutator subgroup [S,S]: normal closure of generator commutators.
inline SubgroupPtr commutator_subgroup(const Subgroup& S) {
  const GroupContext& ctx = S.ctx();
  auto& g = S.gens();
  std::vector<uint64_t> seeds;
  for (size_t i = 0; i < g.size(); ++i)
    for (size_t j = 0; j < g.size(); ++j) {
      uint64_t c = ctx.mul(ctx.mul(g[i], g[j]),
                           ctx.mul(ctx.inv(g[i]), ctx.inv(g[j])));
      seeds.push_back(c);
    }
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  for (;;) {
    // subgroup closure inside S
    std::vector<uint8_t> in(S.size(), 0);
    std::vector<uint32_t> work;
    in[S.pos(ctx.one())] = 1;
    work.push_back(S.pos(ctx.one()));
    size_t head = 0;
    while (head < work.size()) {
      uint64_t x = S.elems()[work[head++]];
      for (auto s : seeds) {
        uint64_t y = ctx.mul(x, s);
        uint32_t yi = S.pos(y);
        if (!in[yi]) {
          in[yi] = 1;
          work.push_back(yi);
        }
      }
    }
    // check conjugation stability; extend seeds if needed
    bool stable = true;
    for (auto s : S.gens()) {
      for (uint32_t i = 0; i < work.size() && stable; ++i) {
        uint64_t y = ctx.conj(s, S.elems()[work[i]]);
        if (!in[S.pos(y)]) {
          seeds.push_back(y);
          stable = false;
        }
      }
      if (!stable) break;
    }
    if (stable) {
      std::vector<uint64_t> members;
      for (auto i : work) members.push_back(S.elems()[i]);
      std::sort(members.begin(), members.end());
      return subgroup_from_sorted(ctx, std::move(members));
    }
  }
}

// All characters of a finite abelian group on indices: exponent tables
// mod L = exponent of the group. Built by extending along a generator chain.
struct AbelianChars {
  uint64_t L = 1;
  std::vector<std::vector<uint32_t>> exps;  // char x element -> exponent
};

inline AbelianChars abelian_chars(const IndexGroup& G) {
  if (G.n > 1u << 14)
    throw DeskScaleExceeded("abelian character table too large");
  // orders and exponent
  std::vector<uint64_t> ord(G.n);
  uint64_t L = 1;
  for (uint32_t i = 0; i < G.n; ++i) {
    ord[i] = G.order_of(i);
    L = lcm_u64(L, ord[i]);
  }
  AbelianChars out;
  out.L = L;
  // current subgroup: element list + per-char exponent vectors (full length)
  std::vector<uint32_t> cur{G.id};
  std::vector<uint8_t> in(G.n, 0);
  in[G.id] = 1;
  out.exps.assign(1, std::vector<uint32_t>(G.n, 0));
  while (cur.size() < G.n) {
    uint32_t g = UINT32_MAX;
    for (uint32_t i = 0; i < G.n; ++i)
      if (!in[i]) {
        g = i;
        break;
      }
    // abelian sanity on the fly
    for (auto x : cur)
      require(G.mul(g, x) == G.mul(x, g), "abelian_chars: group not abelian");
    // d = least k >= 1 with g^k in current subgroup
    uint64_t d = 1;
    uint32_t p = g;
    while (!in[p]) {
      p = G.mul(p, g);
      ++d;
    }
    uint32_t gd = p;  // g^d
    std::vector<std::vector<uint32_t>> next;
    next.reserve(out.exps.size() * d);
    for (auto& chi : out.exps) {
      uint64_t e = chi[gd];
      require(e % d == 0, "abelian_chars: extension equation unsolvable");
      for (uint64_t i = 0; i < d; ++i) {
        uint64_t t = (e / d + i * (L / d)) % L;
        next.push_back(chi);
        auto& nc = next.back();
        // fill values on the d-1 new coset layers
        uint32_t gpow = G.id;
        uint64_t texp = 0;
        for (uint64_t j = 1; j < d; ++j) {
          gpow = G.mul(gpow, g);
          texp = (texp + t) % L;
          for (auto x : cur) nc[G.mul(x, gpow)] = (uint32_t)((chi[x] + texp) % L);
        }
        nc[g] = (uint32_t)t;  // consistency: g = id * g^1
      }
    }
    out.exps = std::move(next);
    // enlarge subgroup
    std::vector<uint32_t> grown = cur;
    uint32_t gpow = G.id;
    for (uint64_t j = 1; j < d; ++j) {
      gpow = G.mul(gpow, g);
      for (auto x : cur) {
        uint32_t y = G.mul(x, gpow);
        if (!in[y]) {
          in[y] = 1;
          grown.push_back(y);
        }
      }
    }
    cur = std::move(grown);
  }
  require(out.exps.size() == G.n, "abelian_chars: wrong character count");
  return out;
}

// p-torsion subgroup of an abelian Subgroup (its unique p-Sylow).
inline SubgroupPtr abelian_p_torsion(const Subgroup& A, uint64_t p) {
  require(A.is_abelian(), "abelian_p_torsion: group not abelian");
  std::vector<uint64_t> members;
  for (auto x : A.elems()) {
    uint64_t o = A.ctx().order_of(x);
    if (p_part(o, p) == o) members.push_back(x);
  }
  return subgroup_from_sorted(A.ctx(), std::move(members));
}

// p-Sylow subgroup. Abelian groups take the torsion route; otherwise grow a
// p-subgroup through normalizers.
inline SubgroupPtr sylow_p(const Subgroup& A, uint64_t p) {
  uint64_t target = p_part(A.size(), p);
  if (target == 1) return trivial_subgroup(A.ctx());
  if (A.is_abelian()) {
    auto S = abelian_p_torsion(A, p);
    require(S->size() == target, "sylow_p: torsion subgroup has wrong order");
    return S;
  }
  const GroupContext& ctx = A.ctx();
  // start from a first p-element
  std::vector<uint64_t> gens;
  for (auto x : A.elems()) {
    uint64_t o = ctx.order_of(x);
    if (x != ctx.one() && p_part(o, p) == o) {
      gens.push_back(x);
      break;
    }
  }
  require(!gens.empty(), "sylow_p: no p-element found");
  auto S = subgroup_closure(ctx, gens);
  while (S->size() < target) {
    // normalizer of S in A
    std::vector<uint64_t> nor;
    for (auto a : A.elems()) {
      bool ok = true;
      for (auto g : S->gens())
        if (!S->contains(ctx.conj(a, g))) {
          ok = false;
          break;
        }
      if (ok) nor.push_back(a);
    }
    bool grew = false;
    for (auto y : nor) {
      if (S->contains(y)) continue;
      uint64_t o = ctx.order_of(y);
      if (p_part(o, p) != o) continue;
      gens.push_back(y);
      auto S2 = subgroup_closure(ctx, gens);
      if (p_part(S2->size(), p) == S2->size()) {
        S = S2;
        grew = true;
        break;
      }
      gens.pop_back();
    }
    require(grew, "sylow_p: growth stalled");
  }
  require(S->size() == target, "sylow_p: wrong order");
  return S;
}

}  // namespace chainrep

#endif
