#ifndef CHAINREP_SYMPLECTIC_HPP
#define CHAINREP_SYMPLECTIC_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "chainrep/charthy.hpp"
#include "chainrep/subquotient.hpp"

namespace chainrep {

namespace fp {

// Tiny dense linear algebra over F_p on coordinate vectors.
using Vec = std::vector<uint32_t>;

inline Vec vec_add(const Vec& a, const Vec& b, uint32_t p) {
  Vec c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = (a[i] + b[i]) % p;
  return c;
}
inline Vec vec_scale(uint32_t s, const Vec& a, uint32_t p) {
  Vec c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = (uint32_t)(((uint64_t)s * a[i]) % p);
  return c;
}
inline bool vec_is_zero(const Vec& a) {
  for (auto x : a)
    if (x) return false;
  return true;
}

// Reduce v against an echelonized basis; returns the residue.
struct Echelon {
  uint32_t p;
  std::vector<Vec> rows;      // echelon basis
  std::vector<uint32_t> piv;  // pivot column per row

  explicit Echelon(uint32_t p_) : p(p_) {}
  Vec residue(Vec v) const {
    for (size_t i = 0; i < rows.size(); ++i) {
      uint32_t c = v[piv[i]];
      if (c == 0) continue;
      // v -= c * rows[i] (rows are pivot-normalized to 1)
      for (size_t j = 0; j < v.size(); ++j)
        v[j] = (uint32_t)((v[j] + (uint64_t)(p - c) * rows[i][j]) % p);
    }
    return v;
  }
  bool contains(const Vec& v) const { return vec_is_zero(residue(v)); }
  // insert if independent; returns true when the dimension grew
  bool insert(Vec v) {
    v = residue(std::move(v));
    if (vec_is_zero(v)) return false;
    uint32_t pc = 0;
    while (v[pc] == 0) ++pc;
    uint32_t inv = 1;
    for (uint32_t k = 1; k < p; ++k)
      if ((k * (uint64_t)v[pc]) % p == 1) inv = k;
    for (auto& x : v) x = (uint32_t)(((uint64_t)x * inv) % p);
    rows.push_back(std::move(v));
    piv.push_back(pc);
    return true;
  }
  size_t dim() const { return rows.size(); }
};

}  // namespace fp

// An F_p symplectic quotient J/H with its alternating pairing, radical, and
// a chosen maximal isotropic subspace.
struct SymplecticSpace {
  SubgroupPtr J, H;
  uint32_t p = 2;
  uint32_t dim = 0;
  CosetTable cosets;  // of H in J
  std::vector<uint64_t> basis_lifts;              // elements of J
  std::vector<std::vector<uint32_t>> coset_coord; // per coset id
  std::vector<std::vector<uint32_t>> gram;        // dim x dim over F_p
  std::vector<fp::Vec> radical_basis;
  std::vector<fp::Vec> lagrangian_basis;

  uint32_t pair_coords(const fp::Vec& a, const fp::Vec& b) const {
    uint64_t acc = 0;
    for (uint32_t i = 0; i < dim; ++i) {
      if (!a[i]) continue;
      for (uint32_t j = 0; j < dim; ++j)
        acc += (uint64_t)a[i] * gram[i][j] % p * b[j];
    }
    return (uint32_t)(acc % p);
  }

  // Element of J representing a coordinate vector (product of basis lifts).
  uint64_t lift_of(const fp::Vec& v) const {
    const GroupContext& ctx = J->ctx();
    uint64_t g = ctx.one();
    for (uint32_t i = 0; i < dim; ++i)
      for (uint32_t k = 0; k < v[i]; ++k) g = ctx.mul(g, basis_lifts[i]);
    return g;
  }

  // Subgroup: preimage in J of the span of the given coordinate vectors.
  SubgroupPtr preimage_subgroup(const std::vector<fp::Vec>& vectors) const {
    fp::Echelon ech(p);
    for (auto& v : vectors) ech.insert(v);
    std::vector<uint64_t> members;
    for (uint32_t c = 0; c < cosets.num(); ++c) {
      if (!ech.contains(coset_coord[c])) continue;
      uint64_t rep = cosets.reps[c];
      for (auto h : H->elems()) members.push_back(J->ctx().mul(rep, h));
    }
    std::sort(members.begin(), members.end());
    return subgroup_from_sorted(J->ctx(), std::move(members));
  }
};

// Build the symplectic quotient of J/H with pairing(x, y) in F_p given by a
// callback on lifted elements (the eps-logarithm of theta([x, y])).
inline SymplecticSpace build_symplectic(
    const SubgroupPtr& J, const SubgroupPtr& H,
    const std::function<uint32_t(uint64_t, uint64_t)>& pairing, uint32_t p) {
  SymplecticSpace sp;
  sp.J = J;
  sp.H = H;
  sp.p = p;
  require(is_normal_in(*H, *J), "build_symplectic: H not normal in J");
  sp.cosets = coset_table(*J, *H);
  uint64_t ncosets = sp.cosets.num();
  // quotient must be elementary abelian of exponent p
  const GroupContext& ctx = J->ctx();
  for (uint32_t c = 0; c < ncosets; ++c) {
    uint64_t rep = sp.cosets.reps[c];
    uint64_t pw = ctx.one();
    for (uint32_t k = 0; k < p; ++k) pw = ctx.mul(pw, rep);
    require(H->contains(pw), "J/H is not elementary abelian");
  }
  uint32_t dim = 0;
  {
    uint64_t m = ncosets;
    while (m > 1) {
      require(m % p == 0, "J/H size is not a p-power");
      m /= p;
      ++dim;
    }
  }
  sp.dim = dim;
  // greedy basis over coset reps, tracking coordinates by BFS span
  sp.coset_coord.assign(ncosets, {});
  std::vector<uint8_t> have(ncosets, 0);
  uint32_t id_coset = sp.cosets.coset(ctx.one());
  sp.coset_coord[id_coset] = fp::Vec(dim, 0);
  have[id_coset] = 1;
  uint64_t covered = 1;
  while (covered < ncosets) {
    uint32_t fresh = UINT32_MAX;
    for (uint32_t c = 0; c < ncosets; ++c)
      if (!have[c]) {
        fresh = c;
        break;
      }
    uint32_t bi = (uint32_t)sp.basis_lifts.size();
    require(bi < dim, "symplectic basis overflow");
    sp.basis_lifts.push_back(sp.cosets.reps[fresh]);
    // extend known coordinates by multiples of the new basis vector
    std::vector<uint32_t> known;
    for (uint32_t c = 0; c < ncosets; ++c)
      if (have[c]) known.push_back(c);
    for (uint32_t k = 1; k < p; ++k) {
      for (auto c : known) {
        uint64_t g = sp.cosets.reps[c];
        for (uint32_t s = 0; s < k; ++s) g = ctx.mul(g, sp.basis_lifts[bi]);
        uint32_t cc = sp.cosets.coset(g);
        if (!have[cc]) {
          have[cc] = 1;
          ++covered;
          fp::Vec v = sp.coset_coord[c];
          v[bi] = k;
          sp.coset_coord[cc] = std::move(v);
        }
      }
    }
  }
  require(sp.basis_lifts.size() == dim, "symplectic basis incomplete");
  // Gram matrix and full bilinearity/alternation verification
  sp.gram.assign(dim, std::vector<uint32_t>(dim, 0));
  for (uint32_t i = 0; i < dim; ++i)
    for (uint32_t j = 0; j < dim; ++j)
      sp.gram[i][j] = pairing(sp.basis_lifts[i], sp.basis_lifts[j]) % p;
  for (uint32_t i = 0; i < dim; ++i)
    require(sp.gram[i][i] == 0, "pairing not alternating on basis");
  for (uint32_t c1 = 0; c1 < ncosets; ++c1)
    for (uint32_t c2 = 0; c2 < ncosets; ++c2) {
      uint32_t lhs = pairing(sp.cosets.reps[c1], sp.cosets.reps[c2]) % p;
      require(lhs == sp.pair_coords(sp.coset_coord[c1], sp.coset_coord[c2]),
              "pairing is not bilinear over F_p");
    }
  // radical = kernel of the Gram matrix
  {
    // solve v * gram = 0 by scanning all vectors when small, else gauss
    fp::Echelon rad(p);
    uint64_t total = pow_u64(p, dim);
    for (uint64_t idx = 0; idx < total; ++idx) {
      fp::Vec v(dim);
      uint64_t t = idx;
      for (uint32_t i = 0; i < dim; ++i) {
        v[i] = (uint32_t)(t % p);
        t /= p;
      }
      bool in_rad = true;
      for (uint32_t j = 0; j < dim && in_rad; ++j) {
        uint64_t acc = 0;
        for (uint32_t i = 0; i < dim; ++i) acc += (uint64_t)v[i] * sp.gram[i][j];
        if (acc % p) in_rad = false;
      }
      if (in_rad && rad.insert(v)) sp.radical_basis.push_back(rad.rows.back());
    }
  }
  return sp;
}

// Maximal isotropic subspace, optionally invariant under a p-group action
// given by its generators' matrices on coordinates. Deterministic greedy:
// repeatedly adjoin the lexicographically first vector of U^perp outside
// span(U) that is fixed modulo span(U) by every action generator.
inline std::vector<fp::Vec> lagrangian_subspace(
    const SymplecticSpace& sp,
    const std::vector<std::vector<fp::Vec>>& action_gens = {}) {
  uint32_t p = sp.p, dim = sp.dim;
  fp::Echelon U(p);
  std::vector<fp::Vec> chosen;
  uint64_t total = pow_u64(p, dim);
  auto apply = [&](const std::vector<fp::Vec>& mat, const fp::Vec& v) {
    fp::Vec out(dim, 0);
    for (uint32_t i = 0; i < dim; ++i)
      if (v[i])
        for (uint32_t j = 0; j < dim; ++j)
          out[j] = (uint32_t)((out[j] + (uint64_t)v[i] * mat[i][j]) % p);
    return out;
  };
  for (;;) {
    bool grew = false;
    for (uint64_t idx = 1; idx < total && !grew; ++idx) {
      fp::Vec v(dim);
      uint64_t t = idx;
      for (uint32_t i = 0; i < dim; ++i) {
        v[i] = (uint32_t)(t % p);
        t /= p;
      }
      if (U.contains(v)) continue;
      // v must be orthogonal to everything chosen so far and to itself
      bool ok = true;
      for (auto& u : chosen)
        if (sp.pair_coords(u, v) != 0) {
          ok = false;
          break;
        }
      if (ok && sp.pair_coords(v, v) != 0) ok = false;
      // invariance modulo span(U)
      for (auto& g : action_gens) {
        if (!ok) break;
        fp::Vec gv = apply(g, v);
        fp::Vec diff(dim);
        for (uint32_t i = 0; i < dim; ++i) diff[i] = (gv[i] + p - v[i]) % p;
        if (!U.contains(diff)) ok = false;
      }
      if (ok) {
        chosen.push_back(v);
        U.insert(v);
        grew = true;
      }
    }
    if (!grew) break;
  }
  uint32_t rad = (uint32_t)sp.radical_basis.size();
  uint32_t expect = rad + (dim - rad) / 2;
  if ((uint32_t)chosen.size() != expect)
    throw InvariantLagrangianNotFound(
        "isotropic growth stalled before maximality");
  // maximality: U = U^perp (dimension count certifies it, and every vector of
  // U^perp must already lie in U)
  for (uint64_t idx = 0; idx < total; ++idx) {
    fp::Vec v(sp.dim);
    uint64_t t = idx;
    for (uint32_t i = 0; i < sp.dim; ++i) {
      v[i] = (uint32_t)(t % p);
      t /= p;
    }
    bool perp = true;
    for (auto& u : chosen)
      if (sp.pair_coords(u, v) != 0) {
        perp = false;
        break;
      }
    if (perp) require(U.contains(v), "lagrangian: U^perp exceeds U");
  }
  return chosen;
}

// Matrices of the conjugation action of group elements on the quotient.
inline std::vector<std::vector<fp::Vec>> conjugation_action(
    const SymplecticSpace& sp, const std::vector<uint64_t>& actors) {
  const GroupContext& ctx = sp.J->ctx();
  std::vector<std::vector<fp::Vec>> mats;
  for (auto a : actors) {
    std::vector<fp::Vec> m;
    for (uint32_t i = 0; i < sp.dim; ++i) {
      uint64_t img = ctx.conj(a, sp.basis_lifts[i]);
      require(sp.J->contains(img), "actor does not normalize J");
      m.push_back(sp.coset_coord[sp.cosets.coset(img)]);
    }
    mats.push_back(std::move(m));
  }
  return mats;
}

}  // namespace chainrep

#endif
