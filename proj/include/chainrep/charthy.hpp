#ifndef CHAINREP_CHARTHY_HPP
#define CHAINREP_CHARTHY_HPP

#include <algorithm>
#include <cstdint>
#include <memory>
#include <vector>

#include "chainrep/cyclotomic.hpp"
#include "chainrep/group.hpp"
#include "chainrep/subquotient.hpp"

namespace chainrep {

// A one-dimensional character of a subgroup, stored as exponents of a fixed
// root of unity per element position.
struct LinearChar {
  SubgroupPtr base;
  uint64_t mod = 1;                // values are mod-th roots of unity
  std::vector<uint32_t> exps;      // per base position

  uint32_t exp_at(uint64_t g) const { return exps[base->pos(g)]; }
  Cyclo value(uint64_t g) const { return Cyclo::root(mod, exp_at(g)); }

  static LinearChar trivial(const SubgroupPtr& b) {
    return {b, 1, std::vector<uint32_t>(b->size(), 0)};
  }

  // exact multiplicativity via generators x everything
  bool is_multiplicative() const {
    const auto& H = *base;
    for (auto g : H.gens()) {
      uint32_t eg = exp_at(g);
      for (uint64_t i = 0; i < H.size(); ++i) {
        uint64_t h = H.elems()[i];
        uint64_t gh = H.ctx().mul(g, h);
        if ((eg + exps[i]) % mod != exp_at(gh)) return false;
      }
    }
    return true;
  }

  LinearChar times(const LinearChar& o) const {
    require(base.get() == o.base.get(), "LinearChar::times: different bases");
    LinearChar out{base, lcm_u64(mod, o.mod), std::vector<uint32_t>(exps.size())};
    uint64_t fa = out.mod / mod, fb = out.mod / o.mod;
    for (size_t i = 0; i < exps.size(); ++i)
      out.exps[i] = (uint32_t)((exps[i] * fa + o.exps[i] * fb) % out.mod);
    return out;
  }
  LinearChar inverse() const {
    LinearChar out = *this;
    for (auto& e : out.exps) e = (uint32_t)((mod - e) % mod);
    return out;
  }
  LinearChar restricted(const SubgroupPtr& H) const {
    require(is_subgroup_of(*H, *base), "LinearChar::restricted: not a subgroup");
    LinearChar out{H, mod, std::vector<uint32_t>(H->size())};
    for (uint64_t i = 0; i < H->size(); ++i) out.exps[i] = exp_at(H->elems()[i]);
    return out;
  }
  // chi^g(x) = chi(g x g^{-1}); requires g to normalize the base.
  LinearChar conj_by(uint64_t g) const {
    LinearChar out{base, mod, std::vector<uint32_t>(exps.size())};
    const auto& H = *base;
    for (uint64_t i = 0; i < H.size(); ++i)
      out.exps[i] = exp_at(H.ctx().conj(g, H.elems()[i]));
    return out;
  }
  friend bool operator==(const LinearChar& a, const LinearChar& b) {
    if (a.base.get() != b.base.get()) return false;
    uint64_t M = lcm_u64(a.mod, b.mod);
    uint64_t fa = M / a.mod, fb = M / b.mod;
    for (size_t i = 0; i < a.exps.size(); ++i)
      if ((a.exps[i] * fa) % M != (b.exps[i] * fb) % M) return false;
    return true;
  }
};

// psi_beta on K^i: psi_beta(1+x) = eps(tr(beta x)). Requires i >= r/2.
inline LinearChar psi_beta(const GroupContext& ctx, const Mat& beta, uint32_t i) {
  if (2 * i < ctx.spec->r || i > ctx.spec->r)
    throw BadLevel("psi_beta: need r/2 <= i <= r");
  auto K = congruence_kernel(ctx, i);
  const RingTable& t = *ctx.rt;
  uint64_t b = ctx.from_mat(beta);
  LinearChar psi{K, t.eps_mod, std::vector<uint32_t>(K->size())};
  PackedOps::Codes kb, prod;
  for (uint64_t n = 0; n < K->size(); ++n) {
    uint64_t k = K->elems()[n];
    // x = k - 1
    ctx.ops.unpack(k, kb);
    for (uint32_t e = 0; e < ctx.N * ctx.N; ++e)
      if (e % (ctx.N + 1) == 0) kb[e] = t.s(kb[e], t.one);
    PackedOps::Codes bc;
    ctx.ops.unpack(b, bc);
    ctx.ops.mul_codes(bc, kb, prod);
    psi.exps[n] = t.eps[ctx.ops.trace_codes(prod)];
  }
  require(psi.is_multiplicative(), "psi_beta: not multiplicative");
  return psi;
}

// A class function on a subgroup, one exact value per conjugacy class.
struct ClassFunction {
  SubgroupPtr base;
  std::vector<Cyclo> v;

  const Cyclo& at_class(uint32_t c) const { return v[c]; }
  const Cyclo& at_elem(uint64_t g) const {
    return v[base->class_of_pos(base->pos(g))];
  }
  mpq_class dim() const {
    Cyclo d = at_elem(base->ctx().one());
    return d.as_rational();
  }
  ClassFunction operator+(const ClassFunction& o) const {
    require(base.get() == o.base.get(), "class function base mismatch");
    ClassFunction out = *this;
    for (size_t i = 0; i < v.size(); ++i) out.v[i] += o.v[i];
    return out;
  }
  ClassFunction operator-(const ClassFunction& o) const {
    require(base.get() == o.base.get(), "class function base mismatch");
    ClassFunction out = *this;
    for (size_t i = 0; i < v.size(); ++i) out.v[i] -= o.v[i];
    return out;
  }
  ClassFunction pointwise(const ClassFunction& o) const {
    require(base.get() == o.base.get(), "class function base mismatch");
    ClassFunction out = *this;
    for (size_t i = 0; i < v.size(); ++i) out.v[i] *= o.v[i];
    return out;
  }
  uint64_t hash_at(uint64_t L) const {
    uint64_t h = 14695981039346656037ull;
    for (auto& x : v) {
      h ^= x.hash_at(L);
      h *= 1099511628211ull;
    }
    return h;
  }
  friend bool operator==(const ClassFunction& a, const ClassFunction& b) {
    if (a.base.get() != b.base.get()) return false;
    for (size_t i = 0; i < a.v.size(); ++i)
      if (a.v[i] != b.v[i]) return false;
    return true;
  }
};

inline ClassFunction class_function_from_linear(const LinearChar& lc) {
  const Subgroup& H = *lc.base;
  H.ensure_classes();
  ClassFunction cf{lc.base, {}};
  cf.v.resize(H.num_classes());
  for (uint32_t c = 0; c < H.num_classes(); ++c)
    cf.v[c] = Cyclo::root(lc.mod, lc.exp_at(H.class_rep(c)));
  // linear characters are class functions; spot-verify constancy
  for (uint64_t i = 0; i < H.size(); i += (H.size() / 64) + 1)
    require(lc.exps[i] == lc.exp_at(H.class_rep(H.class_of_pos((uint32_t)i))),
            "linear character not constant on classes");
  return cf;
}

// Induction H -> G via class fusion: Ind chi(g) = |C_G(g)|/|H| *
// sum_{y in cls_G(g) cap H} chi(y).
inline ClassFunction induce(const ClassFunction& chi, const SubgroupPtr& G) {
  const Subgroup& H = *chi.base;
  const Subgroup& Gs = *G;
  if (!is_subgroup_of(H, Gs)) throw NotASubgroup("induce: H is not inside G");
  H.ensure_classes();
  Gs.ensure_classes();
  ClassFunction out{G, std::vector<Cyclo>(Gs.num_classes())};
  // bucket H-classes into G-classes
  for (uint32_t c = 0; c < H.num_classes(); ++c) {
    uint64_t rep = H.class_rep(c);
    uint32_t gc = Gs.class_of_pos(Gs.pos(rep));
    Cyclo term = chi.v[c];
    term.scale(mpq_class((long)H.class_size(c)));
    out.v[gc] += term;
  }
  mpz_class Gsize((unsigned long)Gs.size()), Hsize((unsigned long)H.size());
  for (uint32_t j = 0; j < Gs.num_classes(); ++j) {
    if (out.v[j].is_zero()) {
      out.v[j] = Cyclo::zero();
      continue;
    }
    mpq_class scale(Gsize, Hsize * mpz_class((unsigned long)Gs.class_size(j)));
    out.v[j].scale(scale);
  }
  return out;
}

inline ClassFunction induce_linear(const LinearChar& lc, const SubgroupPtr& G) {
  return induce(class_function_from_linear(lc), G);
}

inline Cyclo inner_product(const ClassFunction& a, const ClassFunction& b) {
  if (a.base.get() != b.base.get())
    throw BaseMismatch("inner_product: different base groups");
  const Subgroup& H = *a.base;
  Cyclo acc;
  for (uint32_t c = 0; c < H.num_classes(); ++c) {
    if (a.v[c].is_zero() || b.v[c].is_zero()) continue;
    Cyclo term = a.v[c] * b.v[c].conj();
    term.scale(mpq_class((unsigned long)H.class_size(c)));
    acc += term;
  }
  acc.scale(mpq_class(1, (unsigned long)H.size()));
  return acc;
}

inline mpq_class inner_product_rational(const ClassFunction& a,
                                        const ClassFunction& b) {
  return inner_product(a, b).as_rational();
}

inline bool is_irreducible(const ClassFunction& chi) {
  return inner_product(chi, chi) == Cyclo::one();
}

inline ClassFunction restrict_to(const ClassFunction& chi, const SubgroupPtr& H) {
  const Subgroup& big = *chi.base;
  require(is_subgroup_of(*H, big), "restrict_to: not a subgroup");
  H->ensure_classes();
  ClassFunction out{H, std::vector<Cyclo>(H->num_classes())};
  for (uint32_t c = 0; c < H->num_classes(); ++c)
    out.v[c] = chi.v[big.class_of_pos(big.pos(H->class_rep(c)))];
  return out;
}

// Gallagher twist: chi tensored with a linear character of the same group.
inline ClassFunction tensor_linear(const ClassFunction& chi, const LinearChar& lam) {
  require(chi.base.get() == lam.base.get(), "tensor_linear: base mismatch");
  ClassFunction out = chi;
  const Subgroup& H = *chi.base;
  for (uint32_t c = 0; c < H.num_classes(); ++c)
    out.v[c] *= lam.value(H.class_rep(c));
  return out;
}

// All characters of an abelian subgroup, deterministically ordered.
inline std::vector<LinearChar> abelian_char_group(const SubgroupPtr& A) {
  if (!A->is_abelian()) throw NotAbelian("abelian_char_group");
  IndexGroup ig;
  ig.n = A->size();
  ig.id = A->pos(A->ctx().one());
  const Subgroup* Ap = A.get();
  ig.mul = [Ap](uint32_t a, uint32_t b) {
    return Ap->pos(Ap->ctx().mul(Ap->elems()[a], Ap->elems()[b]));
  };
  AbelianChars ac = abelian_chars(ig);
  std::vector<LinearChar> out;
  out.reserve(ac.exps.size());
  for (auto& e : ac.exps) out.push_back(LinearChar{A, ac.L, e});
  std::sort(out.begin(), out.end(),
            [](const LinearChar& x, const LinearChar& y) { return x.exps < y.exps; });
  return out;
}

// All linear characters of S (pullbacks from S/[S,S]) restricting to chi on
// H <= S. Empty result means chi does not extend (stability failure).
inline std::vector<LinearChar> extend_linear(const LinearChar& chi,
                                             const SubgroupPtr& S) {
  const SubgroupPtr& H = chi.base;
  require(is_subgroup_of(*H, *S), "extend_linear: base not inside S");
  auto D = commutator_subgroup(*S);
  // chi must vanish on [S,S] cap H, otherwise no extension can exist
  for (auto d : D->elems())
    if (H->contains(d) && chi.exp_at(d) != 0)
      throw NoExtension("character is nontrivial on [S,S] cap H");
  auto Q = quotient_group(std::const_pointer_cast<const Subgroup>(
                              std::shared_ptr<const Subgroup>(S)),
                          D);
  AbelianChars ac = abelian_chars(Q.grp);
  std::vector<LinearChar> out;
  for (auto& e : ac.exps) {
    LinearChar cand{S, ac.L, std::vector<uint32_t>(S->size())};
    for (uint64_t i = 0; i < S->size(); ++i)
      cand.exps[i] = e[Q.cosets.coset_of[i]];
    // restriction test
    bool ok = true;
    uint64_t M = lcm_u64(cand.mod, chi.mod);
    for (uint64_t i = 0; i < H->size() && ok; ++i) {
      uint64_t g = H->elems()[i];
      if ((cand.exp_at(g) * (M / cand.mod)) % M !=
          (chi.exps[i] * (M / chi.mod)) % M)
        ok = false;
    }
    if (ok) out.push_back(std::move(cand));
  }
  std::sort(out.begin(), out.end(),
            [](const LinearChar& x, const LinearChar& y) { return x.exps < y.exps; });
  return out;
}

struct CharacterOrbit {
  uint64_t orbit_size = 0;
  SubgroupPtr stabilizer;
};

// Orbit of a character of a normal subgroup K under conjugation by G.
inline CharacterOrbit orbit_of_character(const GroupContext& ctx,
                                         const LinearChar& psi) {
  const Subgroup& K = *psi.base;
  std::vector<uint64_t> stab;
  for (uint64_t gi = 0; gi < ctx.elems.size(); ++gi) {
    uint64_t g = ctx.elems[gi];
    uint64_t ginv = ctx.inv_elem[gi];
    bool fixed = true;
    for (uint64_t i = 0; i < K.size(); ++i) {
      uint64_t k = K.elems()[i];
      uint64_t kc = ctx.mul(ctx.mul(g, k), ginv);
      if (psi.exp_at(kc) != psi.exps[i]) {
        fixed = false;
        break;
      }
    }
    if (fixed) stab.push_back(g);
  }
  CharacterOrbit out;
  out.stabilizer = subgroup_from_sorted(ctx, std::move(stab));
  out.orbit_size = ctx.order / out.stabilizer->size();
  return out;
}

// Brute-force stabilizer of psi_beta on K^l, compared against the closed
// form C_{G_r}(beta) K^{l'}.
inline SubgroupPtr stabilizer_of_orbit_character(const GroupContext& ctx,
                                                 const Mat& beta) {
  if (!is_regular(beta))
    throw RegularityViolation("stabilizer_of_orbit_character: beta not regular");
  LinearChar psi = psi_beta(ctx, beta, ctx.l);
  auto orbit = orbit_of_character(ctx, psi);
  auto C = centralizer(ctx, beta);
  auto Kl = congruence_kernel(ctx, ctx.lp == 0 ? ctx.spec->r : ctx.lp);
  // l' = 0 happens only for r = 1; the paper's setting has r >= 2.
  auto CK = product_set(*C, *Kl);
  require(CK->elems() == orbit.stabilizer->elems(),
          "stabilizer formula G(psi_beta) = C K^{l'} failed");
  return orbit.stabilizer;
}

}  // namespace chainrep

#endif
