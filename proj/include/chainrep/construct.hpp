#ifndef CHAINREP_CONSTRUCT_HPP
#define CHAINREP_CONSTRUCT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chainrep/charthy.hpp"
#include "chainrep/parahoric.hpp"
#include "chainrep/repn.hpp"
#include "chainrep/symplectic.hpp"

namespace chainrep {

// One constructed irreducible together with its certificates.
struct RegularChar {
  ClassFunction chi;       // on the full group
  mpz_class dim;
  mpz_class e_mult;        // multiplicity of psi_beta in chi|_{K^l}
  std::string provenance;  // which extension / twist produced it
};

struct OrbitCertificates {
  bool all_irreducible = false;
  bool pairwise_distinct = false;
  bool completeness = false;       // sum e * dim = [G : K^l]
  bool orbit_support = false;      // dim = e * orbit size per character
  uint64_t orbit_size = 0;
  mpz_class index_G_Kl;
  mpz_class sum_e_dim;
};

struct ConstructResult {
  std::vector<RegularChar> chars;
  OrbitCertificates certs;
  std::string path;  // "even", "ss" or "kos"
  // experimental observation (section 6 open question): does all of C
  // normalize the chosen J_beta?  Only meaningful on the kos path.
  std::optional<bool> c_normalizes_jbeta;
};

namespace detail {

inline mpq_class mult_of_linear_in_restriction(const ClassFunction& chi,
                                               const LinearChar& psi) {
  // <chi|_K, psi> over the abelian K
  const Subgroup& K = *psi.base;
  const Subgroup& G = *chi.base;
  Cyclo acc;
  for (uint64_t i = 0; i < K.size(); ++i) {
    uint64_t k = K.elems()[i];
    Cyclo term = chi.v[G.class_of_pos(G.pos(k))];
    if (term.is_zero()) continue;
    term *= Cyclo::root(psi.mod, (uint32_t)((psi.mod - psi.exps[i]) % psi.mod));
    acc += term;
  }
  acc.scale(mpq_class(1, (unsigned long)K.size()));
  return acc.as_rational();
}

// Linear character scaled conversion: exponent of theta at g as an element
// of F_p (theta's value must be a p-th root of unity there).
inline uint32_t exp_mod_p(const LinearChar& theta, uint64_t g, uint32_t p) {
  uint32_t e = theta.exp_at(g);
  uint64_t M = theta.mod;
  require((uint64_t)e * p % M == 0, "character value is not a p-th root");
  return (uint32_t)((uint64_t)e / (M / p) % p);
}

// Deduplicate and certify one orbit's worth of characters.
inline OrbitCertificates certify_family(const GroupContext& ctx,
                                        std::vector<RegularChar>& chars,
                                        const LinearChar& psi,
                                        const SubgroupPtr& stab) {
  OrbitCertificates c;
  auto G = full_subgroup(ctx);
  c.orbit_size = ctx.order / stab->size();
  c.index_G_Kl = mpz_class((unsigned long)(ctx.order / psi.base->size()));
  // exact deduplication (overcounting upstream is harmless but reported)
  std::vector<RegularChar> uniq;
  for (auto& rc : chars) {
    bool dup = false;
    for (auto& u : uniq)
      if (u.chi == rc.chi) {
        dup = true;
        break;
      }
    if (!dup) uniq.push_back(std::move(rc));
  }
  c.pairwise_distinct = uniq.size() == chars.size();
  chars = std::move(uniq);

  c.all_irreducible = true;
  c.orbit_support = true;
  c.sum_e_dim = 0;
  for (auto& rc : chars) {
    if (!is_irreducible(rc.chi)) c.all_irreducible = false;
    mpq_class e = mult_of_linear_in_restriction(rc.chi, psi);
    require(e.get_den() == 1, "non-integral multiplicity");
    rc.e_mult = e.get_num();
    rc.dim = rc.chi.dim().get_num();
    // chi|_{K^l} = e * (sum over the G-orbit of psi)
    if (rc.dim != rc.e_mult * mpz_class((unsigned long)c.orbit_size))
      c.orbit_support = false;
    c.sum_e_dim += rc.e_mult * rc.dim;
  }
  c.completeness = (c.sum_e_dim == c.index_G_Kl);
  return c;
}

// All extensions of psi (on K) to CK as twists of one base extension by the
// characters of CK/K.
inline std::vector<LinearChar> linear_extensions_to_product(
    const GroupContext& ctx, const LinearChar& psi, const SubgroupPtr& C,
    const SubgroupPtr& CK) {
  const SubgroupPtr& K = psi.base;
  // theta on C extending psi|_{C cap K}
  auto CiK = intersect(*C, *K);
  LinearChar psi_cik = psi.restricted(CiK);
  auto thetas = extend_linear(psi_cik, C);
  require(!thetas.empty(), "psi does not extend to the centralizer");
  const LinearChar& theta = thetas.front();
  // cosets of K in CK, with representatives chosen inside C
  CosetTable ct = coset_table(*CK, *K);
  std::vector<uint64_t> rep_in_C(ct.num(), UINT64_MAX);
  for (auto cEl : C->elems()) {
    uint32_t q = ct.coset(cEl);
    if (rep_in_C[q] == UINT64_MAX) rep_in_C[q] = cEl;
  }
  for (auto r : rep_in_C) require(r != UINT64_MAX, "CK has a coset missing C");
  uint64_t M = lcm_u64(theta.mod, psi.mod);
  LinearChar base{CK, M, std::vector<uint32_t>(CK->size())};
  for (uint64_t i = 0; i < CK->size(); ++i) {
    uint64_t x = CK->elems()[i];
    uint64_t cEl = rep_in_C[ct.coset(x)];
    uint64_t k = ctx.mul(ctx.inv(cEl), x);
    base.exps[i] = (uint32_t)(((uint64_t)theta.exp_at(cEl) * (M / theta.mod) +
                               (uint64_t)psi.exp_at(k) * (M / psi.mod)) %
                              M);
  }
  require(base.is_multiplicative(),
          "tilde-psi(ck) = theta(c) psi(k) is not well defined");
  // twists by Irr(CK/K)
  auto Q = quotient_group(CK, K);
  AbelianChars qc = abelian_chars(Q.grp);
  std::vector<LinearChar> out;
  for (auto& e : qc.exps) {
    LinearChar tw{CK, lcm_u64(M, qc.L), std::vector<uint32_t>(CK->size())};
    for (uint64_t i = 0; i < CK->size(); ++i)
      tw.exps[i] =
          (uint32_t)(((uint64_t)base.exps[i] * (tw.mod / M) +
                      (uint64_t)e[Q.cosets.coset_of[i]] * (tw.mod / qc.L)) %
                     tw.mod);
    out.push_back(std::move(tw));
  }
  return out;
}

}  // namespace detail

// Shintani/Hill construction for even r: all of Irr(G_r | psi_beta) as
// inductions of one-dimensional extensions tilde-psi * chi.
inline ConstructResult even_construct(const GroupContext& ctx,
                                      const OrbitDescriptor& desc) {
  if (ctx.spec->r % 2 != 0) throw BadParity("even_construct: r must be even");
  if (!desc.regular) throw RegularityViolation("even_construct: beta not regular");
  ConstructResult res;
  res.path = "even";
  const Mat& beta = desc.beta;
  auto G = full_subgroup(ctx);
  auto Kl = congruence_kernel(ctx, ctx.l);
  LinearChar psi = psi_beta(ctx, beta, ctx.l);
  auto C = centralizer(ctx, beta);
  require(C->is_abelian(), "centralizer of a regular element must be abelian");
  auto CK = product_set(*C, *Kl);
  // the stabilizer formula (checked exactly)
  auto orbit = orbit_of_character(ctx, psi);
  require(orbit.stabilizer->elems() == CK->elems(),
          "G(psi_beta) != C K^{l} for even r");
  // count matches |C_{G_l}(beta_l)|
  auto ctx_l = make_group_context(
      ctx.N, make_ring(ctx.spec->kind, ctx.spec->p, ctx.l, ctx.spec->f), ctx.cap);
  auto C_l = centralizer(*ctx_l, mat_reduce(beta, ctx.l));
  require(CK->size() / Kl->size() == C_l->size() / 1,
          "extension torsor does not match |C_{G_l}(beta_l)|");
  auto exts = detail::linear_extensions_to_product(ctx, psi, C, CK);
  require(exts.size() == C_l->size(), "wrong number of linear extensions");
  for (size_t t = 0; t < exts.size(); ++t) {
    RegularChar rc;
    rc.chi = induce_linear(exts[t], G);
    rc.provenance = "twist=" + std::to_string(t);
    res.chars.push_back(std::move(rc));
  }
  res.certs = detail::certify_family(ctx, res.chars, psi, orbit.stabilizer);
  require(res.certs.all_irreducible, "even_construct: reducible output");
  require(res.certs.pairwise_distinct, "even_construct: duplicate output");
  require(res.certs.completeness, "even_construct: completeness certificate");
  require(res.certs.orbit_support, "even_construct: orbit support certificate");
  return res;
}

// The radical of the form on K^{l'}/K^l (or J^1/H^1), with both closed-form
// descriptions checked against the brute-force radical.
struct RadicalReport {
  SubgroupPtr radical_subgroup;  // preimage in J^1 (contains H^1)
  bool matches_centralizer_form = false;
  bool matches_parahoric_form = false;
};

namespace detail {

// rho^{-1}(C_{A/P}(beta_bar)) inside U^{e l'}: elements 1 + pi^{l'} y with
// the image of y in A/P centralizing beta's image.
inline SubgroupPtr rho_preimage_centralizer(const GroupContext& ctx,
                                            const ParahoricData& pd,
                                            bool minimal_parahoric,
                                            const Mat& beta,
                                            const SubgroupPtr& U_elp) {
  const RingTable& t = *ctx.rt;
  uint32_t lp = ctx.lp;
  Fq F = Fq::of(ctx.spec);
  FqMat bbar = fqmat_of(beta);
  const ValPattern& P = minimal_parahoric ? pd.P_min : pd.P_max;
  // divide an entry code in p^{lp} o by pi^{lp} (choice of lift is irrelevant
  // mod p, which is all the centralizer condition below consumes)
  std::vector<uint32_t> divided(t.n, UINT32_MAX);
  for (uint32_t code = 0; code < t.n; ++code) {
    if (t.val[code] < lp) continue;
    for (uint32_t y = 0; y < t.n; ++y) {
      uint64_t py = y;
      uint32_t pi_lp = t.one;
      for (uint32_t k = 0; k < lp; ++k) pi_lp = t.m(pi_lp, t.pi);
      if (t.m(pi_lp, (uint32_t)py) == code) {
        divided[code] = y;
        break;
      }
    }
  }
  std::vector<uint64_t> members;
  PackedOps::Codes c;
  for (auto u : U_elp->elems()) {
    ctx.ops.unpack(u, c);
    FqMat y{ctx.N, std::vector<uint32_t>((size_t)ctx.N * ctx.N, 0)};
    bool ok = true;
    for (uint32_t k = 0; k < ctx.N * ctx.N && ok; ++k) {
      uint32_t x = c[k];
      if (k % (ctx.N + 1) == 0) x = t.s(x, t.one);
      require(divided[x] != UINT32_MAX, "U^{el'} entry not divisible by pi^{l'}");
      y.c[k] = t.reduce_code[1][divided[x]];
    }
    // commutator of y with beta_bar must vanish mod the P-pattern (i.e. in A/P)
    FqMat comm{ctx.N, std::vector<uint32_t>((size_t)ctx.N * ctx.N, 0)};
    FqMat yb = fqmat_mul(F, y, bbar), by = fqmat_mul(F, bbar, y);
    for (uint32_t k = 0; k < ctx.N * ctx.N; ++k) comm.c[k] = F.sub(yb.c[k], by.c[k]);
    for (uint32_t i = 0; i < ctx.N && ok; ++i)
      for (uint32_t j = 0; j < ctx.N && ok; ++j)
        if (P.at(i, j) == 0 && comm.at(i, j) != 0) ok = false;
    if (ok) members.push_back(u);
  }
  std::sort(members.begin(), members.end());
  return subgroup_from_sorted(ctx, std::move(members));
}

}  // namespace detail

inline RadicalReport radical_of_form(const GroupContext& ctx,
                                     const SymplecticSpace& sp,
                                     const SubgroupPtr& C,
                                     const ParahoricData& pd,
                                     bool minimal_parahoric,
                                     const Mat& beta,
                                     const SubgroupPtr& C_cap_U1,
                                     const SubgroupPtr& U_elp) {
  RadicalReport rep;
  rep.radical_subgroup = sp.preimage_subgroup(sp.radical_basis);
  // description 1 (maximal case): (C cap K^{l'}) K^l
  if (!minimal_parahoric) {
    auto form1 =
        product_set(*intersect(*C, *congruence_kernel(ctx, ctx.lp)),
                    *congruence_kernel(ctx, ctx.l));
    rep.matches_centralizer_form =
        form1->elems() == rep.radical_subgroup->elems();
  } else {
    rep.matches_centralizer_form = true;  // not applicable on the minimal path
  }
  // description 2: (C cap U^1) rho^{-1}(C_{A/P}(beta_bar))
  auto pre = detail::rho_preimage_centralizer(ctx, pd, minimal_parahoric, beta,
                                              U_elp);
  auto form2 = product_set(*C_cap_U1, *pre);
  rep.matches_parahoric_form = form2->elems() == rep.radical_subgroup->elems();
  return rep;
}

// Hill's split-case maximal isotropic subgroup H_beta = (B cap K^{l'}) K^l.
struct HillSplitReport {
  SubgroupPtr H_beta;
  Mat beta_upper;
  bool maximal_isotropic = false;
  bool normal_in_stabilizer = false;
  bool radical_inside = false;
};

inline HillSplitReport hill_split_isotropic(const GroupContext& ctx,
                                            const OrbitDescriptor& desc) {
  if (ctx.spec->r % 2 == 0) throw BadParity("hill_split_isotropic: r must be odd");
  if (!desc.regular) throw RegularityViolation("hill_split_isotropic");
  for (auto& f : desc.factors)
    if (f.deg != 1)
      throw NotSplit("characteristic polynomial has an irreducible factor of degree " +
                     std::to_string(f.deg));
  HillSplitReport rep;
  // conjugate beta so that its reduction is upper triangular
  {
    Fq F = Fq::of(ctx.spec);
    FqMat bbar = fqmat_of(desc.beta);
    auto level1 = make_group_context(
        ctx.N, make_ring(ctx.spec->kind, ctx.spec->p, 1, ctx.spec->f), ctx.cap);
    bool found = false;
    for (auto g : level1->elems) {
      Mat g1 = level1->to_mat(g);
      FqMat gm{ctx.N, std::vector<uint32_t>((size_t)ctx.N * ctx.N)};
      for (uint32_t k = 0; k < ctx.N * ctx.N; ++k)
        gm.c[k] = (uint32_t)ring_code(g1.e[k]);
      Mat gi = level1->to_mat(level1->inv(g));
      FqMat gmi{ctx.N, std::vector<uint32_t>((size_t)ctx.N * ctx.N)};
      for (uint32_t k = 0; k < ctx.N * ctx.N; ++k)
        gmi.c[k] = (uint32_t)ring_code(gi.e[k]);
      FqMat conj = fqmat_mul(F, fqmat_mul(F, gm, bbar), gmi);
      bool upper = true;
      for (uint32_t i = 0; i < ctx.N && upper; ++i)
        for (uint32_t j = 0; j < i && upper; ++j)
          if (conj.at(i, j) != 0) upper = false;
      if (!upper) continue;
      Mat lift = mat_zero(ctx.N, ctx.spec);
      for (uint32_t k = 0; k < ctx.N * ctx.N; ++k)
        lift.e[k] = ring_elem_of_code(
            ctx.spec, ctx.rt->teich[(uint32_t)ring_code(g1.e[k])]);
      rep.beta_upper = mat_mul(mat_mul(lift, desc.beta), mat_inverse(lift));
      found = true;
      break;
    }
    require(found, "split beta admits no upper-triangular reduction");
  }
  auto Klp = congruence_kernel(ctx, ctx.lp);
  auto Kl = congruence_kernel(ctx, ctx.l);
  LinearChar psi = psi_beta(ctx, rep.beta_upper, ctx.l);
  // B cap K^{l'}: upper triangular members of K^{l'}
  std::vector<uint64_t> bk;
  {
    PackedOps::Codes c;
    for (auto g : Klp->elems()) {
      ctx.ops.unpack(g, c);
      bool upper = true;
      for (uint32_t i = 0; i < ctx.N && upper; ++i)
        for (uint32_t j = 0; j < i && upper; ++j)
          if (c[i * ctx.N + j] != ctx.rt->zero) upper = false;
      if (upper) bk.push_back(g);
    }
  }
  rep.H_beta = product_set(*subgroup_from_sorted(ctx, std::move(bk)), *Kl);
  // the form B_beta on K^{l'}/K^l
  uint32_t p = ctx.spec->p;
  uint64_t b = ctx.from_mat(rep.beta_upper);
  auto pairing = [&](uint64_t x, uint64_t y) -> uint32_t {
    uint64_t comm = ctx.mul(ctx.mul(x, y), ctx.mul(ctx.inv(x), ctx.inv(y)));
    require(Kl->contains(comm), "commutator escapes K^l");
    // psi_beta of the commutator
    const RingTable& t = *ctx.rt;
    PackedOps::Codes kb, bc, prod;
    ctx.ops.unpack(comm, kb);
    for (uint32_t e2 = 0; e2 < ctx.N * ctx.N; ++e2)
      if (e2 % (ctx.N + 1) == 0) kb[e2] = t.s(kb[e2], t.one);
    ctx.ops.unpack(b, bc);
    ctx.ops.mul_codes(bc, kb, prod);
    uint32_t e = t.eps[ctx.ops.trace_codes(prod)];
    require((uint64_t)e * p % t.eps_mod == 0, "form value is not a p-th root");
    return (uint32_t)((uint64_t)e / (t.eps_mod / p) % p);
  };
  SymplecticSpace sp = build_symplectic(Klp, Kl, pairing, p);
  // coordinates of H_beta / K^l and the isotropy/maximality checks
  fp::Echelon span(p);
  for (auto g : rep.H_beta->elems()) span.insert(sp.coset_coord[sp.cosets.coset(g)]);
  uint32_t rad = (uint32_t)sp.radical_basis.size();
  uint32_t expect = rad + (sp.dim - rad) / 2;
  bool isotropic = true;
  for (auto& u : span.rows)
    for (auto& w : span.rows)
      if (sp.pair_coords(u, w) != 0) isotropic = false;
  rep.maximal_isotropic = isotropic && (uint32_t)span.dim() == expect;
  rep.radical_inside = true;
  for (auto& rv : sp.radical_basis)
    if (!span.contains(rv)) rep.radical_inside = false;
  auto C = centralizer(ctx, rep.beta_upper);
  auto stab = product_set(*C, *Klp);
  rep.normal_in_stabilizer = is_normal_in(*rep.H_beta, *stab);
  return rep;
}

}  // namespace chainrep

#endif
