#ifndef CHAINREP_CONSTRUCT_ODD_HPP
#define CHAINREP_CONSTRUCT_ODD_HPP

#include "chainrep/construct.hpp"

namespace chainrep {

namespace detail {

// Linear character on a 1 + P^k style subgroup from the trace formula
// u -> eps(tr(beta (u - 1))).
inline LinearChar trace_formula_char(const GroupContext& ctx, const Mat& beta,
                                     const SubgroupPtr& U) {
  const RingTable& t = *ctx.rt;
  uint64_t b = ctx.from_mat(beta);
  LinearChar out{U, t.eps_mod, std::vector<uint32_t>(U->size())};
  PackedOps::Codes kb, bc, prod;
  ctx.ops.unpack(b, bc);
  for (uint64_t i = 0; i < U->size(); ++i) {
    ctx.ops.unpack(U->elems()[i], kb);
    for (uint32_t e = 0; e < ctx.N * ctx.N; ++e)
      if (e % (ctx.N + 1) == 0) kb[e] = t.s(kb[e], t.one);
    ctx.ops.mul_codes(bc, kb, prod);
    out.exps[i] = t.eps[ctx.ops.trace_codes(prod)];
  }
  return out;
}

// Alternating F_p pairing (x,y) -> eps-log of theta([x,y]), where theta is
// defined (at least) on the subgroup containing the commutators.
inline std::function<uint32_t(uint64_t, uint64_t)> commutator_pairing(
    const GroupContext& ctx, const LinearChar& theta, uint32_t p) {
  return [&ctx, theta, p](uint64_t x, uint64_t y) -> uint32_t {
    uint64_t comm = ctx.mul(ctx.mul(x, y), ctx.mul(ctx.inv(x), ctx.inv(y)));
    require(theta.base->contains(comm), "commutator escapes the character domain");
    return exp_mod_p(theta, comm, p);
  };
}

inline LinearChar pullback_char(const SubgroupPtr& S, const QuotientGroup& Q,
                                uint64_t L, const std::vector<uint32_t>& exps) {
  LinearChar out{S, L, std::vector<uint32_t>(S->size())};
  for (uint64_t i = 0; i < S->size(); ++i)
    out.exps[i] = exps[Q.cosets.coset_of[i]];
  return out;
}

// All characters of S trivial on the normal subgroup Hmod (pulled back from
// S/Hmod), deterministically ordered.
inline std::vector<LinearChar> quotient_characters(const SubgroupPtr& S,
                                                   const SubgroupPtr& Hmod) {
  auto Q = quotient_group(S, Hmod);
  AbelianChars ac = abelian_chars(Q.grp);
  std::vector<LinearChar> out;
  for (auto& e : ac.exps) out.push_back(pullback_char(S, Q, ac.L, e));
  std::sort(out.begin(), out.end(), [](const LinearChar& a, const LinearChar& b) {
    return a.exps < b.exps;
  });
  return out;
}

// Heisenberg-lift uniqueness certificate: Ind_{H}^{J} theta = d * eta, via
// <Ind, Ind> = d^2 and <Ind, eta> = d.
inline void certify_unique_lift(const LinearChar& theta, const SubgroupPtr& J,
                                const ClassFunction& eta_char, uint64_t d) {
  ClassFunction ind = induce_linear(theta, J);
  mpq_class self = inner_product_rational(ind, ind);
  mpq_class with = inner_product_rational(ind, eta_char);
  require(self == mpq_class((unsigned long)(d * d)),
          "Heisenberg lift: <Ind theta, Ind theta> != d^2");
  require(with == mpq_class((unsigned long)d),
          "Heisenberg lift: <Ind theta, eta> != d");
}

// A second maximal isotropic distinct from `first`, if one exists: greedy
// growth seeded with the first vector outside span(first).
inline std::optional<std::vector<fp::Vec>> second_lagrangian(
    const SymplecticSpace& sp, const std::vector<fp::Vec>& first) {
  uint32_t p = sp.p, dim = sp.dim;
  fp::Echelon span1(p);
  for (auto& v : first) span1.insert(v);
  uint64_t total = pow_u64(p, dim);
  for (uint64_t seed = 1; seed < total; ++seed) {
    fp::Vec v(dim);
    uint64_t t = seed;
    for (uint32_t i = 0; i < dim; ++i) {
      v[i] = (uint32_t)(t % p);
      t /= p;
    }
    if (span1.contains(v)) continue;
    // must be isotropic with itself (always) and extendable: grow greedily
    fp::Echelon U(p);
    std::vector<fp::Vec> chosen{v};
    U.insert(v);
    for (;;) {
      bool grew = false;
      for (uint64_t idx = 1; idx < total && !grew; ++idx) {
        fp::Vec w(dim);
        uint64_t s = idx;
        for (uint32_t i = 0; i < dim; ++i) {
          w[i] = (uint32_t)(s % p);
          s /= p;
        }
        if (U.contains(w)) continue;
        bool ok = true;
        for (auto& u : chosen)
          if (sp.pair_coords(u, w) != 0 || sp.pair_coords(w, u) != 0) {
            ok = false;
            break;
          }
        if (ok) {
          chosen.push_back(w);
          U.insert(w);
          grew = true;
        }
      }
      if (!grew) break;
    }
    uint32_t rad = (uint32_t)sp.radical_basis.size();
    if ((uint32_t)chosen.size() == rad + (dim - rad) / 2) return chosen;
  }
  return std::nullopt;
}

}  // namespace detail

// Stasinski-Stevens construction (any p, r odd).
inline ConstructResult ss_construct(const GroupContext& ctx,
                                    const OrbitDescriptor& desc) {
  if (ctx.spec->r % 2 == 0) throw BadParity("ss_construct: r must be odd");
  if (!desc.regular) throw RegularityViolation("ss_construct: beta not regular");
  ConstructResult res;
  res.path = "ss";
  uint32_t p = ctx.spec->p;
  uint32_t r = ctx.spec->r;

  Mat beta = align_beta_to_parahoric(ctx, desc);
  OrbitDescriptor adesc = factor_mod_p(beta);
  ParahoricData pd = parahoric(ctx, adesc);
  auto C = centralizer(ctx, beta);
  require(C->is_abelian(), "centralizer of a regular element must be abelian");
  ParahoricLattice lat = parahoric_subgroups(ctx, pd, C);
  // Lemma: J_mM is a normal p-Sylow subgroup of CK^{l'}
  require(is_normal_in(*lat.J_mM, *lat.CKlp), "J_mM not normal in CK^{l'}");
  require(p_part(lat.J_mM->size(), p) == lat.J_mM->size(), "J_mM is not a p-group");
  require((lat.CKlp->size() / lat.J_mM->size()) % p != 0,
          "[CK^{l'} : J_mM] is divisible by p");

  auto G = full_subgroup(ctx);
  LinearChar psi = psi_beta(ctx, beta, ctx.l);
  auto orbit = orbit_of_character(ctx, psi);
  require(orbit.stabilizer->elems() == lat.CKlp->elems(),
          "G(psi_beta) != C K^{l'}");

  // ---- Step 1: the trace-formula extension and its stability ----
  auto U_elp1_m = unit_filtration_subgroup(ctx, pd.P_min, pd.e_m * ctx.lp + 1);
  LinearChar phi_m = detail::trace_formula_char(ctx, beta, U_elp1_m);
  require(phi_m.is_multiplicative(), "phi on U^{el'+1} is not multiplicative");
  {
    auto U_ker = unit_filtration_subgroup(ctx, pd.P_min, pd.e_m * (r - 1) + 1);
    for (auto u : U_ker->elems())
      require(phi_m.exp_at(u) == 0, "U^{e(r-1)+1} not inside ker psi_beta");
    auto CUm1 = intersect(*C, *lat.U_m1);
    for (auto c : CUm1->elems()) {
      for (uint64_t i = 0; i < U_elp1_m->size(); ++i) {
        uint64_t u = U_elp1_m->elems()[i];
        require(phi_m.exp_at(ctx.conj(c, u)) == phi_m.exps[i],
                "C cap U^1 does not stabilize the Step 1 extension");
      }
    }
  }
  auto thetaMs = extend_linear(psi, lat.H_M1);
  require(thetaMs.size() == lat.H_M1->size() / lat.Kl->size(),
          "wrong number of theta_M extensions");

  // ---- Step 2 scaffolding shared by every theta_M ----
  LinearChar psi_on_Kl = psi;
  SymplecticSpace spM = build_symplectic(
      lat.J_M1, lat.H_M1, detail::commutator_pairing(ctx, psi_on_Kl, p), p);
  SymplecticSpace spm = build_symplectic(
      lat.J_m1, lat.H_m1, detail::commutator_pairing(ctx, phi_m, p), p);
  auto CUm1 = intersect(*C, *lat.U_m1);
  auto CK1 = intersect(*C, *lat.U_M1);
  auto U_elp_m = unit_filtration_subgroup(
      ctx, pd.P_min, std::max<uint32_t>(1, pd.e_m * ctx.lp));
  RadicalReport radM = radical_of_form(ctx, spM, C, pd, false, beta, CK1, lat.Klp);
  require(radM.matches_centralizer_form && radM.matches_parahoric_form,
          "radical descriptions disagree (maximal parahoric)");
  require(radM.radical_subgroup->elems() == lat.H_M1->elems(),
          "R_{beta,M} is not contained in H_M^1");
  RadicalReport radm =
      radical_of_form(ctx, spm, C, pd, true, beta, CUm1, U_elp_m);
  require(radm.matches_parahoric_form,
          "radical description disagrees (minimal parahoric)");

  auto lagM = lagrangian_subspace(spM);
  auto WM = spM.preimage_subgroup(lagM);
  auto lagm = lagrangian_subspace(spm);
  auto Wm = spm.preimage_subgroup(lagm);
  auto lagM2 = detail::second_lagrangian(spM, lagM);

  uint64_t dim_eta_M_expected = pow_u64(ctx.spec->q, (uint64_t)ctx.N * (ctx.N - 1) / 2);

  auto twist_chars = detail::quotient_characters(lat.CKlp, lat.J_M1);

  for (size_t ti = 0; ti < thetaMs.size(); ++ti) {
    const LinearChar& theta_M = thetaMs[ti];
    // J^1 stabilizes theta (Step 2 commutator computation)
    for (auto j : lat.J_M1->gens())
      for (uint64_t i = 0; i < lat.H_M1->size(); ++i)
        require(theta_M.exp_at(ctx.conj(j, lat.H_M1->elems()[i])) ==
                    theta_M.exps[i],
                "J_M^1 does not stabilize theta_M");
    // theta_m: extension of theta_M to H_m^1 that restricts to the
    // Step 1 trace formula on U_m^{el'+1}
    std::vector<LinearChar> theta_m_cands = extend_linear(theta_M, lat.H_m1);
    std::optional<LinearChar> theta_m;
    for (auto& cand : theta_m_cands) {
      bool ok = true;
      uint64_t M = lcm_u64(cand.mod, phi_m.mod);
      for (uint64_t i = 0; i < U_elp1_m->size() && ok; ++i) {
        uint64_t u = U_elp1_m->elems()[i];
        if ((cand.exp_at(u) * (M / cand.mod)) % M !=
            ((uint64_t)phi_m.exps[i] * (M / phi_m.mod)) % M)
          ok = false;
      }
      if (ok) {
        theta_m = cand;
        break;
      }
    }
    if (!theta_m)
      throw NoExtension("no theta_m extends theta_M compatibly with Step 1");
    for (auto j : lat.J_m1->gens())
      for (uint64_t i = 0; i < lat.H_m1->size(); ++i)
        require(theta_m->exp_at(ctx.conj(j, lat.H_m1->elems()[i])) ==
                    theta_m->exps[i],
                "J_m^1 does not stabilize theta_m");

    // eta_M: the unique Heisenberg lift of theta_M to J_M^1
    auto thetapp_M_all = extend_linear(theta_M, WM);
    require(!thetapp_M_all.empty(), "theta_M does not extend to W_beta");
    MonomialRep eta_M = MonomialRep::make(lat.J_M1, WM, thetapp_M_all.front());
    ClassFunction eta_M_char = eta_M.character();
    require(is_irreducible(eta_M_char), "eta_M not irreducible");
    require(eta_M.d == dim_eta_M_expected, "dim eta_M != q^{N(N-1)/2}");
    detail::certify_unique_lift(theta_M, lat.J_M1, eta_M_char, eta_M.d);
    if (lagM2) {
      auto thetapp2 = extend_linear(theta_M, spM.preimage_subgroup(*lagM2));
      require(!thetapp2.empty(), "theta_M does not extend to the second W");
      MonomialRep eta2 =
          MonomialRep::make(lat.J_M1, spM.preimage_subgroup(*lagM2),
                            thetapp2.front());
      require(eta2.character() == eta_M_char,
              "eta_M depends on the choice of Lagrangian");
    }

    // eta_m and eta = Ind_{J_m^1}^{J_mM} eta_m (by transitivity, directly
    // induced from W_m)
    auto thetapp_m_all = extend_linear(*theta_m, Wm);
    require(!thetapp_m_all.empty(), "theta_m does not extend to W_beta,m");
    MonomialRep eta_m = MonomialRep::make(lat.J_m1, Wm, thetapp_m_all.front());
    ClassFunction eta_m_char = eta_m.character();
    require(is_irreducible(eta_m_char), "eta_m not irreducible");
    MonomialRep eta = MonomialRep::make(lat.J_mM, Wm, thetapp_m_all.front());
    ClassFunction eta_char = eta.character();
    require(eta_char == induce(eta_m_char, lat.J_mM),
            "induction transitivity failed for eta");
    require(eta.d == eta_M.d, "dim eta != dim eta_M");
    require(restrict_to(eta_char, lat.J_M1) == eta_M_char,
            "eta does not restrict to eta_M");
    require(is_irreducible(eta_char), "eta not irreducible on J_mM");

    // Step 3: extension to CK^{l'} through the normal p-Sylow J_mM
    ExtendedRep ext = extend_monomial(eta, lat.CKlp);
    ClassFunction hat_char = ext.character();
    require(restrict_to(hat_char, lat.J_M1) == eta_M_char,
            "hat eta_M does not restrict to eta_M");

    // Step 4: all extensions of eta_M are Gallagher twists by Irr(CK/J_M^1)
    for (size_t wi = 0; wi < twist_chars.size(); ++wi) {
      ClassFunction twisted = tensor_linear(hat_char, twist_chars[wi]);
      RegularChar rc;
      rc.chi = induce(twisted, G);
      rc.provenance =
          "thetaM=" + std::to_string(ti) + ";twist=" + std::to_string(wi);
      res.chars.push_back(std::move(rc));
    }
  }

  res.certs = detail::certify_family(ctx, res.chars, psi, lat.CKlp);
  require(res.certs.all_irreducible, "ss_construct: reducible output");
  require(res.certs.pairwise_distinct, "ss_construct: duplicate output");
  require(res.certs.completeness, "ss_construct: completeness certificate");
  require(res.certs.orbit_support, "ss_construct: orbit support certificate");
  return res;
}

// Krakovski-Onn-Singla construction (p odd, r odd).
inline ConstructResult kos_construct(const GroupContext& ctx,
                                     const OrbitDescriptor& desc) {
  if (ctx.spec->p == 2)
    throw UnsupportedResidueChar("kos_construct requires p > 2");
  if (ctx.spec->r % 2 == 0) throw BadParity("kos_construct: r must be odd");
  if (!desc.regular) throw RegularityViolation("kos_construct: beta not regular");
  ConstructResult res;
  res.path = "kos";
  uint32_t p = ctx.spec->p, r = ctx.spec->r, lp = ctx.lp;
  const Mat& beta = desc.beta;
  const RingTable& t = *ctx.rt;

  auto G = full_subgroup(ctx);
  auto Kl = congruence_kernel(ctx, ctx.l);
  auto Klp = congruence_kernel(ctx, lp);
  LinearChar psi = psi_beta(ctx, beta, ctx.l);
  auto C = centralizer(ctx, beta);
  auto CKlp = product_set(*C, *Klp);
  auto orbit = orbit_of_character(ctx, psi);
  require(orbit.stabilizer->elems() == CKlp->elems(), "G(psi_beta) != C K^{l'}");

  // truncated exp/log: x -> 1 + x + x^2/2 is a bijection p^{l'} g_r -> K^{l'}
  RingElem half = invert(ring_int(ctx.spec, 2));
  auto mat_exp = [&](const Mat& x) {
    Mat x2 = mat_mul(x, x);
    return mat_add(mat_add(mat_identity(ctx.N, ctx.spec), x),
                   mat_scale(half, x2));
  };
  auto mat_log = [&](const Mat& g) {
    Mat u = mat_sub(g, mat_identity(ctx.N, ctx.spec));
    return mat_sub(u, mat_scale(half, mat_mul(u, u)));
  };
  {
    require(3 * lp >= r, "truncated exp needs 3 l' >= r");
    std::vector<uint8_t> seen(Klp->size(), 0);
    uint64_t count = 0;
    // elements of p^{l'} g_r via K^{l'} itself: x = k - 1 runs over p^{l'} g
    for (auto k : Klp->elems()) {
      Mat x = mat_sub(ctx.to_mat(k), mat_identity(ctx.N, ctx.spec));
      Mat e = mat_exp(x);
      uint64_t pe = ctx.from_mat(e);
      require(Klp->contains(pe), "exp image escapes K^{l'}");
      uint32_t pos = Klp->pos(pe);
      require(!seen[pos], "exp is not injective");
      seen[pos] = 1;
      ++count;
      require(mat_log(e) == x, "log(exp(x)) != x");
    }
    require(count == Klp->size(), "exp is not surjective");
  }

  // B_beta on K^{l'}/K^l and the P_beta-invariant Lagrangian
  SymplecticSpace sp =
      build_symplectic(Klp, Kl, detail::commutator_pairing(ctx, psi, p), p);
  {
    auto rad_pre = sp.preimage_subgroup(sp.radical_basis);
    auto form1 = product_set(*intersect(*C, *Klp), *Kl);
    require(rad_pre->elems() == form1->elems(),
            "radical != (C cap K^{l'}) K^l");
  }
  auto Pbeta = sylow_p(*C, p);
  auto action = conjugation_action(sp, Pbeta->gens());
  for (size_t a = 0; a < action.size(); ++a) {
    uint64_t g = Pbeta->gens()[a];
    for (uint32_t i = 0; i < sp.dim; ++i)
      for (uint32_t j = 0; j < sp.dim; ++j) {
        uint32_t lhs = sp.pair_coords(action[a][i], action[a][j]);
        require(lhs == sp.gram[i][j], "P_beta does not preserve the form");
      }
    (void)g;
  }
  auto lag = lagrangian_subspace(sp, action);
  auto Jb = sp.preimage_subgroup(lag);
  for (auto g : Pbeta->elems())
    for (auto j : Jb->gens())
      require(Jb->contains(ctx.conj(g, j)), "P_beta does not normalize J_beta");
  {
    bool c_norm = true;
    for (auto g : C->elems()) {
      for (auto j : Jb->gens())
        if (!Jb->contains(ctx.conj(g, j))) {
          c_norm = false;
          break;
        }
      if (!c_norm) break;
    }
    res.c_normalizes_jbeta = c_norm;
  }
  auto R = sp.preimage_subgroup(sp.radical_basis);

  // enumerate theta' classes via beta'' = beta + pi^{l'} delta
  struct ThetaClass {
    Mat beta2;
    std::vector<uint32_t> key;
  };
  std::vector<ThetaClass> classes;
  {
    RingPtr res_field = make_ring(ctx.spec->kind, ctx.spec->p, 1, ctx.spec->f);
    uint64_t q1 = res_field->size;
    uint64_t total = 1;
    for (uint32_t k = 0; k < ctx.N * ctx.N; ++k) total *= q1;
    RingElem pi_lp = ring_one(ctx.spec);
    for (uint32_t k = 0; k < lp; ++k) pi_lp = ring_mul(pi_lp, ring_pi(ctx.spec));
    for (uint64_t idx = 0; idx < total; ++idx) {
      uint64_t v = idx;
      Mat delta = mat_zero(ctx.N, ctx.spec);
      for (uint32_t k = 0; k < ctx.N * ctx.N; ++k) {
        delta.e[k] = ring_lift(ring_elem_of_code(res_field, v % q1), ctx.spec);
        v /= q1;
      }
      Mat beta2 = mat_add(beta, mat_scale(pi_lp, delta));
      // key: eps-exponents of theta'_{beta2} = eps(tr(beta2 log(.))) on R
      std::vector<uint32_t> key(R->size());
      for (uint64_t i = 0; i < R->size(); ++i) {
        Mat lg = mat_log(ctx.to_mat(R->elems()[i]));
        key[i] = (uint32_t)eps_exponent(trace(mat_mul(beta2, lg)));
      }
      bool fresh = true;
      for (auto& cl : classes)
        if (cl.key == key) {
          fresh = false;
          break;
        }
      if (fresh) classes.push_back({beta2, std::move(key)});
    }
    require(classes.size() == R->size() / Kl->size(),
            "wrong number of theta' extensions");
  }

  auto PbJb = product_set(*Pbeta, *Jb);
  auto PbKlp = product_set(*Pbeta, *Klp);
  require(intersect(*Pbeta, *Jb)->size() == intersect(*Pbeta, *Klp)->size(),
          "P cap J_beta != P cap K^{l'}");
  auto twist_chars = detail::quotient_characters(CKlp, Klp);

  for (size_t ci = 0; ci < classes.size(); ++ci) {
    const Mat& beta2 = classes[ci].beta2;
    // log* theta'' on J_beta, multiplicative by the p > 2 lemma; full table
    LinearChar lst{Jb, t.eps_mod, std::vector<uint32_t>(Jb->size())};
    for (uint64_t i = 0; i < Jb->size(); ++i) {
      Mat lg = mat_log(ctx.to_mat(Jb->elems()[i]));
      lst.exps[i] = (uint32_t)eps_exponent(trace(mat_mul(beta2, lg)));
    }
    for (uint64_t i = 0; i < Jb->size(); ++i)
      for (uint64_t j = 0; j < Jb->size(); ++j) {
        uint64_t prod = ctx.mul(Jb->elems()[i], Jb->elems()[j]);
        require((lst.exps[i] + lst.exps[j]) % lst.mod == lst.exp_at(prod),
                "log* theta'' is not multiplicative on J_beta");
      }
    MonomialRep sigma = MonomialRep::make(Klp, Jb, lst);
    ClassFunction sigma_char = sigma.character();
    require(is_irreducible(sigma_char), "sigma not irreducible");
    {
      // uniqueness in Irr(K^{l'} | theta')
      LinearChar theta_prime{R, t.eps_mod, classes[ci].key};
      require(theta_prime.is_multiplicative(), "theta' not multiplicative");
      detail::certify_unique_lift(theta_prime, Klp, sigma_char, sigma.d);
    }
    // G(sigma) = G(psi_beta): CK^{l'} stabilizes, nothing else does
    {
      Klp->ensure_classes();
      auto stabilizes = [&](uint64_t g) -> bool {
        for (uint32_t c = 0; c < Klp->num_classes(); ++c) {
          uint64_t k = Klp->class_rep(c);
          if (!(sigma_char.at_elem(ctx.conj(ctx.inv(g), k)) == sigma_char.v[c]))
            return false;
        }
        return true;
      };
      for (auto g : CKlp->gens())
        require(stabilizes(g), "CK^{l'} does not stabilize sigma");
      CosetTable big = coset_table(*G, *CKlp);
      for (uint32_t q = 0; q < big.num(); ++q) {
        uint64_t g = big.reps[q];
        if (CKlp->contains(g)) continue;
        require(!stabilizes(g), "G(sigma) exceeds G(psi_beta)");
      }
    }
    // omega on P_beta J_beta, then sigma' on P_beta K^{l'}
    for (auto g : Pbeta->elems())
      for (uint64_t i = 0; i < Jb->size(); ++i)
        require(lst.exp_at(ctx.conj(g, Jb->elems()[i])) == lst.exps[i],
                "P_beta does not stabilize log* theta''");
    auto omegas = extend_linear(lst, PbJb);
    require(!omegas.empty(), "log* theta'' does not extend to P_beta J_beta");
    MonomialRep sigma_p = MonomialRep::make(PbKlp, PbJb, omegas.front());
    require(sigma_p.d == sigma.d, "dim sigma' != dim sigma");
    ClassFunction sigma_p_char = sigma_p.character();
    require(is_irreducible(sigma_p_char), "sigma' not irreducible");
    require(restrict_to(sigma_p_char, Klp) == sigma_char,
            "sigma' does not extend sigma");
    // extension to all of CK^{l'} and the Gallagher twists
    ExtendedRep ext = extend_monomial(sigma_p, CKlp);
    ClassFunction tilde = ext.character();
    require(restrict_to(tilde, Klp) == sigma_char,
            "tilde sigma does not extend sigma");
    for (size_t wi = 0; wi < twist_chars.size(); ++wi) {
      ClassFunction twisted = tensor_linear(tilde, twist_chars[wi]);
      RegularChar rc;
      rc.chi = induce(twisted, G);
      rc.provenance =
          "theta'=" + std::to_string(ci) + ";twist=" + std::to_string(wi);
      res.chars.push_back(std::move(rc));
    }
  }

  res.certs = detail::certify_family(ctx, res.chars, psi, CKlp);
  require(res.certs.all_irreducible, "kos_construct: reducible output");
  require(res.certs.pairwise_distinct, "kos_construct: duplicate output");
  require(res.certs.completeness, "kos_construct: completeness certificate");
  require(res.certs.orbit_support, "kos_construct: orbit support certificate");
  return res;
}

// Dispatcher: even r -> Shintani/Hill; odd r -> Stasinski-Stevens, with the
// KOS pipeline cross-validated against it whenever p > 2.
struct RegularRepsResult {
  ConstructResult primary;
  std::optional<ConstructResult> cross;
  bool cross_equal = true;
};

inline bool same_character_sets(const std::vector<RegularChar>& a,
                                const std::vector<RegularChar>& b) {
  if (a.size() != b.size()) return false;
  std::vector<char> used(b.size(), 0);
  for (auto& x : a) {
    bool hit = false;
    for (size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      if (x.chi == b[j].chi) {
        used[j] = 1;
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

inline RegularRepsResult regular_reps(const GroupContext& ctx,
                                      const OrbitDescriptor& desc,
                                      const std::string& path = "auto") {
  RegularRepsResult out;
  if (path == "even" || (path == "auto" && ctx.spec->r % 2 == 0)) {
    out.primary = even_construct(ctx, desc);
    return out;
  }
  if (path == "kos") {
    out.primary = kos_construct(ctx, desc);
    return out;
  }
  if (path == "ss") {
    out.primary = ss_construct(ctx, desc);
    return out;
  }
  require(path == "auto", "unknown construction path");
  out.primary = ss_construct(ctx, desc);
  if (ctx.spec->p > 2) {
    out.cross = kos_construct(ctx, desc);
    out.cross_equal = same_character_sets(out.primary.chars, out.cross->chars);
    require(out.cross_equal, "KOS and SS outputs differ as character sets");
  }
  return out;
}

// Inflation of a class function along G_r -> G_s.
inline ClassFunction inflate(const ClassFunction& chi, const GroupContext& big) {
  const GroupContext& small = chi.base->ctx();
  auto G = full_subgroup(big);
  G->ensure_classes();
  ClassFunction out{G, std::vector<Cyclo>(G->num_classes())};
  for (uint32_t c = 0; c < G->num_classes(); ++c) {
    uint64_t red = big.reduce_packed(G->class_rep(c), small);
    out.v[c] = chi.at_elem(red);
  }
  return out;
}

// pi is primitive iff it does not factor through G_{r-1}, i.e. K^{r-1} is
// not inside its kernel; equivalent to beta mod p being nonzero.
inline bool primitivity(const GroupContext& ctx, const ClassFunction& pi,
                        const Mat& beta) {
  auto K = congruence_kernel(ctx, ctx.spec->r - 1);
  const Cyclo& at_one = pi.at_elem(ctx.one());
  bool kernel_contains = true;
  for (auto k : K->elems())
    if (!(pi.at_elem(k) == at_one)) {
      kernel_contains = false;
      break;
    }
  bool primitive = !kernel_contains;
  bool beta_bar_nonzero = !fqmat_is_zero(fqmat_of(beta));
  require(primitive == beta_bar_nonzero,
          "primitivity does not match beta mod p");
  return primitive;
}

}  // namespace chainrep

#endif
