#ifndef CHAINREP_ORACLE_HPP
#define CHAINREP_ORACLE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chainrep/construct_odd.hpp"

namespace chainrep {

struct LemmaCheck {
  std::string name;
  bool pass = false;
  bool vacuous = false;
  std::string note;
};

struct LemmaSuiteReport {
  std::vector<LemmaCheck> checks;
  bool all_pass() const {
    for (auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

namespace detail {

// All elements of g_r (as packed codes) matching a valuation pattern.
inline std::vector<uint64_t> pattern_set(const GroupContext& ctx,
                                         const ValPattern& pat) {
  const RingTable& t = *ctx.rt;
  std::vector<std::vector<uint32_t>> pools(ctx.spec->r + 1);
  for (uint32_t v = 0; v <= ctx.spec->r; ++v)
    for (uint32_t code = 0; code < t.n; ++code)
      if (t.val[code] >= v) pools[v].push_back(code);
  uint64_t total = 1;
  std::vector<const std::vector<uint32_t>*> lists;
  for (uint32_t k = 0; k < ctx.N * ctx.N; ++k) {
    lists.push_back(&pools[std::min(pat.v[k], ctx.spec->r)]);
    total *= lists.back()->size();
    if (total > 20000000ull) throw DeskScaleExceeded("pattern set too large");
  }
  std::vector<uint64_t> out;
  out.reserve(total);
  std::vector<uint32_t> ctr(ctx.N * ctx.N, 0);
  PackedOps::Codes c{};
  for (uint64_t step = 0; step < total; ++step) {
    for (uint32_t k = 0; k < ctx.N * ctx.N; ++k) c[k] = (*lists[k])[ctr[k]];
    out.push_back(ctx.ops.pack(c));
    for (uint32_t k = 0; k < ctx.N * ctx.N; ++k) {
      if (++ctr[k] < lists[k]->size()) break;
      ctr[k] = 0;
    }
  }
  return out;
}

inline uint32_t eps_exp_of_product(const GroupContext& ctx, uint64_t x,
                                   uint64_t y) {
  PackedOps::Codes a, b, prod;
  ctx.ops.unpack(x, a);
  ctx.ops.unpack(y, b);
  ctx.ops.mul_codes(a, b, prod);
  return ctx.rt->eps[ctx.ops.trace_codes(prod)];
}

}  // namespace detail

// (P^i)^perp = P^{e(r-1)+1-i} for the parahoric pattern, verified by
// exhaustive eps(tr(x y)) = 1 scans plus the perfect-pairing size count.
inline bool verify_parahoric_orthogonality(const GroupContext& ctx,
                                           const ParahoricData& pd,
                                           std::string* note = nullptr) {
  uint32_t e = pd.e_m, r = ctx.spec->r;
  uint32_t top = e * (r - 1) + 1;
  uint64_t g_size = 1;
  for (uint32_t k = 0; k < ctx.N * ctx.N; ++k) g_size *= ctx.rt->n;
  for (uint32_t i = 0; i <= top; ++i) {
    ValPattern Pi = i == 0 ? pd.A_min : pattern_power(pd.P_min, i);
    ValPattern Pj = (top - i) == 0 ? pd.A_min : pattern_power(pd.P_min, top - i);
    auto Si = detail::pattern_set(ctx, Pi);
    auto Sj = detail::pattern_set(ctx, Pj);
    if (Si.size() * Sj.size() != g_size) {
      if (note) *note = "size duality failed at i=" + std::to_string(i);
      return false;
    }
    for (auto x : Sj)
      for (auto y : Si)
        if (detail::eps_exp_of_product(ctx, x, y) != 0) {
          if (note) *note = "nontrivial pairing at i=" + std::to_string(i);
          return false;
        }
  }
  return true;
}

// p A = P^e as subsets of g_r: the shifted pattern set must equal the
// additive closure of e-fold products of monomial generators of P.
inline bool verify_pa_eq_pe(const GroupContext& ctx, const ParahoricData& pd,
                            std::string* note = nullptr) {
  const RingTable& t = *ctx.rt;
  // additive generators of P: pi^{c_ij} E_ij
  std::vector<uint64_t> gens;
  for (uint32_t i = 0; i < ctx.N; ++i)
    for (uint32_t j = 0; j < ctx.N; ++j) {
      PackedOps::Codes c{};
      for (uint32_t k = 0; k < ctx.N * ctx.N; ++k) c[k] = t.zero;
      uint32_t entry = t.one;
      for (uint32_t v = 0; v < pd.P_min.at(i, j); ++v) entry = t.m(entry, t.pi);
      c[i * ctx.N + j] = entry;
      gens.push_back(ctx.ops.pack(c));
    }
  // e-fold products of generators
  std::vector<uint64_t> prods = gens;
  for (uint32_t step = 1; step < pd.e_m; ++step) {
    std::vector<uint64_t> next;
    for (auto a : prods)
      for (auto b : gens) {
        PackedOps::Codes ca, cb, cc;
        ctx.ops.unpack(a, ca);
        ctx.ops.unpack(b, cb);
        ctx.ops.mul_codes(ca, cb, cc);
        next.push_back(ctx.ops.pack(cc));
      }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    prods = std::move(next);
  }
  // additive closure; scalar multiples of generators are included because o_r
  // times a monomial is again spanned by repeated addition
  std::vector<uint64_t> span{ctx.ops.pack(PackedOps::Codes{})};
  {
    PackedOps::Codes z{};
    for (uint32_t k = 0; k < ctx.N * ctx.N; ++k) z[k] = t.zero;
    span[0] = ctx.ops.pack(z);
  }
  std::map<uint64_t, bool> in;
  in[span[0]] = true;
  size_t head = 0;
  while (head < span.size()) {
    uint64_t x = span[head++];
    for (auto g : prods) {
      PackedOps::Codes ca, cb;
      ctx.ops.unpack(x, ca);
      ctx.ops.unpack(g, cb);
      PackedOps::Codes cc;
      for (uint32_t k = 0; k < ctx.N * ctx.N; ++k) cc[k] = t.a(ca[k], cb[k]);
      uint64_t y = ctx.ops.pack(cc);
      if (!in.count(y)) {
        in[y] = true;
        span.push_back(y);
      }
    }
  }
  auto target = detail::pattern_set(ctx, pd.A_min.shifted(1));
  std::sort(span.begin(), span.end());
  std::sort(target.begin(), target.end());
  bool ok = span == target;
  if (!ok && note) *note = "additive closure of P^e differs from pA";
  return ok;
}

// The desk-scale verifier bundle for one (context, orbit) pair.
inline LemmaSuiteReport verify_lemma_suite(const GroupContext& ctx,
                                           const OrbitDescriptor& desc) {
  LemmaSuiteReport rep;
  auto add = [&](std::string name, bool pass, bool vacuous = false,
                 std::string note = "") {
    rep.checks.push_back({std::move(name), pass, vacuous, std::move(note)});
  };
  // commutator filtration
  {
    auto f = commutator_filtration_check(ctx);
    add("commutator_filtration", f.pass);
  }
  // K^i bijection/isomorphism structure
  {
    bool ok = true;
    for (uint32_t i = (ctx.spec->r + 1) / 2; i <= ctx.spec->r; ++i)
      if (!verify_ki_isomorphism(ctx, i)) ok = false;
    add("ki_isomorphism", ok);
  }
  // stabilizer formula
  {
    bool ok = true;
    std::string note;
    try {
      stabilizer_of_orbit_character(ctx, desc.beta);
    } catch (const Error& e) {
      ok = false;
      note = e.what();
    }
    add("stabilizer_formula", ok, false, note);
  }
  // centralizer = o_r[beta]^x, abelian
  {
    auto C = centralizer(ctx, desc.beta);
    auto span = unit_polynomial_span(ctx, desc.beta);
    add("centralizer_is_unit_span",
        C->elems() == span->elems() && C->is_abelian());
  }
  // reduction surjectivity, every level
  {
    bool ok = true;
    for (uint32_t s = 1; s <= ctx.spec->r; ++s)
      if (!centralizer_reduction_surjectivity(ctx, desc.beta, s).surjective)
        ok = false;
    add("centralizer_reduction_surjective", ok);
  }
  // parahoric orthogonality and pA = P^e
  {
    ParahoricData pd = parahoric(ctx, desc);
    std::string note;
    add("parahoric_orthogonality", verify_parahoric_orthogonality(ctx, pd, &note),
        false, note);
    std::string note2;
    add("pa_eq_pe", verify_pa_eq_pe(ctx, pd, &note2), false, note2);
  }
  // odd-r structure: radical identities and the normal p-Sylow lemma
  if (ctx.spec->r % 2 == 1) {
    bool ok = true;
    std::string note;
    try {
      auto srep = normal_sylow_check(ctx, desc);
      ok = srep.pass();
      // radical identities along the way
      OrbitDescriptor adesc = factor_mod_p(srep.beta_aligned);
      ParahoricData pd = parahoric(ctx, adesc);
      auto C = centralizer(ctx, srep.beta_aligned);
      ParahoricLattice lat = parahoric_subgroups(ctx, pd, C);
      LinearChar psi = psi_beta(ctx, srep.beta_aligned, ctx.l);
      LinearChar phi_m = detail::trace_formula_char(
          ctx, srep.beta_aligned,
          unit_filtration_subgroup(ctx, pd.P_min, pd.e_m * ctx.lp + 1));
      SymplecticSpace spM = build_symplectic(
          lat.J_M1, lat.H_M1,
          detail::commutator_pairing(ctx, psi, ctx.spec->p), ctx.spec->p);
      SymplecticSpace spm = build_symplectic(
          lat.J_m1, lat.H_m1,
          detail::commutator_pairing(ctx, phi_m, ctx.spec->p), ctx.spec->p);
      auto CK1 = intersect(*C, *lat.U_M1);
      auto CUm1 = intersect(*C, *lat.U_m1);
      auto U_elp_m = unit_filtration_subgroup(
          ctx, pd.P_min, std::max<uint32_t>(1, pd.e_m * ctx.lp));
      auto radM = radical_of_form(ctx, spM, C, pd, false, srep.beta_aligned,
                                  CK1, lat.Klp);
      auto radm = radical_of_form(ctx, spm, C, pd, true, srep.beta_aligned,
                                  CUm1, U_elp_m);
      if (!(radM.matches_centralizer_form && radM.matches_parahoric_form &&
            radm.matches_parahoric_form))
        ok = false;
      if (!(radM.radical_subgroup->elems() == lat.H_M1->elems())) ok = false;
    } catch (const Error& e) {
      ok = false;
      note = e.what();
    }
    add("radical_identities_and_normal_sylow", ok, false, note);
  } else {
    add("radical_identities_and_normal_sylow", true, true,
        "vacuous: the J/H lattice needs odd r");
  }
  return rep;
}

// ---- counting and the Onn conjecture experiments ----

struct CountReport {
  std::string ring;
  uint32_t N = 0;
  uint32_t r = 0;
  bool full = false;  // full spectrum (N = 2) vs regular part only
  std::map<uint64_t, uint64_t> r_n;  // dim -> count
  uint64_t class_count = 0;
  uint64_t group_order = 0;
};

// Character table of GL_2(F_q): det twists, Steinberg twists, principal
// series and cuspidal characters, all certified by exact orthogonality.
inline std::vector<ClassFunction> gl2_field_table(const GroupContext& ctx) {
  require(ctx.N == 2 && ctx.spec->r == 1, "gl2_field_table wants GL_2(F_q)");
  uint64_t q = ctx.spec->q;
  auto G = full_subgroup(ctx);
  G->ensure_classes();
  auto units_ctx = make_group_context(1, ctx.spec, ctx.cap);
  auto units = full_subgroup(*units_ctx);
  auto unit_chars = abelian_char_group(units);
  const RingTable& t = *ctx.rt;

  auto pack1 = [&](uint32_t code) {
    PackedOps::Codes c{};
    c[0] = code;
    return units_ctx->ops.pack(c);
  };
  auto det_code = [&](uint64_t g) {
    PackedOps::Codes c;
    ctx.ops.unpack(g, c);
    return ctx.ops.det_codes(c);
  };
  std::vector<ClassFunction> out;
  // alpha o det
  std::vector<ClassFunction> det_twists;
  for (auto& alpha : unit_chars) {
    ClassFunction cf{G, std::vector<Cyclo>(G->num_classes())};
    for (uint32_t c = 0; c < G->num_classes(); ++c)
      cf.v[c] = alpha.value(pack1(det_code(G->class_rep(c))));
    det_twists.push_back(cf);
    out.push_back(cf);
  }
  // Steinberg = Ind_B^G(1) - 1, then its det twists
  {
    std::vector<uint64_t> bor;
    PackedOps::Codes c;
    for (auto g : ctx.elems) {
      ctx.ops.unpack(g, c);
      if (c[1 * 2 + 0] == t.zero) bor.push_back(g);
    }
    auto B = subgroup_from_sorted(ctx, std::move(bor));
    ClassFunction st =
        induce_linear(LinearChar::trivial(B), G) - det_twists[0];
    require(is_irreducible(st), "Steinberg character is not irreducible");
    for (auto& tw : det_twists) out.push_back(st.pointwise(tw));
    // principal series Ind_B(alpha (x) beta), alpha != beta
    for (size_t i = 0; i < unit_chars.size(); ++i)
      for (size_t j = i + 1; j < unit_chars.size(); ++j) {
        LinearChar ab{B, lcm_u64(unit_chars[i].mod, unit_chars[j].mod),
                      std::vector<uint32_t>(B->size())};
        for (uint64_t k = 0; k < B->size(); ++k) {
          ctx.ops.unpack(B->elems()[k], c);
          uint64_t ea = unit_chars[i].exp_at(pack1(c[0]));
          uint64_t eb = unit_chars[j].exp_at(pack1(c[3]));
          ab.exps[k] =
              (uint32_t)((ea * (ab.mod / unit_chars[i].mod) +
                          eb * (ab.mod / unit_chars[j].mod)) %
                         ab.mod);
        }
        require(ab.is_multiplicative(), "Borel character not multiplicative");
        ClassFunction ps = induce_linear(ab, G);
        require(is_irreducible(ps), "principal series not irreducible");
        out.push_back(ps);
      }
  }
  // cuspidal characters from regular characters of F_{q^2}^x
  {
    RingPtr E = make_ring(RingKind::galois, ctx.spec->p, 1, 2 * ctx.spec->f);
    auto E_ctx = make_group_context(1, E, ctx.cap);
    auto E_units = full_subgroup(*E_ctx);
    auto E_chars = abelian_char_group(E_units);
    // embedding F_q -> F_{q^2}: image of the generator x is a root of the
    // defining polynomial of F_q inside F_{q^2}
    Fq Fbig = Fq::of(E);
    Fq Fsmall = Fq::of(ctx.spec);
    uint32_t theta_code = 0;
    {
      bool found = false;
      FqPoly def;
      if (ctx.spec->f == 1) {
        // prime field: embedding is c -> c * 1
        found = true;
      } else {
        for (auto cc : ctx.spec->defining) def.push_back(cc);
        for (uint32_t cand = 0; cand < Fbig.q && !found; ++cand) {
          // evaluate def at cand over F_{q^2}
          uint32_t acc = 0;
          for (size_t k = def.size(); k-- > 0;) {
            acc = Fbig.mul(acc, cand);
            acc = Fbig.add(acc, def[k] % ctx.spec->p);  // prime field coeffs
          }
          if (acc == 0) {
            theta_code = cand;
            found = true;
          }
        }
      }
      require(found, "no embedding of F_q into F_{q^2}");
    }
    auto embed = [&](uint32_t small_code) -> uint32_t {
      // small_code is an F_p-polynomial in the F_q generator
      RingElem es = ring_elem_of_code(make_ring(ctx.spec->kind, ctx.spec->p, 1,
                                                ctx.spec->f),
                                      small_code);
      uint32_t acc = 0;
      for (size_t k = es.c.size(); k-- > 0;) {
        acc = Fbig.mul(acc, theta_code);
        acc = Fbig.add(acc, es.c[k] % ctx.spec->p);
      }
      return acc;
    };
    auto E_pack = [&](uint32_t code) {
      PackedOps::Codes c{};
      c[0] = code;
      return E_ctx->ops.pack(c);
    };
    // Frobenius x -> x^q on E-units
    auto frob = [&](uint32_t code) {
      uint32_t acc = code;
      for (uint64_t k = 1; k < q; ++k) acc = Fbig.mul(acc, code);
      return acc;
    };
    // class data of G: distinguish central / unipotent / split / elliptic
    Fq F = Fsmall;
    std::vector<char> used(E_chars.size(), 0);
    for (size_t pi = 0; pi < E_chars.size(); ++pi) {
      if (used[pi]) continue;
      // phi^q
      LinearChar phiq = E_chars[pi];
      for (uint64_t i = 0; i < E_units->size(); ++i) {
        PackedOps::Codes c;
        E_ctx->ops.unpack(E_units->elems()[i], c);
        phiq.exps[i] = E_chars[pi].exp_at(E_pack(frob(c[0])));
      }
      // locate phi^q in the list
      size_t qi = SIZE_MAX;
      for (size_t j = 0; j < E_chars.size(); ++j)
        if (E_chars[j] == phiq) {
          qi = j;
          break;
        }
      require(qi != SIZE_MAX, "Frobenius twist not found");
      if (qi == pi) {
        used[pi] = 1;
        continue;  // not regular: factors through the norm
      }
      used[pi] = used[qi] = 1;
      const LinearChar& phi = E_chars[pi];
      ClassFunction cf{G, std::vector<Cyclo>(G->num_classes())};
      for (uint32_t cl = 0; cl < G->num_classes(); ++cl) {
        uint64_t g = G->class_rep(cl);
        FqMat m{2, std::vector<uint32_t>(4)};
        PackedOps::Codes c;
        ctx.ops.unpack(g, c);
        for (uint32_t k = 0; k < 4; ++k) m.c[k] = c[k];
        FqPoly cp = charpoly_fq(F, m);
        FqPoly mp = minpoly_fq(F, m);
        auto fac = fqpoly_factor_monic(F, cp);
        if (fac.size() == 1 && fac[0].first.size() == 3) {
          // irreducible quadratic: eigenvalue in F_{q^2}
          uint32_t root = 0;
          bool found = false;
          for (uint32_t cand = 0; cand < Fbig.q && !found; ++cand) {
            uint32_t acc = 0;
            for (size_t k = fac[0].first.size(); k-- > 0;) {
              acc = Fbig.mul(acc, cand);
              acc = Fbig.add(acc, embed(fac[0].first[k]));
            }
            if (acc == 0) {
              root = cand;
              found = true;
            }
          }
          require(found, "elliptic eigenvalue not found in F_{q^2}");
          cf.v[cl] = -(phi.value(E_pack(root)) + phi.value(E_pack(frob(root))));
        } else if (fac.size() == 2) {
          cf.v[cl] = Cyclo::zero();  // split semisimple diag(a,b), a != b
        } else {
          uint32_t a = F.neg(fac[0].first[0]);  // the double eigenvalue
          Cyclo val = phi.value(E_pack(embed(a)));
          if (fqpoly_deg(mp) == 1)
            cf.v[cl] = mpq_class((unsigned long)(q - 1)) * val;  // central
          else
            cf.v[cl] = -val;  // central times unipotent
        }
      }
      require(is_irreducible(cf), "cuspidal character not irreducible");
      out.push_back(cf);
    }
  }
  // exact pairwise orthogonality and the sum of squares
  mpz_class sum = 0;
  for (size_t i = 0; i < out.size(); ++i) {
    for (size_t j = i + 1; j < out.size(); ++j)
      require(inner_product_rational(out[i], out[j]) == 0,
              "GL_2(F_q) table: characters not orthogonal");
    sum += out[i].dim().get_num() * out[i].dim().get_num();
  }
  require(sum == mpz_class((unsigned long)ctx.order),
          "GL_2(F_q) table: sum of squares != |G|");
  require(out.size() == G->num_classes(), "GL_2(F_q) table: wrong count");
  return out;
}

struct SpectrumResult {
  std::vector<ClassFunction> irr;
  CountReport report;
};

// Every irreducible of GL_2(o_r): regular characters at each level plus
// det twists of inflations, deduplicated exactly.
inline SpectrumResult gl2_full_spectrum(const GroupContext& ctx) {
  require(ctx.N == 2, "gl2_full_spectrum wants N = 2");
  SpectrumResult res;
  if (ctx.spec->r == 1) {
    res.irr = gl2_field_table(ctx);
  } else {
    // regular part: all regular orbits at level l'
    for (auto& desc : regular_class_reps(2, ctx.spec, ctx.lp)) {
      auto rr = regular_reps(ctx, desc, "auto");
      for (auto& rc : rr.primary.chars) res.irr.push_back(rc.chi);
    }
    // non-regular part: det twists of inflations from G_{r-1}
    auto small_ctx = make_group_context(
        2, make_ring(ctx.spec->kind, ctx.spec->p, ctx.spec->r - 1, ctx.spec->f),
        ctx.cap);
    SpectrumResult small = gl2_full_spectrum(*small_ctx);
    auto units_ctx = make_group_context(1, ctx.spec, ctx.cap);
    auto unit_chars = abelian_char_group(full_subgroup(*units_ctx));
    auto G = full_subgroup(ctx);
    G->ensure_classes();
    std::vector<ClassFunction> twists;
    for (auto& lam : unit_chars) {
      ClassFunction cf{G, std::vector<Cyclo>(G->num_classes())};
      for (uint32_t c = 0; c < G->num_classes(); ++c) {
        PackedOps::Codes cc;
        ctx.ops.unpack(G->class_rep(c), cc);
        uint32_t dc = ctx.ops.det_codes(cc);
        PackedOps::Codes one_c{};
        one_c[0] = dc;
        cf.v[c] = lam.value(units_ctx->ops.pack(one_c));
      }
      twists.push_back(std::move(cf));
    }
    std::vector<ClassFunction> candidates;
    for (auto& pi : small.irr) {
      ClassFunction infl = inflate(pi, ctx);
      for (auto& tw : twists) candidates.push_back(infl.pointwise(tw));
    }
    // exact dedup against the regular part and within the candidates
    for (auto& cand : candidates) {
      bool dup = false;
      for (auto& known : res.irr)
        if (known == cand) {
          dup = true;
          break;
        }
      if (!dup) {
        require(is_irreducible(cand), "spectrum candidate not irreducible");
        res.irr.push_back(cand);
      }
    }
  }
  res.report.ring = ctx.spec->literal();
  res.report.N = 2;
  res.report.r = ctx.spec->r;
  res.report.full = true;
  res.report.group_order = ctx.order;
  res.report.class_count = ctx.class_reps.size();
  mpz_class sum = 0;
  for (auto& chi : res.irr) {
    mpz_class d = chi.dim().get_num();
    res.report.r_n[d.get_ui()] += 1;
    sum += d * d;
  }
  require(sum == mpz_class((unsigned long)ctx.order),
          "full spectrum: sum of dim^2 != |G|");
  require(res.irr.size() == res.report.class_count,
          "full spectrum: count != number of conjugacy classes");
  return res;
}

// Regular-part count report for any N (the spectrum is complete only for
// N = 2; reports label their coverage).
inline CountReport regular_count_report(const GroupContext& ctx) {
  CountReport rep;
  rep.ring = ctx.spec->literal();
  rep.N = ctx.N;
  rep.r = ctx.spec->r;
  rep.full = false;
  rep.group_order = ctx.order;
  rep.class_count = ctx.class_reps.size();
  for (auto& desc : regular_class_reps(ctx.N, ctx.spec, ctx.lp)) {
    auto rr = regular_reps(ctx, desc, "auto");
    for (auto& rc : rr.primary.chars) rep.r_n[rc.dim.get_ui()] += 1;
  }
  return rep;
}

// ---- cross-ring comparison (Onn conjecture (i) at desk scale) ----

struct CompareReport {
  std::string ring1, ring2;
  bool full = false;
  bool class_counts_equal = false;
  bool dim_multisets_equal = false;
  uint64_t classes1 = 0, classes2 = 0;
  std::map<uint64_t, uint64_t> rn1, rn2;
};

inline CompareReport cross_ring_compare(const RingPtr& a, const RingPtr& b,
                                        uint32_t N, uint64_t cap = 10000000) {
  if (a->q != b->q) throw ResidueMismatch("residue fields differ");
  CompareReport rep;
  rep.ring1 = a->literal();
  rep.ring2 = b->literal();
  auto ca = make_group_context(N, a, cap);
  auto cb = make_group_context(N, b, cap);
  rep.classes1 = ca->class_reps.size();
  rep.classes2 = cb->class_reps.size();
  rep.class_counts_equal = rep.classes1 == rep.classes2;
  if (N == 2) {
    rep.full = true;
    rep.rn1 = gl2_full_spectrum(*ca).report.r_n;
    rep.rn2 = gl2_full_spectrum(*cb).report.r_n;
  } else {
    rep.rn1 = regular_count_report(*ca).r_n;
    rep.rn2 = regular_count_report(*cb).r_n;
  }
  rep.dim_multisets_equal = rep.rn1 == rep.rn2;
  return rep;
}

// Regular-only comparison used when the full spectrum is not required.
inline CompareReport cross_ring_compare_regular(const RingPtr& a,
                                                const RingPtr& b, uint32_t N,
                                                uint64_t cap = 10000000) {
  if (a->q != b->q) throw ResidueMismatch("residue fields differ");
  CompareReport rep;
  rep.ring1 = a->literal();
  rep.ring2 = b->literal();
  auto ca = make_group_context(N, a, cap);
  auto cb = make_group_context(N, b, cap);
  rep.classes1 = ca->class_reps.size();
  rep.classes2 = cb->class_reps.size();
  rep.class_counts_equal = rep.classes1 == rep.classes2;
  rep.rn1 = regular_count_report(*ca).r_n;
  rep.rn2 = regular_count_report(*cb).r_n;
  rep.dim_multisets_equal = rep.rn1 == rep.rn2;
  return rep;
}

}  // namespace chainrep

#endif
