#ifndef CHAINREP_PARAHORIC_HPP
#define CHAINREP_PARAHORIC_HPP

#include <cstdint>
#include <vector>

#include "chainrep/charthy.hpp"
#include "chainrep/group.hpp"
#include "chainrep/subquotient.hpp"

namespace chainrep {

// Valuation pattern of an o_r-lattice of matrices: entry (i,j) holds the
// least allowed valuation. Products compose min-plus; everything caps at r.
struct ValPattern {
  uint32_t N = 0;
  uint32_t r = 0;
  std::vector<uint32_t> v;  // row-major, values in [0, r]

  uint32_t& at(uint32_t i, uint32_t j) { return v[i * N + j]; }
  uint32_t at(uint32_t i, uint32_t j) const { return v[i * N + j]; }

  ValPattern mul(const ValPattern& o) const {
    ValPattern c{N, r, std::vector<uint32_t>((size_t)N * N, r)};
    for (uint32_t i = 0; i < N; ++i)
      for (uint32_t j = 0; j < N; ++j) {
        uint32_t best = r;
        for (uint32_t k = 0; k < N; ++k)
          best = std::min(best, std::min(r, at(i, k) + o.at(k, j)));
        c.at(i, j) = best;
      }
    return c;
  }
  ValPattern shifted(uint32_t k) const {  // p^k * this
    ValPattern c = *this;
    for (auto& x : c.v) x = std::min(r, x + k);
    return c;
  }
  uint64_t set_size(uint64_t q) const {
    // number of matrices matching the pattern
    uint64_t n = 1;
    for (auto x : v) n *= pow_u64(q, r - std::min(x, r));
    return n;
  }
  friend bool operator==(const ValPattern& a, const ValPattern& b) = default;
};

// Parahoric data attached to a regular orbit: the minimal parahoric A_min
// from the lambda partition (block upper triangular), and A_max = g_r.
struct ParahoricData {
  OrbitDescriptor desc;
  std::vector<uint32_t> block_start;  // offsets of the lambda blocks
  uint32_t e_m = 1;                   // number of lambda parts
  static constexpr uint32_t e_M = 1;
  ValPattern A_min, P_min;  // patterns
  ValPattern A_max, P_max;

  uint32_t block_of(uint32_t idx) const {
    uint32_t b = 0;
    while (b + 1 < block_start.size() && idx >= block_start[b + 1]) ++b;
    return b;
  }
};

inline ParahoricData parahoric(const GroupContext& ctx, const OrbitDescriptor& desc) {
  if (!desc.regular) throw RegularityViolation("parahoric needs a regular orbit");
  ParahoricData pd;
  pd.desc = desc;
  uint32_t N = ctx.N, r = ctx.spec->r;
  uint32_t off = 0;
  for (auto d : desc.lambda) {
    pd.block_start.push_back(off);
    off += d;
  }
  pd.e_m = (uint32_t)desc.lambda.size();
  pd.A_max = ValPattern{N, r, std::vector<uint32_t>((size_t)N * N, 0)};
  pd.P_max = pd.A_max.shifted(1);
  pd.A_min = ValPattern{N, r, std::vector<uint32_t>((size_t)N * N, 0)};
  pd.P_min = pd.A_min;
  for (uint32_t i = 0; i < N; ++i)
    for (uint32_t j = 0; j < N; ++j) {
      uint32_t bi = pd.block_of(i), bj = pd.block_of(j);
      pd.A_min.at(i, j) = bi <= bj ? 0 : 1;
      pd.P_min.at(i, j) = bi < bj ? 0 : 1;
    }
  // pA = P^e, exhaustively as patterns (and the sets coincide with them)
  ValPattern pe = pd.P_min;
  for (uint32_t k = 1; k < pd.e_m; ++k) pe = pe.mul(pd.P_min);
  require(pe == pd.A_min.shifted(1), "parahoric: p A != P^e as patterns");
  return pd;
}

inline ValPattern pattern_power(const ValPattern& base, uint32_t k) {
  require(k >= 1, "pattern_power: k >= 1");
  ValPattern acc = base;
  for (uint32_t i = 1; i < k; ++i) acc = acc.mul(base);
  return acc;
}

// Membership of x (any matrix over o_r, as packed codes) in a pattern set.
inline bool pattern_contains(const GroupContext& ctx, const ValPattern& pat,
                             uint64_t packed) {
  PackedOps::Codes c;
  ctx.ops.unpack(packed, c);
  for (uint32_t k = 0; k < ctx.N * ctx.N; ++k)
    if (ctx.rt->val[c[k]] < pat.v[k]) return false;
  return true;
}

// U^i = 1 + P^i as a subgroup (i >= 1), built entrywise from the pattern.
inline SubgroupPtr unit_filtration_subgroup(const GroupContext& ctx,
                                            const ValPattern& P, uint32_t i) {
  ValPattern Pi = pattern_power(P, i);
  const RingTable& t = *ctx.rt;
  // per-entry code lists with valuation >= Pi entry
  std::vector<const std::vector<uint32_t>*> lists;
  std::vector<std::vector<uint32_t>> pools(ctx.spec->r + 1);
  for (uint32_t v = 0; v <= ctx.spec->r; ++v)
    for (uint32_t code = 0; code < t.n; ++code)
      if (t.val[code] >= v) pools[v].push_back(code);
  uint64_t total = 1;
  for (uint32_t k = 0; k < ctx.N * ctx.N; ++k) {
    lists.push_back(&pools[std::min(Pi.v[k], ctx.spec->r)]);
    total *= lists.back()->size();
    if (total > 20000000ull) throw DeskScaleExceeded("U^i too large");
  }
  std::vector<uint64_t> members;
  members.reserve(total);
  std::vector<uint32_t> ctr(ctx.N * ctx.N, 0);
  PackedOps::Codes c{};
  for (uint64_t step = 0; step < total; ++step) {
    for (uint32_t k = 0; k < ctx.N * ctx.N; ++k) {
      uint32_t entry = (*lists[k])[ctr[k]];
      if (k % (ctx.N + 1) == 0) entry = t.a(entry, t.one);
      c[k] = entry;
    }
    uint64_t g = ctx.ops.pack(c);
    members.push_back(g);
    for (uint32_t k = 0; k < ctx.N * ctx.N; ++k) {
      if (++ctr[k] < lists[k]->size()) break;
      ctr[k] = 0;
    }
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  for (auto g : members)
    require(ctx.contains(g), "U^i element is not invertible");
  return subgroup_from_sorted(ctx, std::move(members));
}

// U = A^x: invertible elements of the parahoric order.
inline SubgroupPtr parahoric_unit_group(const GroupContext& ctx,
                                        const ValPattern& A) {
  std::vector<uint64_t> members;
  for (auto g : ctx.elems)
    if (pattern_contains(ctx, A, g)) members.push_back(g);
  return subgroup_from_sorted(ctx, std::move(members));
}

// The section-7 subgroup lattice attached to beta (already in canonical
// block position) and its parahoric data.
struct ParahoricLattice {
  SubgroupPtr C;        // centralizer of beta
  SubgroupPtr U_m, U_m1, U_M1;
  SubgroupPtr J_m, J_m1, H_m1;
  SubgroupPtr J_M1, H_M1;
  SubgroupPtr J_mM;
  SubgroupPtr CKlp;     // C K^{l'}
  SubgroupPtr Kl, Klp;  // K^l, K^{l'}
  uint32_t e_m = 1;
};

inline ParahoricLattice parahoric_subgroups(const GroupContext& ctx,
                                            const ParahoricData& pd,
                                            const SubgroupPtr& C) {
  if (ctx.spec->r % 2 == 0)
    throw BadParity("the J/H lattice requires odd r");
  ParahoricLattice lat;
  lat.e_m = pd.e_m;
  uint32_t lp = ctx.lp, l = ctx.l;
  lat.C = C;
  lat.Kl = congruence_kernel(ctx, l);
  lat.Klp = congruence_kernel(ctx, lp);
  lat.U_m = parahoric_unit_group(ctx, pd.A_min);
  lat.U_m1 = unit_filtration_subgroup(ctx, pd.P_min, 1);
  lat.U_M1 = congruence_kernel(ctx, 1);
  auto CUm1 = intersect(*C, *lat.U_m1);
  auto CK1 = intersect(*C, *lat.U_M1);
  auto U_m_elp = unit_filtration_subgroup(ctx, pd.P_min, pd.e_m * lp);
  auto U_m_elp1 = unit_filtration_subgroup(ctx, pd.P_min, pd.e_m * lp + 1);
  lat.J_m = product_set(*intersect(*C, *lat.U_m), *U_m_elp);
  lat.J_m1 = product_set(*CUm1, *U_m_elp);
  lat.H_m1 = product_set(*CUm1, *U_m_elp1);
  lat.J_M1 = product_set(*CK1, *lat.Klp);
  lat.H_M1 = product_set(*CK1, *lat.Kl);
  lat.J_mM = product_set(*CUm1, *lat.Klp);
  lat.CKlp = product_set(*C, *lat.Klp);

  // structural facts from the subgroup diagram
  require(is_subgroup_of(*lat.H_M1, *lat.H_m1), "H_m^1 does not contain H_M^1");
  require(is_subgroup_of(*lat.J_m1, *lat.J_mM), "J_mM does not contain J_m^1");
  require(is_subgroup_of(*lat.J_M1, *lat.J_mM), "J_mM does not contain J_M^1");
  require(is_normal_in(*lat.J_M1, *lat.CKlp), "J_M^1 not normal in CK^{l'}");
  // |U_m/U_m^1| = prod |GL_{d_i}(F_q)|^{m_i}
  uint64_t expect = 1;
  for (auto& f : pd.desc.factors) {
    uint64_t g1 = 1, q = ctx.spec->q;
    uint64_t qd = pow_u64(q, f.deg);
    for (uint32_t i = 0; i < f.deg; ++i) g1 *= (qd - pow_u64(q, i));
    for (uint32_t i = 0; i < f.mult; ++i) expect *= g1;
  }
  require(lat.U_m->size() / lat.U_m1->size() == expect,
          "U_m/U_m^1 has the wrong order");
  return lat;
}

// Conjugate beta so that its reduction sits in the standard parabolic with
// canonical companion diagonal blocks (searched over iota-lifted GL_N(F_q)).
inline Mat align_beta_to_parahoric(const GroupContext& ctx,
                                   const OrbitDescriptor& desc) {
  if (!desc.regular) throw RegularityViolation("alignment needs regular beta");
  uint32_t N = ctx.N;
  Fq F = Fq::of(ctx.spec);
  // target predicate on the reduction
  std::vector<uint32_t> block_start;
  {
    uint32_t off = 0;
    for (auto& f : desc.factors)
      for (uint32_t i = 0; i < f.mult; ++i) {
        block_start.push_back(off);
        off += f.deg;
      }
  }
  std::vector<FqPoly> block_poly;
  for (auto& f : desc.factors)
    for (uint32_t i = 0; i < f.mult; ++i) block_poly.push_back(f.f);
  auto block_of = [&](uint32_t idx) {
    uint32_t b = 0;
    while (b + 1 < block_start.size() && idx >= block_start[b + 1]) ++b;
    return b;
  };
  auto in_form = [&](const FqMat& m) -> bool {
    for (uint32_t i = 0; i < N; ++i)
      for (uint32_t j = 0; j < N; ++j) {
        uint32_t bi = block_of(i), bj = block_of(j);
        if (bi > bj && m.at(i, j) != 0) return false;
        if (bi == bj) {
          // companion block of block_poly[bi]
          uint32_t base = block_start[bi];
          uint32_t d = (uint32_t)block_poly[bi].size() - 1;
          uint32_t ii = i - base, jj = j - base;
          uint32_t want;
          if (jj == d - 1)
            want = F.neg(block_poly[bi][ii]);
          else
            want = (ii == jj + 1) ? F.t->one : F.t->zero;
          if (m.at(i, j) != want) return false;
        }
      }
    return true;
  };
  FqMat bbar = fqmat_of(desc.beta);
  auto level1 = make_group_context(N, make_ring(ctx.spec->kind, ctx.spec->p, 1,
                                                ctx.spec->f),
                                   ctx.cap);
  // identity first, then ascending scan
  std::vector<uint64_t> order;
  order.push_back(level1->one());
  for (auto g : level1->elems)
    if (g != level1->one()) order.push_back(g);
  for (auto g : order) {
    Mat g1 = level1->to_mat(g);
    FqMat gm{N, std::vector<uint32_t>((size_t)N * N)};
    for (uint32_t k = 0; k < N * N; ++k) gm.c[k] = (uint32_t)ring_code(g1.e[k]);
    FqMat gmi{N, std::vector<uint32_t>((size_t)N * N)};
    {
      Mat inv1 = level1->to_mat(level1->inv(g));
      for (uint32_t k = 0; k < N * N; ++k)
        gmi.c[k] = (uint32_t)ring_code(inv1.e[k]);
    }
    FqMat conj = fqmat_mul(F, fqmat_mul(F, gm, bbar), gmi);
    if (!in_form(conj)) continue;
    // Teichmuller lift of g entrywise
    Mat lift = mat_zero(N, ctx.spec);
    for (uint32_t k = 0; k < N * N; ++k)
      lift.e[k] = ring_elem_of_code(
          ctx.spec, ctx.rt->teich[(uint32_t)ring_code(g1.e[k])]);
    Mat lift_inv = mat_inverse(lift);
    return mat_mul(mat_mul(lift, desc.beta), lift_inv);
  }
  throw CertificationFailure("no conjugate puts beta in canonical block form");
}

struct SylowCheckReport {
  Mat beta_aligned;
  bool normal = false;
  bool p_group = false;
  bool index_coprime = false;
  uint64_t index = 0;
  bool pass() const { return normal && p_group && index_coprime; }
};

// Lemma: after aligning beta, J_mM is a normal p-Sylow subgroup of CK^{l'}.
inline SylowCheckReport normal_sylow_check(const GroupContext& ctx,
                                           const OrbitDescriptor& desc) {
  if (ctx.spec->r % 2 == 0) throw BadParity("normal_sylow_check: r must be odd");
  SylowCheckReport rep;
  rep.beta_aligned = align_beta_to_parahoric(ctx, desc);
  OrbitDescriptor adesc = factor_mod_p(rep.beta_aligned);
  ParahoricData pd = parahoric(ctx, adesc);
  auto C = centralizer(ctx, rep.beta_aligned);
  ParahoricLattice lat = parahoric_subgroups(ctx, pd, C);
  rep.normal = is_normal_in(*lat.J_mM, *lat.CKlp);
  rep.p_group = p_part(lat.J_mM->size(), ctx.spec->p) == lat.J_mM->size();
  rep.index = lat.CKlp->size() / lat.J_mM->size();
  rep.index_coprime = rep.index % ctx.spec->p != 0;
  return rep;
}

}  // namespace chainrep

#endif
