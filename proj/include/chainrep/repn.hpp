#ifndef CHAINREP_REPN_HPP
#define CHAINREP_REPN_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "chainrep/charthy.hpp"
#include "chainrep/subquotient.hpp"

namespace chainrep {

// Monomial matrix: one nonzero root of unity per column.
struct MonoMat {
  uint32_t d = 0;
  uint64_t mod = 1;
  std::vector<uint32_t> row;  // row index of the nonzero entry, per column
  std::vector<uint32_t> exp;  // exponent of zeta_mod, per column

  static MonoMat id(uint32_t d, uint64_t mod) {
    MonoMat m{d, mod, std::vector<uint32_t>(d), std::vector<uint32_t>(d, 0)};
    for (uint32_t j = 0; j < d; ++j) m.row[j] = j;
    return m;
  }
  MonoMat mul(const MonoMat& b) const {  // this * b
    MonoMat c{d, lcm_u64(mod, b.mod), std::vector<uint32_t>(d),
              std::vector<uint32_t>(d)};
    uint64_t fa = c.mod / mod, fb = c.mod / b.mod;
    for (uint32_t j = 0; j < d; ++j) {
      uint32_t mid = b.row[j];
      c.row[j] = row[mid];
      c.exp[j] = (uint32_t)((exp[mid] * fa + b.exp[j] * fb) % c.mod);
    }
    return c;
  }
  MonoMat inverse() const {
    MonoMat c{d, mod, std::vector<uint32_t>(d), std::vector<uint32_t>(d)};
    for (uint32_t j = 0; j < d; ++j) {
      c.row[row[j]] = j;
      c.exp[row[j]] = (uint32_t)((mod - exp[j]) % mod);
    }
    return c;
  }
  Cyclo trace() const {
    Cyclo t;
    for (uint32_t j = 0; j < d; ++j)
      if (row[j] == j) t += Cyclo::root(mod, exp[j]);
    return t;
  }
  friend bool operator==(const MonoMat& a, const MonoMat& b) {
    if (a.d != b.d || a.row != b.row) return false;
    uint64_t M = lcm_u64(a.mod, b.mod);
    for (uint32_t j = 0; j < a.d; ++j)
      if ((a.exp[j] * (M / a.mod)) % M != (b.exp[j] * (M / b.mod)) % M)
        return false;
    return true;
  }
};

// Small dense matrix over exact cyclotomic values.
struct CMat {
  uint32_t d = 0;
  std::vector<Cyclo> e;

  static CMat zero(uint32_t d) { return {d, std::vector<Cyclo>((size_t)d * d)}; }
  static CMat id(uint32_t d) {
    CMat m = zero(d);
    for (uint32_t i = 0; i < d; ++i) m.at(i, i) = Cyclo::one();
    return m;
  }
  Cyclo& at(uint32_t i, uint32_t j) { return e[i * d + j]; }
  const Cyclo& at(uint32_t i, uint32_t j) const { return e[i * d + j]; }

  CMat mul(const CMat& b) const {
    CMat c = zero(d);
    for (uint32_t i = 0; i < d; ++i)
      for (uint32_t k = 0; k < d; ++k) {
        if (at(i, k).is_zero()) continue;
        for (uint32_t j = 0; j < d; ++j) c.at(i, j) += at(i, k) * b.at(k, j);
      }
    return c;
  }
  // this * monomial
  CMat mul_mono(const MonoMat& b) const {
    CMat c = zero(d);
    for (uint32_t j = 0; j < d; ++j) {
      Cyclo v = Cyclo::root(b.mod, b.exp[j]);
      for (uint32_t i = 0; i < d; ++i) c.at(i, j) = at(i, b.row[j]) * v;
    }
    return c;
  }
  // monomial * this
  static CMat mono_mul(const MonoMat& a, const CMat& b) {
    CMat c = zero(b.d);
    for (uint32_t k = 0; k < b.d; ++k) {
      Cyclo v = Cyclo::root(a.mod, a.exp[k]);
      for (uint32_t j = 0; j < b.d; ++j) c.at(a.row[k], j) = v * b.at(k, j);
    }
    return c;
  }
  CMat scaled(const Cyclo& s) const {
    CMat c = *this;
    for (auto& x : c.e) x *= s;
    return c;
  }
  Cyclo trace() const {
    Cyclo t;
    for (uint32_t i = 0; i < d; ++i) t += at(i, i);
    return t;
  }
  Cyclo trace_mul_mono(const MonoMat& b) const {
    // tr(this * b) = sum_j this[j][b.row[j]] * val_j
    Cyclo t;
    for (uint32_t j = 0; j < d; ++j) {
      const Cyclo& c = at(j, b.row[j]);
      if (!c.is_zero()) t += c * Cyclo::root(b.mod, b.exp[j]);
    }
    return t;
  }
  CMat pow(uint64_t n) const {
    CMat acc = id(d), b = *this;
    while (n) {
      if (n & 1) acc = acc.mul(b);
      b = b.mul(b);
      n >>= 1;
    }
    return acc;
  }
  Cyclo det() const {
    require(d <= 4, "CMat::det supports d <= 4");
    std::function<Cyclo(std::vector<uint32_t>&, uint32_t)> rec =
        [&](std::vector<uint32_t>& cols, uint32_t r) -> Cyclo {
      if (cols.size() == 1) return at(r, cols[0]);
      Cyclo acc;
      for (size_t k = 0; k < cols.size(); ++k) {
        if (at(r, cols[k]).is_zero()) continue;
        std::vector<uint32_t> rest;
        for (size_t j = 0; j < cols.size(); ++j)
          if (j != k) rest.push_back(cols[j]);
        Cyclo term = at(r, cols[k]) * rec(rest, r + 1);
        if (k % 2) term = -term;
        acc += term;
      }
      return acc;
    };
    std::vector<uint32_t> cols(d);
    for (uint32_t j = 0; j < d; ++j) cols[j] = j;
    return rec(cols, 0);
  }
  bool is_zero() const {
    for (auto& x : e)
      if (!x.is_zero()) return false;
    return true;
  }
  // If this is scalar * identity, return the scalar.
  std::optional<Cyclo> as_scalar() const {
    for (uint32_t i = 0; i < d; ++i)
      for (uint32_t j = 0; j < d; ++j)
        if (i != j && !at(i, j).is_zero()) return std::nullopt;
    for (uint32_t i = 1; i < d; ++i)
      if (!(at(i, i) == at(0, 0))) return std::nullopt;
    return at(0, 0);
  }
  friend bool operator==(const CMat& a, const CMat& b) {
    for (size_t i = 0; i < a.e.size(); ++i)
      if (!(a.e[i] == b.e[i])) return false;
    return true;
  }
};

// Multiplicative inverse in Q(zeta_L) via the multiplication matrix in the
// power basis (linear solve over Q).
inline Cyclo cyclo_inverse(const Cyclo& z) {
  uint64_t L = z.conductor();
  const auto& tab = detail::cyclo_table(L);
  uint64_t deg = tab.deg;
  // matrix of multiplication by z: column k = canonical of z * zeta^k
  std::vector<std::vector<mpq_class>> M(deg, std::vector<mpq_class>(deg));
  for (uint64_t k = 0; k < deg; ++k) {
    auto col = (z * Cyclo::root(L, k)).canonical_at(L);
    for (uint64_t i = 0; i < deg; ++i) M[i][k] = col[i];
  }
  // solve M x = e_0
  std::vector<mpq_class> rhs(deg, 0);
  rhs[0] = 1;
  for (uint64_t col = 0, row = 0; col < deg && row < deg; ++col) {
    uint64_t piv = row;
    while (piv < deg && M[piv][col] == 0) ++piv;
    require(piv < deg, "cyclo_inverse: singular (zero divisor?)");
    std::swap(M[piv], M[row]);
    std::swap(rhs[piv], rhs[row]);
    mpq_class inv = 1 / M[row][col];
    for (uint64_t j = col; j < deg; ++j) M[row][j] *= inv;
    rhs[row] *= inv;
    for (uint64_t i = 0; i < deg; ++i) {
      if (i == row || M[i][col] == 0) continue;
      mpq_class c = M[i][col];
      for (uint64_t j = col; j < deg; ++j) M[i][j] -= c * M[row][j];
      rhs[i] -= c * rhs[row];
    }
    ++row;
  }
  Cyclo out;
  for (uint64_t k = 0; k < deg; ++k)
    if (rhs[k] != 0) out += rhs[k] * Cyclo::root(L, k);
  require((z * out) == Cyclo::one(), "cyclo_inverse: verification failed");
  return out;
}

// Induced representation Ind_W^J(theta), theta linear, as monomial matrices
// on the left cosets of W in J.
struct MonomialRep {
  SubgroupPtr J, W;
  LinearChar theta;  // on W
  CosetTable cosets; // of W in J
  uint32_t d = 0;

  static MonomialRep make(const SubgroupPtr& J, const SubgroupPtr& W,
                          const LinearChar& theta) {
    require(theta.base.get() == W.get(), "MonomialRep: theta must live on W");
    MonomialRep r;
    r.J = J;
    r.W = W;
    r.theta = theta;
    r.cosets = coset_table(*J, *W);
    r.d = (uint32_t)r.cosets.num();
    return r;
  }

  MonoMat eval(uint64_t g) const {
    const GroupContext& ctx = J->ctx();
    MonoMat m{d, theta.mod, std::vector<uint32_t>(d), std::vector<uint32_t>(d)};
    for (uint32_t j = 0; j < d; ++j) {
      uint64_t gx = ctx.mul(g, cosets.reps[j]);
      uint32_t i = cosets.coset(gx);
      uint64_t w = ctx.mul(ctx.inv(cosets.reps[i]), gx);
      m.row[j] = i;
      m.exp[j] = theta.exp_at(w);
    }
    return m;
  }
  Cyclo trace(uint64_t g) const { return eval(g).trace(); }

  ClassFunction character() const {
    J->ensure_classes();
    ClassFunction cf{J, std::vector<Cyclo>(J->num_classes())};
    for (uint32_t c = 0; c < J->num_classes(); ++c)
      cf.v[c] = trace(J->class_rep(c));
    return cf;
  }

  // representation property on generators x everything (implies the rest)
  bool verify_multiplicative() const {
    const GroupContext& ctx = J->ctx();
    for (auto g : J->gens()) {
      MonoMat mg = eval(g);
      for (auto h : J->elems()) {
        MonoMat prod = mg.mul(eval(h));
        if (!(prod == eval(ctx.mul(g, h)))) return false;
      }
    }
    return true;
  }
};

// An irreducible representation of S restricting to a monomial model on a
// normal subgroup J, built by normalized intertwiners over the abelian
// quotient S/J.
struct ExtendedRep {
  SubgroupPtr S, J;
  MonomialRep eta;
  CosetTable cosets;                     // of J in S
  std::vector<uint64_t> gen_elems;       // quotient generator lifts
  std::vector<uint64_t> gen_orders;      // orders of the generator cosets
  std::vector<CMat> gen_T;               // normalized intertwiners
  std::vector<std::vector<uint32_t>> word;  // per coset id: exponent tuple
  std::vector<uint64_t> word_rep;        // canonical lift per coset id
  std::vector<CMat> word_T;              // cached T product per coset id

  uint32_t d() const { return eta.d; }

  CMat eval(uint64_t s) const {
    const GroupContext& ctx = S->ctx();
    uint32_t q = cosets.coset(s);
    uint64_t j = ctx.mul(ctx.inv(word_rep[q]), s);
    return word_T[q].mul_mono(eta.eval(j));
  }
  Cyclo trace(uint64_t s) const {
    const GroupContext& ctx = S->ctx();
    uint32_t q = cosets.coset(s);
    uint64_t j = ctx.mul(ctx.inv(word_rep[q]), s);
    MonoMat mj = eta.eval(j);
    Cyclo t;
    const CMat& T = word_T[q];
    for (uint32_t col = 0; col < eta.d; ++col) {
      const Cyclo& c = T.at(col, mj.row[col]);
      if (!c.is_zero()) t += c * Cyclo::root(mj.mod, mj.exp[col]);
    }
    return t;
  }
  ClassFunction character() const {
    S->ensure_classes();
    ClassFunction cf{S, std::vector<Cyclo>(S->num_classes())};
    for (uint32_t c = 0; c < S->num_classes(); ++c)
      cf.v[c] = trace(S->class_rep(c));
    return cf;
  }
};

namespace detail {

// Schur-average intertwiner T with eta(c j c^{-1}) T = T eta(j), nonzero.
inline CMat schur_intertwiner(const MonomialRep& eta, uint64_t c) {
  const GroupContext& ctx = eta.J->ctx();
  uint32_t d = eta.d;
  uint64_t cinv = ctx.inv(c);
  uint64_t mod = eta.theta.mod;
  for (uint32_t u = 0; u < d; ++u)
    for (uint32_t v = 0; v < d; ++v) {
      // T = (1/|J|) sum_j eta(c j c^{-1}) E_{uv} eta(j)^{-1}
      std::vector<std::vector<int64_t>> counts((size_t)d * d,
                                               std::vector<int64_t>(mod, 0));
      for (auto j : eta.J->elems()) {
        uint64_t cjc = ctx.mul(ctx.mul(c, j), cinv);
        MonoMat A = eta.eval(cjc);
        MonoMat Binv = eta.eval(j).inverse();
        // (A E_{uv} Binv)[s][t] = A[s][u] * Binv[v][t]
        // A column u: nonzero at row A.row[u] with exp A.exp[u]
        // Binv row v: columns t with Binv.row[t] == v
        uint32_t s = A.row[u];
        for (uint32_t t = 0; t < d; ++t) {
          if (Binv.row[t] != v) continue;
          uint32_t e = (uint32_t)((A.exp[u] + Binv.exp[t]) % mod);
          counts[(size_t)s * d + t][e]++;
        }
      }
      CMat T = CMat::zero(d);
      bool nonzero = false;
      for (uint32_t s = 0; s < d; ++s)
        for (uint32_t t = 0; t < d; ++t) {
          Cyclo acc;
          for (uint32_t e = 0; e < mod; ++e) {
            int64_t n = counts[(size_t)s * d + t][e];
            if (n) acc += mpq_class((long)n) * Cyclo::root(mod, e);
          }
          acc.scale(mpq_class(1, (unsigned long)eta.J->size()));
          if (!acc.is_zero()) nonzero = true;
          T.at(s, t) = std::move(acc);
        }
      if (nonzero) return T;
    }
  throw ExtensionNormalizationFailed("no nonzero intertwiner from any seed");
}

// Normalize an intertwiner so that T^m = eta(c^m): kill the free scalar via
// the determinant (gcd(dim, m) = 1 in all our uses), then divide by the
// first m-th root of the remaining root of unity.
inline CMat normalize_intertwiner(const MonomialRep& eta, uint64_t c, uint64_t m,
                                  CMat T0) {
  const GroupContext& ctx = eta.J->ctx();
  uint32_t d = eta.d;
  uint64_t cm = ctx.one();
  for (uint64_t k = 0; k < m; ++k) cm = ctx.mul(cm, c);
  MonoMat target = eta.eval(cm);
  auto discrepancy = [&](const CMat& T) -> Cyclo {
    CMat M = T.pow(m).mul_mono(target.inverse());
    auto s = M.as_scalar();
    require(s.has_value(), "intertwiner power is not scalar (Schur failure)");
    return *s;
  };
  Cyclo mu = discrepancy(T0);
  require(!mu.is_zero(), "intertwiner is singular");
  int64_t a, b;
  int64_t g = xgcd((int64_t)m, (int64_t)d, a, b);
  require(g == 1, "normalize_intertwiner: gcd(dim, order) != 1");
  // T0 = z * T_true with z^m = mu and det(T0) = z^d * (root of unity).
  // z^(am+bd) = z, so dividing by mu^a det(T0)^b leaves a root of unity.
  Cyclo det0 = T0.det();
  require(!det0.is_zero(), "intertwiner determinant vanishes");
  auto cyclo_int_pow = [](const Cyclo& x, int64_t n) -> Cyclo {
    if (n >= 0) return x.pow((uint64_t)n);
    return cyclo_inverse(x).pow((uint64_t)(-n));
  };
  Cyclo z_est = cyclo_int_pow(mu, a) * cyclo_int_pow(det0, b);
  CMat T1 = T0.scaled(cyclo_inverse(z_est));
  Cyclo mu1 = discrepancy(T1);
  auto root = mu1.as_root_of_unity();
  if (!root)
    throw ExtensionNormalizationFailed("residual scalar is not a root of unity");
  auto [M1, k1] = *root;
  // first s with s^m = zeta_{M1}^{k1}
  Cyclo s_val;
  bool found = false;
  for (uint64_t t = 0; t < M1; ++t)
    if ((t * m) % M1 == k1) {
      s_val = Cyclo::root(M1, t);
      found = true;
      break;
    }
  if (!found) s_val = Cyclo::root(M1 * m, k1);  // enlarged conductor root
  CMat T = T1.scaled(cyclo_inverse(s_val));
  CMat check = T.pow(m).mul_mono(target.inverse());
  auto sc = check.as_scalar();
  require(sc && *sc == Cyclo::one(), "normalization did not land on eta(c^m)");
  return T;
}

}  // namespace detail

// Extend an irreducible monomial model on normal J to all of S (S/J abelian).
inline ExtendedRep extend_monomial(const MonomialRep& eta, const SubgroupPtr& S) {
  ExtendedRep ext;
  ext.S = S;
  ext.J = eta.J;
  ext.eta = eta;
  const GroupContext& ctx = S->ctx();
  require(is_normal_in(*eta.J, *S), "extend_monomial: J not normal in S");
  ext.cosets = coset_table(*S, *eta.J);
  uint64_t nq = ext.cosets.num();

  // quotient generators forming a chain with unique exponent words
  std::vector<uint32_t> covered(nq, 0);
  uint32_t idc = ext.cosets.coset(ctx.one());
  covered[idc] = 1;
  ext.word.assign(nq, {});
  ext.word_rep.assign(nq, ctx.one());
  ext.word[idc] = {};
  uint64_t ncov = 1;
  while (ncov < nq) {
    uint32_t fresh = UINT32_MAX;
    for (uint32_t q = 0; q < nq; ++q)
      if (!covered[q]) {
        fresh = q;
        break;
      }
    uint64_t c = ext.cosets.reps[fresh];
    // order of the coset c in S/J
    uint64_t ord = 1;
    {
      uint64_t x = c;
      while (!eta.J->contains(x)) {
        x = ctx.mul(x, c);
        ++ord;
      }
    }
    // abelianness of the quotient (generator against previous ones)
    for (auto prev : ext.gen_elems) {
      uint64_t comm = ctx.mul(ctx.mul(c, prev), ctx.mul(ctx.inv(c), ctx.inv(prev)));
      require(eta.J->contains(comm), "extend_monomial: quotient not abelian");
    }
    uint32_t gi = (uint32_t)ext.gen_elems.size();
    ext.gen_elems.push_back(c);
    ext.gen_orders.push_back(ord);
    // extend words: new element words (a_1..a_gi..) over existing
    std::vector<uint32_t> base_ids;
    for (uint32_t q = 0; q < nq; ++q)
      if (covered[q]) base_ids.push_back(q);
    for (uint64_t a = 1; a < ord; ++a) {
      uint64_t cpow = ctx.one();
      for (uint64_t k = 0; k < a; ++k) cpow = ctx.mul(cpow, c);
      for (auto q : base_ids) {
        uint64_t lift = ctx.mul(cpow, ext.word_rep[q]);
        uint32_t nqid = ext.cosets.coset(lift);
        if (!covered[nqid]) {
          covered[nqid] = 1;
          ++ncov;
          auto w = ext.word[q];
          w.resize(gi + 1, 0);
          w[gi] = (uint32_t)a;
          ext.word[nqid] = w;
          ext.word_rep[nqid] = lift;
        }
      }
    }
  }
  for (auto& w : ext.word) w.resize(ext.gen_elems.size(), 0);

  // normalized intertwiner per generator
  for (size_t i = 0; i < ext.gen_elems.size(); ++i) {
    CMat T0 = detail::schur_intertwiner(eta, ext.gen_elems[i]);
    CMat T = detail::normalize_intertwiner(eta, ext.gen_elems[i],
                                           ext.gen_orders[i], std::move(T0));
    ext.gen_T.push_back(std::move(T));
  }

  // exact intertwining on generators of J (suffices by multiplicativity)
  auto check_intertwine = [&](const std::vector<CMat>& Ts) -> bool {
    for (size_t i = 0; i < ext.gen_elems.size(); ++i) {
      uint64_t c = ext.gen_elems[i];
      for (auto j : eta.J->gens()) {
        CMat lhs = Ts[i].mul_mono(eta.eval(j));
        CMat rhs = CMat::mono_mul(eta.eval(ctx.conj(c, j)), Ts[i]);
        if (!(lhs == rhs)) return false;
      }
    }
    return true;
  };
  require(check_intertwine(ext.gen_T), "intertwining property failed");

  // word products + quotient relation check, with torsor fallback
  auto build_words = [&](const std::vector<CMat>& Ts) {
    std::vector<CMat> wt(nq);
    for (uint32_t q = 0; q < nq; ++q) {
      CMat acc = CMat::id(eta.d);
      // product in descending generator order matches word_rep construction
      for (size_t gi = ext.gen_elems.size(); gi-- > 0;)
        for (uint32_t a = 0; a < ext.word[q][gi]; ++a) acc = acc.mul(Ts[gi]);
      wt[q] = acc;
    }
    return wt;
  };
  auto relations_ok = [&](const std::vector<CMat>& wt) -> bool {
    for (uint32_t q1 = 0; q1 < nq; ++q1)
      for (uint32_t q2 = 0; q2 < nq; ++q2) {
        uint64_t prod = ctx.mul(ext.word_rep[q1], ext.word_rep[q2]);
        uint32_t q3 = ext.cosets.coset(prod);
        uint64_t j0 = ctx.mul(ctx.inv(ext.word_rep[q3]), prod);
        CMat lhs = wt[q1].mul(wt[q2]);
        CMat rhs = wt[q3].mul_mono(eta.eval(j0));
        if (!(lhs == rhs)) return false;
      }
    return true;
  };
  ext.word_T = build_words(ext.gen_T);
  if (!relations_ok(ext.word_T)) {
    // search the finite torsor of scalar retunings zeta_{m_i}
    std::vector<uint64_t> radix = ext.gen_orders;
    uint64_t total = 1;
    for (auto m : radix) total *= m;
    bool fixed = false;
    for (uint64_t idx = 1; idx < total && !fixed; ++idx) {
      uint64_t t = idx;
      std::vector<CMat> Ts = ext.gen_T;
      for (size_t i = 0; i < radix.size(); ++i) {
        uint64_t a = t % radix[i];
        t /= radix[i];
        if (a) Ts[i] = Ts[i].scaled(Cyclo::root(radix[i], a));
      }
      auto wt = build_words(Ts);
      if (relations_ok(wt)) {
        ext.gen_T = std::move(Ts);
        ext.word_T = std::move(wt);
        fixed = true;
      }
    }
    if (!fixed)
      throw ExtensionNormalizationFailed(
          "no scalar tuple satisfies the quotient relations");
  }
  return ext;
}

}  // namespace chainrep

#endif
