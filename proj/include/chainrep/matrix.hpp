#ifndef CHAINREP_MATRIX_HPP
#define CHAINREP_MATRIX_HPP

#include <array>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "chainrep/poly.hpp"
#include "chainrep/ring.hpp"

namespace chainrep {

// Dense N x N matrix over o_r, row-major.
struct Mat {
  uint32_t N = 0;
  RingPtr spec;
  std::vector<RingElem> e;

  RingElem& at(uint32_t i, uint32_t j) { return e[i * N + j]; }
  const RingElem& at(uint32_t i, uint32_t j) const { return e[i * N + j]; }

  friend bool operator==(const Mat& a, const Mat& b) {
    return a.N == b.N && *a.spec == *b.spec && a.e == b.e;
  }
  friend bool operator!=(const Mat& a, const Mat& b) { return !(a == b); }
};

inline Mat mat_zero(uint32_t N, const RingPtr& s) {
  Mat m{N, s, std::vector<RingElem>((size_t)N * N, ring_zero(s))};
  return m;
}
inline Mat mat_identity(uint32_t N, const RingPtr& s) {
  Mat m = mat_zero(N, s);
  for (uint32_t i = 0; i < N; ++i) m.at(i, i) = ring_one(s);
  return m;
}

inline void check_shape(const Mat& a, const Mat& b) {
  if (!(*a.spec == *b.spec)) throw SpecMismatch("matrices over different rings");
  if (a.N != b.N) throw ShapeMismatch("matrix sizes differ");
}

inline Mat mat_add(const Mat& a, const Mat& b) {
  check_shape(a, b);
  Mat c = a;
  for (size_t i = 0; i < c.e.size(); ++i) c.e[i] = ring_add(c.e[i], b.e[i]);
  return c;
}
inline Mat mat_neg(const Mat& a) {
  Mat c = a;
  for (auto& x : c.e) x = ring_neg(x);
  return c;
}
inline Mat mat_sub(const Mat& a, const Mat& b) { return mat_add(a, mat_neg(b)); }

inline Mat mat_mul(const Mat& a, const Mat& b) {
  check_shape(a, b);
  Mat c = mat_zero(a.N, a.spec);
  for (uint32_t i = 0; i < a.N; ++i)
    for (uint32_t k = 0; k < a.N; ++k) {
      const RingElem& aik = a.at(i, k);
      if (ring_is_zero(aik)) continue;
      for (uint32_t j = 0; j < a.N; ++j)
        c.at(i, j) = ring_add(c.at(i, j), ring_mul(aik, b.at(k, j)));
    }
  return c;
}

// Additive commutator AB - BA.
inline Mat mat_commutator_additive(const Mat& a, const Mat& b) {
  return mat_sub(mat_mul(a, b), mat_mul(b, a));
}

inline Mat mat_scale(const RingElem& s, const Mat& a) {
  Mat c = a;
  for (auto& x : c.e) x = ring_mul(s, x);
  return c;
}

inline RingElem trace(const Mat& a) {
  RingElem t = ring_zero(a.spec);
  for (uint32_t i = 0; i < a.N; ++i) t = ring_add(t, a.at(i, i));
  return t;
}

namespace detail {
inline RingElem det_rec(const Mat& a, std::vector<uint32_t> cols, uint32_t row) {
  if (cols.size() == 1) return a.at(row, cols[0]);
  RingElem acc = ring_zero(a.spec);
  for (size_t k = 0; k < cols.size(); ++k) {
    std::vector<uint32_t> rest;
    for (size_t j = 0; j < cols.size(); ++j)
      if (j != k) rest.push_back(cols[j]);
    RingElem minor = det_rec(a, rest, row + 1);
    RingElem term = ring_mul(a.at(row, cols[k]), minor);
    acc = (k % 2 == 0) ? ring_add(acc, term) : ring_sub(acc, term);
  }
  return acc;
}
}  // namespace detail

inline RingElem det(const Mat& a) {
  std::vector<uint32_t> cols(a.N);
  for (uint32_t j = 0; j < a.N; ++j) cols[j] = j;
  return detail::det_rec(a, cols, 0);
}

// Inverse via the adjugate; requires det to be a unit.
inline Mat mat_inverse(const Mat& a) {
  RingElem d = det(a);
  RingElem dinv = invert(d);
  Mat adj = mat_zero(a.N, a.spec);
  for (uint32_t i = 0; i < a.N; ++i)
    for (uint32_t j = 0; j < a.N; ++j) {
      // cofactor C_ji
      Mat minor = mat_zero(a.N - 1, a.spec);
      if (a.N == 1) {
        adj.at(0, 0) = ring_one(a.spec);
        continue;
      }
      uint32_t mi = 0;
      for (uint32_t i2 = 0; i2 < a.N; ++i2) {
        if (i2 == j) continue;
        uint32_t mj = 0;
        for (uint32_t j2 = 0; j2 < a.N; ++j2) {
          if (j2 == i) continue;
          minor.at(mi, mj) = a.at(i2, j2);
          ++mj;
        }
        ++mi;
      }
      RingElem cof = det(minor);
      if ((i + j) % 2) cof = ring_neg(cof);
      adj.at(i, j) = cof;
    }
  return mat_scale(dinv, adj);
}

inline Mat mat_reduce(const Mat& a, uint32_t s) {
  RingPtr target = make_ring(a.spec->kind, a.spec->p, s, a.spec->f);
  Mat c = mat_zero(a.N, target);
  for (size_t i = 0; i < a.e.size(); ++i) c.e[i] = reduce(a.e[i], s);
  return c;
}
inline Mat mat_lift(const Mat& a, const RingPtr& target) {
  Mat c = mat_zero(a.N, target);
  for (size_t i = 0; i < a.e.size(); ++i) c.e[i] = ring_lift(a.e[i], target);
  return c;
}

// Characteristic polynomial det(tI - M) over o_r, exact expansion.
inline RPoly charpoly_or(const Mat& m) {
  const RingPtr& s = m.spec;
  // entries of tI - M as degree-<=1 polynomials
  auto entry = [&](uint32_t i, uint32_t j) -> RPoly {
    RPoly p{ring_neg(m.at(i, j))};
    if (i == j) p.push_back(ring_one(s));
    return p;
  };
  std::function<RPoly(std::vector<uint32_t>, uint32_t)> rec =
      [&](std::vector<uint32_t> cols, uint32_t row) -> RPoly {
    if (cols.size() == 1) return entry(row, cols[0]);
    RPoly acc{ring_zero(s)};
    for (size_t k = 0; k < cols.size(); ++k) {
      std::vector<uint32_t> rest;
      for (size_t j = 0; j < cols.size(); ++j)
        if (j != k) rest.push_back(cols[j]);
      RPoly term = rpoly_mul(entry(row, cols[k]), rec(rest, row + 1), s);
      if (k % 2) for (auto& x : term) x = ring_neg(x);
      acc = rpoly_add(acc, term, s);
    }
    return acc;
  };
  std::vector<uint32_t> cols(m.N);
  for (uint32_t j = 0; j < m.N; ++j) cols[j] = j;
  RPoly cp = rec(cols, 0);
  cp.resize(m.N + 1, ring_zero(s));
  require(cp[m.N] == ring_one(s), "charpoly_or: not monic");
  return cp;
}

// --- matrices over the residue field, on codes ---

struct FqMat {
  uint32_t N = 0;
  std::vector<uint32_t> c;  // row-major codes
  uint32_t& at(uint32_t i, uint32_t j) { return c[i * N + j]; }
  uint32_t at(uint32_t i, uint32_t j) const { return c[i * N + j]; }
  friend bool operator==(const FqMat& a, const FqMat& b) = default;
};

inline FqMat fqmat_of(const Mat& m) {
  FqMat out{m.N, std::vector<uint32_t>((size_t)m.N * m.N)};
  for (size_t i = 0; i < m.e.size(); ++i)
    out.c[i] = (uint32_t)ring_code(reduce(m.e[i], 1));
  return out;
}

inline FqMat fqmat_mul(const Fq& F, const FqMat& a, const FqMat& b) {
  FqMat c{a.N, std::vector<uint32_t>((size_t)a.N * a.N, 0)};
  for (uint32_t i = 0; i < a.N; ++i)
    for (uint32_t k = 0; k < a.N; ++k) {
      uint32_t aik = a.at(i, k);
      if (!aik) continue;
      for (uint32_t j = 0; j < a.N; ++j)
        c.at(i, j) = F.add(c.at(i, j), F.mul(aik, b.at(k, j)));
    }
  return c;
}

inline bool fqmat_is_zero(const FqMat& a) {
  for (auto x : a.c)
    if (x) return false;
  return true;
}

// Row echelon rank of an n x m code matrix (destructive helper).
inline uint32_t fq_rank(const Fq& F, std::vector<uint32_t> rows, uint32_t ncols) {
  uint32_t nrows = ncols ? (uint32_t)(rows.size() / ncols) : 0;
  uint32_t rank = 0;
  for (uint32_t col = 0; col < ncols && rank < nrows; ++col) {
    uint32_t piv = rank;
    while (piv < nrows && rows[piv * ncols + col] == 0) ++piv;
    if (piv == nrows) continue;
    std::swap_ranges(rows.begin() + piv * ncols, rows.begin() + (piv + 1) * ncols,
                     rows.begin() + rank * ncols);
    uint32_t inv = F.inv(rows[rank * ncols + col]);
    for (uint32_t j = col; j < ncols; ++j)
      rows[rank * ncols + j] = F.mul(rows[rank * ncols + j], inv);
    for (uint32_t i = 0; i < nrows; ++i) {
      if (i == rank) continue;
      uint32_t c = rows[i * ncols + col];
      if (!c) continue;
      for (uint32_t j = col; j < ncols; ++j)
        rows[i * ncols + j] = F.sub(rows[i * ncols + j], F.mul(c, rows[rank * ncols + j]));
    }
    ++rank;
  }
  return rank;
}

inline FqPoly charpoly_fq(const Fq& F, const FqMat& m) {
  // det(tI - M) by cofactor expansion over F_q[t]
  auto entry = [&](uint32_t i, uint32_t j) -> FqPoly {
    FqPoly p{F.neg(m.at(i, j))};
    if (i == j) p.push_back(1);
    fqpoly_trim(p);
    return p;
  };
  std::function<FqPoly(std::vector<uint32_t>, uint32_t)> rec =
      [&](std::vector<uint32_t> cols, uint32_t row) -> FqPoly {
    if (cols.size() == 1) return entry(row, cols[0]);
    FqPoly acc;
    for (size_t k = 0; k < cols.size(); ++k) {
      std::vector<uint32_t> rest;
      for (size_t j = 0; j < cols.size(); ++j)
        if (j != k) rest.push_back(cols[j]);
      FqPoly term = fqpoly_mul(F, entry(row, cols[k]), rec(rest, row + 1));
      if (k % 2) term = fqpoly_neg(F, term);
      acc = fqpoly_add(F, acc, term);
    }
    return acc;
  };
  std::vector<uint32_t> cols(m.N);
  for (uint32_t j = 0; j < m.N; ++j) cols[j] = j;
  FqPoly cp = rec(cols, 0);
  cp.resize(m.N + 1, 0);
  require(cp[m.N] == 1, "charpoly_fq: not monic");
  return cp;
}

inline FqMat fqpoly_eval_mat(const Fq& F, const FqPoly& p, const FqMat& m) {
  FqMat acc{m.N, std::vector<uint32_t>((size_t)m.N * m.N, 0)};
  for (size_t i = p.size(); i-- > 0;) {
    acc = fqmat_mul(F, acc, m);
    for (uint32_t d = 0; d < m.N; ++d)
      acc.at(d, d) = F.add(acc.at(d, d), p[i]);
  }
  return acc;
}

// Minimal polynomial: smallest-degree monic divisor of the characteristic
// polynomial annihilating the matrix.
inline FqPoly minpoly_fq(const Fq& F, const FqMat& m) {
  FqPoly cp = charpoly_fq(F, m);
  auto factors = fqpoly_factor_monic(F, cp);
  // enumerate exponent tuples, collect divisors, sort by degree then lex
  std::vector<FqPoly> divs{{1}};
  for (auto& [f, mult] : factors) {
    std::vector<FqPoly> next;
    for (auto& d : divs) {
      FqPoly cur = d;
      for (uint32_t e = 0; e <= mult; ++e) {
        next.push_back(cur);
        if (e < mult) cur = fqpoly_mul(F, cur, f);
      }
    }
    divs = std::move(next);
  }
  std::sort(divs.begin(), divs.end(), [](const FqPoly& a, const FqPoly& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  for (auto& d : divs) {
    if (fqpoly_deg(d) < 1) continue;
    if (fqmat_is_zero(fqpoly_eval_mat(F, d, m))) return d;
  }
  throw CertificationFailure("minpoly_fq: no annihilating divisor (impossible)");
}

// dim_{F_q} of the commutant of m in M_N(F_q).
inline uint32_t fq_commutant_dim(const Fq& F, const FqMat& m) {
  uint32_t N = m.N, n2 = N * N;
  // rows of the linear map X -> mX - Xm in the E_{ij} basis
  std::vector<uint32_t> rows((size_t)n2 * n2, 0);
  for (uint32_t i = 0; i < N; ++i)
    for (uint32_t j = 0; j < N; ++j) {
      // image of E_{ij}
      for (uint32_t k = 0; k < N; ++k) {
        // (m E_{ij})_{k j} = m_{k i};  (E_{ij} m)_{i k} = m_{j k}
        uint32_t& a = rows[(size_t)(k * N + j) * n2 + (i * N + j)];
        a = F.add(a, m.at(k, i));
        uint32_t& b = rows[(size_t)(i * N + k) * n2 + (i * N + j)];
        b = F.sub(b, m.at(j, k));
      }
    }
  // columns index the domain: kernel dim = n2 - rank
  // rows vector above is laid out as (row = image coordinate, col = domain);
  return n2 - fq_rank(F, rows, n2);
}

// Hill's criterion: beta is regular iff its image mod p is, iff the
// characteristic polynomial of the reduction equals its minimal polynomial.
// Both that test and the centralizer-dimension test run and must agree.
inline bool is_regular(const Mat& beta) {
  Fq F = Fq::of(beta.spec);
  FqMat b = fqmat_of(beta);
  bool via_poly = charpoly_fq(F, b) == minpoly_fq(F, b);
  bool via_dim = fq_commutant_dim(F, b) == beta.N;
  require(via_poly == via_dim, "is_regular: criteria disagree");
  return via_poly;
}

// Companion matrix of a monic polynomial (constant-first coefficients).
inline Mat companion(const RPoly& poly, const RingPtr& s) {
  uint32_t N = (uint32_t)poly.size() - 1;
  require(poly[N] == ring_one(s), "companion: polynomial must be monic");
  Mat m = mat_zero(N, s);
  for (uint32_t i = 0; i + 1 < N; ++i) m.at(i + 1, i) = ring_one(s);
  for (uint32_t i = 0; i < N; ++i) m.at(i, N - 1) = ring_neg(poly[i]);
  return m;
}

struct OrbitFactor {
  FqPoly f;
  uint32_t mult = 0;
  uint32_t deg = 0;
};

// A beta in g_r together with its invariants and canonical block data.
struct OrbitDescriptor {
  Mat beta;
  RPoly charpoly;          // over o_r
  Mat companion_form;      // companion of charpoly
  bool regular = false;
  std::vector<OrbitFactor> factors;  // sorted by (deg, lex)
  std::vector<uint32_t> lambda;      // block sizes d_i repeated m_i times

  uint32_t h() const { return (uint32_t)factors.size(); }
};

inline OrbitDescriptor factor_mod_p(const Mat& beta) {
  OrbitDescriptor d;
  d.beta = beta;
  d.charpoly = charpoly_or(beta);
  d.companion_form = companion(d.charpoly, beta.spec);
  d.regular = is_regular(beta);
  Fq F = Fq::of(beta.spec);
  FqPoly cp_bar = rpoly_reduce_fq(d.charpoly);
  cp_bar.resize(beta.N + 1, 0);
  // sanity: product of factors re-multiplies to the reduction
  auto factors = fqpoly_factor_monic(F, cp_bar);
  FqPoly prod{1};
  for (auto& [f, m] : factors)
    for (uint32_t i = 0; i < m; ++i) prod = fqpoly_mul(F, prod, f);
  require(prod == cp_bar, "factor_mod_p: factorization does not multiply back");
  for (auto& [f, m] : factors) {
    OrbitFactor of;
    of.f = f;
    of.mult = m;
    of.deg = (uint32_t)fqpoly_deg(f);
    d.factors.push_back(of);
    for (uint32_t i = 0; i < m; ++i) d.lambda.push_back(of.deg);
  }
  uint32_t sum = 0;
  for (auto x : d.lambda) sum += x;
  require(sum == beta.N, "factor_mod_p: partition does not sum to N");
  return d;
}

// Two regular elements are conjugate iff their companion matrices coincide.
inline bool conjugate_regular(const OrbitDescriptor& a, const OrbitDescriptor& b) {
  if (!(a.regular && b.regular))
    throw RegularityViolation("conjugate_regular needs regular descriptors");
  if (!(*a.beta.spec == *b.beta.spec) || a.beta.N != b.beta.N)
    throw SpecMismatch("conjugate_regular: descriptors over different contexts");
  return a.companion_form == b.companion_form;
}

// Companion lifts of every monic degree-N polynomial over o_s whose
// reduction is regular; one representative per regular class mod p^s.
inline std::vector<OrbitDescriptor> regular_class_reps(uint32_t N,
                                                       const RingPtr& spec,
                                                       uint32_t s) {
  if (s < 1 || s > spec->r) throw BadLevel("regular_class_reps: bad level");
  RingPtr level = make_ring(spec->kind, spec->p, s, spec->f);
  uint64_t count = 1;
  for (uint32_t i = 0; i < N; ++i) {
    count *= level->size;
    if (count > 2000000) throw DeskScaleExceeded("too many companion lifts");
  }
  std::vector<OrbitDescriptor> out;
  for (uint64_t idx = 0; idx < count; ++idx) {
    RPoly poly;
    uint64_t t = idx;
    for (uint32_t i = 0; i < N; ++i) {
      poly.push_back(ring_elem_of_code(level, t % level->size));
      t /= level->size;
    }
    poly.push_back(ring_one(level));
    Mat comp_s = companion(poly, level);
    Mat lifted = mat_lift(comp_s, spec);
    OrbitDescriptor d = factor_mod_p(lifted);
    if (d.regular) out.push_back(std::move(d));
  }
  return out;
}

inline std::string mat_str(const Mat& m) {
  std::ostringstream os;
  os << "[";
  for (uint32_t i = 0; i < m.N; ++i) {
    os << "[";
    for (uint32_t j = 0; j < m.N; ++j) {
      for (size_t k = 0; k < m.at(i, j).c.size(); ++k) {
        if (k) os << "|";
        os << m.at(i, j).c[k];
      }
      if (j + 1 < m.N) os << ",";
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

}  // namespace chainrep

#endif
