#ifndef CHAINREP_POLY_HPP
#define CHAINREP_POLY_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "chainrep/ring.hpp"

namespace chainrep {

// The residue field F_q of a chain ring, with flat code tables.
struct Fq {
  RingPtr spec;                 // level-1 ring
  std::shared_ptr<const RingTable> t;
  uint32_t q = 2;

  static Fq of(const RingPtr& any_level) {
    Fq f;
    f.spec = make_ring(any_level->kind, any_level->p, 1, any_level->f);
    f.t = ring_table(f.spec);
    f.q = (uint32_t)f.spec->size;
    return f;
  }
  uint32_t add(uint32_t a, uint32_t b) const { return t->a(a, b); }
  uint32_t sub(uint32_t a, uint32_t b) const { return t->s(a, b); }
  uint32_t mul(uint32_t a, uint32_t b) const { return t->m(a, b); }
  uint32_t neg(uint32_t a) const { return t->neg[a]; }
  uint32_t inv(uint32_t a) const {
    if (t->inv[a] == t->n) throw NotAUnit("Fq::inv(0)");
    return t->inv[a];
  }
};

// Polynomials over F_q on codes; constant coefficient first, no trailing
// zeros (the zero polynomial is the empty vector).
using FqPoly = std::vector<uint32_t>;

inline void fqpoly_trim(FqPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}
inline int fqpoly_deg(const FqPoly& a) { return (int)a.size() - 1; }

inline FqPoly fqpoly_add(const Fq& F, FqPoly a, const FqPoly& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (size_t i = 0; i < b.size(); ++i) a[i] = F.add(a[i], b[i]);
  fqpoly_trim(a);
  return a;
}
inline FqPoly fqpoly_neg(const Fq& F, FqPoly a) {
  for (auto& x : a) x = F.neg(x);
  return a;
}
inline FqPoly fqpoly_sub(const Fq& F, const FqPoly& a, const FqPoly& b) {
  return fqpoly_add(F, a, fqpoly_neg(F, b));
}
inline FqPoly fqpoly_mul(const Fq& F, const FqPoly& a, const FqPoly& b) {
  if (a.empty() || b.empty()) return {};
  FqPoly c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      c[i + j] = F.add(c[i + j], F.mul(a[i], b[j]));
  fqpoly_trim(c);
  return c;
}

// Division with remainder; b must be nonzero.
inline std::pair<FqPoly, FqPoly> fqpoly_divmod(const Fq& F, FqPoly a,
                                               const FqPoly& b) {
  require(!b.empty(), "fqpoly_divmod: division by zero");
  uint32_t lead_inv = F.inv(b.back());
  FqPoly q;
  if (a.size() >= b.size()) q.assign(a.size() - b.size() + 1, 0);
  fqpoly_trim(a);
  while (a.size() >= b.size()) {
    uint32_t c = F.mul(a.back(), lead_inv);  // nonzero: a is trimmed
    size_t sh = a.size() - b.size();
    q[sh] = c;
    for (size_t i = 0; i < b.size(); ++i)
      a[sh + i] = F.sub(a[sh + i], F.mul(c, b[i]));
    fqpoly_trim(a);
  }
  fqpoly_trim(q);
  return {q, a};
}
inline FqPoly fqpoly_mod(const Fq& F, FqPoly a, const FqPoly& b) {
  return fqpoly_divmod(F, std::move(a), b).second;
}
inline bool fqpoly_divides(const Fq& F, const FqPoly& d, const FqPoly& a) {
  return fqpoly_mod(F, a, d).empty();
}

inline bool fqpoly_is_monic(const FqPoly& a) {
  return !a.empty() && a.back() == 1;
}

// All monic polynomials of degree d, in lex order of the coefficient tuple
// read as a little-endian base-q integer.
inline std::vector<FqPoly> enumerate_monic(const Fq& F, uint32_t d) {
  std::vector<FqPoly> out;
  uint64_t count = pow_u64(F.q, d);
  out.reserve(count);
  for (uint64_t idx = 0; idx < count; ++idx) {
    FqPoly p(d + 1, 1);
    uint64_t t = idx;
    for (uint32_t i = 0; i < d; ++i) {
      p[i] = (uint32_t)(t % F.q);
      t /= F.q;
    }
    out.push_back(p);
  }
  return out;
}

inline bool fqpoly_irreducible(const Fq& F, const FqPoly& a) {
  int d = fqpoly_deg(a);
  require(d >= 1, "irreducibility is for positive degree");
  if (d == 1) return true;
  for (uint32_t e = 1; 2 * (int)e <= d; ++e)
    for (const auto& g : enumerate_monic(F, e))
      if (fqpoly_divides(F, g, a)) return false;
  return true;
}

inline const std::vector<FqPoly>& monic_irreducibles(const Fq& F, uint32_t d) {
  static std::map<std::pair<uint32_t, uint32_t>, std::vector<FqPoly>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(F.q, d);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<FqPoly> out;
  for (const auto& p : enumerate_monic(F, d))
    if (fqpoly_irreducible(F, p)) out.push_back(p);
  return cache.emplace(key, std::move(out)).first->second;
}

// Factor a monic polynomial by trial division over enumerated irreducibles.
// Returns (factor, multiplicity) sorted by (degree, lex coefficients).
inline std::vector<std::pair<FqPoly, uint32_t>> fqpoly_factor_monic(
    const Fq& F, FqPoly a) {
  require(fqpoly_is_monic(a), "fqpoly_factor_monic: input must be monic");
  std::vector<std::pair<FqPoly, uint32_t>> out;
  for (uint32_t d = 1; (int)d <= fqpoly_deg(a); ++d) {
    for (const auto& f : monic_irreducibles(F, d)) {
      uint32_t m = 0;
      while (fqpoly_deg(a) >= (int)d && fqpoly_divides(F, f, a)) {
        a = fqpoly_divmod(F, a, f).first;
        ++m;
      }
      if (m) out.push_back({f, m});
      if (fqpoly_deg(a) < (int)d) break;
    }
  }
  require(fqpoly_deg(a) == 0, "fqpoly_factor_monic: leftover factor");
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.first.size() != y.first.size()) return x.first.size() < y.first.size();
    return x.first < y.first;
  });
  return out;
}

inline std::string fqpoly_str(const FqPoly& a) {
  if (a.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (size_t i = a.size(); i-- > 0;) {
    if (a[i] == 0) continue;
    if (!first) os << "+";
    first = false;
    if (i == 0 || a[i] != 1) os << a[i];
    if (i >= 1) os << "t";
    if (i >= 2) os << "^" << i;
  }
  if (first) return "0";
  return os.str();
}

// Polynomials over o_r (RingElem coefficients, constant first, not trimmed:
// callers keep them at fixed length N+1 for characteristic polynomials).
using RPoly = std::vector<RingElem>;

inline RPoly rpoly_mul(const RPoly& a, const RPoly& b, const RingPtr& s) {
  RPoly c(a.size() + b.size() - 1, ring_zero(s));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      c[i + j] = ring_add(c[i + j], ring_mul(a[i], b[j]));
  return c;
}
inline RPoly rpoly_add(RPoly a, const RPoly& b, const RingPtr& s) {
  if (a.size() < b.size()) a.resize(b.size(), ring_zero(s));
  for (size_t i = 0; i < b.size(); ++i) a[i] = ring_add(a[i], b[i]);
  return a;
}

inline FqPoly rpoly_reduce_fq(const RPoly& a) {
  FqPoly out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = (uint32_t)ring_code(reduce(a[i], 1));
  fqpoly_trim(out);
  return out;
}

}  // namespace chainrep

#endif
