#ifndef CHAINREP_RING_HPP
#define CHAINREP_RING_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "chainrep/cyclotomic.hpp"
#include "chainrep/errors.hpp"
#include "chainrep/numutil.hpp"

namespace chainrep {

enum class RingKind { zmod, galois, truncated_poly };

inline const char* kind_name(RingKind k) {
  switch (k) {
    case RingKind::zmod: return "zmod";
    case RingKind::galois: return "galois";
    default: return "fqt";
  }
}

namespace detail {

// Polynomials over F_p as integer coefficient vectors (constant first),
// used only to pick defining polynomials.
inline bool fp_poly_irreducible(const std::vector<uint32_t>& poly, uint32_t p) {
  size_t d = poly.size() - 1;
  if (d == 1) return true;
  // trial division by every monic polynomial of degree 1..d/2
  for (size_t e = 1; 2 * e <= d; ++e) {
    uint64_t count = pow_u64(p, e);
    for (uint64_t idx = 0; idx < count; ++idx) {
      std::vector<uint32_t> g(e + 1, 1);
      uint64_t t = idx;
      for (size_t i = 0; i < e; ++i) {
        g[i] = t % p;
        t /= p;
      }
      // long division remainder of poly by g (monic)
      std::vector<uint32_t> rem = poly;
      while (rem.size() >= g.size()) {
        uint32_t c = rem.back();
        size_t sh = rem.size() - g.size();
        for (size_t i = 0; i < g.size(); ++i) {
          uint32_t v = rem[sh + i];
          uint32_t sub = (uint32_t)(((uint64_t)c * g[i]) % p);
          rem[sh + i] = (v + p - sub) % p;
        }
        while (!rem.empty() && rem.back() == 0) rem.pop_back();
        if (rem.size() >= g.size() && rem.back() == 0) rem.pop_back();
      }
      if (rem.empty()) return false;
    }
  }
  return true;
}

inline std::vector<uint32_t> smallest_irreducible(uint32_t p, uint32_t f) {
  if (f == 1) return {0, 1};  // x
  uint64_t count = pow_u64(p, f);
  for (uint64_t idx = 0; idx < count; ++idx) {
    std::vector<uint32_t> poly(f + 1, 1);
    uint64_t t = idx;
    for (size_t i = 0; i < f; ++i) {
      poly[i] = (uint32_t)(t % p);
      t /= p;
    }
    if (fp_poly_irreducible(poly, p)) return poly;
  }
  throw UnsupportedSize("no irreducible polynomial found");
}

}  // namespace detail

// Validated description of a finite chain ring o_r.
struct RingSpec {
  RingKind kind;
  uint32_t p = 2;   // residue characteristic
  uint32_t r = 1;   // level
  uint32_t f = 1;   // residue degree
  uint64_t q = 2;   // p^f
  uint64_t size = 2;  // q^r
  uint64_t pr = 2;    // p^r (coefficient modulus for zmod/galois)
  std::vector<uint32_t> defining;  // monic degree-f over F_p; empty for zmod

  // coordinate layout of canonical element vectors
  uint32_t ncoords() const {
    switch (kind) {
      case RingKind::zmod: return 1;
      case RingKind::galois: return f;
      default: return r * f;
    }
  }
  uint64_t coord_mod() const {
    return kind == RingKind::truncated_poly ? p : pr;
  }

  std::string literal() const {
    std::ostringstream os;
    switch (kind) {
      case RingKind::zmod: os << "zmod:" << p << "^" << r; break;
      case RingKind::galois: os << "galois:" << p << "^" << r << ":" << f; break;
      default: os << "fqt:" << q << ":" << r; break;
    }
    return os.str();
  }

  friend bool operator==(const RingSpec& a, const RingSpec& b) {
    return a.kind == b.kind && a.p == b.p && a.r == b.r && a.f == b.f;
  }
};

using RingPtr = std::shared_ptr<const RingSpec>;

inline RingPtr make_ring(RingKind kind, uint32_t p, uint32_t r, uint32_t f) {
  if (!is_prime_u64(p)) throw NonPrime("p = " + std::to_string(p));
  if (r < 1 || f < 1) throw BadLevel("require r >= 1 and f >= 1");
  if (kind == RingKind::zmod && f != 1)
    throw UnsupportedSize("zmod supports f = 1 only; use galois for f > 1");
  static std::map<std::tuple<int, uint32_t, uint32_t, uint32_t>, RingPtr> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple((int)kind, p, r, f);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  auto s = std::make_shared<RingSpec>();
  s->kind = kind;
  s->p = p;
  s->r = r;
  s->f = f;
  s->q = pow_checked(p, f, uint64_t(1) << 26);
  s->size = pow_checked(s->q, r, uint64_t(1) << 26);
  s->pr = pow_u64(p, r);
  if (kind != RingKind::zmod) s->defining = detail::smallest_irreducible(p, f);
  cache[key] = s;
  return s;
}

inline RingPtr parse_ring_literal(const std::string& lit) {
  auto bad = [&] { throw BadLiteral("cannot parse ring literal '" + lit + "'"); };
  auto split = [](const std::string& s, char c) {
    std::vector<std::string> out;
    size_t pos = 0;
    while (true) {
      size_t nx = s.find(c, pos);
      out.push_back(s.substr(pos, nx - pos));
      if (nx == std::string::npos) break;
      pos = nx + 1;
    }
    return out;
  };
  auto num = [&](const std::string& s) -> uint64_t {
    if (s.empty()) bad();
    for (char c : s)
      if (!isdigit((unsigned char)c)) bad();
    return std::stoull(s);
  };
  auto parts = split(lit, ':');
  if (parts.size() < 2) bad();
  if (parts[0] == "zmod" || parts[0] == "galois") {
    auto pr = split(parts[1], '^');
    if (pr.size() != 2) bad();
    uint64_t p = num(pr[0]), r = num(pr[1]);
    if (parts[0] == "zmod") {
      if (parts.size() != 2) bad();
      return make_ring(RingKind::zmod, (uint32_t)p, (uint32_t)r, 1);
    }
    if (parts.size() != 3) bad();
    return make_ring(RingKind::galois, (uint32_t)p, (uint32_t)r,
                     (uint32_t)num(parts[2]));
  }
  if (parts[0] == "fqt") {
    if (parts.size() != 3) bad();
    uint64_t q = num(parts[1]), r = num(parts[2]);
    auto fac = factorize(q);
    if (fac.size() != 1) bad();
    return make_ring(RingKind::truncated_poly, (uint32_t)fac[0].first,
                     (uint32_t)r, fac[0].second);
  }
  bad();
  return nullptr;
}

// An element of o_r in canonical reduced coordinates.
struct RingElem {
  RingPtr spec;
  std::vector<uint32_t> c;

  friend bool operator==(const RingElem& a, const RingElem& b) {
    return *a.spec == *b.spec && a.c == b.c;
  }
  friend bool operator!=(const RingElem& a, const RingElem& b) {
    return !(a == b);
  }
  friend bool operator<(const RingElem& a, const RingElem& b) {
    return a.c < b.c;
  }
};

inline void check_same_spec(const RingElem& a, const RingElem& b) {
  if (!(*a.spec == *b.spec)) throw SpecMismatch("ring elements from different rings");
}

inline RingElem ring_zero(const RingPtr& s) {
  return {s, std::vector<uint32_t>(s->ncoords(), 0)};
}
inline RingElem ring_one(const RingPtr& s) {
  RingElem e = ring_zero(s);
  e.c[0] = 1;
  return e;
}
// The canonical integer embedding n -> n*1.
inline RingElem ring_int(const RingPtr& s, uint64_t n) {
  RingElem e = ring_zero(s);
  e.c[0] = (uint32_t)(n % s->coord_mod());
  if (s->kind == RingKind::truncated_poly) e.c[0] = (uint32_t)(n % s->p);
  return e;
}

inline uint64_t ring_code(const RingElem& a) {
  uint64_t base = a.spec->coord_mod(), code = 0;
  for (size_t i = a.c.size(); i-- > 0;) code = code * base + a.c[i];
  return code;
}
inline RingElem ring_elem_of_code(const RingPtr& s, uint64_t code) {
  RingElem e = ring_zero(s);
  uint64_t base = s->coord_mod();
  for (size_t i = 0; i < e.c.size(); ++i) {
    e.c[i] = (uint32_t)(code % base);
    code /= base;
  }
  return e;
}

inline RingElem ring_add(const RingElem& a, const RingElem& b) {
  check_same_spec(a, b);
  RingElem e = a;
  uint64_t m = a.spec->coord_mod();
  for (size_t i = 0; i < e.c.size(); ++i) e.c[i] = (uint32_t)((e.c[i] + (uint64_t)b.c[i]) % m);
  return e;
}
inline RingElem ring_neg(const RingElem& a) {
  RingElem e = a;
  uint64_t m = a.spec->coord_mod();
  for (auto& x : e.c) x = (uint32_t)((m - x) % m);
  return e;
}
inline RingElem ring_sub(const RingElem& a, const RingElem& b) {
  return ring_add(a, ring_neg(b));
}

namespace detail {
// F_q digit product for truncated_poly coordinates: polynomials over F_p
// modulo the defining polynomial.
inline void fq_digit_mul(const RingSpec& s, const uint32_t* a, const uint32_t* b,
                         uint32_t* out) {
  uint32_t f = s.f, p = s.p;
  uint32_t tmp[16] = {0};
  for (uint32_t i = 0; i < f; ++i)
    for (uint32_t j = 0; j < f; ++j)
      tmp[i + j] = (uint32_t)((tmp[i + j] + (uint64_t)a[i] * b[j]) % p);
  for (int32_t d = 2 * (int32_t)f - 2; d >= (int32_t)f; --d) {
    uint32_t c = tmp[d];
    if (c == 0) continue;
    tmp[d] = 0;
    for (uint32_t i = 0; i < f; ++i) {
      uint32_t sub = (uint32_t)(((uint64_t)c * s.defining[i]) % p);
      tmp[d - f + i] = (tmp[d - f + i] + p - sub) % p;
    }
  }
  for (uint32_t i = 0; i < f; ++i) out[i] = tmp[i];
}
}  // namespace detail

inline RingElem ring_mul(const RingElem& a, const RingElem& b) {
  check_same_spec(a, b);
  const RingSpec& s = *a.spec;
  RingElem e = ring_zero(a.spec);
  switch (s.kind) {
    case RingKind::zmod:
      e.c[0] = (uint32_t)(((uint64_t)a.c[0] * b.c[0]) % s.pr);
      break;
    case RingKind::galois: {
      std::vector<uint64_t> tmp(2 * s.f, 0);
      for (uint32_t i = 0; i < s.f; ++i)
        for (uint32_t j = 0; j < s.f; ++j)
          tmp[i + j] = (tmp[i + j] + (uint64_t)a.c[i] * b.c[j]) % s.pr;
      for (int32_t d = 2 * (int32_t)s.f - 2; d >= (int32_t)s.f; --d) {
        uint64_t c = tmp[d];
        if (!c) continue;
        tmp[d] = 0;
        for (uint32_t i = 0; i < s.f; ++i) {
          uint64_t sub = (c * s.defining[i]) % s.pr;
          tmp[d - s.f + i] = (tmp[d - s.f + i] + s.pr - sub) % s.pr;
        }
      }
      for (uint32_t i = 0; i < s.f; ++i) e.c[i] = (uint32_t)tmp[i];
      break;
    }
    case RingKind::truncated_poly: {
      for (uint32_t i = 0; i < s.r; ++i)
        for (uint32_t j = 0; i + j < s.r; ++j) {
          uint32_t prod[16];
          detail::fq_digit_mul(s, &a.c[i * s.f], &b.c[j * s.f], prod);
          for (uint32_t k = 0; k < s.f; ++k) {
            uint32_t& slot = e.c[(i + j) * s.f + k];
            slot = (uint32_t)((slot + (uint64_t)prod[k]) % s.p);
          }
        }
      break;
    }
  }
  return e;
}

enum class RingOp { add, sub, mul };
inline RingElem arith(const RingElem& a, const RingElem& b, RingOp op) {
  switch (op) {
    case RingOp::add: return ring_add(a, b);
    case RingOp::sub: return ring_sub(a, b);
    default: return ring_mul(a, b);
  }
}

inline bool ring_is_zero(const RingElem& a) {
  for (auto x : a.c)
    if (x) return false;
  return true;
}

// The pi-adic valuation truncated at r; v(0) = r.
inline uint32_t valuation(const RingElem& a) {
  const RingSpec& s = *a.spec;
  if (ring_is_zero(a)) return s.r;
  switch (s.kind) {
    case RingKind::zmod: {
      uint32_t v = 0;
      uint64_t x = a.c[0];
      while (x % s.p == 0) x /= s.p, ++v;
      return v;
    }
    case RingKind::galois: {
      uint32_t best = s.r;
      for (auto cv : a.c) {
        if (cv == 0) continue;
        uint32_t v = 0;
        uint64_t x = cv;
        while (x % s.p == 0) x /= s.p, ++v;
        best = std::min(best, v);
      }
      return best;
    }
    default: {
      for (uint32_t i = 0; i < s.r; ++i)
        for (uint32_t k = 0; k < s.f; ++k)
          if (a.c[i * s.f + k]) return i;
      return s.r;
    }
  }
}

// The fixed uniformizer: p (zmod/galois) or t (truncated_poly).
inline RingElem ring_pi(const RingPtr& s) {
  RingElem e = ring_zero(s);
  if (s->kind == RingKind::truncated_poly) {
    if (s->r > 1) e.c[s->f] = 1;
  } else {
    e.c[0] = s->p % (uint32_t)s->pr;
    if (s->r == 1) e.c[0] = 0;
  }
  return e;
}

inline RingElem ring_pow(RingElem a, uint64_t e) {
  RingElem r = ring_one(a.spec);
  while (e) {
    if (e & 1) r = ring_mul(r, a);
    a = ring_mul(a, a);
    e >>= 1;
  }
  return r;
}

inline RingElem invert(const RingElem& a) {
  if (valuation(a) != 0) throw NotAUnit("invert: element has positive valuation");
  uint64_t units = a.spec->size - a.spec->size / a.spec->q;
  RingElem inv = ring_pow(a, units - 1);
  require(ring_mul(a, inv) == ring_one(a.spec), "invert: a * a^{-1} != 1");
  return inv;
}

// Reduction o_r -> o_s along the canonical surjection.
inline RingElem reduce(const RingElem& a, uint32_t s_level) {
  const RingSpec& s = *a.spec;
  if (s_level < 1 || s_level > s.r) throw BadLevel("reduce: level out of range");
  RingPtr target = make_ring(s.kind, s.p, s_level, s.f);
  RingElem e = ring_zero(target);
  if (s.kind == RingKind::truncated_poly) {
    for (uint32_t i = 0; i < s_level * s.f; ++i) e.c[i] = a.c[i];
  } else {
    uint64_t m = target->pr;
    for (uint32_t i = 0; i < e.c.size(); ++i) e.c[i] = (uint32_t)(a.c[i] % m);
  }
  return e;
}

// Canonical coefficient lift o_s -> o_r (a section of reduce).
inline RingElem ring_lift(const RingElem& a, const RingPtr& target) {
  const RingSpec& src = *a.spec;
  if (!(src.kind == target->kind && src.p == target->p && src.f == target->f &&
        src.r <= target->r))
    throw SpecMismatch("ring_lift: incompatible target");
  RingElem e = ring_zero(target);
  for (size_t i = 0; i < a.c.size(); ++i) e.c[i] = a.c[i];
  return e;
}

// Teichmuller section iota: residue field -> o_r, multiplicative, iota(0)=0.
inline RingElem teichmuller(const RingPtr& s, const RingElem& u) {
  const RingSpec& u_spec = *u.spec;
  if (!(u_spec.kind == s->kind && u_spec.p == s->p && u_spec.f == s->f &&
        u_spec.r == 1))
    throw SpecMismatch("teichmuller: argument must live in the residue field");
  if (s->kind == RingKind::truncated_poly) {
    RingElem e = ring_zero(s);
    for (uint32_t k = 0; k < s->f; ++k) e.c[k] = u.c[k];
    return e;
  }
  RingElem x = ring_lift(u, s);
  for (uint32_t i = 0; i + 1 < s->r; ++i) x = ring_pow(x, s->q);
  require(ring_pow(x, s->q) == x, "teichmuller: Frobenius iteration did not fix");
  return x;
}

// Exponent data of the fixed primitive additive character eps of (o_r, +).
inline uint64_t eps_modulus(const RingPtr& s) {
  return s->kind == RingKind::truncated_poly ? s->p : s->pr;
}

inline uint64_t eps_exponent(const RingElem& a) {
  const RingSpec& s = *a.spec;
  switch (s.kind) {
    case RingKind::zmod:
      return a.c[0];
    case RingKind::galois: {
      // trace of multiplication by a in the power basis, mod p^r
      uint64_t tr = 0;
      RingElem xj = ring_one(a.spec);
      RingElem x = ring_zero(a.spec);
      if (s.f > 1) x.c[1] = 1;
      for (uint32_t j = 0; j < s.f; ++j) {
        RingElem prod = ring_mul(a, xj);
        tr = (tr + prod.c[j]) % s.pr;
        if (j + 1 < s.f) xj = ring_mul(xj, x);
      }
      return tr;
    }
    default: {
      // trace F_q -> F_p of the top (t^{r-1}) digit
      uint32_t top[16];
      for (uint32_t k = 0; k < s.f; ++k) top[k] = a.c[(s.r - 1) * s.f + k];
      uint32_t tr = 0;
      uint32_t xj[16] = {0};
      xj[0] = 1;
      for (uint32_t j = 0; j < s.f; ++j) {
        uint32_t prod[16];
        detail::fq_digit_mul(s, top, xj, prod);
        tr = (tr + prod[j]) % s.p;
        if (j + 1 < s.f) {
          uint32_t xshift[16] = {0};
          for (uint32_t k = 0; k + 1 < s.f; ++k) xshift[k + 1] = xj[k];
          uint32_t carry = xj[s.f - 1];
          if (carry)
            for (uint32_t k = 0; k < s.f; ++k)
              xshift[k] = (xshift[k] + (s.p - (uint32_t)(((uint64_t)carry * s.defining[k]) % s.p))) % s.p;
          std::copy(xshift, xshift + s.f, xj);
        }
      }
      return tr;
    }
  }
}

inline Cyclo additive_char(const RingElem& a) {
  return Cyclo::root(eps_modulus(a.spec), eps_exponent(a));
}

// Flat operation tables on element codes, for enumeration-heavy callers.
struct RingTable {
  RingPtr spec;
  uint32_t n = 0;  // |o_r|
  std::vector<uint32_t> add, mul;     // n*n
  std::vector<uint32_t> neg, inv;     // inv = n for non-units
  std::vector<uint8_t> val;
  std::vector<uint32_t> eps;  // exponent of eps per code
  uint64_t eps_mod = 1;
  std::vector<uint32_t> units;
  std::vector<std::vector<uint32_t>> reduce_code;  // [s] : code -> level-s code
  std::vector<std::vector<uint32_t>> lift_code;    // [s] : level-s code -> code
  std::vector<uint32_t> teich;  // residue code -> code
  uint32_t zero = 0, one = 1, pi = 0;

  uint32_t a(uint32_t x, uint32_t y) const { return add[x * n + y]; }
  uint32_t m(uint32_t x, uint32_t y) const { return mul[x * n + y]; }
  uint32_t s(uint32_t x, uint32_t y) const { return add[x * n + neg[y]]; }
  bool is_unit(uint32_t x) const { return inv[x] != n; }
};

inline std::shared_ptr<const RingTable> ring_table(const RingPtr& spec) {
  static std::map<std::string, std::shared_ptr<const RingTable>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = spec->literal();
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (spec->size > 4096)
    throw UnsupportedSize("ring too large for operation tables: " + key);

  auto t = std::make_shared<RingTable>();
  t->spec = spec;
  uint32_t n = t->n = (uint32_t)spec->size;
  std::vector<RingElem> elems(n);
  for (uint32_t i = 0; i < n; ++i) elems[i] = ring_elem_of_code(spec, i);
  t->add.resize((size_t)n * n);
  t->mul.resize((size_t)n * n);
  t->neg.resize(n);
  t->inv.assign(n, n);
  t->val.resize(n);
  t->eps.resize(n);
  t->eps_mod = eps_modulus(spec);
  for (uint32_t i = 0; i < n; ++i) {
    for (uint32_t j = 0; j < n; ++j) {
      t->add[(size_t)i * n + j] = (uint32_t)ring_code(ring_add(elems[i], elems[j]));
      t->mul[(size_t)i * n + j] = (uint32_t)ring_code(ring_mul(elems[i], elems[j]));
    }
    t->neg[i] = (uint32_t)ring_code(ring_neg(elems[i]));
    t->val[i] = (uint8_t)valuation(elems[i]);
    t->eps[i] = (uint32_t)eps_exponent(elems[i]);
    if (t->val[i] == 0) {
      t->inv[i] = (uint32_t)ring_code(invert(elems[i]));
      t->units.push_back(i);
    }
  }
  t->zero = (uint32_t)ring_code(ring_zero(spec));
  t->one = (uint32_t)ring_code(ring_one(spec));
  t->pi = (uint32_t)ring_code(ring_pi(spec));
  t->reduce_code.resize(spec->r + 1);
  t->lift_code.resize(spec->r + 1);
  for (uint32_t s = 1; s <= spec->r; ++s) {
    RingPtr target = make_ring(spec->kind, spec->p, s, spec->f);
    t->reduce_code[s].resize(n);
    for (uint32_t i = 0; i < n; ++i)
      t->reduce_code[s][i] = (uint32_t)ring_code(reduce(elems[i], s));
    t->lift_code[s].resize(target->size);
    for (uint32_t i = 0; i < target->size; ++i)
      t->lift_code[s][i] =
          (uint32_t)ring_code(ring_lift(ring_elem_of_code(target, i), spec));
  }
  RingPtr res = make_ring(spec->kind, spec->p, 1, spec->f);
  t->teich.resize(res->size);
  for (uint32_t u = 0; u < res->size; ++u)
    t->teich[u] = (uint32_t)ring_code(teichmuller(spec, ring_elem_of_code(res, u)));
  cache[key] = t;
  return t;
}

}  // namespace chainrep

#endif
