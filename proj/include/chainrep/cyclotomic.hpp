#ifndef CHAINREP_CYCLOTOMIC_HPP
#define CHAINREP_CYCLOTOMIC_HPP

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "chainrep/errors.hpp"
#include "chainrep/numutil.hpp"

namespace chainrep {

namespace detail {

// Dense integer polynomials, constant coefficient first.
using ZPoly = std::vector<mpz_class>;

inline void zpoly_trim(ZPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Exact division a / b for monic-leading b; remainder must vanish.
inline ZPoly zpoly_div_exact(ZPoly a, const ZPoly& b) {
  ZPoly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, mpz_class(0));
  while (a.size() >= b.size() && !a.empty()) {
    mpz_class c = a.back() / b.back();
    size_t sh = a.size() - b.size();
    q[sh] = c;
    for (size_t i = 0; i < b.size(); ++i) a[sh + i] -= c * b[i];
    zpoly_trim(a);
  }
  require(a.empty(), "zpoly_div_exact: nonzero remainder");
  return q;
}

inline const ZPoly& cyclotomic_poly(uint64_t n) {
  static std::map<uint64_t, ZPoly> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  // x^n - 1 divided by all proper cyclotomic factors.
  std::function<const ZPoly&(uint64_t)> get = [&](uint64_t m) -> const ZPoly& {
    auto jt = cache.find(m);
    if (jt != cache.end()) return jt->second;
    ZPoly f(m + 1, mpz_class(0));
    f[0] = -1;
    f[m] = 1;
    for (uint64_t d : divisors(m))
      if (d != m) f = zpoly_div_exact(f, get(d));
    return cache.emplace(m, std::move(f)).first->second;
  };
  return get(n);
}

// Power-basis reduction data for Q(zeta_L): row k = coordinates of zeta^k
// in the basis 1, zeta, ..., zeta^{phi(L)-1}.
struct CycloTable {
  uint64_t L = 1;
  uint64_t deg = 1;
  std::vector<std::vector<mpz_class>> row;  // L rows of length deg
};

inline const CycloTable& cyclo_table(uint64_t L) {
  static std::map<uint64_t, CycloTable> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(L);
  if (it != cache.end()) return it->second;
  CycloTable t;
  t.L = L;
  const ZPoly& phi = cyclotomic_poly(L);
  t.deg = phi.size() - 1;
  t.row.resize(L);
  std::vector<mpz_class> cur(t.deg, mpz_class(0));
  cur[0] = 1;
  for (uint64_t k = 0; k < L; ++k) {
    t.row[k] = cur;
    // multiply by zeta: shift, then fold x^deg = -(phi - x^deg).
    mpz_class top = cur[t.deg - 1];
    for (size_t i = t.deg - 1; i > 0; --i) cur[i] = cur[i - 1];
    cur[0] = 0;
    if (top != 0)
      for (size_t i = 0; i < t.deg; ++i) cur[i] -= top * phi[i];
  }
  return cache.emplace(L, std::move(t)).first->second;
}

}  // namespace detail

// An exact element of the union of cyclotomic fields: a finite sum
// sum_k c_k zeta_L^k with rational c_k. Values with different conductors
// combine by embedding into the lcm. Equality and hashing go through the
// canonical power-basis form, so they are representation independent.
class Cyclo {
 public:
  Cyclo() : L_(1) {}

  static Cyclo zero() { return Cyclo(); }
  static Cyclo one() { return rational(1); }
  static Cyclo rational(const mpq_class& q) {
    Cyclo c;
    if (q != 0) c.t_[0] = q;
    return c;
  }
  static Cyclo integer(long n) { return rational(mpq_class(n)); }
  // zeta_L^k
  static Cyclo root(uint64_t L, uint64_t k) {
    Cyclo c;
    c.L_ = L;
    c.t_[k % L] = 1;
    c.reduce_conductor();
    return c;
  }

  uint64_t conductor() const { return L_; }
  bool is_zero() const {
    if (t_.empty()) return true;
    for (auto& c : canonical_at(L_))
      if (c != 0) return false;
    return true;
  }
  size_t term_count() const { return t_.size(); }

  bool is_rational() const {
    auto v = canonical_at(L_);
    for (size_t i = 1; i < v.size(); ++i)
      if (v[i] != 0) return false;
    return true;
  }
  // Rational part extraction; requires is_rational().
  mpq_class as_rational() const {
    auto v = canonical_at(L_);
    for (size_t i = 1; i < v.size(); ++i)
      require(v[i] == 0, "as_rational: value not rational");
    return v.empty() ? mpq_class(0) : v[0];
  }

  Cyclo conj() const {
    Cyclo r;
    r.L_ = L_;
    for (auto& [k, c] : t_) r.t_[(L_ - k) % L_] += c;
    r.strip();
    return r;
  }

  Cyclo& operator+=(const Cyclo& o) {
    join(o.L_);
    uint64_t f = L_ / o.L_;
    for (auto& [k, c] : o.t_) {
      auto& slot = t_[k * f];
      slot += c;
      if (slot == 0) t_.erase(k * f);
    }
    maybe_compress();
    return *this;
  }
  Cyclo& operator-=(const Cyclo& o) { return *this += (-o); }
  Cyclo operator-() const {
    Cyclo r = *this;
    for (auto& [k, c] : r.t_) c = -c;
    return r;
  }
  friend Cyclo operator+(Cyclo a, const Cyclo& b) { return a += b; }
  friend Cyclo operator-(Cyclo a, const Cyclo& b) { return a -= b; }

  friend Cyclo operator*(const Cyclo& a, const Cyclo& b) {
    Cyclo r;
    r.L_ = lcm_u64(a.L_, b.L_);
    uint64_t fa = r.L_ / a.L_, fb = r.L_ / b.L_;
    for (auto& [ka, ca] : a.t_)
      for (auto& [kb, cb] : b.t_) {
        uint64_t k = (ka * fa + kb * fb) % r.L_;
        auto& slot = r.t_[k];
        slot += ca * cb;
        if (slot == 0) r.t_.erase(k);
      }
    r.maybe_compress();
    r.reduce_conductor();
    return r;
  }
  Cyclo& operator*=(const Cyclo& o) { return *this = *this * o; }

  Cyclo& scale(const mpq_class& s) {
    if (s == 0) {
      t_.clear();
      L_ = 1;
      return *this;
    }
    for (auto& [k, c] : t_) c *= s;
    return *this;
  }
  friend Cyclo operator*(const mpq_class& s, Cyclo a) { return a.scale(s); }

  Cyclo pow(uint64_t e) const {
    Cyclo r = one(), b = *this;
    while (e) {
      if (e & 1) r *= b;
      b *= b;
      e >>= 1;
    }
    return r;
  }

  friend bool operator==(const Cyclo& a, const Cyclo& b) {
    uint64_t M = lcm_u64(a.L_, b.L_);
    return a.canonical_at(M) == b.canonical_at(M);
  }
  friend bool operator!=(const Cyclo& a, const Cyclo& b) { return !(a == b); }

  // Canonical coordinates in the power basis of Q(zeta_M); L must divide M.
  std::vector<mpq_class> canonical_at(uint64_t M) const {
    require(M % L_ == 0, "canonical_at: conductor must be a multiple");
    const auto& tab = detail::cyclo_table(M);
    std::vector<mpq_class> v(tab.deg, mpq_class(0));
    uint64_t f = M / L_;
    for (auto& [k, c] : t_) {
      const auto& row = tab.row[(k * f) % M];
      for (size_t i = 0; i < tab.deg; ++i)
        if (row[i] != 0) v[i] += c * mpq_class(row[i]);
    }
    return v;
  }

  // Detect a root of unity: returns exponent k with *this == zeta_M^k,
  // scanning M = lcm(2, conductor). Empty if not a root of unity there.
  std::optional<std::pair<uint64_t, uint64_t>> as_root_of_unity() const {
    uint64_t M = lcm_u64(2, L_);
    auto v = canonical_at(M);
    const auto& tab = detail::cyclo_table(M);
    for (uint64_t k = 0; k < M; ++k) {
      bool ok = true;
      for (size_t i = 0; i < tab.deg && ok; ++i)
        if (v[i] != mpq_class(tab.row[k][i])) ok = false;
      if (ok) return std::make_pair(M, k);
    }
    return std::nullopt;
  }

  uint64_t hash_at(uint64_t M) const {
    auto v = canonical_at(M);
    uint64_t h = 1469598103934665603ull;
    auto mix = [&](const std::string& s) {
      for (char ch : s) {
        h ^= (unsigned char)ch;
        h *= 1099511628211ull;
      }
      h ^= '#';
      h *= 1099511628211ull;
    };
    for (auto& c : v) mix(c.get_str());
    return h;
  }

  std::string str() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [k, c] : t_) {
      if (!first) os << " + ";
      first = false;
      os << c.get_str();
      if (k != 0) os << "*z" << L_ << "^" << k;
    }
    return os.str();
  }

  const std::map<uint64_t, mpq_class>& terms() const { return t_; }

  // Re-express over the power basis (at most phi(L) terms).
  void compress() {
    auto v = canonical_at(L_);
    t_.clear();
    for (size_t i = 0; i < v.size(); ++i)
      if (v[i] != 0) t_[i] = v[i];
    reduce_conductor();
  }

 private:
  void strip() {
    for (auto it = t_.begin(); it != t_.end();)
      it = (it->second == 0) ? t_.erase(it) : std::next(it);
  }
  void join(uint64_t M) {
    uint64_t L2 = lcm_u64(L_, M);
    if (L2 == L_) return;
    std::map<uint64_t, mpq_class> nt;
    uint64_t f = L2 / L_;
    for (auto& [k, c] : t_) nt[k * f] = c;
    t_ = std::move(nt);
    L_ = L2;
  }
  // Shrink the conductor to what the exponents actually need.
  void reduce_conductor() {
    strip();
    if (t_.empty()) {
      L_ = 1;
      return;
    }
    uint64_t need = 1;
    for (auto& [k, c] : t_) need = lcm_u64(need, L_ / gcd_u64(L_, k == 0 ? L_ : k));
    if (need == L_) return;
    std::map<uint64_t, mpq_class> nt;
    uint64_t f = L_ / need;
    for (auto& [k, c] : t_) nt[k / f] = c;
    t_ = std::move(nt);
    L_ = need;
  }
  void maybe_compress() {
    if (L_ > 1 && t_.size() > 2 * detail::cyclo_table(L_).deg) compress();
  }

  uint64_t L_;
  std::map<uint64_t, mpq_class> t_;
};

}  // namespace chainrep

#endif
