#ifndef CHAINREP_NUMUTIL_HPP
#define CHAINREP_NUMUTIL_HPP

#include <cstdint>
#include <numeric>
#include <vector>

#include "chainrep/errors.hpp"

namespace chainrep {

inline bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline uint64_t pow_u64(uint64_t b, uint64_t e) {
  uint64_t r = 1;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

// b^e with overflow guard; throws UnsupportedSize past `cap`.
inline uint64_t pow_checked(uint64_t b, uint64_t e, uint64_t cap) {
  uint64_t r = 1;
  for (uint64_t i = 0; i < e; ++i) {
    if (b != 0 && r > cap / b) throw UnsupportedSize("power exceeds cap");
    r *= b;
  }
  return r;
}

inline uint64_t gcd_u64(uint64_t a, uint64_t b) { return std::gcd(a, b); }
inline uint64_t lcm_u64(uint64_t a, uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a / std::gcd(a, b) * b;
}

// Extended gcd: returns g and x,y with a*x + b*y = g (int64 domain).
inline int64_t xgcd(int64_t a, int64_t b, int64_t& x, int64_t& y) {
  if (b == 0) {
    x = (a >= 0) ? 1 : -1;
    y = 0;
    return a >= 0 ? a : -a;
  }
  int64_t x1, y1;
  int64_t g = xgcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

inline std::vector<std::pair<uint64_t, uint32_t>> factorize(uint64_t n) {
  std::vector<std::pair<uint64_t, uint32_t>> out;
  for (uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      uint32_t m = 0;
      while (n % d == 0) n /= d, ++m;
      out.push_back({d, m});
    }
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

inline uint64_t euler_phi(uint64_t n) {
  uint64_t r = n;
  for (auto [p, m] : factorize(n)) r = r / p * (p - 1);
  return r;
}

inline std::vector<uint64_t> divisors(uint64_t n) {
  std::vector<uint64_t> out;
  for (uint64_t d = 1; d * d <= n; ++d)
    if (n % d == 0) {
      out.push_back(d);
      if (d != n / d) out.push_back(n / d);
    }
  std::sort(out.begin(), out.end());
  return out;
}

// p-part of n.
inline uint64_t p_part(uint64_t n, uint64_t p) {
  uint64_t r = 1;
  while (n % p == 0) n /= p, r *= p;
  return r;
}

}  // namespace chainrep

#endif
