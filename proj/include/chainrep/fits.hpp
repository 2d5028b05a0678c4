#ifndef CHAINREP_FITS_HPP
#define CHAINREP_FITS_HPP

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "chainrep/oracle.hpp"

namespace chainrep {

// Exact rational polynomials, constant coefficient first.
using QPoly = std::vector<mpq_class>;

inline void qpoly_trim(QPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}
inline mpq_class qpoly_eval(const QPoly& p, const mpq_class& x) {
  mpq_class acc = 0;
  for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}
inline QPoly qpoly_mul(const QPoly& a, const QPoly& b) {
  if (a.empty() || b.empty()) return {};
  QPoly c(a.size() + b.size() - 1, mpq_class(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}
inline QPoly qpoly_add(QPoly a, const QPoly& b) {
  if (a.size() < b.size()) a.resize(b.size(), mpq_class(0));
  for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  qpoly_trim(a);
  return a;
}
inline QPoly qpoly_scale(const mpq_class& s, QPoly a) {
  for (auto& c : a) c *= s;
  qpoly_trim(a);
  return a;
}

// Exact division with remainder check; throws if it does not divide.
inline QPoly qpoly_div_exact(QPoly a, const QPoly& b) {
  require(!b.empty(), "qpoly_div_exact: division by zero");
  QPoly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, mpq_class(0));
  qpoly_trim(a);
  while (a.size() >= b.size() && !a.empty()) {
    mpq_class c = a.back() / b.back();
    size_t sh = a.size() - b.size();
    q[sh] = c;
    for (size_t i = 0; i < b.size(); ++i) a[sh + i] -= c * b[i];
    qpoly_trim(a);
  }
  require(a.empty(), "qpoly_div_exact: nonzero remainder");
  qpoly_trim(q);
  return q;
}

// Minimal-degree interpolating polynomial through exact points.
inline QPoly lagrange_fit(const std::vector<std::pair<mpq_class, mpq_class>>& pts) {
  QPoly acc;
  for (size_t i = 0; i < pts.size(); ++i) {
    QPoly term{pts[i].second};
    for (size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      mpq_class den = pts[i].first - pts[j].first;
      require(den != 0, "lagrange_fit: repeated abscissa");
      term = qpoly_mul(term, {-pts[j].first / den, 1 / den});
    }
    acc = qpoly_add(acc, term);
  }
  qpoly_trim(acc);
  return acc;
}

inline std::string qpoly_str(const QPoly& p) {
  if (p.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (size_t i = p.size(); i-- > 0;) {
    if (p[i] == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (i == 0 || p[i] != 1) os << p[i].get_str();
    if (i >= 1) {
      if (p[i] != 1) os << "*";
      os << "x";
      if (i >= 2) os << "^" << i;
    }
  }
  return first ? "0" : os.str();
}

// |GL_2(o_r) : K^l| as a polynomial in the residue field size.
inline QPoly gl2_index_poly(uint32_t r) {
  uint32_t l = (r + 1) / 2;
  // x^{4(l-1)} (x^2-1)(x^2-x)
  QPoly p{1};
  QPoly a{-1, 0, 1};       // x^2 - 1
  QPoly b{0, -1, 0, 1};    // x^3 - x ... careful: (x^2 - x) = {0,-1,1}
  b = QPoly{0, -1, 1};
  p = qpoly_mul(a, b);
  QPoly shift(4 * (l - 1) + 1, mpq_class(0));
  shift.back() = 1;
  return qpoly_mul(p, shift);
}

struct OnnTypeFit {
  std::string type_key;       // factor structure, e.g. "2^1" or "1^1,1^1"
  std::vector<uint64_t> qs;
  std::vector<uint64_t> orbit_counts;
  std::vector<uint64_t> per_orbit_counts;  // = |C_{G_l}(beta_l)|
  std::vector<uint64_t> dims;
  QPoly count_poly;  // fitted with the structural anchor (1, 0)
  QPoly dim_poly;    // index_poly / count_poly, exact
  QPoly orbit_poly;  // plain interpolation, reported only
  bool held_out_checked = false;
  bool held_out_count_exact = false;
  bool held_out_dim_exact = false;
  bool degree_bound_ok = false;
};

struct OnnFitReport {
  uint32_t N = 2, r = 2;
  std::string kind;
  std::vector<uint64_t> qs;
  std::vector<OnnTypeFit> types;
  std::map<uint64_t, std::map<uint64_t, uint64_t>> r_n_per_q;  // q -> dim -> count
  bool all_checks_pass() const {
    for (auto& t : types) {
      if (!t.degree_bound_ok) return false;
      if (t.held_out_checked && !(t.held_out_count_exact && t.held_out_dim_exact))
        return false;
    }
    return true;
  }
};

inline std::string orbit_type_key(const OrbitDescriptor& d) {
  std::ostringstream os;
  bool first = true;
  for (auto& f : d.factors) {
    if (!first) os << ",";
    first = false;
    os << f.deg << "^" << f.mult;
  }
  return os.str();
}

// Fit the regular character counts of GL_2(o_r) across residue field sizes.
// Per-orbit counts are centralizer orders, divisible by q - 1, so the fit is
// anchored at (1, 0); dimension polynomials come out of the exact division
// of the known index polynomial by the fitted count polynomial.
inline OnnFitReport onn_polynomial_fit(uint32_t r, RingKind kind,
                                       const std::vector<uint64_t>& q_list,
                                       uint64_t cap = 10000000) {
  OnnFitReport rep;
  rep.r = r;
  rep.kind = kind_name(kind);
  rep.qs = q_list;
  if (q_list.size() < 2) throw InsufficientData("need at least two q values");
  require(r % 2 == 0, "onn_polynomial_fit: prediction logic covers even r");

  std::map<std::string, OnnTypeFit> types;
  for (auto q : q_list) {
    RingPtr spec;
    if (kind == RingKind::zmod) {
      spec = make_ring(RingKind::zmod, (uint32_t)q, r, 1);
    } else {
      auto fac = factorize(q);
      require(fac.size() == 1, "q must be a prime power");
      spec = make_ring(kind, (uint32_t)fac[0].first, r, fac[0].second);
    }
    auto ctx = make_group_context(2, spec, cap);
    std::map<std::string, std::vector<std::pair<uint64_t, uint64_t>>> per_type;
    for (auto& desc : regular_class_reps(2, spec, ctx->lp)) {
      auto rr = regular_reps(*ctx, desc, "auto");
      uint64_t count = rr.primary.chars.size();
      uint64_t dim = rr.primary.chars.front().dim.get_ui();
      for (auto& rc : rr.primary.chars) {
        require(rc.dim.get_ui() == dim, "orbit with mixed dimensions");
        require(rc.e_mult == 1, "even-r multiplicity should be 1");
        rep.r_n_per_q[q][rc.dim.get_ui()] += 1;
      }
      per_type[orbit_type_key(desc)].push_back({count, dim});
    }
    for (auto& [key, rows] : per_type) {
      auto& tf = types[key];
      tf.type_key = key;
      uint64_t count = rows.front().first, dim = rows.front().second;
      for (auto& row : rows) {
        require(row.first == count, "orbit type with mixed counts");
        require(row.second == dim, "orbit type with mixed dimensions");
      }
      tf.qs.push_back(q);
      tf.orbit_counts.push_back(rows.size());
      tf.per_orbit_counts.push_back(count);
      tf.dims.push_back(dim);
    }
  }

  QPoly index_poly = gl2_index_poly(r);
  uint64_t degree_bound = (uint64_t)r * 2 * (2 - 1) / 2;  // binom(N,2) * r
  for (auto& [key, tf] : types) {
    require(tf.qs.size() == q_list.size(),
            "orbit type missing for some residue field size");
    auto fit_counts = [&](size_t upto) {
      std::vector<std::pair<mpq_class, mpq_class>> pts{{1, 0}};
      for (size_t i = 0; i < upto; ++i)
        pts.push_back({mpq_class((unsigned long)tf.qs[i]),
                       mpq_class((unsigned long)tf.per_orbit_counts[i])});
      return lagrange_fit(pts);
    };
    tf.count_poly = fit_counts(tf.qs.size());
    tf.dim_poly = qpoly_div_exact(index_poly, tf.count_poly);
    tf.degree_bound_ok = tf.dim_poly.size() <= degree_bound + 1;
    {
      std::vector<std::pair<mpq_class, mpq_class>> pts;
      for (size_t i = 0; i < tf.qs.size(); ++i)
        pts.push_back({mpq_class((unsigned long)tf.qs[i]),
                       mpq_class((unsigned long)tf.orbit_counts[i])});
      tf.orbit_poly = lagrange_fit(pts);
    }
    // dimension data must match the divided polynomial everywhere
    for (size_t i = 0; i < tf.qs.size(); ++i)
      require(qpoly_eval(tf.dim_poly, mpq_class((unsigned long)tf.qs[i])) ==
                  mpq_class((unsigned long)tf.dims[i]),
              "dimension polynomial does not reproduce the data");
    if (tf.qs.size() >= 3) {
      tf.held_out_checked = true;
      QPoly train = fit_counts(tf.qs.size() - 1);
      mpq_class pred =
          qpoly_eval(train, mpq_class((unsigned long)tf.qs.back()));
      tf.held_out_count_exact =
          pred == mpq_class((unsigned long)tf.per_orbit_counts.back());
      QPoly dim_train = qpoly_div_exact(index_poly, train);
      mpq_class dpred =
          qpoly_eval(dim_train, mpq_class((unsigned long)tf.qs.back()));
      tf.held_out_dim_exact =
          dpred == mpq_class((unsigned long)tf.dims.back());
    }
    rep.types.push_back(tf);
  }
  return rep;
}

}  // namespace chainrep

#endif
