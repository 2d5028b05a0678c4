#ifndef CHAINREP_GROUP_HPP
#define CHAINREP_GROUP_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "chainrep/matrix.hpp"
#include "chainrep/parallel.hpp"
#include "chainrep/poly.hpp"
#include "chainrep/ring.hpp"

namespace chainrep {

// N x N matrices over o_r packed into one word of ring-element codes.
struct PackedOps {
  std::shared_ptr<const RingTable> rt;
  uint32_t N = 0;
  uint32_t bits = 0;
  uint64_t mask = 0;

  using Codes = std::array<uint32_t, 16>;

  static PackedOps make(const std::shared_ptr<const RingTable>& rt, uint32_t N) {
    PackedOps o;
    o.rt = rt;
    o.N = N;
    uint32_t b = 1;
    while ((1u << b) < rt->n) ++b;
    o.bits = b;
    if ((uint64_t)b * N * N > 63)
      throw UnsupportedSize("matrix does not pack into 64 bits");
    o.mask = (uint64_t(1) << b) - 1;
    return o;
  }

  uint64_t pack(const Codes& c) const {
    uint64_t v = 0;
    for (uint32_t k = N * N; k-- > 0;) v = (v << bits) | c[k];
    return v;
  }
  void unpack(uint64_t v, Codes& c) const {
    for (uint32_t k = 0; k < N * N; ++k) {
      c[k] = (uint32_t)(v & mask);
      v >>= bits;
    }
  }
  uint64_t identity() const {
    Codes c{};
    for (uint32_t i = 0; i < N; ++i)
      for (uint32_t j = 0; j < N; ++j) c[i * N + j] = (i == j) ? rt->one : rt->zero;
    return pack(c);
  }
  void mul_codes(const Codes& a, const Codes& b, Codes& c) const {
    const RingTable& t = *rt;
    for (uint32_t i = 0; i < N; ++i)
      for (uint32_t j = 0; j < N; ++j) {
        uint32_t acc = t.zero;
        for (uint32_t k = 0; k < N; ++k)
          acc = t.a(acc, t.m(a[i * N + k], b[k * N + j]));
        c[i * N + j] = acc;
      }
  }
  uint64_t mul(uint64_t x, uint64_t y) const {
    Codes a, b, c;
    unpack(x, a);
    unpack(y, b);
    mul_codes(a, b, c);
    return pack(c);
  }
  uint32_t det_codes(const Codes& a) const {
    // cofactor expansion on first row, N <= 4
    const RingTable& t = *rt;
    std::function<uint32_t(std::vector<uint32_t>&, uint32_t)> rec =
        [&](std::vector<uint32_t>& cols, uint32_t row) -> uint32_t {
      if (cols.size() == 1) return a[row * N + cols[0]];
      uint32_t acc = t.zero;
      for (size_t k = 0; k < cols.size(); ++k) {
        uint32_t c0 = a[row * N + cols[k]];
        std::vector<uint32_t> rest;
        for (size_t j = 0; j < cols.size(); ++j)
          if (j != k) rest.push_back(cols[j]);
        uint32_t minor = rec(rest, row + 1);
        uint32_t term = t.m(c0, minor);
        acc = (k % 2 == 0) ? t.a(acc, term) : t.s(acc, term);
      }
      return acc;
    };
    std::vector<uint32_t> cols(N);
    for (uint32_t j = 0; j < N; ++j) cols[j] = j;
    return rec(cols, 0);
  }
  uint32_t trace_codes(const Codes& a) const {
    uint32_t acc = rt->zero;
    for (uint32_t i = 0; i < N; ++i) acc = rt->a(acc, a[i * N + i]);
    return acc;
  }
  bool is_invertible(uint64_t x) const {
    Codes a;
    unpack(x, a);
    return rt->is_unit(det_codes(a));
  }
  uint64_t inv(uint64_t x) const {
    Codes a;
    unpack(x, a);
    const RingTable& t = *rt;
    uint32_t d = det_codes(a);
    if (!t.is_unit(d)) throw NotAUnit("packed inverse of singular matrix");
    uint32_t dinv = t.inv[d];
    Codes adj{};
    if (N == 1) {
      adj[0] = t.one;
    } else {
      for (uint32_t i = 0; i < N; ++i)
        for (uint32_t j = 0; j < N; ++j) {
          // cofactor C_{ji}
          std::vector<uint32_t> rows, cols;
          for (uint32_t k = 0; k < N; ++k) {
            if (k != j) rows.push_back(k);
            if (k != i) cols.push_back(k);
          }
          std::function<uint32_t(std::vector<uint32_t>&, size_t)> rec =
              [&](std::vector<uint32_t>& cs, size_t depth) -> uint32_t {
            if (cs.size() == 1) return a[rows[depth] * N + cs[0]];
            uint32_t acc = t.zero;
            for (size_t k2 = 0; k2 < cs.size(); ++k2) {
              std::vector<uint32_t> rest;
              for (size_t j2 = 0; j2 < cs.size(); ++j2)
                if (j2 != k2) rest.push_back(cs[j2]);
              uint32_t term = t.m(a[rows[depth] * N + cs[k2]], rec(rest, depth + 1));
              acc = (k2 % 2 == 0) ? t.a(acc, term) : t.s(acc, term);
            }
            return acc;
          };
          uint32_t cof = rec(cols, 0);
          if ((i + j) % 2) cof = t.neg[cof];
          adj[i * N + j] = cof;
        }
    }
    Codes out{};
    for (uint32_t k = 0; k < N * N; ++k) out[k] = t.m(dinv, adj[k]);
    return pack(out);
  }
};

// |GL_N(o_r)| by the closed formula.
inline uint64_t gln_order(uint32_t N, const RingPtr& spec, uint64_t cap) {
  uint64_t q = spec->q;
  uint64_t order = 1;
  for (uint32_t i = 0; i < (spec->r - 1) * N * N; ++i)
    order = (order > cap * 4) ? order : order * q;
  uint64_t qN = pow_u64(q, N);
  for (uint32_t i = 0; i < N; ++i) {
    uint64_t factor = qN - pow_u64(q, i);
    if (order > (uint64_t)4e18 / (factor ? factor : 1)) return UINT64_MAX;
    order *= factor;
  }
  return order;
}

class Subgroup;
using SubgroupPtr = std::shared_ptr<const Subgroup>;

// Fully enumerated GL_N(o_r) with conjugacy data.
struct GroupContext {
  uint32_t N = 0;
  RingPtr spec;
  std::shared_ptr<const RingTable> rt;
  PackedOps ops;
  uint64_t cap = 10000000;
  uint64_t order = 0;
  uint32_t l = 0, lp = 0;  // l = ceil(r/2), l' = r - l

  std::vector<uint64_t> elems;  // sorted packed matrices
  std::unordered_map<uint64_t, uint32_t> index;
  std::vector<uint64_t> inv_elem;  // inverse per element index
  std::vector<uint64_t> gens;

  std::vector<uint32_t> class_id;    // per element index
  std::vector<uint32_t> class_reps;  // element index per class
  std::vector<uint64_t> class_sizes;
  uint64_t exponent = 1;

  mutable SubgroupPtr full_cache;
  mutable std::map<uint32_t, SubgroupPtr> kernel_cache;

  uint32_t idx(uint64_t g) const {
    auto it = index.find(g);
    require(it != index.end(), "element not in group");
    return it->second;
  }
  bool contains(uint64_t g) const { return index.count(g) != 0; }
  uint64_t mul(uint64_t a, uint64_t b) const { return ops.mul(a, b); }
  uint64_t inv(uint64_t a) const {
    auto it = index.find(a);
    if (it != index.end()) return inv_elem[it->second];
    return ops.inv(a);
  }
  uint64_t conj(uint64_t g, uint64_t x) const { return mul(mul(g, x), inv(g)); }
  uint64_t one() const { return ops.identity(); }

  uint64_t order_of(uint64_t g) const {
    uint64_t e = one(), x = g, n = 1;
    while (x != e) {
      x = mul(x, g);
      ++n;
      require(n <= order + 1, "order_of: runaway");
    }
    return n;
  }

  Mat to_mat(uint64_t g) const {
    PackedOps::Codes c;
    ops.unpack(g, c);
    Mat m = mat_zero(N, spec);
    for (uint32_t k = 0; k < N * N; ++k) m.e[k] = ring_elem_of_code(spec, c[k]);
    return m;
  }
  uint64_t from_mat(const Mat& m) const {
    require(m.N == N && *m.spec == *spec, "from_mat: wrong shape or ring");
    PackedOps::Codes c{};
    for (uint32_t k = 0; k < N * N; ++k) c[k] = (uint32_t)ring_code(m.e[k]);
    return ops.pack(c);
  }
  // Reduction of a packed matrix to the level-s context's packing.
  uint64_t reduce_packed(uint64_t g, const GroupContext& target) const {
    PackedOps::Codes c;
    ops.unpack(g, c);
    PackedOps::Codes d{};
    for (uint32_t k = 0; k < N * N; ++k)
      d[k] = rt->reduce_code[target.spec->r][c[k]];
    return target.ops.pack(d);
  }
};

using ContextPtr = std::shared_ptr<const GroupContext>;

namespace detail {

inline void closure_grow(const GroupContext& ctx, std::vector<uint8_t>& in,
                         std::vector<uint64_t>& members,
                         const std::vector<uint64_t>& gens) {
  std::vector<uint32_t> work;
  for (auto g : members) work.push_back(ctx.idx(g));
  size_t head = 0;
  while (head < work.size()) {
    uint64_t x = ctx.elems[work[head++]];
    for (auto g : gens) {
      uint64_t y = ctx.mul(x, g);
      uint32_t yi = ctx.idx(y);
      if (!in[yi]) {
        in[yi] = 1;
        work.push_back(yi);
        members.push_back(y);
      }
    }
  }
}

}  // namespace detail

inline ContextPtr make_group_context(uint32_t N, const RingPtr& spec,
                                     uint64_t cap = 10000000) {
  static std::map<std::pair<std::string, uint32_t>, ContextPtr> registry;
  static std::mutex mu;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(spec->literal(), N);
    auto it = registry.find(key);
    if (it != registry.end()) {
      if (it->second->order > cap)
        throw DeskScaleExceeded("group order exceeds cap");
      return it->second;
    }
  }
  uint64_t order = gln_order(N, spec, cap);
  if (order > cap)
    throw DeskScaleExceeded("|GL_" + std::to_string(N) + "(" + spec->literal() +
                            ")| = " + std::to_string(order) + " exceeds cap " +
                            std::to_string(cap));

  auto ctx = std::make_shared<GroupContext>();
  ctx->N = N;
  ctx->spec = spec;
  ctx->rt = ring_table(spec);
  ctx->ops = PackedOps::make(ctx->rt, N);
  ctx->cap = cap;
  ctx->order = order;
  ctx->l = (spec->r + 1) / 2;
  ctx->lp = spec->r - ctx->l;

  // enumerate all matrices, keep those with unit determinant
  uint64_t scan = 1;
  for (uint32_t k = 0; k < N * N; ++k) scan *= ctx->rt->n;
  unsigned jobs = worker_count();
  uint64_t chunk = scan / jobs + 1;
  std::vector<std::vector<uint64_t>> found(jobs);
  parallel_for(jobs, [&](uint64_t t) {
    uint64_t lo = t * chunk, hi = std::min(scan, lo + chunk);
    PackedOps::Codes c{};
    uint64_t v = lo;
    for (uint32_t k = 0; k < N * N; ++k) {
      c[k] = (uint32_t)(v % ctx->rt->n);
      v /= ctx->rt->n;
    }
    for (uint64_t i = lo; i < hi; ++i) {
      if (ctx->rt->is_unit(ctx->ops.det_codes(c))) found[t].push_back(ctx->ops.pack(c));
      // increment mixed-radix counter
      for (uint32_t k = 0; k < N * N; ++k) {
        if (++c[k] < ctx->rt->n) break;
        c[k] = 0;
      }
    }
  });
  for (auto& part : found)
    ctx->elems.insert(ctx->elems.end(), part.begin(), part.end());
  std::sort(ctx->elems.begin(), ctx->elems.end());
  require(ctx->elems.size() == order,
          "enumerated group order disagrees with the closed formula");
  ctx->index.reserve(ctx->elems.size() * 2);
  for (uint32_t i = 0; i < ctx->elems.size(); ++i) ctx->index[ctx->elems[i]] = i;

  ctx->inv_elem.resize(ctx->elems.size());
  parallel_for(ctx->elems.size(),
               [&](uint64_t i) { ctx->inv_elem[i] = ctx->ops.inv(ctx->elems[i]); });

  // generators: standard candidates, then greedy completion
  {
    std::vector<uint64_t> gens;
    const RingTable& t = *ctx->rt;
    PackedOps::Codes c{};
    auto base = [&] {
      for (uint32_t i = 0; i < N; ++i)
        for (uint32_t j = 0; j < N; ++j) c[i * N + j] = (i == j) ? t.one : t.zero;
    };
    if (N >= 2) {
      base();  // cyclic permutation
      for (uint32_t i = 0; i < N; ++i)
        for (uint32_t j = 0; j < N; ++j)
          c[i * N + j] = (j == (i + 1) % N) ? t.one : t.zero;
      gens.push_back(ctx->ops.pack(c));
      base();
      c[0 * N + 1] = t.one;  // transvection
      gens.push_back(ctx->ops.pack(c));
      base();
      c[0 * N + 1] = t.pi;
      gens.push_back(ctx->ops.pack(c));
    }
    for (auto u : t.units) {
      base();
      c[0] = u;
      gens.push_back(ctx->ops.pack(c));
      if (gens.size() > 24) break;
    }
    std::sort(gens.begin(), gens.end());
    gens.erase(std::unique(gens.begin(), gens.end()), gens.end());

    for (;;) {
      std::vector<uint8_t> in(ctx->elems.size(), 0);
      std::vector<uint64_t> members{ctx->one()};
      in[ctx->idx(ctx->one())] = 1;
      detail::closure_grow(*ctx, in, members, gens);
      if (members.size() == ctx->elems.size()) break;
      for (uint32_t i = 0; i < ctx->elems.size(); ++i)
        if (!in[i]) {
          gens.push_back(ctx->elems[i]);
          break;
        }
    }
    ctx->gens = gens;
  }

  // conjugacy classes: orbit closure under conjugation by generators
  {
    std::vector<uint64_t> gen_inv;
    for (auto g : ctx->gens) gen_inv.push_back(ctx->inv(g));
    ctx->class_id.assign(ctx->elems.size(), UINT32_MAX);
    std::vector<uint32_t> work;
    for (uint32_t i = 0; i < ctx->elems.size(); ++i) {
      if (ctx->class_id[i] != UINT32_MAX) continue;
      uint32_t cid = (uint32_t)ctx->class_reps.size();
      ctx->class_reps.push_back(i);
      work.clear();
      work.push_back(i);
      ctx->class_id[i] = cid;
      size_t head = 0;
      while (head < work.size()) {
        uint64_t x = ctx->elems[work[head++]];
        for (size_t k = 0; k < ctx->gens.size(); ++k) {
          uint64_t y = ctx->mul(ctx->mul(ctx->gens[k], x), gen_inv[k]);
          uint32_t yi = ctx->idx(y);
          if (ctx->class_id[yi] == UINT32_MAX) {
            ctx->class_id[yi] = cid;
            work.push_back(yi);
          }
        }
      }
      ctx->class_sizes.push_back(work.size());
    }
  }

  // exponent = lcm of element orders (orders are constant on classes)
  {
    uint64_t e = 1;
    for (auto rep : ctx->class_reps)
      e = lcm_u64(e, ctx->order_of(ctx->elems[rep]));
    ctx->exponent = e;
  }

  std::lock_guard<std::mutex> lock(mu);
  registry[std::make_pair(spec->literal(), N)] = ctx;
  return ctx;
}

// A subgroup stored as a sorted element list.
class Subgroup {
 public:
  Subgroup(const GroupContext* ctx, std::vector<uint64_t> sorted_elems)
      : ctx_(ctx), elems_(std::move(sorted_elems)) {}

  const GroupContext& ctx() const { return *ctx_; }
  const std::vector<uint64_t>& elems() const { return elems_; }
  uint64_t size() const { return elems_.size(); }
  bool contains(uint64_t g) const {
    return std::binary_search(elems_.begin(), elems_.end(), g);
  }
  uint32_t pos(uint64_t g) const {
    auto it = std::lower_bound(elems_.begin(), elems_.end(), g);
    require(it != elems_.end() && *it == g, "Subgroup::pos: not a member");
    return (uint32_t)(it - elems_.begin());
  }

  // Greedy small generating sequence (deterministic).
  const std::vector<uint64_t>& gens() const {
    std::lock_guard<std::mutex> lock(mu_);
    if (!gens_.empty() || size() == 1) return gens_;
    std::vector<uint8_t> in(elems_.size(), 0);
    std::vector<uint32_t> closed;
    auto idx_of = [&](uint64_t g) { return pos(g); };
    in[idx_of(ctx_->one())] = 1;
    closed.push_back(idx_of(ctx_->one()));
    size_t covered = 1;
    while (covered < elems_.size()) {
      uint32_t next = UINT32_MAX;
      for (uint32_t i = 0; i < elems_.size(); ++i)
        if (!in[i]) {
          next = i;
          break;
        }
      gens_.push_back(elems_[next]);
      // grow closure with the new generator
      size_t head = 0;
      if (!in[next]) {
        in[next] = 1;
        closed.push_back(next);
        ++covered;
      }
      while (head < closed.size()) {
        uint64_t x = elems_[closed[head++]];
        for (auto g : gens_) {
          uint64_t y = ctx_->mul(x, g);
          uint32_t yi = idx_of(y);
          if (!in[yi]) {
            in[yi] = 1;
            closed.push_back(yi);
            ++covered;
          }
        }
      }
    }
    return gens_;
  }

  bool is_abelian() const {
    auto& g = gens();
    for (size_t i = 0; i < g.size(); ++i)
      for (size_t j = i + 1; j < g.size(); ++j)
        if (ctx_->mul(g[i], g[j]) != ctx_->mul(g[j], g[i])) return false;
    return true;
  }

  uint64_t exponent() const {
    uint64_t e = 1;
    ensure_classes();
    for (auto rep : class_reps_) e = lcm_u64(e, ctx_->order_of(elems_[rep]));
    return e;
  }

  // conjugacy classes within the subgroup
  void ensure_classes() const {
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (!class_id_.empty()) return;
    }
    auto& g = gens();
    std::lock_guard<std::mutex> lock(mu_);
    if (!class_id_.empty()) return;
    std::vector<uint64_t> gi;
    for (auto x : g) gi.push_back(ctx_->inv(x));
    class_id_.assign(elems_.size(), UINT32_MAX);
    std::vector<uint32_t> work;
    for (uint32_t i = 0; i < elems_.size(); ++i) {
      if (class_id_[i] != UINT32_MAX) continue;
      uint32_t cid = (uint32_t)class_reps_.size();
      class_reps_.push_back(i);
      work.clear();
      work.push_back(i);
      class_id_[i] = cid;
      size_t head = 0;
      while (head < work.size()) {
        uint64_t x = elems_[work[head++]];
        for (size_t k = 0; k < g.size(); ++k) {
          uint64_t y = ctx_->mul(ctx_->mul(g[k], x), gi[k]);
          uint32_t yi = pos(y);
          if (class_id_[yi] == UINT32_MAX) {
            class_id_[yi] = cid;
            work.push_back(yi);
          }
        }
      }
      class_sizes_.push_back(work.size());
    }
  }
  uint32_t num_classes() const {
    ensure_classes();
    return (uint32_t)class_reps_.size();
  }
  uint32_t class_of_pos(uint32_t i) const {
    ensure_classes();
    return class_id_[i];
  }
  uint64_t class_rep(uint32_t c) const {
    ensure_classes();
    return elems_[class_reps_[c]];
  }
  uint64_t class_size(uint32_t c) const {
    ensure_classes();
    return class_sizes_[c];
  }

  bool verify_closure() const {
    // gens-based: closure of gens equals the element list
    if (size() == 1) return elems_[0] == ctx_->one();
    if (!contains(ctx_->one())) return false;
    for (auto g : gens())
      for (auto h : elems_)
        if (!contains(ctx_->mul(h, g))) return false;
    for (auto h : elems_)
      if (!contains(ctx_->inv(h))) return false;
    return true;
  }

  // Install precomputed generator and class data (used by the full group,
  // whose classes are already known to the context).
  void preset(std::vector<uint64_t> gens, std::vector<uint32_t> class_id,
              std::vector<uint32_t> class_reps,
              std::vector<uint64_t> class_sizes) const {
    std::lock_guard<std::mutex> lock(mu_);
    gens_ = std::move(gens);
    class_id_ = std::move(class_id);
    class_reps_ = std::move(class_reps);
    class_sizes_ = std::move(class_sizes);
  }

 private:
  const GroupContext* ctx_;
  std::vector<uint64_t> elems_;
  mutable std::mutex mu_;
  mutable std::vector<uint64_t> gens_;
  mutable std::vector<uint32_t> class_id_;
  mutable std::vector<uint32_t> class_reps_;
  mutable std::vector<uint64_t> class_sizes_;
};

inline SubgroupPtr subgroup_from_sorted(const GroupContext& ctx,
                                        std::vector<uint64_t> elems) {
  return std::make_shared<Subgroup>(&ctx, std::move(elems));
}

inline SubgroupPtr trivial_subgroup(const GroupContext& ctx) {
  return subgroup_from_sorted(ctx, {ctx.one()});
}

// The whole group as a Subgroup; class data is shared with the context.
inline SubgroupPtr full_subgroup(const GroupContext& ctx) {
  if (ctx.full_cache) return ctx.full_cache;
  auto s = subgroup_from_sorted(ctx, ctx.elems);
  s->preset(ctx.gens, ctx.class_id, ctx.class_reps, ctx.class_sizes);
  ctx.full_cache = s;
  return s;
}

inline SubgroupPtr subgroup_closure(const GroupContext& ctx,
                                    const std::vector<uint64_t>& gens) {
  std::vector<uint8_t> in(ctx.elems.size(), 0);
  std::vector<uint64_t> members{ctx.one()};
  in[ctx.idx(ctx.one())] = 1;
  detail::closure_grow(ctx, in, members, gens);
  std::sort(members.begin(), members.end());
  return subgroup_from_sorted(ctx, std::move(members));
}

inline SubgroupPtr product_set(const Subgroup& a, const Subgroup& b) {
  const GroupContext& ctx = a.ctx();
  std::vector<uint64_t> out;
  std::vector<uint8_t> seen(ctx.elems.size(), 0);
  for (auto x : a.elems())
    for (auto y : b.elems()) {
      uint64_t z = ctx.mul(x, y);
      uint32_t zi = ctx.idx(z);
      if (!seen[zi]) {
        seen[zi] = 1;
        out.push_back(z);
      }
    }
  std::sort(out.begin(), out.end());
  return subgroup_from_sorted(ctx, std::move(out));
}

inline bool is_subgroup_of(const Subgroup& h, const Subgroup& g) {
  if (h.size() > g.size()) return false;
  for (auto x : h.elems())
    if (!g.contains(x)) return false;
  return true;
}

inline bool is_normal_in(const Subgroup& h, const Subgroup& g) {
  for (auto x : g.gens())
    for (auto y : h.elems())
      if (!h.contains(g.ctx().conj(x, y))) return false;
  return true;
}

inline SubgroupPtr intersect(const Subgroup& a, const Subgroup& b) {
  std::vector<uint64_t> out;
  const Subgroup& small = a.size() <= b.size() ? a : b;
  const Subgroup& big = a.size() <= b.size() ? b : a;
  for (auto x : small.elems())
    if (big.contains(x)) out.push_back(x);
  return subgroup_from_sorted(a.ctx(), std::move(out));
}

// K^i = kernel of GL_N(o_r) -> GL_N(o_i).  Verified: order formula,
// normality, and the bijection x -> 1 + pi^i x from g_{r-i}.
inline SubgroupPtr congruence_kernel(const GroupContext& ctx, uint32_t i) {
  if (i < 1 || i > ctx.spec->r) throw BadLevel("congruence_kernel: bad level");
  auto it = ctx.kernel_cache.find(i);
  if (it != ctx.kernel_cache.end()) return it->second;
  const RingTable& t = *ctx.rt;
  uint32_t r = ctx.spec->r;
  std::vector<uint64_t> members;
  if (i == r) {
    members.push_back(ctx.one());
  } else {
    // build directly from the bijection with g_{r-i}
    RingPtr low = make_ring(ctx.spec->kind, ctx.spec->p, r - i, ctx.spec->f);
    uint64_t n_low = low->size;
    uint64_t count = 1;
    for (uint32_t k = 0; k < ctx.N * ctx.N; ++k) count *= n_low;
    uint64_t pi_i = t.one;
    for (uint32_t k = 0; k < i; ++k) pi_i = t.m(pi_i, t.pi);
    members.reserve(count);
    std::vector<uint64_t> ctr(ctx.N * ctx.N, 0);
    PackedOps::Codes c{};
    for (uint64_t step = 0; step < count; ++step) {
      for (uint32_t k = 0; k < ctx.N * ctx.N; ++k) {
        uint32_t lifted = t.lift_code[r - i][ctr[k]];
        uint32_t entry = t.m(pi_i, lifted);
        uint32_t diag = (k % (ctx.N + 1) == 0) ? t.one : t.zero;
        c[k] = t.a(diag, entry);
      }
      members.push_back(ctx.ops.pack(c));
      for (uint32_t k = 0; k < ctx.N * ctx.N; ++k) {
        if (++ctr[k] < n_low) break;
        ctr[k] = 0;
      }
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    require(members.size() == count,
            "congruence_kernel: x -> 1 + pi^i x is not injective");
  }
  uint64_t expect = pow_u64(ctx.spec->q, (uint64_t)(r - i) * ctx.N * ctx.N);
  require(members.size() == expect, "congruence_kernel: order formula failed");
  for (auto g : members) require(ctx.contains(g), "kernel element outside group");
  auto K = subgroup_from_sorted(ctx, std::move(members));
  for (auto g : ctx.gens)
    for (auto y : K->elems())
      require(K->contains(ctx.conj(g, y)), "congruence_kernel: not normal");
  ctx.kernel_cache[i] = K;
  return K;
}

// Check that x -> 1 + pi^i x is a homomorphism g_{r-i} -> K^i (true iff the
// kernel is abelian, i.e. i >= r/2); exhaustive over all pairs.
inline bool verify_ki_isomorphism(const GroupContext& ctx, uint32_t i) {
  auto K = congruence_kernel(ctx, i);
  if (K->size() * K->size() > 100000000ull)
    throw DeskScaleExceeded("K^i pair scan too large");
  const RingTable& t = *ctx.rt;
  uint64_t pi_i = t.one;
  for (uint32_t k = 0; k < i; ++k) pi_i = t.m(pi_i, t.pi);
  // test (1+x)(1+y) == 1+(x+y) for all pairs, i.e. xy == 0
  for (auto a : K->elems())
    for (auto b : K->elems()) {
      PackedOps::Codes ca, cb, cc;
      ctx.ops.unpack(a, ca);
      ctx.ops.unpack(b, cb);
      // c = a*b - a - b + 1 must equal 0  (a = 1+x, b = 1+y)
      ctx.ops.mul_codes(ca, cb, cc);
      for (uint32_t k = 0; k < ctx.N * ctx.N; ++k) {
        uint32_t v = t.s(t.s(cc[k], ca[k]), cb[k]);
        uint32_t diag = (k % (ctx.N + 1) == 0) ? t.one : t.zero;
        v = t.a(v, diag);
        if (v != t.zero) return false;
      }
    }
  return true;
}

struct FiltrationReport {
  bool pass = true;
  uint32_t bad_i = 0, bad_j = 0;
  uint64_t witness_x = 0, witness_y = 0;
};

// [K^i, K^j] subseteq K^{min(i+j,r)}, exhaustively.
inline FiltrationReport commutator_filtration_check(const GroupContext& ctx) {
  FiltrationReport rep;
  uint32_t r = ctx.spec->r;
  uint64_t total = 0;
  for (uint32_t i = 1; i <= r; ++i)
    for (uint32_t j = i; j <= r; ++j)
      total += congruence_kernel(ctx, i)->size() * congruence_kernel(ctx, j)->size();
  if (total > 200000000ull)
    throw DeskScaleExceeded("commutator filtration scan too large");
  for (uint32_t i = 1; i <= r; ++i)
    for (uint32_t j = i; j <= r; ++j) {
      auto Ki = congruence_kernel(ctx, i);
      auto Kj = congruence_kernel(ctx, j);
      auto Kt = congruence_kernel(ctx, std::min(i + j, r));
      for (auto x : Ki->elems()) {
        uint64_t xi = ctx.inv(x);
        for (auto y : Kj->elems()) {
          uint64_t comm = ctx.mul(ctx.mul(x, y), ctx.mul(xi, ctx.inv(y)));
          if (!Kt->contains(comm)) {
            rep.pass = false;
            rep.bad_i = i;
            rep.bad_j = j;
            rep.witness_x = x;
            rep.witness_y = y;
            return rep;
          }
        }
      }
    }
  return rep;
}

// Brute-force centralizer of a matrix (not necessarily invertible).
inline SubgroupPtr centralizer(const GroupContext& ctx, const Mat& beta) {
  uint64_t b = ctx.from_mat(beta);
  unsigned jobs = worker_count();
  uint64_t chunk = ctx.elems.size() / jobs + 1;
  std::vector<std::vector<uint64_t>> found(jobs);
  parallel_for(jobs, [&](uint64_t t) {
    uint64_t lo = t * chunk, hi = std::min<uint64_t>(ctx.elems.size(), lo + chunk);
    for (uint64_t i = lo; i < hi; ++i) {
      uint64_t g = ctx.elems[i];
      if (ctx.mul(g, b) == ctx.mul(b, g)) found[t].push_back(g);
    }
  });
  std::vector<uint64_t> out;
  for (auto& part : found) out.insert(out.end(), part.begin(), part.end());
  return subgroup_from_sorted(ctx, std::move(out));
}

// o_r[beta]^x: the unit span of powers of beta.
inline SubgroupPtr unit_polynomial_span(const GroupContext& ctx, const Mat& beta) {
  // additive span of I, beta, ..., beta^{N-1} over o_r, then filter units
  std::vector<Mat> pows{mat_identity(ctx.N, ctx.spec)};
  for (uint32_t k = 1; k < ctx.N; ++k) pows.push_back(mat_mul(pows.back(), beta));
  std::vector<uint64_t> members;
  std::vector<uint8_t> seen(ctx.elems.size(), 0);
  uint64_t n = ctx.spec->size;
  uint64_t count = 1;
  for (uint32_t k = 0; k < ctx.N; ++k) count *= n;
  for (uint64_t idx = 0; idx < count; ++idx) {
    uint64_t t = idx;
    Mat acc = mat_zero(ctx.N, ctx.spec);
    for (uint32_t k = 0; k < ctx.N; ++k) {
      RingElem coeff = ring_elem_of_code(ctx.spec, t % n);
      t /= n;
      if (!ring_is_zero(coeff)) acc = mat_add(acc, mat_scale(coeff, pows[k]));
    }
    uint64_t packed = ctx.from_mat(acc);
    if (!ctx.contains(packed)) continue;
    uint32_t pi = ctx.idx(packed);
    if (!seen[pi]) {
      seen[pi] = 1;
      members.push_back(packed);
    }
  }
  std::sort(members.begin(), members.end());
  return subgroup_from_sorted(ctx, std::move(members));
}

struct SurjectivityReport {
  bool surjective = false;
  bool asserted = false;  // false means observe-only (beta not regular)
};

inline SurjectivityReport centralizer_reduction_surjectivity(
    const GroupContext& ctx, const Mat& beta, uint32_t s, bool observe = false) {
  bool reg = is_regular(beta);
  if (!reg && !observe)
    throw RegularityViolation("reduction surjectivity requires regular beta");
  SurjectivityReport rep;
  rep.asserted = reg;
  auto C = centralizer(ctx, beta);
  auto low = make_group_context(s == ctx.spec->r
                                    ? ctx.spec
                                    : make_ring(ctx.spec->kind, ctx.spec->p, s,
                                                ctx.spec->f),
                                ctx.N, ctx.cap);
  auto C_low = centralizer(*low, mat_reduce(beta, s));
  std::vector<uint64_t> image;
  std::vector<uint8_t> seen(low->elems.size(), 0);
  for (auto g : C->elems()) {
    uint64_t h = ctx.reduce_packed(g, *low);
    uint32_t hi = low->idx(h);
    if (!seen[hi]) {
      seen[hi] = 1;
      image.push_back(h);
    }
  }
  rep.surjective = image.size() == C_low->size();
  return rep;
}

}  // namespace chainrep

#endif
