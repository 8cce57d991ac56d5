// p-covering group construction: add a central tail to every non-defining
// relation, enforce the overlap consistency relations on the tail space,
// eliminate dependent tails. The kernel of cover -> G is the p-multiplicator;
// the next lower exponent-p central term of the cover is the nucleus.
#pragma once

#include "pclab/structure.hpp"

namespace pclab {

struct InconsistentInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StepExceedsNucleus : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Attachment of a multiplicator basis element to the relation it extends.
struct TailInfo {
  bool is_pow = false;
  int i = -1, j = -1;  // pow: g_i^p; comm: [g_j, g_i]
};

struct PCoverData {
  PcPresentation base;   // standardized input presentation (old generators)
  PcPresentation cover;  // consistent; generators = old gens + mu tails
  int n_old = 0;
  int mu = 0, nu = 0, d1 = 0, d2 = 0;
  std::vector<TailInfo> tails;                     // per surviving tail
  std::vector<std::vector<uint8_t>> nucleus_rows;  // echelon rows, tail coords

  std::string cover_label;
};

namespace detail {

// Gauss elimination over F_p where the pivot of each row is its HIGHEST
// nonzero coordinate; rows are fully reduced against each other.
struct HighPivotGauss {
  int p;
  size_t width;
  std::vector<std::vector<uint8_t>> rows;
  std::vector<int> pivots;  // pivot column per row

  explicit HighPivotGauss(int p_, size_t w) : p(p_), width(w) {}

  std::vector<uint8_t> reduce(std::vector<uint8_t> v) const {
    for (size_t r = 0; r < rows.size(); ++r) {
      int pc = pivots[r];
      if (v[pc]) {
        int mfac = v[pc];
        for (size_t t = 0; t < width; ++t)
          v[t] = (uint8_t)((v[t] + (p - mfac) * rows[r][t]) % p);
      }
    }
    return v;
  }

  bool add(std::vector<uint8_t> v) {
    v = reduce(std::move(v));
    int pc = -1;
    for (int t = (int)width - 1; t >= 0; --t)
      if (v[t]) { pc = t; break; }
    if (pc < 0) return false;
    int inv = 1;
    while ((inv * v[pc]) % p != 1) ++inv;
    for (size_t t = 0; t < width; ++t) v[t] = (uint8_t)((v[t] * inv) % p);
    // eliminate from existing rows
    for (size_t r = 0; r < rows.size(); ++r)
      if (rows[r][pc]) {
        int mfac = rows[r][pc];
        for (size_t t = 0; t < width; ++t)
          rows[r][t] = (uint8_t)((rows[r][t] + (p - mfac) * v[t]) % p);
      }
    rows.push_back(std::move(v));
    pivots.push_back(pc);
    return true;
  }

  bool is_pivot(int col) const {
    for (int pc : pivots)
      if (pc == col) return true;
    return false;
  }
};

// Quotient a presentation by the span of central generator-combinations
// supported on the block [n_old, n_old + q): the pivot generators of the
// reversed-echelon span are eliminated, the rest survive (reindexed).
struct CentralElimination {
  PcPresentation pres;            // result
  std::vector<int> survivors;     // result tail t -> original tail index
  std::vector<int> old_to_new;    // original tail index -> result tail or -1
};

inline CentralElimination eliminate_central_block(const PcPresentation& E, int n_old,
                                                  const HighPivotGauss& g,
                                                  int new_tail_weight = -1) {
  const int q = E.ngens - n_old;
  const int p = E.prime;
  CentralElimination out;
  out.old_to_new.assign(q, -1);
  for (int t = 0; t < q; ++t)
    if (!g.is_pivot(t)) {
      out.old_to_new[t] = (int)out.survivors.size();
      out.survivors.push_back(t);
    }
  const int mu = (int)out.survivors.size();
  out.pres = PcPresentation(p, n_old + mu);
  for (int k = 0; k < n_old; ++k) out.pres.weights[k] = E.weights[k];
  for (int t = 0; t < mu; ++t)
    out.pres.weights[n_old + t] =
        new_tail_weight > 0 ? new_tail_weight : E.weights[n_old + out.survivors[t]];
  out.pres.defs.assign(out.pres.ngens, Definition{});
  for (int k = 0; k < n_old && k < (int)E.defs.size(); ++k) out.pres.defs[k] = E.defs[k];

  auto map_vec = [&](const Vec& v) {
    if (v.empty()) return Vec{};
    std::vector<uint8_t> tail((size_t)q, 0);
    for (int t = 0; t < q; ++t) tail[t] = v[n_old + t];
    tail = g.reduce(std::move(tail));
    Vec w((size_t)out.pres.ngens, 0);
    for (int k = 0; k < n_old; ++k) w[k] = v[k];
    for (int t = 0; t < q; ++t)
      if (tail[t]) w[n_old + out.old_to_new[t]] = tail[t];
    return is_identity(w) ? Vec{} : w;
  };
  for (int k = 0; k < n_old; ++k)
    if (!E.pow[k].empty()) out.pres.set_power(k, map_vec(E.pow[k]));
  for (int j = 1; j < n_old; ++j)
    for (int i = 0; i < j; ++i) {
      const Vec& v = E.comm_rhs(j, i);
      if (!v.empty()) out.pres.set_comm(j, i, map_vec(v));
    }
  // surviving tails stay central of order p (their relations are trivial)
  out.pres.validate();
  return out;
}

}  // namespace detail

inline PCoverData p_cover(const PcPresentation& input) {
  PcPresentation G = standardized(input);
  {
    auto rep = check_consistency(G);
    if (!rep.consistent)
      throw InconsistentInput("p_cover requires a consistent presentation (" +
                              (rep.failures.empty() ? "?" : rep.failures.front()) + ")");
  }
  const int n = G.ngens, p = G.prime;
  int d = 0;
  while (d < n && G.weights[d] == 1) ++d;
  const int c = G.exponent_p_class();

  // Which relations are definitions?
  std::vector<int> pow_def(n, 0);
  std::vector<std::vector<int>> comm_def(n, std::vector<int>(n, 0));
  for (int k = 0; k < n; ++k) {
    const auto& df = G.defs[k];
    if (df.kind == Definition::Pow) pow_def[df.i] = 1;
    if (df.kind == Definition::Comm) comm_def[df.j][df.i] = 1;
  }

  // Tails on all non-defining relations, ordered by weight then kind.
  std::vector<TailInfo> tails;
  for (int w = 1; w <= 2 * c + 1; ++w) {
    for (int i = 0; i < n; ++i)
      if (!pow_def[i] && G.weights[i] + 1 == w) tails.push_back(TailInfo{true, i, -1});
    for (int j = 1; j < n; ++j)
      for (int i = 0; i < j; ++i)
        if (!comm_def[j][i] && G.weights[j] + G.weights[i] == w)
          tails.push_back(TailInfo{false, i, j});
  }
  const int q = (int)tails.size();

  // Enlarged presentation.
  PcPresentation E(p, n + q);
  for (int k = 0; k < n; ++k) E.weights[k] = G.weights[k];
  E.defs.assign(n + q, Definition{});
  for (int k = 0; k < n; ++k) E.defs[k] = G.defs[k];
  auto widen = [&](const Vec& v) {
    Vec w((size_t)(n + q), 0);
    for (int k = 0; k < n; ++k) w[k] = v.empty() ? 0 : v[k];
    return w;
  };
  for (int k = 0; k < n; ++k)
    if (!G.pow[k].empty()) E.set_power(k, widen(G.pow[k]));
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (!G.comm_rhs(j, i).empty()) E.set_comm(j, i, widen(G.comm_rhs(j, i)));
  for (int t = 0; t < q; ++t) {
    const TailInfo& ti = tails[t];
    int w = ti.is_pow ? G.weights[ti.i] + 1 : G.weights[ti.j] + G.weights[ti.i];
    E.weights[n + t] = w;
    Definition df;
    if (ti.is_pow) {
      Vec v = E.pow[ti.i].empty() ? Vec((size_t)(n + q), 0) : E.pow[ti.i];
      v[n + t] = 1;
      E.set_power(ti.i, std::move(v));
      df.kind = Definition::Pow;
      df.i = ti.i;
    } else {
      Vec v = E.comm_rhs(ti.j, ti.i).empty() ? Vec((size_t)(n + q), 0)
                                             : E.comm_rhs(ti.j, ti.i);
      v[n + t] = 1;
      E.set_comm(ti.j, ti.i, std::move(v));
      df.kind = Definition::Comm;
      df.i = ti.i;
      df.j = ti.j;
    }
    E.defs[n + t] = df;
  }
  E.validate();

  // Consistency equations on the tail space: all overlaps among old
  // generators (tail-involving overlaps hold identically). No weight filter:
  // generated presentations carry definitions whose nominal relation weight
  // can sit below the generator weight, which breaks the filtered set.
  detail::HighPivotGauss gauss(p, (size_t)q);
  auto push_eq = [&](const Vec& lhs, const Vec& rhs) {
    for (int k = 0; k < n; ++k)
      if (lhs[k] != rhs[k])
        throw PresentationError("consistency difference escaped the tail space");
    std::vector<uint8_t> v((size_t)q, 0);
    bool nz = false;
    for (int t = 0; t < q; ++t) {
      int dlt = (lhs[n + t] - rhs[n + t] + p) % p;
      v[t] = (uint8_t)dlt;
      nz |= (dlt != 0);
    }
    if (nz) gauss.add(std::move(v));
  };
  auto gel = [&](int k) { return gen_element(E, k); };
  for (int k = 2; k < n; ++k)
    for (int j = 1; j < k; ++j)
      for (int i = 0; i < j; ++i) {
        Vec lhs = multiply(E, multiply(E, gel(k), gel(j)), gel(i));
        Vec rhs = multiply(E, gel(k), multiply(E, gel(j), gel(i)));
        push_eq(lhs, rhs);
      }
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      {
        Vec pj = E.pow[j].empty() ? identity_element(E) : E.pow[j];
        Vec lhs = multiply(E, pj, gel(i));
        Vec rhs = multiply(E, power(E, gel(j), p - 1), multiply(E, gel(j), gel(i)));
        push_eq(lhs, rhs);
      }
      {
        Vec pi = E.pow[i].empty() ? identity_element(E) : E.pow[i];
        Vec lhs = multiply(E, gel(j), pi);
        Vec rhs = multiply(E, multiply(E, gel(j), gel(i)), power(E, gel(i), p - 1));
        push_eq(lhs, rhs);
      }
    }
  for (int i = 0; i < n; ++i) {
    Vec pi = E.pow[i].empty() ? identity_element(E) : E.pow[i];
    push_eq(multiply(E, gel(i), pi), multiply(E, pi, gel(i)));
  }

  auto elim = detail::eliminate_central_block(E, n, gauss);
  PCoverData C;
  C.base = G;
  C.cover = std::move(elim.pres);
  C.n_old = n;
  C.mu = (int)elim.survivors.size();
  C.d1 = d;
  C.d2 = C.mu;
  for (int t : elim.survivors) C.tails.push_back(tails[t]);
  for (int t = 0; t < C.mu; ++t) {
    const auto& ti = C.tails[t];
    Definition df;
    df.kind = ti.is_pow ? Definition::Pow : Definition::Comm;
    df.i = ti.i;
    df.j = ti.j;
    C.cover.defs[n + t] = df;
  }
  C.cover.label = G.label.empty() ? "" : G.label + "*";

  // Nucleus = P_c(cover), computed honestly from the series of the cover.
  auto series = exponent_p_series(C.cover);
  if ((int)series.size() < c + 1)
    throw PresentationError("cover series shorter than expected");
  const Subgroup& nuc = (int)series.size() > c ? series[c] : series.back();
  for (int s = 0; s < C.cover.ngens; ++s) {
    if (!nuc.occupied(s)) continue;
    if (s < n) throw PresentationError("nucleus escapes the multiplicator");
    const Vec& row = nuc.table()[s];
    std::vector<uint8_t> r((size_t)C.mu, 0);
    for (int t = 0; t < C.mu; ++t) r[t] = row[n + t];
    C.nucleus_rows.push_back(std::move(r));
  }
  C.nu = (int)C.nucleus_rows.size();
  C.cover_label = C.cover.label;
  return C;
}

inline bool is_terminal(const PCoverData& C) { return C.nu == 0; }
inline bool is_capable(const PCoverData& C) { return C.nu >= 1; }
inline bool is_terminal(const PcPresentation& P) { return p_cover(P).nu == 0; }
inline bool is_capable(const PcPresentation& P) { return p_cover(P).nu >= 1; }

// Quotient of the cover by an allowable subgroup U of the multiplicator,
// given by echelon rows over the tail coordinates. The surviving tails form
// the new top layer (weight c+1).
inline PcPresentation cover_quotient(const PCoverData& C,
                                     const std::vector<std::vector<uint8_t>>& u_rows) {
  const int p = C.cover.prime;
  detail::HighPivotGauss g(p, (size_t)C.mu);
  for (const auto& r : u_rows) g.add(r);
  int c = 0;
  for (int k = 0; k < C.n_old; ++k) c = std::max(c, C.cover.weights[k]);
  auto elim = detail::eliminate_central_block(C.cover, C.n_old, g, c + 1);
  PcPresentation child = std::move(elim.pres);
  for (size_t t = 0; t < elim.survivors.size(); ++t) {
    const TailInfo& ti = C.tails[elim.survivors[t]];
    Definition df;
    df.kind = ti.is_pow ? Definition::Pow : Definition::Comm;
    df.i = ti.i;
    df.j = ti.j;
    child.defs[C.n_old + t] = df;
  }
  return child;
}

// ---------------------------------------------------------------------------
// Action of an automorphism of G on the multiplicator of its cover.
// images: one image per generator of G (in G's coordinates).

inline std::vector<std::vector<uint8_t>> multiplicator_action(
    const PCoverData& C, const std::vector<Vec>& images_in_G) {
  const PcPresentation& K = C.cover;
  const int n = C.n_old, p = K.prime;
  std::vector<Vec> img((size_t)n);
  int d = 0;
  while (d < n && K.weights[d] == 1) ++d;
  for (int k = 0; k < d; ++k) {
    Vec v = identity_element(K);
    for (int t = 0; t < n; ++t) v[t] = images_in_G[k][t];
    img[k] = v;  // any lift works: the action on M is independent of it
  }
  auto eval_prefix = [&](const Vec& rhs, int upto) {
    // evaluate rhs (minus the coordinate at `upto`) under img
    Vec r = identity_element(K);
    for (int t = 0; t < (int)rhs.size() && t < n; ++t) {
      if (t == upto || !rhs[t]) continue;
      Vec q = power(K, img[t], rhs[t]);
      mul_in_place(K, r, q);
    }
    return r;
  };
  for (int k = d; k < n; ++k) {
    const Definition& df = K.defs[k];
    Vec rhs = df.kind == Definition::Pow ? K.pow[df.i] : K.comm_rhs(df.j, df.i);
    if (rhs.empty() || rhs[k] != 1)
      throw PresentationError("defining relation does not isolate its generator");
    for (int t = k + 1; t < K.ngens; ++t)
      if (rhs[t]) throw PresentationError("defining relation has trailing support");
    Vec u = eval_prefix(rhs, k);
    Vec lhsimg = df.kind == Definition::Pow
                     ? power(K, img[df.i], p)
                     : commutator(K, img[df.j], img[df.i]);
    img[k] = multiply(K, inverse(K, u), lhsimg);
  }
  std::vector<std::vector<uint8_t>> mat;
  for (int b = 0; b < C.mu; ++b) {
    const TailInfo& ti = C.tails[b];
    Vec rhs = ti.is_pow ? K.pow[ti.i] : K.comm_rhs(ti.j, ti.i);
    Vec u = eval_prefix(rhs, n + b);
    Vec lhsimg = ti.is_pow ? power(K, img[ti.i], p)
                           : commutator(K, img[ti.j], img[ti.i]);
    Vec val = multiply(K, inverse(K, u), lhsimg);
    for (int t = 0; t < n; ++t)
      if (val[t]) throw PresentationError("multiplicator action escaped the tail block");
    std::vector<uint8_t> row((size_t)C.mu, 0);
    for (int t = 0; t < C.mu; ++t) row[t] = val[n + t];
    mat.push_back(std::move(row));
  }
  return mat;
}

// ---------------------------------------------------------------------------
// Shafarevich bound utility.

struct ShafarevichBound {
  int d1 = 0;
  int unit_rank = 0;
  int theta = 0;
  int lower = 0;
  int upper = 0;
};

inline ShafarevichBound shafarevich_bound(int d1, std::pair<int, int> signature, int p,
                                          bool contains_p_roots) {
  auto [r1, r2] = signature;
  if (r1 < 0 || r2 < 0 || (r1 == 0 && r2 == 0))
    throw PresentationError("invalid signature: unit rank would be negative");
  if (p < 2) throw PresentationError("p must be prime");
  ShafarevichBound b;
  b.d1 = d1;
  b.unit_rank = r1 + r2 - 1;
  b.theta = contains_p_roots ? 1 : 0;
  b.lower = d1;
  b.upper = d1 + b.unit_rank + b.theta;
  return b;
}

}  // namespace pclab
