// Automorphism enumeration for small p-groups by generator images:
// invertible action on the Frattini quotient times a continuation inside
// the Frattini subgroup, validated against the defining relations.
// Generator-inverting automorphisms (GIA) and the Schur sigma predicate.
#pragma once

#include "pclab/dense.hpp"
#include "pclab/pcover.hpp"

#include <atomic>
#include <functional>
#include <optional>
#include <thread>

namespace pclab {

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AutOptions {
  int full_budget_lo = 8;  // largest log order for full enumeration
  int gia_budget_lo = 9;   // largest log order for GIA-only search
  int jobs = 1;
};

struct AutomorphismSet {
  std::vector<std::vector<Vec>> auts;  // generator-image tuples (all generators)
  long long order() const { return (long long)auts.size(); }
};

struct SigmaReport {
  bool is_sigma = false;
  std::optional<std::vector<Vec>> witness;
  bool is_schur_sigma = false;
};

namespace detail {

// Precomputed data for fast relation checking of candidate images.
// Definitions and relation checks are staged by weight so that failing
// candidates abort after touching only low layers.
struct AutSearchContext {
  const PcPresentation* P;
  int d = 0;
  struct Rel {
    bool is_pow;
    int i, j, weight;
  };
  struct Stage {
    int upto_gen = 0;             // definitions for generators [d, upto_gen)
    std::vector<Rel> checks;      // relations whose support is available
  };
  std::vector<Stage> stages;
  // defining relation [g_j,g_i] = u * g_k (or g_i^p = u * g_k): the image of
  // g_k is eval(u)^{-1} * lhs-value, so keep the prefix u per generator
  std::vector<Vec> def_prefix;  // empty = trivial prefix

  explicit AutSearchContext(const PcPresentation& pres) : P(&pres) {
    const PcPresentation& Pp = *P;
    while (d < Pp.ngens && Pp.weights[d] == 1) ++d;
    std::vector<int> pow_def(Pp.ngens, 0);
    std::vector<std::vector<int>> comm_def(Pp.ngens, std::vector<int>(Pp.ngens, 0));
    for (int k = d; k < Pp.ngens; ++k) {
      const auto& df = Pp.defs[k];
      if (df.kind == Definition::Pow) pow_def[df.i] = 1;
      if (df.kind == Definition::Comm) comm_def[df.j][df.i] = 1;
    }
    def_prefix.assign((size_t)Pp.ngens, Vec{});
    for (int k = d; k < Pp.ngens; ++k) {
      const auto& df = Pp.defs[k];
      const Vec& rhs = df.kind == Definition::Pow ? Pp.pow[df.i]
                                                  : Pp.comm_rhs(df.j, df.i);
      if (rhs.empty() || rhs[k] != 1)
        throw PresentationError("defining relation does not isolate generator " +
                                std::to_string(k + 1));
      for (int t = k + 1; t < Pp.ngens; ++t)
        if (rhs[t]) throw PresentationError("defining relation has trailing support");
      Vec u = rhs;
      u[k] = 0;
      if (!is_identity(u)) def_prefix[k] = std::move(u);
    }
    std::vector<Rel> checks;
    for (int i = 0; i < Pp.ngens; ++i)
      if (!pow_def[i]) checks.push_back({true, i, -1, 0});
    for (int j = 1; j < Pp.ngens; ++j)
      for (int i = 0; i < j; ++i)
        if (!comm_def[j][i]) checks.push_back({false, i, j, 0});
    // a relation can be checked once images up to its full support exist
    auto support_end = [&](const Rel& r) {
      int hi = r.is_pow ? r.i : r.j;
      const Vec& rhs = r.is_pow ? Pp.pow[r.i] : Pp.comm_rhs(r.j, r.i);
      for (int t = hi + 1; t < Pp.ngens; ++t)
        if (!rhs.empty() && rhs[t]) hi = t;
      return hi + 1;
    };
    for (auto& r : checks) r.weight = support_end(r);
    std::stable_sort(checks.begin(), checks.end(),
                     [](const Rel& a, const Rel& b) { return a.weight < b.weight; });
    // build stages at each distinct support bound
    size_t at = 0;
    for (int upto = d; upto <= Pp.ngens; ++upto) {
      Stage st;
      st.upto_gen = upto;
      while (at < checks.size() && checks[at].weight <= upto) st.checks.push_back(checks[at++]);
      if (!st.checks.empty() || upto == Pp.ngens) stages.push_back(std::move(st));
    }
  }

  struct Workspace {
    std::vector<Vec> img, inv;
    std::vector<char> inv_ok;
    void reset(int n) {
      img.assign((size_t)n, Vec());
      inv.assign((size_t)n, Vec());
      inv_ok.assign((size_t)n, 0);
    }
  };

  const Vec& inv_of(Workspace& w, int k) const {
    if (!w.inv_ok[k]) {
      w.inv[k] = inverse(*P, w.img[k]);
      w.inv_ok[k] = 1;
    }
    return w.inv[k];
  }

  // [a,b] = a^-1 b^-1 a b with cached inverses
  Vec comm_of(Workspace& w, int a, int b) const {
    Vec r = inv_of(w, a);
    mul_in_place(*P, r, inv_of(w, b));
    mul_in_place(*P, r, w.img[a]);
    mul_in_place(*P, r, w.img[b]);
    return r;
  }
  Vec pow_p(const Vec& a) const {
    Vec r = a;
    for (int t = 1; t < P->prime; ++t) mul_in_place(*P, r, a);
    return r;
  }

  bool dense_check(const DenseGroup& D, std::vector<long long>& img) const {
    const PcPresentation& Pp = *P;
    int done = d;
    for (const auto& st : stages) {
      for (; done < st.upto_gen; ++done) {
        const auto& df = Pp.defs[done];
        long long lhs = df.kind == Definition::Pow ? D.pow_p(img[df.i])
                                                   : D.comm(img[df.j], img[df.i]);
        if (!def_prefix[done].empty())
          lhs = D.mul(D.inv(D.eval_under(def_prefix[done], img)), lhs);
        img[done] = lhs;
      }
      for (const auto& r : st.checks) {
        long long lhs = r.is_pow ? D.pow_p(img[r.i]) : D.comm(img[r.j], img[r.i]);
        const Vec& rhs = r.is_pow ? Pp.pow[r.i] : Pp.comm_rhs(r.j, r.i);
        long long want = rhs.empty() ? 0 : D.eval_under(rhs, img);
        if (lhs != want) return false;
      }
    }
    return true;
  }

  bool complete_and_check(Workspace& w) const {
    const PcPresentation& Pp = *P;
    int done = d;
    for (const auto& st : stages) {
      for (; done < st.upto_gen; ++done) {
        const auto& df = Pp.defs[done];
        Vec lhs = df.kind == Definition::Pow ? pow_p(w.img[df.i])
                                             : comm_of(w, df.j, df.i);
        if (!def_prefix[done].empty()) {
          Vec u = identity_element(Pp);
          for (size_t k = 0; k < def_prefix[done].size(); ++k)
            for (int t = 0; t < (int)def_prefix[done][k]; ++t)
              mul_in_place(Pp, u, w.img[k]);
          Vec r = inverse(Pp, u);
          mul_in_place(Pp, r, lhs);
          lhs = std::move(r);
        }
        w.img[done] = lhs;
        w.inv_ok[done] = 0;
      }
      for (const auto& r : st.checks) {
        Vec lhs = r.is_pow ? pow_p(w.img[r.i]) : comm_of(w, r.j, r.i);
        const Vec& rhs = r.is_pow ? Pp.pow[r.i] : Pp.comm_rhs(r.j, r.i);
        if (rhs.empty()) {
          if (!is_identity(lhs)) return false;
        } else {
          Vec want = identity_element(Pp);
          for (size_t k = 0; k < rhs.size(); ++k)
            for (int t = 0; t < (int)rhs[k]; ++t) mul_in_place(Pp, want, w.img[k]);
          if (lhs != want) return false;
        }
      }
    }
    return true;
  }
};

inline std::vector<std::vector<uint8_t>> invertible_matrices(int p, int d) {
  std::vector<std::vector<uint8_t>> out;
  std::vector<uint8_t> m((size_t)d * d, 0);
  long long total = 1;
  for (int t = 0; t < d * d; ++t) total *= p;
  for (long long idx = 0; idx < total; ++idx) {
    long long r = idx;
    for (int t = 0; t < d * d; ++t) {
      m[t] = (uint8_t)(r % p);
      r /= p;
    }
    // rank check over F_p
    std::vector<std::vector<int>> a(d, std::vector<int>(d));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a[i][j] = m[(size_t)i * d + j];
    int rank = 0;
    for (int c = 0; c < d && rank < d; ++c) {
      int sel = -1;
      for (int rr = rank; rr < d; ++rr)
        if (a[rr][c]) { sel = rr; break; }
      if (sel < 0) continue;
      std::swap(a[sel], a[rank]);
      int inv = 1;
      while ((inv * a[rank][c]) % p != 1) ++inv;
      for (int cc = 0; cc < d; ++cc) a[rank][cc] = a[rank][cc] * inv % p;
      for (int rr = 0; rr < d; ++rr)
        if (rr != rank && a[rr][c]) {
          int f = a[rr][c];
          for (int cc = 0; cc < d; ++cc) a[rr][cc] = (a[rr][cc] + (p - f) * a[rank][cc]) % p;
        }
      ++rank;
    }
    if (rank == d) out.push_back(m);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Enumerate all automorphisms whose Frattini action is one of the given
// matrices; calls sink(images) for each. Sequential within one matrix.
// sink returns true to stop the whole scan early
template <typename Sink>
void scan_frattini_classes(const PcPresentation& P, const AutSearchContext& ctx,
                           const std::vector<std::vector<uint8_t>>& mats, int jobs,
                           Sink&& sink) {
  const int p = P.prime, n = P.ngens, d = ctx.d;
  long long cont = 1;
  for (int t = 0; t < (n - d) * d; ++t) cont *= p;

  std::mutex sink_mu;
  std::atomic<bool> stop{false};

  std::shared_ptr<const DenseGroup> dense;
  if (n <= 12) dense = std::make_shared<DenseGroup>(P);

  auto run_matrix_dense = [&](const std::vector<uint8_t>& A,
                              std::vector<std::vector<Vec>>& found) {
    const DenseGroup& D = *dense;
    std::vector<long long> base((size_t)d);
    for (int t = 0; t < d; ++t) {
      long long w = 0;
      for (int j = 0; j < d; ++j) w = D.mul_gen_pow(w, j, A[(size_t)j * d + t]);
      base[t] = w;
    }
    const int width = n - d;
    std::vector<int> digits((size_t)d * width, 0);
    std::vector<std::vector<long long>> partial(
        (size_t)d, std::vector<long long>((size_t)width + 1));
    for (int t = 0; t < d; ++t)
      for (int k = 0; k <= width; ++k) partial[t][k] = base[t];
    std::vector<long long> img((size_t)n, 0);
    for (long long z = 0;; ++z) {
      if ((z & 0xffff) == 0 && stop.load(std::memory_order_relaxed)) return;
      for (int t = 0; t < d; ++t) img[t] = partial[t][width];
      if (ctx.dense_check(D, img)) {
        std::vector<Vec> imgs((size_t)n);
        for (int t = 0; t < n; ++t) imgs[t] = D.decode(img[t]);
        found.push_back(std::move(imgs));
      }
      if (z + 1 >= cont) break;
      int pos = (int)digits.size() - 1;
      while (pos >= 0 && digits[pos] == p - 1) digits[pos--] = 0;
      if (pos < 0) break;
      digits[pos]++;
      int t0 = pos / width, k0 = pos % width;
      for (int k = k0; k < width; ++k)
        partial[t0][k + 1] =
            D.mul_gen_pow(partial[t0][k], d + k, digits[(size_t)t0 * width + k]);
      for (int t = t0 + 1; t < d; ++t)
        for (int k = 0; k < width; ++k) partial[t][k + 1] = partial[t][k];
    }
  };

  auto run_matrix_generic = [&](const std::vector<uint8_t>& A,
                        std::vector<std::vector<Vec>>& found) {
    // base images: w_t = prod_j g_j^{A[j*d+t]}
    std::vector<Vec> base((size_t)d), ibase((size_t)d);
    for (int t = 0; t < d; ++t) {
      Vec w = identity_element(P);
      for (int j = 0; j < d; ++j)
        if (A[(size_t)j * d + t]) {
          Vec q = power(P, gen_element(P, j), A[(size_t)j * d + t]);
          mul_in_place(P, w, q);
        }
      base[t] = w;
      ibase[t] = inverse(P, w);
    }
    // odometer with prefix products and prefix inverses
    const int width = n - d;
    // inverses of single-generator powers (honest: power relations matter)
    std::vector<std::vector<Vec>> gen_inv((size_t)n);
    for (int k = d; k < n; ++k) {
      gen_inv[k].resize((size_t)p);
      for (int e = 1; e < p; ++e) gen_inv[k][e] = inverse(P, gen_element(P, k, e));
    }
    std::vector<int> digits((size_t)d * width, 0);
    std::vector<std::vector<Vec>> partial((size_t)d, std::vector<Vec>((size_t)width + 1));
    std::vector<std::vector<Vec>> ipartial((size_t)d, std::vector<Vec>((size_t)width + 1));
    for (int t = 0; t < d; ++t) {
      partial[t][0] = base[t];
      ipartial[t][0] = ibase[t];
      for (int k = 0; k < width; ++k) {
        partial[t][k + 1] = partial[t][k];
        ipartial[t][k + 1] = ipartial[t][k];
      }
    }
    AutSearchContext::Workspace ws;
    ws.reset(n);
    for (long long z = 0;; ++z) {
      if (stop.load(std::memory_order_relaxed)) return;
      for (int t = 0; t < d; ++t) {
        ws.img[t] = partial[t][width];
        ws.inv[t] = ipartial[t][width];
        ws.inv_ok[t] = 1;
      }
      for (int t = d; t < n; ++t) ws.inv_ok[t] = 0;
      if (ctx.complete_and_check(ws)) found.push_back(ws.img);
      if (z + 1 >= cont) break;
      int pos = (int)digits.size() - 1;
      while (pos >= 0 && digits[pos] == p - 1) digits[pos--] = 0;
      if (pos < 0) break;
      digits[pos]++;
      int t0 = pos / width, k0 = pos % width;
      for (int k = k0; k < width; ++k) {
        partial[t0][k + 1] = partial[t0][k];
        ipartial[t0][k + 1] = ipartial[t0][k];
        int e = digits[(size_t)t0 * width + k];
        if (e) {
          mul_syllable(P, partial[t0][k + 1], d + k, e);
          Vec lhs = gen_inv[d + k][e];
          mul_in_place(P, lhs, ipartial[t0][k + 1]);
          ipartial[t0][k + 1] = std::move(lhs);
        }
      }
      for (int t = t0 + 1; t < d; ++t)
        for (int k = 0; k < width; ++k) {
          partial[t][k + 1] = partial[t][k];
          ipartial[t][k + 1] = ipartial[t][k];
        }
    }
  };

  auto run_matrix = [&](const std::vector<uint8_t>& A,
                        std::vector<std::vector<Vec>>& found) {
    if (dense)
      run_matrix_dense(A, found);
    else
      run_matrix_generic(A, found);
  };

  if (jobs <= 1 || mats.size() == 1) {
    for (const auto& A : mats) {
      std::vector<std::vector<Vec>> found;
      run_matrix(A, found);
      for (auto& f : found)
        if (sink(std::move(f))) return;
    }
    return;
  }
  // partition the outer loop across workers; merge in matrix order
  std::vector<std::vector<std::vector<Vec>>> per_matrix(mats.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t idx = next.fetch_add(1);
      if (idx >= mats.size() || stop.load()) return;
      run_matrix(mats[idx], per_matrix[idx]);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  std::lock_guard<std::mutex> lk(sink_mu);
  for (auto& bucket : per_matrix)
    for (auto& f : bucket)
      if (sink(std::move(f))) return;
}

}  // namespace detail

inline AutomorphismSet automorphisms(const PcPresentation& input, AutOptions opt = {}) {
  PcPresentation P = standardized(input);
  if (P.ngens > opt.full_budget_lo)
    throw BudgetExceeded("group order exceeds the automorphism budget (lo " +
                         std::to_string(P.ngens) + " > " +
                         std::to_string(opt.full_budget_lo) + ")");
  detail::AutSearchContext ctx(P);
  auto mats = detail::invertible_matrices(P.prime, ctx.d);
  AutomorphismSet out;
  detail::scan_frattini_classes(P, ctx, mats, opt.jobs, [&](std::vector<Vec>&& f) {
    out.auts.push_back(std::move(f));
    return false;
  });
  return out;
}

// Enumerate automorphisms of a presentation already in standard form,
// keeping the caller's generator indexing (required for induced actions).
inline AutomorphismSet automorphisms_standard(const PcPresentation& P, AutOptions opt = {}) {
  if (!is_standard_form(P)) throw PresentationError("presentation not in standard form");
  if (P.ngens > opt.full_budget_lo)
    throw BudgetExceeded("group order exceeds the automorphism budget (lo " +
                         std::to_string(P.ngens) + ")");
  detail::AutSearchContext ctx(P);
  auto mats = detail::invertible_matrices(P.prime, ctx.d);
  AutomorphismSet out;
  detail::scan_frattini_classes(P, ctx, mats, opt.jobs, [&](std::vector<Vec>&& f) {
    out.auts.push_back(std::move(f));
    return false;
  });
  return out;
}

// Is there an automorphism acting as inversion on G/G'?
inline SigmaReport has_gia(const PcPresentation& input, AutOptions opt = {}) {
  PcPresentation P = standardized(input);
  if (P.ngens > opt.gia_budget_lo)
    throw BudgetExceeded("group order exceeds the GIA budget (lo " +
                         std::to_string(P.ngens) + ")");
  detail::AutSearchContext ctx(P);
  // single Frattini class: -identity
  std::vector<uint8_t> minusI((size_t)ctx.d * ctx.d, 0);
  for (int t = 0; t < ctx.d; ++t) minusI[(size_t)t * ctx.d + t] = (uint8_t)(P.prime - 1);
  // inversion on G/G' is stronger than inversion on G/Phi when G' < Phi
  Subgroup derived = lower_central_series_groups(P)[1];
  Subgroup phi = frattini_subgroup(P);
  bool need_abelianization_check = derived.rank() != phi.rank();
  SigmaReport rep;
  detail::scan_frattini_classes(P, ctx, {minusI}, 1, [&](std::vector<Vec>&& f) {
    if (need_abelianization_check)
      for (int t = 0; t < ctx.d; ++t) {
        Vec prod = multiply(P, f[t], gen_element(P, t));
        if (!derived.contains(prod)) return false;
      }
    rep.is_sigma = true;
    rep.witness = std::move(f);
    return true;
  });
  return rep;
}

inline SigmaReport is_schur_sigma(const PcPresentation& P, const PCoverData& cover,
                                  AutOptions opt = {}) {
  SigmaReport rep = has_gia(P, opt);
  rep.is_schur_sigma = rep.is_sigma && cover.d2 == cover.d1;
  return rep;
}

inline SigmaReport is_schur_sigma(const PcPresentation& P, AutOptions opt = {}) {
  return is_schur_sigma(P, p_cover(P), opt);
}

}  // namespace pclab
