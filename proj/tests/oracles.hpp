// Test-only oracles, kept independent of the library's collection path:
// a naive string-rewriting normalizer, Cayley tables built from it, and
// brute-force isomorphism/automorphism search.
#pragma once

#include "pclab/presentation.hpp"
#include "pclab/subgroup.hpp"

#include <map>
#include <random>

namespace oracle {

using pclab::PcPresentation;
using pclab::Vec;

// Normalize a word (sequence of 0-based generator letters) by leftmost
// rewriting with the defining relations:
//   g_j g_i -> g_i g_j [g_j,g_i]   (j > i),   g_i^p -> pow_i
inline std::vector<int> rewrite_normal(const PcPresentation& P, std::vector<int> w) {
  const int p = P.prime;
  auto expand = [&](const Vec& v) {
    std::vector<int> out;
    for (int k = 0; k < P.ngens; ++k)
      for (int t = 0; t < (v.empty() ? 0 : v[k]); ++t) out.push_back(k);
    return out;
  };
  bool changed = true;
  size_t guard = 0;
  while (changed) {
    if (++guard > 200000000) throw std::runtime_error("rewrite did not terminate");
    changed = false;
    for (size_t t = 0; t + 1 <= w.size(); ++t) {
      // p-run starting at t
      if (t + p <= w.size()) {
        bool run = true;
        for (int u = 1; u < p; ++u)
          if (w[t + u] != w[t]) { run = false; break; }
        if (run) {
          std::vector<int> repl = expand(P.pow[w[t]]);
          std::vector<int> nw(w.begin(), w.begin() + t);
          nw.insert(nw.end(), repl.begin(), repl.end());
          nw.insert(nw.end(), w.begin() + t + p, w.end());
          w = std::move(nw);
          changed = true;
          break;
        }
      }
      if (t + 1 < w.size() && w[t] > w[t + 1]) {
        int j = w[t], i = w[t + 1];
        std::vector<int> repl = {i, j};
        std::vector<int> c = expand(P.comm_rhs(j, i));
        repl.insert(repl.end(), c.begin(), c.end());
        std::vector<int> nw(w.begin(), w.begin() + t);
        nw.insert(nw.end(), repl.begin(), repl.end());
        nw.insert(nw.end(), w.begin() + t + 2, w.end());
        w = std::move(nw);
        changed = true;
        break;
      }
    }
  }
  return w;
}

inline Vec rewrite_to_vec(const PcPresentation& P, const std::vector<int>& w) {
  auto nw = rewrite_normal(P, w);
  Vec v((size_t)P.ngens, 0);
  for (int g : nw) v[g]++;
  for (auto e : v)
    if (e >= P.prime) throw std::runtime_error("rewrite result not reduced");
  return v;
}

inline std::vector<int> vec_to_word(const PcPresentation& P, const Vec& v) {
  std::vector<int> w;
  for (int k = 0; k < P.ngens; ++k)
    for (int t = 0; t < v[k]; ++t) w.push_back(k);
  return w;
}

inline long long vec_index(const PcPresentation& P, const Vec& v) {
  long long idx = 0;
  for (int k = 0; k < P.ngens; ++k) idx = idx * P.prime + v[k];
  return idx;
}

inline Vec index_vec(const PcPresentation& P, long long idx) {
  Vec v((size_t)P.ngens, 0);
  for (int k = P.ngens - 1; k >= 0; --k) {
    v[k] = (uint8_t)(idx % P.prime);
    idx /= P.prime;
  }
  return v;
}

struct CayleyTable {
  long long order = 0;
  std::vector<std::vector<int32_t>> mul;  // mul[x][y], indices per vec_index
};

inline CayleyTable cayley_table(const PcPresentation& P) {
  long long N = 1;
  for (int k = 0; k < P.ngens; ++k) N *= P.prime;
  CayleyTable T;
  T.order = N;
  T.mul.assign((size_t)N, std::vector<int32_t>((size_t)N, -1));
  for (long long x = 0; x < N; ++x) {
    auto wx = vec_to_word(P, index_vec(P, x));
    for (long long y = 0; y < N; ++y) {
      auto w = wx;
      auto wy = vec_to_word(P, index_vec(P, y));
      w.insert(w.end(), wy.begin(), wy.end());
      T.mul[(size_t)x][(size_t)y] = (int32_t)vec_index(P, rewrite_to_vec(P, w));
    }
  }
  return T;
}

// A presentation is an honest group of order p^n iff the rewriting table is
// a group (associative with identity and inverses).
inline bool table_is_group(const CayleyTable& T) {
  const long long N = T.order;
  for (long long x = 0; x < N; ++x)
    if (T.mul[(size_t)x][0] != x || T.mul[0][(size_t)x] != x) return false;
  for (long long x = 0; x < N; ++x) {
    bool inv = false;
    for (long long y = 0; y < N; ++y)
      if (T.mul[(size_t)x][(size_t)y] == 0) { inv = true; break; }
    if (!inv) return false;
  }
  for (long long x = 0; x < N; ++x)
    for (long long y = 0; y < N; ++y)
      for (long long z = 0; z < N; ++z)
        if (T.mul[(size_t)T.mul[(size_t)x][(size_t)y]][(size_t)z] !=
            T.mul[(size_t)x][(size_t)T.mul[(size_t)y][(size_t)z]])
          return false;
  return true;
}

inline Vec random_element(const PcPresentation& P, std::mt19937& rng) {
  Vec v((size_t)P.ngens, 0);
  for (int k = 0; k < P.ngens; ++k) v[k] = (uint8_t)(rng() % P.prime);
  return v;
}

inline pclab::Word random_word(const PcPresentation& P, std::mt19937& rng, int len) {
  pclab::Word w;
  for (int t = 0; t < len; ++t)
    w.push_back({1 + (int)(rng() % P.ngens), (long long)(rng() % (2 * P.prime)) - P.prime});
  return w;
}

// Extend images of the first two generators through stored definitions.
// A definition reads [g_j,g_i] = u * g_k (or g_i^p = u * g_k), so the image
// of g_k is eval(u)^{-1} times the left-hand value.
inline bool extend_by_definitions(const PcPresentation& src, const PcPresentation& dst,
                                  std::vector<Vec>& imgs) {
  for (int k = 0; k < src.ngens; ++k) {
    if (!imgs[k].empty()) continue;
    const auto& d = src.defs[k];
    Vec lhs;
    const Vec* rhs = nullptr;
    if (d.kind == pclab::Definition::Comm) {
      if (imgs[d.j].empty() || imgs[d.i].empty()) return false;
      lhs = pclab::commutator(dst, imgs[d.j], imgs[d.i]);
      rhs = &src.comm_rhs(d.j, d.i);
    } else if (d.kind == pclab::Definition::Pow) {
      if (imgs[d.i].empty()) return false;
      lhs = pclab::power(dst, imgs[d.i], src.prime);
      rhs = &src.pow[d.i];
    } else {
      return false;
    }
    if (rhs->empty() || (*rhs)[k] != 1) throw std::runtime_error("bad definition");
    Vec prefix = *rhs;
    prefix[k] = 0;
    if (!pclab::is_identity(prefix)) {
      Vec u = pclab::identity_element(dst);
      for (size_t t = 0; t < prefix.size(); ++t)
        for (int q = 0; q < (int)prefix[t]; ++q) pclab::mul_in_place(dst, u, imgs[t]);
      Vec r = pclab::inverse(dst, u);
      pclab::mul_in_place(dst, r, lhs);
      lhs = std::move(r);
    }
    imgs[k] = lhs;
  }
  return true;
}

// Brute-force isomorphism test for 2-generated groups carrying definitions:
// exhaust generator images of the first two generators. Images must span
// modulo the Frattini subgroup (otherwise they cannot generate), so the
// candidate list enumerates an invertible Frattini action times a Frattini
// continuation; each candidate is checked against all defining relations.
inline bool isomorphic_bruteforce(const PcPresentation& A, const PcPresentation& B0) {
  if (A.ngens != B0.ngens || A.prime != B0.prime) return false;
  PcPresentation B = pclab::standardized(B0);
  const int n = B.ngens, p = B.prime;
  if (n == 0) return true;
  int d = 0;
  while (d < n && B.weights[d] == 1) ++d;
  if (d != 2) throw std::runtime_error("iso oracle expects 2-generated groups");
  long long cont = 1;
  for (int t = 0; t < (n - d) * d; ++t) cont *= p;
  for (int a11 = 0; a11 < p; ++a11)
    for (int a21 = 0; a21 < p; ++a21)
      for (int a12 = 0; a12 < p; ++a12)
        for (int a22 = 0; a22 < p; ++a22) {
          if ((a11 * a22 - a12 * a21) % p == 0) continue;  // not invertible
          Vec w1 = pclab::collect(B, {{1, a11}, {2, a21}});
          Vec w2 = pclab::collect(B, {{1, a12}, {2, a22}});
          for (long long z = 0; z < cont; ++z) {
            long long r = z;
            std::vector<Vec> imgs((size_t)n);
            Vec x1 = w1, x2 = w2;
            for (int k = d; k < n; ++k) {
              int e = (int)(r % p);
              r /= p;
              if (e) pclab::mul_syllable(B, x1, k, e);
            }
            for (int k = d; k < n; ++k) {
              int e = (int)(r % p);
              r /= p;
              if (e) pclab::mul_syllable(B, x2, k, e);
            }
            imgs[0] = x1;
            imgs[1] = x2;
            if (!extend_by_definitions(A, B, imgs)) return false;
            if (!pclab::relations_hold(A, B, imgs)) continue;
            std::vector<Vec> two = {imgs[0], imgs[1]};
            if (pclab::span(B, two).rank() == n) return true;
          }
        }
  return false;
}

// Count all automorphisms with no Frattini pruning: every image tuple of the
// first two generators, extended by definitions, checked for homomorphism
// and surjectivity.
inline long long count_automorphisms_unpruned(const PcPresentation& P) {
  long long N = 1;
  for (int k = 0; k < P.ngens; ++k) N *= P.prime;
  long long count = 0;
  for (long long x = 0; x < N; ++x)
    for (long long y = 0; y < N; ++y) {
      std::vector<Vec> imgs((size_t)P.ngens);
      imgs[0] = index_vec(P, x);
      imgs[1] = index_vec(P, y);
      if (!extend_by_definitions(P, P, imgs)) throw std::runtime_error("missing defs");
      if (!pclab::relations_hold(P, P, imgs)) continue;
      std::vector<Vec> two = {imgs[0], imgs[1]};
      if (pclab::span(P, two).rank() == P.ngens) ++count;
    }
  return count;
}


// Naive exhaustive elementary row/column reduction of the relation matrix:
// an independent route to the abelian invariants.
inline std::vector<long long> snf_naive(std::vector<std::vector<long long>> m) {
  const size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  size_t t = 0;
  while (t < rows && t < cols) {
    bool any = false;
    for (size_t r = t; r < rows && !any; ++r)
      for (size_t c = t; c < cols && !any; ++c)
        if (m[r][c]) {
          std::swap(m[t], m[r]);
          for (size_t rr = 0; rr < rows; ++rr) std::swap(m[rr][t], m[rr][c]);
          any = true;
        }
    if (!any) break;
    bool reduced = false;
    while (!reduced) {
      reduced = true;
      for (size_t r = t + 1; r < rows; ++r)
        while (m[r][t]) {
          long long q = m[r][t] / m[t][t];
          for (size_t c = 0; c < cols; ++c) m[r][c] -= q * m[t][c];
          if (m[r][t]) {
            std::swap(m[r], m[t]);
            reduced = false;
          }
        }
      for (size_t c = t + 1; c < cols; ++c)
        while (m[t][c]) {
          long long q = m[t][c] / m[t][t];
          for (size_t r = 0; r < rows; ++r) m[r][c] -= q * m[r][t];
          if (m[t][c]) {
            for (size_t r = 0; r < rows; ++r) std::swap(m[r][c], m[r][t]);
            reduced = false;
          }
        }
    }
    ++t;
  }
  std::vector<long long> diag;
  for (size_t r = 0; r < t; ++r) diag.push_back(m[r][r] < 0 ? -m[r][r] : m[r][r]);
  // enforce divisibility exhaustively (gcd/lcm on ordered pairs)
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < diag.size(); ++i)
      for (size_t j = i + 1; j < diag.size(); ++j) {
        if (diag[i] == 0 || diag[j] == 0) continue;
        if (diag[j] % diag[i]) {
          long long a = diag[i], b = diag[j], g = std::gcd(a, b);
          diag[i] = g;
          diag[j] = a / g * b;
          changed = true;
        }
      }
  }
  std::sort(diag.begin(), diag.end());
  return diag;
}

inline std::vector<int> abelian_invariants_bruteforce(const PcPresentation& P) {
  std::vector<std::vector<long long>> m;
  for (int k = 0; k < P.ngens; ++k) {
    std::vector<long long> row(P.ngens, 0);
    row[k] = P.prime;
    if (!P.pow[k].empty())
      for (int t = 0; t < P.ngens; ++t) row[t] -= (long long)P.pow[k][t];
    m.push_back(row);
  }
  for (int j = 1; j < P.ngens; ++j)
    for (int i = 0; i < j; ++i) {
      const Vec& v = P.comm_rhs(j, i);
      if (v.empty()) continue;
      std::vector<long long> row(P.ngens, 0);
      for (int t = 0; t < P.ngens; ++t) row[t] = (long long)v[t];
      m.push_back(row);
    }
  auto diag = snf_naive(m);
  std::vector<int> parts;
  for (long long d : diag) {
    int e = 0;
    while (d % P.prime == 0) { d /= P.prime; ++e; }
    if (e) parts.push_back(e);
  }
  std::sort(parts.rbegin(), parts.rend());
  return parts;
}

// Abelian invariants of a SUBSET closed under the oracle multiplication,
// recovered from element-order counts (valid for abelian subsets).
inline std::vector<int> abelian_invariants_from_orders(const PcPresentation& P,
                                                       const std::vector<Vec>& elems) {
  const int p = P.prime;
  // n_k = #{x : x^{p^k} = 1} = p^{sum min(k, e_i)}; recover the e_i
  std::vector<int> logs;  // logs[k] = log_p n_k
  for (int k = 0;; ++k) {
    long long pk = 1;
    for (int t = 0; t < k; ++t) pk *= p;
    long long cnt = 0;
    for (const Vec& x : elems)
      if (pclab::is_identity(pclab::power(P, x, pk))) ++cnt;
    int lg = 0;
    long long c = cnt;
    while (c > 1) { c /= p; ++lg; }
    logs.push_back(lg);
    if (cnt == (long long)elems.size()) break;
  }
  std::vector<int> ge;  // ge[k-1] = #{i : e_i >= k}
  for (size_t k = 1; k < logs.size(); ++k) ge.push_back(logs[k] - logs[k - 1]);
  std::vector<int> parts;
  for (size_t k = 0; k < ge.size(); ++k) {
    int exactly = ge[k] - ((k + 1 < ge.size()) ? ge[k + 1] : 0);
    for (int t = 0; t < exactly; ++t) parts.push_back((int)k + 1);
  }
  std::sort(parts.rbegin(), parts.rend());
  return parts;
}

}  // namespace oracle
