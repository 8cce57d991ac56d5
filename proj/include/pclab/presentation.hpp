// pclab: exact arithmetic for finite p-groups given by weighted
// power-commutator presentations.
#pragma once

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pclab {

// Exponent vector of a group element in collected normal form.
// Entry k is the exponent of generator k (0-based), a residue in [0, p).
using Vec = std::vector<uint8_t>;

// A possibly uncollected word: (generator, exponent) pairs, 1-based
// generator indices, arbitrary integer exponents.
using Word = std::vector<std::pair<int, long long>>;

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(int line_, int col_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ", col " +
                           std::to_string(col_) + ": " + what_),
        line(line_), col(col_) {}
};

struct PresentationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// How a non-initial pc generator arises from earlier ones.
struct Definition {
  enum Kind : uint8_t { None, Pow, Comm };
  Kind kind = None;
  int i = -1;  // Pow: g = g_i^p (modulo lower terms). Comm: g = [g_j, g_i].
  int j = -1;
};

struct Syllable {
  uint16_t gen;
  uint8_t exp;
};

// Weighted power-commutator presentation of a finite p-group of order
// p^ngens. Every generator has relative order p. Immutable once built;
// all operations below are pure functions of their arguments.
class PcPresentation {
 public:
  int prime = 3;
  int ngens = 0;
  std::vector<int> weights;          // weights[k], k in [0, ngens)
  std::vector<Vec> pow;              // pow[k] = rhs of g_k^p; empty <=> trivial
  std::vector<Vec> comm;             // comm[idx(j,i)] = rhs of [g_j,g_i], j > i
  std::vector<Definition> defs;      // may be empty (then no definitions known)
  std::string label;

  PcPresentation() = default;
  PcPresentation(int p, int n) : prime(p), ngens(n), weights(n, 1) {
    pow.assign(n, Vec{});
    comm.assign((size_t)n * (n - 1) / 2, Vec{});
  }

  static size_t pair_index(int j, int i) {  // j > i
    return (size_t)j * (j - 1) / 2 + i;
  }
  const Vec& power_rhs(int k) const { return pow[k]; }
  const Vec& comm_rhs(int j, int i) const { return comm[pair_index(j, i)]; }
  void set_power(int k, Vec v) { pow[k] = std::move(v); dirty_ = true; }
  void set_comm(int j, int i, Vec v) { comm[pair_index(j, i)] = std::move(v); dirty_ = true; }

  long long order_log() const { return ngens; }
  int exponent_p_class() const {
    int c = 0;
    for (int w : weights) c = std::max(c, w);
    return c;
  }

  // Syllable caches for fast collection. Rebuilt on demand.
  const std::vector<Syllable>& pow_syll(int k) const {
    compile();
    return pow_syll_[k];
  }
  const std::vector<Syllable>& comm_syll(int j, int i) const {
    compile();
    return comm_syll_[pair_index(j, i)];
  }

  void compile() const {
    if (!dirty_) return;
    pow_syll_.assign(ngens, {});
    comm_syll_.assign(comm.size(), {});
    for (int k = 0; k < ngens; ++k) pow_syll_[k] = to_syllables(pow[k]);
    for (size_t t = 0; t < comm.size(); ++t) comm_syll_[t] = to_syllables(comm[t]);
    dirty_ = false;
  }

  // Structural validity: supports strictly to the right of defining
  // generators, residues in range. Throws on violation.
  void validate() const {
    for (int k = 0; k < ngens; ++k) {
      if (weights[k] <= 0) throw PresentationError("nonpositive weight");
      check_support(pow[k], k, "power");
    }
    for (int j = 1; j < ngens; ++j)
      for (int i = 0; i < j; ++i) check_support(comm_rhs(j, i), j, "commutator");
  }

  bool same_shape(const PcPresentation& o) const {
    return prime == o.prime && ngens == o.ngens;
  }

 private:
  mutable bool dirty_ = true;
  mutable std::vector<std::vector<Syllable>> pow_syll_, comm_syll_;

  std::vector<Syllable> to_syllables(const Vec& v) const {
    std::vector<Syllable> s;
    for (size_t k = 0; k < v.size(); ++k)
      if (v[k]) s.push_back({(uint16_t)k, v[k]});
    return s;
  }
  void check_support(const Vec& v, int k, const char* what) const {
    if (v.empty()) return;
    if ((int)v.size() != ngens) throw PresentationError("relation vector has wrong length");
    for (int t = 0; t <= k && t < ngens; ++t)
      if (v[t])
        throw PresentationError(std::string(what) +
                                " relation support not right of generator " +
                                std::to_string(k + 1));
    for (int t = 0; t < ngens; ++t)
      if (v[t] >= prime) throw PresentationError("residue out of range");
  }
};

inline Vec identity_element(const PcPresentation& P) { return Vec(P.ngens, 0); }

inline bool is_identity(const Vec& v) {
  for (uint8_t e : v)
    if (e) return false;
  return true;
}

inline int leading_gen(const Vec& v) {  // -1 for identity
  for (size_t k = 0; k < v.size(); ++k)
    if (v[k]) return (int)k;
  return -1;
}

namespace detail {

struct StackItem {
  int32_t gen;
  int32_t exp;
};

inline std::vector<StackItem>& collect_stack() {
  thread_local std::vector<StackItem> st;
  return st;
}

inline void push_word_reversed(std::vector<StackItem>& st,
                               const std::vector<Syllable>& w) {
  for (size_t t = w.size(); t-- > 0;) st.push_back({w[t].gen, w[t].exp});
}

}  // namespace detail

// Right-multiply the normal form u by g^e (0-based g, 0 <= e < p),
// restoring normal form. Collection from the left on the pending word.
inline void mul_syllable(const PcPresentation& P, Vec& u, int g0, int e0) {
  if (e0 == 0) return;
  auto& st = detail::collect_stack();
  const size_t base = st.size();
  const int p = P.prime;
  st.push_back({g0, e0});
  while (st.size() > base) {
    const auto [g, e] = st.back();
    st.pop_back();
    if (e == 0) continue;
    int k = -1;
    for (int t = P.ngens - 1; t > g; --t)
      if (u[t]) { k = t; break; }
    if (k < 0) {
      int s = u[g] + e;
      u[g] = (uint8_t)(s % p);
      if (s >= p) detail::push_word_reversed(st, P.pow_syll(g));
    } else {
      // u ends in g_k^a: u*g^e = (u minus one g_k) * g * g_k * [g_k,g] * g^(e-1)
      u[k]--;
      if (e > 1) st.push_back({g, e - 1});
      detail::push_word_reversed(st, P.comm_syll(k, g));
      st.push_back({k, 1});
      st.push_back({g, 1});
    }
  }
}

inline void mul_in_place(const PcPresentation& P, Vec& u, const Vec& b) {
  for (int k = 0; k < P.ngens; ++k)
    if (b[k]) mul_syllable(P, u, k, b[k]);
}

inline Vec multiply(const PcPresentation& P, const Vec& a, const Vec& b) {
  if ((int)a.size() != P.ngens || (int)b.size() != P.ngens)
    throw PresentationError("element does not belong to this presentation");
  Vec u = a;
  mul_in_place(P, u, b);
  return u;
}

// a^{-1}: peel leading syllables, accumulating left factors.
inline Vec inverse(const PcPresentation& P, const Vec& a) {
  const int p = P.prime;
  Vec v = identity_element(P);
  Vec t = a;
  for (;;) {
    int k = leading_gen(t);
    if (k < 0) break;
    int e = p - t[k];
    Vec x = identity_element(P);
    x[k] = (uint8_t)e;
    // t := x * t raises the leading generator; a^{-1} = x_m ... x_1.
    Vec xt = x;
    mul_in_place(P, xt, t);
    t = std::move(xt);
    Vec xv = std::move(x);
    mul_in_place(P, xv, v);
    v = std::move(xv);
  }
  return v;
}

inline Vec power(const PcPresentation& P, const Vec& a, long long k) {
  Vec base = a;
  if (k < 0) {
    base = inverse(P, a);
    k = -k;
  }
  if (k <= 4) {
    Vec r = identity_element(P);
    for (long long t = 0; t < k; ++t) mul_in_place(P, r, base);
    return r;
  }
  Vec r = identity_element(P);
  while (k > 0) {
    if (k & 1) mul_in_place(P, r, base);
    base = multiply(P, base, base);
    k >>= 1;
  }
  return r;
}

inline Vec conjugate(const PcPresentation& P, const Vec& a, const Vec& b) {
  return multiply(P, multiply(P, inverse(P, b), a), b);
}

// [a,b] = a^{-1} b^{-1} a b
inline Vec commutator(const PcPresentation& P, const Vec& a, const Vec& b) {
  Vec r = inverse(P, a);
  mul_in_place(P, r, inverse(P, b));
  mul_in_place(P, r, a);
  mul_in_place(P, r, b);
  return r;
}

inline Vec gen_element(const PcPresentation& P, int k /*0-based*/, int e = 1) {
  Vec v = identity_element(P);
  int ee = ((e % P.prime) + P.prime) % P.prime;
  v[k] = (uint8_t)ee;
  return v;
}

// Collect an arbitrary word (1-based generators, any integer exponents).
inline Vec collect(const PcPresentation& P, const Word& w) {
  Vec u = identity_element(P);
  for (auto [g, e] : w) {
    if (g < 1 || g > P.ngens)
      throw PresentationError("generator index out of range: " + std::to_string(g));
    long long r = ((e % P.prime) + P.prime) % P.prime;
    if (r) mul_syllable(P, u, g - 1, (int)r);
  }
  return u;
}

inline Vec evaluate_vec_under(const PcPresentation& dst, const Vec& expvec,
                              const std::vector<Vec>& images) {
  Vec r = identity_element(dst);
  for (size_t k = 0; k < expvec.size(); ++k)
    if (expvec[k]) {
      Vec q = power(dst, images[k], expvec[k]);
      mul_in_place(dst, r, q);
    }
  return r;
}

// ---------------------------------------------------------------------------
// Consistency testing: the classical overlap test words, optionally
// restricted by weight. For a presentation of exponent-p class bound L, an
// overlap need only be tested when the weights involved sum to at most L;
// the restricted set is complete when every later generator has a
// definition, so the filter is only applied in that case.

struct ConsistencyReport {
  bool consistent = true;
  std::vector<std::string> failures;  // human-readable failed test words
  explicit operator bool() const { return consistent; }
};

namespace detail {

inline void consistency_note(ConsistencyReport& rep, const std::string& s,
                             size_t cap = 32) {
  rep.consistent = false;
  if (rep.failures.size() < cap) rep.failures.push_back(s);
}

}  // namespace detail

inline bool has_full_definitions(const PcPresentation& P, int d1_weight1) {
  if ((int)P.defs.size() != P.ngens) return false;
  for (int k = d1_weight1; k < P.ngens; ++k)
    if (P.defs[k].kind == Definition::None) return false;
  return true;
}

// Graded definitions: each generator's defining relation has nominal weight
// equal to the generator weight. Only then is the weight-restricted overlap
// test set complete.
inline bool has_graded_definitions(const PcPresentation& P, int d1_weight1) {
  if (!has_full_definitions(P, d1_weight1)) return false;
  for (int k = d1_weight1; k < P.ngens; ++k) {
    const auto& d = P.defs[k];
    int w = d.kind == Definition::Pow ? P.weights[d.i] + 1
                                      : P.weights[d.j] + P.weights[d.i];
    if (w != P.weights[k]) return false;
  }
  return true;
}

inline ConsistencyReport check_consistency(const PcPresentation& P,
                                           bool force_unfiltered = false) {
  P.compile();
  ConsistencyReport rep;
  const int n = P.ngens, p = P.prime;
  int d1 = 0;
  while (d1 < n && P.weights[d1] == 1) ++d1;
  const bool filtered =
      !force_unfiltered && has_graded_definitions(P, d1);
  const int L = P.exponent_p_class();
  auto wt = [&](int k) { return P.weights[k]; };

  auto gel = [&](int k) { return gen_element(P, k); };

  // associativity overlaps (g_k g_j) g_i = g_k (g_j g_i), k > j > i
  for (int k = 2; k < n; ++k)
    for (int j = 1; j < k; ++j)
      for (int i = 0; i < j; ++i) {
        if (filtered && wt(k) + wt(j) + wt(i) > L) continue;
        Vec lhs = multiply(P, multiply(P, gel(k), gel(j)), gel(i));
        Vec rhs = multiply(P, gel(k), multiply(P, gel(j), gel(i)));
        if (lhs != rhs)
          detail::consistency_note(rep, "assoc(g" + std::to_string(k + 1) + ",g" +
                                            std::to_string(j + 1) + ",g" +
                                            std::to_string(i + 1) + ")");
      }
  // power overlaps
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      if (!filtered || wt(j) + 1 + wt(i) <= L) {
        // g_j^p * g_i = g_j^{p-1} * (g_j g_i)
        Vec lhs = P.pow[j].empty() ? gel(i) : multiply(P, P.pow[j], gel(i));
        Vec rhs = multiply(P, power(P, gel(j), p - 1), multiply(P, gel(j), gel(i)));
        if (lhs != rhs)
          detail::consistency_note(rep, "powleft(g" + std::to_string(j + 1) + ",g" +
                                            std::to_string(i + 1) + ")");
      }
      if (!filtered || wt(j) + wt(i) + 1 <= L) {
        // g_j * g_i^p = (g_j g_i) * g_i^{p-1}
        Vec lhs = P.pow[i].empty() ? gel(j) : multiply(P, gel(j), P.pow[i]);
        Vec rhs = multiply(P, multiply(P, gel(j), gel(i)), power(P, gel(i), p - 1));
        if (lhs != rhs)
          detail::consistency_note(rep, "powright(g" + std::to_string(j + 1) + ",g" +
                                            std::to_string(i + 1) + ")");
      }
    }
  // self overlaps g_i * g_i^p = g_i^p * g_i
  for (int i = 0; i < n; ++i) {
    if (filtered && 2 * wt(i) + 1 > L) continue;
    Vec rhsw = P.pow[i].empty() ? identity_element(P) : P.pow[i];
    Vec lhs = multiply(P, gel(i), rhsw);
    Vec rhs = multiply(P, rhsw, gel(i));
    if (lhs != rhs)
      detail::consistency_note(rep, "powself(g" + std::to_string(i + 1) + ")");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Homomorphisms given by generator images.

struct RelationViolated : std::runtime_error {
  std::vector<std::string> violated;
  explicit RelationViolated(std::vector<std::string> v)
      : std::runtime_error("relation(s) violated under generator images: " +
                           (v.empty() ? std::string("?") : v.front())),
        violated(std::move(v)) {}
};

struct Homomorphism {
  const PcPresentation* src = nullptr;
  const PcPresentation* dst = nullptr;
  std::vector<Vec> images;  // one per src generator

  Vec apply(const Vec& x) const { return evaluate_vec_under(*dst, x, images); }
};

inline bool relations_hold(const PcPresentation& src, const PcPresentation& dst,
                           const std::vector<Vec>& images,
                           std::vector<std::string>* violated = nullptr) {
  bool ok = true;
  auto note = [&](const std::string& s) {
    ok = false;
    if (violated && violated->size() < 16) violated->push_back(s);
  };
  for (int k = 0; k < src.ngens; ++k) {
    Vec lhs = power(dst, images[k], src.prime);
    Vec rhs = src.pow[k].empty() ? identity_element(dst)
                                 : evaluate_vec_under(dst, src.pow[k], images);
    if (lhs != rhs) {
      note("pow g" + std::to_string(k + 1));
      if (!violated) return false;
    }
  }
  for (int j = 1; j < src.ngens; ++j)
    for (int i = 0; i < j; ++i) {
      Vec lhs = commutator(dst, images[j], images[i]);
      const Vec& r = src.comm_rhs(j, i);
      Vec rhs = r.empty() ? identity_element(dst) : evaluate_vec_under(dst, r, images);
      if (lhs != rhs) {
        note("comm [g" + std::to_string(j + 1) + ",g" + std::to_string(i + 1) + "]");
        if (!violated) return false;
      }
    }
  return ok;
}

inline Homomorphism evaluate_map(const PcPresentation& src,
                                 const PcPresentation& dst,
                                 const std::vector<Vec>& images) {
  if ((int)images.size() != src.ngens)
    throw PresentationError("need one image per generator");
  std::vector<std::string> bad;
  if (!relations_hold(src, dst, images, &bad)) throw RelationViolated(bad);
  return Homomorphism{&src, &dst, images};
}

// ---------------------------------------------------------------------------
// Text format (normative for fixtures):
//   p <prime> / n <ngens> / w <i> <weight> / pow <i> : <vec> /
//   comm <j> <i> : <vec> / label <string>
// Omitted pow/comm lines mean trivial right-hand side.

inline std::string format_presentation(const PcPresentation& P) {
  std::ostringstream os;
  os << "p " << P.prime << "\n";
  os << "n " << P.ngens << "\n";
  for (int k = 0; k < P.ngens; ++k) os << "w " << (k + 1) << " " << P.weights[k] << "\n";
  auto vec = [&](const Vec& v) {
    std::ostringstream t;
    for (int k = 0; k < P.ngens; ++k) {
      if (k) t << " ";
      t << (v.empty() ? 0 : (int)v[k]);
    }
    return t.str();
  };
  for (int k = 0; k < P.ngens; ++k)
    if (!P.pow[k].empty() && !is_identity(P.pow[k]))
      os << "pow " << (k + 1) << " : " << vec(P.pow[k]) << "\n";
  for (int j = 1; j < P.ngens; ++j)
    for (int i = 0; i < j; ++i) {
      const Vec& v = P.comm_rhs(j, i);
      if (!v.empty() && !is_identity(v))
        os << "comm " << (j + 1) << " " << (i + 1) << " : " << vec(v) << "\n";
    }
  if (!P.label.empty()) os << "label " << P.label << "\n";
  return os.str();
}

inline PcPresentation parse_presentation(const std::string& text) {
  PcPresentation P;
  P.prime = 0;
  P.ngens = -1;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_p = false, have_n = false;
  auto need = [&](bool c, int col, const std::string& m) {
    if (!c) throw ParseError(lineno, col, m);
  };
  auto parse_vec = [&](std::istringstream& ls) {
    need(have_n, 1, "n must be declared before relations");
    Vec v((size_t)P.ngens, 0);
    for (int k = 0; k < P.ngens; ++k) {
      long long e;
      if (!(ls >> e)) throw ParseError(lineno, 1, "expected " + std::to_string(P.ngens) + " residues");
      need(e >= 0 && e < P.prime, 1, "residue out of range [0,p)");
      v[k] = (uint8_t)e;
    }
    long long extra;
    need(!(ls >> extra), 1, "trailing residues (generator out of range?)");
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    // strip comments
    auto h = line.find('#');
    if (h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "p") {
      long long v;
      need((bool)(ls >> v), 3, "expected prime");
      need(v >= 2, 3, "p must be at least 2");
      for (long long t = 2; t * t <= v; ++t) need(v % t != 0, 3, "p must be prime");
      P.prime = (int)v;
      have_p = true;
    } else if (key == "n") {
      long long v;
      need((bool)(ls >> v), 3, "expected generator count");
      need(v >= 0 && v <= 4096, 3, "generator count out of range");
      P.ngens = (int)v;
      P.weights.assign(P.ngens, 1);
      P.pow.assign(P.ngens, Vec{});
      P.comm.assign((size_t)P.ngens * (P.ngens - 1) / 2, Vec{});
      have_n = true;
    } else if (key == "w") {
      need(have_n, 1, "n must be declared before weights");
      long long i, w;
      need((bool)(ls >> i >> w), 3, "expected: w <i> <weight>");
      need(i >= 1 && i <= P.ngens, 3, "generator index out of range");
      need(w >= 1, 5, "weight must be positive");
      P.weights[i - 1] = (int)w;
    } else if (key == "pow") {
      long long i;
      std::string colon;
      need((bool)(ls >> i >> colon) && colon == ":", 5, "expected: pow <i> : <vec>");
      need(i >= 1 && i <= P.ngens, 5, "generator index out of range");
      P.pow[i - 1] = parse_vec(ls);
    } else if (key == "comm") {
      long long j, i;
      std::string colon;
      need((bool)(ls >> j >> i >> colon) && colon == ":", 6, "expected: comm <j> <i> : <vec>");
      need(j >= 1 && j <= P.ngens && i >= 1 && i <= P.ngens, 6, "generator index out of range");
      need(j > i, 6, "commutator requires j > i");
      P.comm[PcPresentation::pair_index((int)j - 1, (int)i - 1)] = parse_vec(ls);
    } else if (key == "label") {
      std::string rest;
      std::getline(ls, rest);
      size_t b = rest.find_first_not_of(" \t");
      P.label = (b == std::string::npos) ? "" : rest.substr(b);
    } else {
      throw ParseError(lineno, 1, "unknown directive '" + key + "'");
    }
  }
  if (!have_p) throw ParseError(lineno, 1, "missing 'p' declaration");
  if (!have_n) throw ParseError(lineno, 1, "missing 'n' declaration");
  try {
    P.validate();
  } catch (const PresentationError& e) {
    throw ParseError(lineno, 1, e.what());
  }
  // weight sanity: relation supports sit at weights >= the defining ones
  for (int k = 0; k < P.ngens; ++k)
    for (int t = 0; t < P.ngens; ++t)
      if (!P.pow[k].empty() && P.pow[k][t] && P.weights[t] < P.weights[k])
        throw ParseError(lineno, 1, "inconsistent weight declaration (power rhs below weight)");
  return P;
}

}  // namespace pclab
