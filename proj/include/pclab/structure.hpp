// Structural invariants: central series, class/coclass, abelianizations as
// logarithmic type invariants, maximal subgroups, Frattini quotient.
#pragma once

#include "pclab/subgroup.hpp"

#include <numeric>

namespace pclab {

// ---------------------------------------------------------------------------
// Exact integer diagonalization (Smith-type) for small relation matrices.
// Entries stay tiny for p-group relation matrices; overflow is checked, not
// silently ignored.

namespace detail {

inline long long checked_mul(long long a, long long b) {
  long long r;
  if (__builtin_mul_overflow(a, b, &r))
    throw PresentationError("integer overflow in diagonalization");
  return r;
}
inline long long checked_sub(long long a, long long b) {
  long long r;
  if (__builtin_sub_overflow(a, b, &r))
    throw PresentationError("integer overflow in diagonalization");
  return r;
}

}  // namespace detail

inline std::vector<long long> smith_diagonal(std::vector<std::vector<long long>> m) {
  const size_t rows = m.size();
  const size_t cols = rows ? m[0].size() : 0;
  std::vector<long long> diag;
  size_t r0 = 0, c0 = 0;
  while (r0 < rows && c0 < cols) {
    // find pivot of least absolute value
    size_t pr = r0, pc = c0;
    long long best = 0;
    for (size_t r = r0; r < rows; ++r)
      for (size_t c = c0; c < cols; ++c) {
        long long v = m[r][c] < 0 ? -m[r][c] : m[r][c];
        if (v && (best == 0 || v < best)) {
          best = v;
          pr = r;
          pc = c;
        }
      }
    if (best == 0) break;
    std::swap(m[r0], m[pr]);
    for (size_t r = 0; r < rows; ++r) std::swap(m[r][c0], m[r][pc]);
    bool clean = true;
    for (size_t r = r0 + 1; r < rows; ++r)
      if (m[r][c0]) {
        long long q = m[r][c0] / m[r0][c0];
        for (size_t c = c0; c < cols; ++c)
          m[r][c] = detail::checked_sub(m[r][c], detail::checked_mul(q, m[r0][c]));
        if (m[r][c0]) clean = false;
      }
    for (size_t c = c0 + 1; c < cols; ++c)
      if (m[r0][c]) {
        long long q = m[r0][c] / m[r0][c0];
        for (size_t r = r0; r < rows; ++r)
          m[r][c] = detail::checked_sub(m[r][c], detail::checked_mul(q, m[r][c0]));
        if (m[r0][c]) clean = false;
      }
    if (!clean) continue;  // smaller remainders appeared; repick pivot
    diag.push_back(m[r0][c0] < 0 ? -m[r0][c0] : m[r0][c0]);
    ++r0;
    ++c0;
  }
  // divisibility chain
  for (size_t i = 0; i + 1 < diag.size(); ++i)
    for (size_t j = i + 1; j < diag.size(); ++j)
      if (diag[j] % diag[i]) {
        long long a = diag[i], b = diag[j];
        long long g = std::gcd(a, b);
        diag[i] = g;
        diag[j] = detail::checked_mul(a / g, b);
      }
  std::sort(diag.begin(), diag.end());
  return diag;
}

// ---------------------------------------------------------------------------
// Logarithmic abelian type invariants. parts is non-increasing; the empty
// list is the trivial group. "21" = (9,3), "1^3" = (3,3,3).

struct AbelianType {
  std::vector<int> parts;

  bool operator==(const AbelianType& o) const { return parts == o.parts; }
  bool operator!=(const AbelianType& o) const { return parts != o.parts; }
  // descending order: lexicographic on parts
  bool operator<(const AbelianType& o) const { return parts < o.parts; }
  bool operator>(const AbelianType& o) const { return o.parts < parts; }

  int rank() const { return (int)parts.size(); }
  int order_log() const { return std::accumulate(parts.begin(), parts.end(), 0); }
  bool is_elementary() const {
    for (int x : parts)
      if (x != 1) return false;
    return true;
  }
};

inline std::string format_atype(const AbelianType& a) {
  if (a.parts.empty()) return "1^0";
  std::string s;
  size_t i = 0;
  while (i < a.parts.size()) {
    size_t j = i;
    while (j < a.parts.size() && a.parts[j] == a.parts[i]) ++j;
    s += std::to_string(a.parts[i]);
    if (j - i > 1) s += "^" + std::to_string(j - i);
    i = j;
  }
  return s;
}

// Grammar: sequence of single-digit parts, each optionally followed by
// '^' and a single-digit repetition count.
inline AbelianType parse_atype(const std::string& s, size_t* pos_io = nullptr) {
  AbelianType a;
  size_t i = pos_io ? *pos_io : 0;
  while (i < s.size() && isdigit((unsigned char)s[i])) {
    int part = s[i] - '0';
    ++i;
    int rep = 1;
    if (i < s.size() && s[i] == '^') {
      ++i;
      if (i >= s.size() || !isdigit((unsigned char)s[i]))
        throw PresentationError("bad abelian type string: " + s);
      rep = s[i] - '0';
      ++i;
    }
    for (int t = 0; t < rep; ++t)
      if (part > 0) a.parts.push_back(part);
    if (part == 0) throw PresentationError("bad abelian type string: " + s);
  }
  if (pos_io)
    *pos_io = i;
  else if (i != s.size())
    throw PresentationError("trailing junk in abelian type string: " + s);
  std::sort(a.parts.rbegin(), a.parts.rend());
  return a;
}

// Abelianization of the presented group: cokernel of the relation matrix.
inline AbelianType abelian_type_invariants(const PcPresentation& P) {
  const int n = P.ngens;
  std::vector<std::vector<long long>> m;
  for (int k = 0; k < n; ++k) {
    std::vector<long long> row(n, 0);
    row[k] = P.prime;
    if (!P.pow[k].empty())
      for (int t = 0; t < n; ++t) row[t] -= (long long)P.pow[k][t];
    m.push_back(std::move(row));
  }
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      const Vec& v = P.comm_rhs(j, i);
      if (v.empty()) continue;
      std::vector<long long> row(n, 0);
      for (int t = 0; t < n; ++t) row[t] = (long long)v[t];
      m.push_back(std::move(row));
    }
  auto diag = smith_diagonal(std::move(m));
  AbelianType a;
  long long covered = (long long)diag.size();
  if (covered < n)
    throw PresentationError("abelianization is infinite; presentation invalid");
  for (long long d : diag) {
    if (d == 1) continue;
    int e = 0;
    long long x = d;
    while (x % P.prime == 0) {
      x /= P.prime;
      ++e;
    }
    if (x != 1) throw PresentationError("invariant factor is not a p-power");
    a.parts.push_back(e);
  }
  std::sort(a.parts.rbegin(), a.parts.rend());
  return a;
}

inline AbelianType abelian_type_invariants(const SubgroupHandle& H) {
  return abelian_type_invariants(H.induced);
}

// ---------------------------------------------------------------------------
// Series reports.

struct SeriesReport {
  std::vector<Subgroup> lower_central;  // gamma_1, gamma_2, ..., trivial last
  std::vector<Subgroup> derived;        // G^(0), G^(1), ..., trivial last
  int cl = 0;                           // nilpotency class
  int dl = 0;                           // derived length
  int lo = 0;                           // logarithmic order
  int cc = 0;                           // coclass = lo - cl
};

inline std::vector<Subgroup> lower_central_series_groups(const PcPresentation& P) {
  std::vector<Subgroup> gam;
  gam.push_back(whole_group(P));
  // gamma_2
  {
    std::vector<Vec> gens;
    for (int j = 1; j < P.ngens; ++j)
      for (int i = 0; i < j; ++i)
        gens.push_back(commutator(P, gen_element(P, j), gen_element(P, i)));
    gam.push_back(span(P, gens, true));
  }
  while (!gam.back().is_trivial()) {
    const Subgroup& prev = gam.back();
    std::vector<Vec> gens;
    for (int k = 0; k < P.ngens; ++k) {
      if (!prev.occupied(k)) continue;
      for (int g = 0; g < P.ngens; ++g)
        gens.push_back(commutator(P, prev.table()[k], gen_element(P, g)));
    }
    Subgroup next = span(P, gens, true);
    if (next.rank() == prev.rank())
      throw PresentationError("lower central series does not descend");
    gam.push_back(std::move(next));
  }
  return gam;
}

inline std::vector<Subgroup> derived_series_groups(const PcPresentation& P) {
  std::vector<Subgroup> der;
  der.push_back(whole_group(P));
  while (!der.back().is_trivial()) {
    const Subgroup& prev = der.back();
    std::vector<Vec> gens;
    auto slots = prev.slots();
    for (size_t b = 1; b < slots.size(); ++b)
      for (size_t a = 0; a < b; ++a)
        gens.push_back(commutator(P, prev.table()[slots[b]], prev.table()[slots[a]]));
    Subgroup next = span(P, gens, true);
    if (next.rank() == prev.rank()) break;  // perfect step cannot happen in p-groups
    der.push_back(std::move(next));
  }
  return der;
}

inline SeriesReport series_report(const PcPresentation& P) {
  SeriesReport r;
  r.lower_central = lower_central_series_groups(P);
  r.derived = derived_series_groups(P);
  r.lo = P.ngens;
  r.cl = (int)r.lower_central.size() - 1;  // gamma_{cl+1} trivial
  r.dl = (int)r.derived.size() - 1;
  r.cc = r.lo - r.cl;
  return r;
}

inline SeriesReport lower_central_series(const PcPresentation& P) { return series_report(P); }
inline SeriesReport derived_series(const PcPresentation& P) { return series_report(P); }

inline bool is_abelian(const PcPresentation& P) {
  for (const auto& v : P.comm)
    if (!v.empty() && !is_identity(v)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Frattini quotient and maximal subgroups.

struct FrattiniData {
  Subgroup phi;            // Frattini subgroup G' G^p
  LayerFrame frame;        // coordinates of G/Phi
  int d1 = 0;
  QuotientMap quotient;    // presentation of G/Phi
};

inline Subgroup frattini_subgroup(const PcPresentation& P) {
  std::vector<Vec> gens;
  for (int k = 0; k < P.ngens; ++k) gens.push_back(power(P, gen_element(P, k), P.prime));
  for (int j = 1; j < P.ngens; ++j)
    for (int i = 0; i < j; ++i)
      gens.push_back(commutator(P, gen_element(P, j), gen_element(P, i)));
  return span(P, gens, true);
}

inline FrattiniData frattini_quotient(const PcPresentation& P) {
  FrattiniData f{frattini_subgroup(P), LayerFrame{Subgroup(P), {}}, 0, QuotientMap{}};
  f.frame = layer_frame(P, whole_group(P), f.phi);
  f.d1 = (int)f.frame.new_slots.size();
  f.quotient = quotient(P, f.phi);
  return f;
}

// Normalized linear forms over F_p^d (first nonzero coefficient 1), in
// lexicographic order: the deterministic enumeration of maximal subgroups.
inline std::vector<std::vector<uint8_t>> normalized_forms(int p, int d) {
  std::vector<std::vector<uint8_t>> out;
  std::vector<uint8_t> v(d, 0);
  for (;;) {
    // odometer
    int t = d - 1;
    while (t >= 0 && v[t] == p - 1) v[t--] = 0;
    if (t < 0) break;
    v[t]++;
    int lead = 0;
    while (lead < d && !v[lead]) ++lead;
    if (lead < d && v[lead] == 1) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// All subgroups of index p, enumerated deterministically.
inline std::vector<SubgroupHandle> maximal_subgroups(const PcPresentation& P) {
  FrattiniData f = frattini_quotient(P);
  const int d = f.d1, p = P.prime;
  if (d < 1) throw PresentationError("trivial group has no maximal subgroups");
  std::vector<SubgroupHandle> out;
  for (const auto& phi_vec : normalized_forms(p, d)) {
    // kernel basis of the form
    std::vector<Vec> gens;
    for (int k = 0; k < P.ngens; ++k)
      if (f.phi.occupied(k)) gens.push_back(f.phi.table()[k]);
    int lead = 0;
    while (lead < d && !phi_vec[lead]) ++lead;
    // basis vectors of ker(phi): for t != lead, e_t - (phi_t/phi_lead) e_lead
    for (int t = 0; t < d; ++t) {
      if (t == lead) continue;
      // coefficient at lead: solve phi_lead * x + phi_t = 0; phi_lead = 1
      int x = (p - phi_vec[t] % p) % p;
      Vec g = f.frame.combined.table()[f.frame.new_slots[t]];
      if (x) {
        Vec l = power(P, f.frame.combined.table()[f.frame.new_slots[lead]], x);
        g = multiply(P, g, l);
      }
      gens.push_back(g);
    }
    out.push_back(make_handle(P, span(P, gens)));
  }
  for (const auto& h : out)
    if (h.group.index_log() != 1)
      throw PresentationError("maximal subgroup does not have index p");
  return out;
}

inline int generator_rank(const PcPresentation& P) {
  return (int)layer_frame(P, whole_group(P), frattini_subgroup(P)).new_slots.size();
}

}  // namespace pclab
