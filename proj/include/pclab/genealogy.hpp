// Descendant generation: allowable subgroups of the p-multiplicator modulo
// the automorphism action, N_s/C_s counts, parent operator and root paths,
// tree addressing, sigma-purged walks, the Schur sigma census, and the
// catalog with curated labels.
#pragma once

#include "pclab/artin.hpp"
#include "pclab/autgroup.hpp"
#include "pclab/dense.hpp"
#include "pclab/pcover.hpp"

#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace pclab {

struct AbelianInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownRoot : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CounterOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FingerprintCollision : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Small F_p matrix/subspace helpers over uint8 rows.

namespace fpmat {

using Row = std::vector<uint8_t>;
using Mat = std::vector<Row>;

inline int rank_of(Mat m, int p) {
  const size_t rows = m.size();
  if (!rows) return 0;
  const size_t cols = m[0].size();
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t sel = r;
    while (sel < rows && !m[sel][c]) ++sel;
    if (sel == rows) continue;
    std::swap(m[sel], m[r]);
    int inv = 1;
    while ((inv * m[r][c]) % p != 1) ++inv;
    for (size_t t = 0; t < cols; ++t) m[r][t] = (uint8_t)(m[r][t] * inv % p);
    for (size_t rr = 0; rr < rows; ++rr)
      if (rr != r && m[rr][c]) {
        int f = m[rr][c];
        for (size_t t = 0; t < cols; ++t)
          m[rr][t] = (uint8_t)((m[rr][t] + (p - f) * m[r][t]) % p);
      }
    ++r;
  }
  return (int)r;
}

// reduced row echelon form; drops zero rows
inline Mat rref(Mat m, int p) {
  const size_t rows = m.size();
  if (!rows) return m;
  const size_t cols = m[0].size();
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t sel = r;
    while (sel < rows && !m[sel][c]) ++sel;
    if (sel == rows) continue;
    std::swap(m[sel], m[r]);
    int inv = 1;
    while ((inv * m[r][c]) % p != 1) ++inv;
    for (size_t t = 0; t < cols; ++t) m[r][t] = (uint8_t)(m[r][t] * inv % p);
    for (size_t rr = 0; rr < rows; ++rr)
      if (rr != r && m[rr][c]) {
        int f = m[rr][c];
        for (size_t t = 0; t < cols; ++t)
          m[rr][t] = (uint8_t)((m[rr][t] + (p - f) * m[r][t]) % p);
      }
    ++r;
  }
  m.resize(r);
  return m;
}

inline std::string key_of(const Mat& rref_rows) {
  std::string s;
  s.reserve(rref_rows.size() * (rref_rows.empty() ? 0 : rref_rows[0].size()) + 2);
  s.push_back((char)('0' + rref_rows.size()));
  for (const auto& r : rref_rows)
    for (uint8_t v : r) s.push_back((char)('0' + v));
  return s;
}

inline Row apply(const Row& v, const Mat& m, int p) {
  const size_t dim = m.size();
  Row out(dim, 0);
  for (size_t t = 0; t < dim; ++t)
    if (v[t])
      for (size_t c = 0; c < dim; ++c)
        out[c] = (uint8_t)((out[c] + v[t] * m[t][c]) % p);
  return out;
}

inline Mat multiply(const Mat& a, const Mat& b, int p) {
  const size_t dim = a.size();
  Mat out(dim, Row(dim, 0));
  for (size_t i = 0; i < dim; ++i)
    for (size_t t = 0; t < dim; ++t)
      if (a[i][t])
        for (size_t j = 0; j < dim; ++j)
          out[i][j] = (uint8_t)((out[i][j] + a[i][t] * b[t][j]) % p);
  return out;
}

inline std::string pack(const Mat& m) {
  std::string s;
  for (const auto& r : m)
    for (uint8_t v : r) s.push_back((char)('0' + v));
  return s;
}

// All subspaces of dimension k in F_p^m as RREF bases, lexicographic order.
inline std::vector<Mat> subspaces(int p, int m, int k) {
  std::vector<Mat> out;
  if (k == 0) {
    out.push_back(Mat{});
    return out;
  }
  if (k > m) return out;
  std::vector<int> piv(k);
  for (int t = 0; t < k; ++t) piv[t] = t;
  for (;;) {
    // free positions: (r, c) with c > piv[r], c not a pivot
    std::vector<std::pair<int, int>> free_pos;
    std::vector<bool> is_piv(m, false);
    for (int t = 0; t < k; ++t) is_piv[piv[t]] = true;
    for (int r = 0; r < k; ++r)
      for (int c = piv[r] + 1; c < m; ++c)
        if (!is_piv[c]) free_pos.push_back({r, c});
    long long total = 1;
    for (size_t t = 0; t < free_pos.size(); ++t) total *= p;
    for (long long idx = 0; idx < total; ++idx) {
      Mat b(k, Row(m, 0));
      for (int r = 0; r < k; ++r) b[r][piv[r]] = 1;
      long long q = idx;
      for (auto [r, c] : free_pos) {
        b[r][c] = (uint8_t)(q % p);
        q /= p;
      }
      out.push_back(std::move(b));
    }
    // next pivot combination
    int t = k - 1;
    while (t >= 0 && piv[t] == m - k + t) --t;
    if (t < 0) break;
    piv[t]++;
    for (int u = t + 1; u < k; ++u) piv[u] = piv[u - 1] + 1;
  }
  return out;
}

}  // namespace fpmat

// ---------------------------------------------------------------------------
// Tree addresses: ROOT(-#s;c)*

struct TreeAddress {
  std::string root;
  std::vector<std::pair<int, int>> path;  // (step, counter), counters 1-based

  std::string str() const {
    std::string s = root;
    for (auto [step, c] : path) s += "-#" + std::to_string(step) + ";" + std::to_string(c);
    return s;
  }
  bool operator<(const TreeAddress& o) const {
    if (root != o.root) return root < o.root;
    return path < o.path;
  }
  bool operator==(const TreeAddress& o) const { return root == o.root && path == o.path; }
};

inline TreeAddress parse_address(const std::string& text) {
  // accept ASCII '-' and U+2212 for the dash; "<o,i>" and unicode angle labels
  std::string s;
  for (size_t i = 0; i < text.size();) {
    if (text.compare(i, 3, "−") == 0) {
      s += '-';
      i += 3;
    } else if (text.compare(i, 3, "⟨") == 0) {
      s += '<';
      i += 3;
    } else if (text.compare(i, 3, "⟩") == 0) {
      s += '>';
      i += 3;
    } else {
      s += text[i];
      ++i;
    }
  }
  TreeAddress a;
  size_t dash = s.find("-#");
  a.root = s.substr(0, dash);
  while (dash != std::string::npos) {
    size_t semi = s.find(';', dash);
    if (semi == std::string::npos)
      throw PresentationError("malformed address (missing ';'): " + text);
    int step = std::stoi(s.substr(dash + 2, semi - dash - 2));
    size_t next = s.find("-#", semi);
    int counter = std::stoi(s.substr(semi + 1, next == std::string::npos
                                                    ? std::string::npos
                                                    : next - semi - 1));
    if (step < 1 || counter < 1)
      throw CounterOutOfRange("step sizes and counters are 1-based: " + text);
    a.path.push_back({step, counter});
    dash = next;
  }
  return a;
}

// ---------------------------------------------------------------------------
// Fingerprints.

struct Fingerprint {
  int lo = 0, cl = 0, cc = 0, dl = 0;
  std::string ab;        // logarithmic abelian type of G/G'
  std::string tkt;       // canonical kappa string, or "-"
  std::string tkt_name;  // section designation, or ""
  std::string ttt;       // canonical TTT multiset string, or "-"
  int epsilon = -1;
  int nu = -1, mu = -1;
  int d1 = 0;
  std::optional<bool> sigma, schur;
  std::vector<std::pair<int, int>> counts;  // (N_s, C_s) when expanded

  std::string key() const {
    std::string s = "lo" + std::to_string(lo) + ":cl" + std::to_string(cl) + ":cc" +
                    std::to_string(cc) + ":dl" + std::to_string(dl) + ":ab" + ab +
                    ":k" + tkt + ":t" + ttt + ":nu" + std::to_string(nu) + ":mu" +
                    std::to_string(mu);
    return s;
  }
};

// ---------------------------------------------------------------------------
// Descendant computation.

struct DescendantOptions {
  AutOptions aut;
  bool compute_capable = true;  // fill C_s by building each child's cover
};

struct ChildRecord {
  int step = 0;
  int counter = 0;  // 1-based within the step
  PcPresentation pres;
  long long orbit_size = 0;
};

struct DescendantSlice {
  int step = 0;
  long long n_count = 0;  // orbit count N_s
  long long c_count = 0;  // capable children C_s
  std::vector<ChildRecord> children;
};

// deduplicated multiplicator action of Aut(G), plus a small generating set
struct MultiplicatorAction {
  std::vector<fpmat::Mat> all;   // distinct matrices (the image group)
  std::vector<fpmat::Mat> gens;  // greedy generating subset
};

inline MultiplicatorAction multiplicator_image(const PCoverData& C,
                                               const AutomorphismSet& A) {
  MultiplicatorAction out;
  std::set<std::string> seen;
  // Inner automorphisms act trivially on the multiplicator (it is central
  // in the cover), so the matrix is constant on Inn-cosets: skip an
  // automorphism whenever its image pair lies in the conjugation orbit of
  // one already processed.
  const PcPresentation& G = C.base;
  int d = C.d1;
  std::unique_ptr<DenseGroup> dense;
  if (G.ngens <= 12 && d == 2) dense = std::make_unique<DenseGroup>(G);
  std::unordered_set<long long> seen_pairs;
  auto pair_covered = [&](const std::vector<Vec>& aut) {
    if (!dense) return false;
    const DenseGroup& D = *dense;
    long long a1 = D.encode(aut[0]), a2 = D.encode(aut[1]);
    long long key = a1 * D.order() + a2;
    if (seen_pairs.count(key)) return true;
    // insert the whole conjugation orbit of (a1, a2)
    for (long long g = 0; g < D.order(); ++g) {
      long long ig = D.inv(g);
      long long b1 = D.mul(D.mul(ig, a1), g);
      long long b2 = D.mul(D.mul(ig, a2), g);
      seen_pairs.insert(b1 * D.order() + b2);
    }
    return false;
  };
  for (const auto& aut : A.auts) {
    if (pair_covered(aut)) continue;
    auto m = multiplicator_action(C, aut);
    auto key = fpmat::pack(m);
    if (seen.insert(key).second) out.all.push_back(std::move(m));
  }
  std::sort(out.all.begin(), out.all.end());
  // greedy generating subset with explicit closure
  const int p = C.cover.prime;
  fpmat::Mat id((size_t)C.mu, fpmat::Row((size_t)C.mu, 0));
  for (int t = 0; t < C.mu; ++t) id[t][t] = 1;
  std::set<std::string> closure = {fpmat::pack(id)};
  for (const auto& m : out.all) {
    if (closure.count(fpmat::pack(m))) continue;
    out.gens.push_back(m);
    // close
    std::vector<fpmat::Mat> frontier = {m};
    while (!frontier.empty()) {
      std::vector<fpmat::Mat> next;
      for (const auto& x : frontier) {
        if (!closure.insert(fpmat::pack(x)).second) continue;
        for (const auto& g : out.gens) {
          next.push_back(fpmat::multiply(x, g, p));
          next.push_back(fpmat::multiply(g, x, p));
        }
      }
      frontier = std::move(next);
    }
    if (closure.size() > out.all.size() + 1)
      break;  // closure covered everything already
  }
  return out;
}

// Orbits of allowable subgroups of index p^s in the multiplicator.
inline DescendantSlice descendants_step(const PCoverData& C,
                                        const MultiplicatorAction& act, int step,
                                        const DescendantOptions& opt) {
  const int p = C.cover.prime;
  if (step < 1 || step > C.nu)
    throw StepExceedsNucleus("step size " + std::to_string(step) +
                             " exceeds the nuclear rank " + std::to_string(C.nu));
  DescendantSlice out;
  out.step = step;
  const int dim = C.mu - step;
  auto subs = fpmat::subspaces(p, C.mu, dim);
  // allowable: U + N = M
  std::vector<fpmat::Mat> allow;
  std::vector<std::string> keys;
  std::unordered_map<std::string, int> index;
  for (auto& b : subs) {
    fpmat::Mat stack = b;
    for (const auto& r : C.nucleus_rows) stack.push_back(r);
    if (fpmat::rank_of(stack, p) != C.mu) continue;
    auto key = fpmat::key_of(b);
    index[key] = (int)allow.size();
    keys.push_back(key);
    allow.push_back(std::move(b));
  }
  // union-find over the generator action
  std::vector<int> parent(allow.size());
  for (size_t t = 0; t < allow.size(); ++t) parent[t] = (int)t;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (size_t t = 0; t < allow.size(); ++t)
    for (const auto& g : act.gens) {
      fpmat::Mat img;
      for (const auto& row : allow[t]) img.push_back(fpmat::apply(row, g, p));
      img = fpmat::rref(std::move(img), p);
      auto it = index.find(fpmat::key_of(img));
      if (it == index.end())
        throw PresentationError("automorphism image is not allowable");
      int a = find((int)t), b = find(it->second);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  // orbit representatives: lexicographically least key per orbit
  std::map<int, std::pair<std::string, long long>> orbits;  // root -> (min key, size)
  for (size_t t = 0; t < allow.size(); ++t) {
    int r = find((int)t);
    auto it = orbits.find(r);
    if (it == orbits.end())
      orbits[r] = {keys[t], 1};
    else {
      it->second.second++;
      if (keys[t] < it->second.first) it->second.first = keys[t];
    }
  }
  std::vector<std::pair<std::string, long long>> reps;
  for (auto& [root, rec] : orbits) reps.push_back(rec);
  std::sort(reps.begin(), reps.end());
  out.n_count = (long long)reps.size();
  int counter = 0;
  for (auto& [key, orbit_size] : reps) {
    ChildRecord ch;
    ch.step = step;
    ch.counter = ++counter;
    ch.orbit_size = orbit_size;
    ch.pres = cover_quotient(C, allow[index.at(key)]);
    out.children.push_back(std::move(ch));
  }
  if (opt.compute_capable)
    for (const auto& ch : out.children)
      if (p_cover(ch.pres).nu > 0) out.c_count++;
  return out;
}

// ---------------------------------------------------------------------------
// Parent operator and root paths.

inline PcPresentation parent(const PcPresentation& P) {
  auto gamma = lower_central_series_groups(P);
  int cl = (int)gamma.size() - 1;
  if (cl < 2) throw AbelianInput("abelian groups have no parent in the tree");
  auto Q = quotient(P, gamma[cl - 1]);  // gamma_cl
  return standardized(Q.pres);
}

struct RootPathEntry {
  PcPresentation pres;
  int lo = 0;
  int nu = -1, mu = -1;
  std::string tkt_name;
  std::string tkt;
};

struct RootPath {
  // vertices[0] = G, descending to the class-2 floor (path without the
  // last edge); edge i joins vertices[i-1] -> vertices[i]
  std::vector<RootPathEntry> vertices;
  std::vector<int> steps;  // steps[i-1] = lo(vertices[i-1]) - lo(vertices[i])
};

inline RootPathEntry make_path_entry(const PcPresentation& P, bool with_cover = true) {
  RootPathEntry e;
  e.pres = P;
  e.lo = P.ngens;
  if (with_cover) {
    auto C = p_cover(P);
    e.nu = C.nu;
    e.mu = C.mu;
  }
  try {
    auto t = tkt(P);
    e.tkt = kappa_string(t.canonical);
    e.tkt_name = t.name;
  } catch (const std::exception&) {
    e.tkt = "-";
  }
  return e;
}

inline RootPath root_path(const PcPresentation& input) {
  PcPresentation P = standardized(input);
  RootPath rp;
  int cl = (int)lower_central_series_groups(P).size() - 1;
  if (cl < 2) return rp;  // empty checked segment
  rp.vertices.push_back(make_path_entry(P));
  while (cl > 2) {
    P = parent(P);
    cl = (int)lower_central_series_groups(P).size() - 1;
    rp.steps.push_back(rp.vertices.back().lo - P.ngens);
    rp.vertices.push_back(make_path_entry(P));
  }
  return rp;
}

struct ExtremalReport {
  bool extremal = false;
  std::vector<std::pair<int, int>> edges;  // (s_i, nu(parent)) per checked edge
};

inline ExtremalReport is_extremal_path(const RootPath& rp) {
  ExtremalReport rep;
  rep.extremal = true;
  for (size_t i = 0; i < rp.steps.size(); ++i) {
    int s = rp.steps[i];
    int nu = rp.vertices[i + 1].nu;
    rep.edges.push_back({s, nu});
    if (s != nu) rep.extremal = false;
  }
  return rep;
}

inline ExtremalReport is_extremal_path(const PcPresentation& P) {
  return is_extremal_path(root_path(P));
}

// ---------------------------------------------------------------------------
// Bartholdi-Bush laws for the H.4 series.

inline std::array<int, 3> bb_series_laws(int n) {
  if (n < 0) throw PresentationError("series index must be non-negative");
  return {8 + 3 * n, 5 + 2 * n, 3 + n};
}

}  // namespace pclab
