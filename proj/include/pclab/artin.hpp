// Artin transfers, transfer kernel/target types, Artin patterns and
// second-order index-p abelianization data.
#pragma once

#include "pclab/structure.hpp"

#include <array>
#include <fstream>
#include <map>
#include <mutex>

namespace pclab {

struct IndexNotP : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct KernelNotRecognized : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Transfer (Verlagerung) to a subgroup of index p, by the coset-representative
// formula: T(g) = prod_i r_{sigma(i)}^{-1} g r_i, projected into H/H'.

struct Transfer {
  const PcPresentation* P;
  const Subgroup* H;           // index-p subgroup
  std::vector<Vec> transversal;

  // image in H (ambient coordinates); constant mod H' on G'-cosets
  Vec apply_ambient(const Vec& g) const {
    const auto& Pr = *P;
    const int p = Pr.prime;
    Vec out = identity_element(Pr);
    for (int i = 0; i < p; ++i) {
      Vec gri = multiply(Pr, g, transversal[i]);
      int j = -1;
      for (int t = 0; t < p; ++t) {
        Vec w = multiply(Pr, inverse(Pr, transversal[t]), gri);
        if (H->contains(w)) {
          j = t;
          break;
        }
      }
      if (j < 0) throw PresentationError("transversal does not cover G");
      Vec term = multiply(Pr, inverse(Pr, transversal[j]), gri);
      mul_in_place(Pr, out, term);
    }
    if (!H->contains(out)) throw PresentationError("transfer image escaped the subgroup");
    return out;
  }
};

inline std::vector<Vec> default_transversal(const PcPresentation& P, const Subgroup& H) {
  for (int k = 0; k < P.ngens; ++k) {
    Vec g = gen_element(P, k);
    if (!H.contains(g)) {
      std::vector<Vec> r;
      for (int i = 0; i < P.prime; ++i) r.push_back(power(P, g, i));
      return r;
    }
  }
  throw IndexNotP("subgroup is the whole group");
}

inline Transfer artin_transfer(const PcPresentation& P, const Subgroup& H,
                               std::vector<Vec> transversal = {}) {
  if (H.index_log() != 1) throw IndexNotP("transfer requires an index-p subgroup");
  if (transversal.empty()) transversal = default_transversal(P, H);
  if ((int)transversal.size() != P.prime) throw IndexNotP("transversal has wrong size");
  return Transfer{&P, &H, std::move(transversal)};
}

// ---------------------------------------------------------------------------
// Transfer kernel type.

struct TransferKernelType {
  std::vector<int> kappa;      // entries in 0..m, our subgroup order; 0 = total
  std::vector<int> canonical;  // lexicographic minimum under relabeling
  std::string name;            // from the name table; empty if unnamed
};

inline std::string kappa_string(const std::vector<int>& k) {
  std::string s = "(";
  for (int v : k) s += std::to_string(v);
  return s + ")";
}

// minimum of sigma^{-1} o kappa o sigma over all permutations (0 fixed)
inline std::vector<int> canonicalize_kappa(const std::vector<int>& kappa) {
  const int m = (int)kappa.size();
  std::vector<int> perm(m);
  for (int i = 0; i < m; ++i) perm[i] = i;
  std::vector<int> best;
  std::vector<int> cand(m);
  do {
    std::vector<int> inv(m);
    for (int i = 0; i < m; ++i) inv[perm[i]] = i;
    for (int i = 0; i < m; ++i) {
      int v = kappa[perm[i]];
      cand[i] = (v == 0) ? 0 : inv[v - 1] + 1;
    }
    if (best.empty() || cand < best) best = cand;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Name table, transcribed into a data file: lines "NAME KAPPA".
class TktNameTable {
 public:
  static const TktNameTable& instance() {
    static TktNameTable t;
    return t;
  }
  std::string name_of(const std::vector<int>& canonical) const {
    auto it = by_canonical_.find(canonical);
    return it == by_canonical_.end() ? std::string() : it->second;
  }
  const std::map<std::string, std::vector<int>>& entries() const { return raw_; }

 private:
  std::map<std::vector<int>, std::string> by_canonical_;
  std::map<std::string, std::vector<int>> raw_;

  TktNameTable() {
    std::string path = data_dir() + "/tkt_names.txt";
    std::ifstream in(path);
    if (!in) throw PresentationError("cannot open TKT name table: " + path);
    std::string name, digits;
    while (in >> name >> digits) {
      if (name.empty() || name[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      std::vector<int> kappa;
      for (char c : digits) {
        if (!isdigit((unsigned char)c)) throw PresentationError("bad kappa in name table");
        kappa.push_back(c - '0');
      }
      raw_[name] = kappa;
      auto canon = canonicalize_kappa(kappa);
      auto it = by_canonical_.find(canon);
      if (it != by_canonical_.end())
        throw PresentationError("TKT name table collision: " + name + " vs " + it->second);
      by_canonical_[canon] = name;
    }
  }

 public:
  static std::string data_dir() {
    if (const char* env = std::getenv("PCLAB_DATA_DIR")) return env;
#ifdef PCLAB_DATA_DIR
    return PCLAB_DATA_DIR;
#else
    return "data";
#endif
  }
};

inline TransferKernelType name_kappa(std::vector<int> kappa) {
  TransferKernelType t;
  t.kappa = std::move(kappa);
  t.canonical = canonicalize_kappa(t.kappa);
  t.name = TktNameTable::instance().name_of(t.canonical);
  return t;
}

inline std::string tkt_section(const TransferKernelType& t) {
  if (t.name.empty()) return "?";
  auto dot = t.name.find('.');
  return t.name.substr(0, dot);
}

// ---------------------------------------------------------------------------
// Abelian-quotient machinery shared by TKT/TTT.

struct AbelianQuotientFrame {
  Subgroup derived;        // G'
  LayerFrame frame;        // transversal of G/G' (not a grading, just coords)
  std::vector<Vec> reps;   // all canonical coset representatives
};

inline AbelianQuotientFrame abelian_quotient_frame(const PcPresentation& P) {
  AbelianQuotientFrame f{lower_central_series_groups(P)[1], LayerFrame{Subgroup(P), {}}, {}};
  f.frame = layer_frame(P, whole_group(P), f.derived);
  const int k = (int)f.frame.new_slots.size();
  long long count = 1;
  for (int t = 0; t < k; ++t) {
    count *= P.prime;
    if (count > 100000) throw PresentationError("abelianization too large to enumerate");
  }
  for (long long idx = 0; idx < count; ++idx) {
    long long r = idx;
    Vec x = identity_element(P);
    for (int t = 0; t < k; ++t) {
      int e = (int)(r % P.prime);
      r /= P.prime;
      if (e) {
        Vec q = power(P, f.frame.combined.table()[f.frame.new_slots[t]], e);
        mul_in_place(P, x, q);
      }
    }
    f.reps.push_back(coset_rep(f.derived, x));
  }
  std::sort(f.reps.begin(), f.reps.end());
  f.reps.erase(std::unique(f.reps.begin(), f.reps.end()), f.reps.end());
  return f;
}

// the image of a subgroup in G/G', as a sorted set of canonical reps
inline std::vector<Vec> quotient_image(const PcPresentation& P,
                                       const AbelianQuotientFrame& f,
                                       const Subgroup& H) {
  std::vector<Vec> img;
  std::vector<Vec> frontier = {identity_element(P)};
  std::vector<Vec> seen = {coset_rep(f.derived, identity_element(P))};
  while (!frontier.empty()) {
    std::vector<Vec> next;
    for (const Vec& x : frontier)
      for (int s : H.slots()) {
        Vec y = coset_rep(f.derived, multiply(P, x, H.table()[s]));
        if (!std::binary_search(seen.begin(), seen.end(), y)) {
          seen.insert(std::lower_bound(seen.begin(), seen.end(), y), y);
          next.push_back(y);
        }
      }
    frontier = std::move(next);
  }
  return seen;
}

// ---------------------------------------------------------------------------
// TKT / TTT / Artin pattern.

struct ArtinPattern {
  TransferKernelType kappa;
  std::vector<AbelianType> tau;  // index-aligned with kappa
  int epsilon = 0;
};

struct TktOptions {
  // transversals per maximal subgroup, for the independence property test
  const std::vector<std::vector<Vec>>* transversals = nullptr;
};

inline TransferKernelType tkt_of(const PcPresentation& P,
                                 const std::vector<SubgroupHandle>& maxsubs,
                                 const TktOptions& opt = {}) {
  AbelianQuotientFrame f = abelian_quotient_frame(P);
  const int m = (int)maxsubs.size();
  // subgroup images in G/G'
  std::vector<std::vector<Vec>> images;
  for (const auto& h : maxsubs) images.push_back(quotient_image(P, f, h.group));
  std::vector<int> kappa(m, -1);
  for (int i = 0; i < m; ++i) {
    const Subgroup& H = maxsubs[i].group;
    Subgroup Hder = derived_of(P, H);
    Transfer T = artin_transfer(P, H,
                                opt.transversals ? (*opt.transversals)[i]
                                                 : std::vector<Vec>{});
    std::vector<Vec> kernel;
    for (const Vec& r : f.reps)
      if (Hder.contains(T.apply_ambient(r))) kernel.push_back(r);
    std::sort(kernel.begin(), kernel.end());
    if ((long long)kernel.size() == (long long)f.reps.size()) {
      kappa[i] = 0;
      continue;
    }
    for (int j = 0; j < m; ++j)
      if (kernel == images[j]) {
        kappa[i] = j + 1;
        break;
      }
    if (kappa[i] < 0)
      throw KernelNotRecognized("transfer kernel of subgroup " + std::to_string(i + 1) +
                                " is neither total nor a maximal-subgroup image (size " +
                                std::to_string(kernel.size()) + ")");
  }
  return name_kappa(kappa);
}

inline TransferKernelType tkt(const PcPresentation& P) {
  return tkt_of(P, maximal_subgroups(P));
}

inline std::vector<AbelianType> ttt_of(const std::vector<SubgroupHandle>& maxsubs) {
  std::vector<AbelianType> tau;
  for (const auto& h : maxsubs) tau.push_back(abelian_type_invariants(h.induced));
  return tau;
}

inline std::vector<AbelianType> ttt(const PcPresentation& P) {
  return ttt_of(maximal_subgroups(P));
}

inline int epsilon_of(const std::vector<AbelianType>& tau) {
  int e = 0;
  for (const auto& a : tau)
    if (a.parts == std::vector<int>{1, 1, 1}) ++e;
  return e;
}

inline ArtinPattern artin_pattern(const PcPresentation& P) {
  auto maxsubs = maximal_subgroups(P);
  ArtinPattern ap;
  ap.kappa = tkt_of(P, maxsubs);
  ap.tau = ttt_of(maxsubs);
  ap.epsilon = epsilon_of(ap.tau);
  return ap;
}

// canonical multiset rendering, ascending: "(1^3,(21)^3)"
inline std::string format_ttt(std::vector<AbelianType> tau) {
  std::sort(tau.begin(), tau.end());
  std::string s = "(";
  size_t i = 0;
  bool first = true;
  while (i < tau.size()) {
    size_t j = i;
    while (j < tau.size() && tau[j] == tau[i]) ++j;
    if (!first) s += ",";
    first = false;
    if (j - i > 1)
      s += "(" + format_atype(tau[i]) + ")^" + std::to_string(j - i);
    else
      s += format_atype(tau[i]);
    i = j;
  }
  return s + ")";
}

// ---------------------------------------------------------------------------
// Second-order IPAD.

struct Ipad2 {
  AbelianType top;
  struct Layer {
    AbelianType self;
    std::vector<AbelianType> subs;  // first entry distinguished when defined
    bool distinguished_first = false;
  };
  std::vector<Layer> layers;
};

inline Ipad2 ipad2(const PcPresentation& P) {
  Ipad2 out;
  out.top = abelian_type_invariants(P);
  Subgroup der = lower_central_series_groups(P)[1];
  auto maxsubs = maximal_subgroups(P);
  for (const auto& h : maxsubs) {
    Ipad2::Layer layer;
    layer.self = abelian_type_invariants(h.induced);
    // maximal subgroups of H, in H's induced presentation
    std::vector<AbelianType> subs;
    std::optional<AbelianType> distinguished;
    if (h.induced.ngens > 0) {
      for (const auto& k : maximal_subgroups(h.induced)) {
        AbelianType a = abelian_type_invariants(k.induced);
        // map k's generators back to the ambient group, to test K == G'
        std::vector<Vec> ambient_gens;
        for (const Vec& kg : k.embedding) {
          Vec amb = identity_element(P);
          for (int u = 0; u < h.induced.ngens; ++u)
            if (kg[u]) {
              Vec q = power(P, h.embedding[u], kg[u]);
              mul_in_place(P, amb, q);
            }
          ambient_gens.push_back(amb);
        }
        bool is_derived = !distinguished.has_value();
        if (is_derived)
          for (const Vec& g : ambient_gens)
            if (!der.contains(g)) {
              is_derived = false;
              break;
            }
        if (is_derived) is_derived = (span(P, ambient_gens).rank() == der.rank());
        if (is_derived)
          distinguished = a;
        else
          subs.push_back(a);
      }
    }
    std::sort(subs.rbegin(), subs.rend());
    if (distinguished) {
      layer.subs.push_back(*distinguished);
      layer.distinguished_first = true;
    }
    layer.subs.insert(layer.subs.end(), subs.begin(), subs.end());
    out.layers.push_back(std::move(layer));
  }
  return out;
}

inline std::string format_ipad2(const Ipad2& ip) {
  auto layer_str = [&](const Ipad2::Layer& L) {
    std::string s = "(" + format_atype(L.self) + ";";
    size_t i = 0;
    bool first = true;
    while (i < L.subs.size()) {
      size_t j = i;
      // the distinguished first component stands alone
      if (i == 0 && L.distinguished_first)
        j = 1;
      else
        while (j < L.subs.size() && L.subs[j] == L.subs[i]) ++j;
      if (!first) s += ",";
      first = false;
      if (j - i > 1)
        s += "(" + format_atype(L.subs[i]) + ")^" + std::to_string(j - i);
      else
        s += format_atype(L.subs[i]);
      i = j;
    }
    return s + ")";
  };
  // group equal layers, sorted descending by rendered content
  std::vector<std::string> rendered;
  for (const auto& L : ip.layers) rendered.push_back(layer_str(L));
  std::vector<std::pair<AbelianType, std::string>> keyed;
  for (size_t t = 0; t < ip.layers.size(); ++t)
    keyed.push_back({ip.layers[t].self, rendered[t]});
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return b.first < a.first;
    return a.second > b.second;
  });
  std::string s = "[" + format_atype(ip.top) + ";";
  size_t i = 0;
  bool first = true;
  while (i < keyed.size()) {
    size_t j = i;
    while (j < keyed.size() && keyed[j].second == keyed[i].second) ++j;
    if (!first) s += ",";
    first = false;
    s += keyed[i].second;
    if (j - i > 1) s += "^" + std::to_string(j - i);
    i = j;
  }
  return s + "]";
}

}  // namespace pclab
