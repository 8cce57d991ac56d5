// Subgroups of pc-presented p-groups via echelonized generating sequences,
// quotient presentations, and rebuilding of standard (graded, defined)
// presentations from the lower exponent-p central series.
#pragma once

#include "pclab/presentation.hpp"

#include <cassert>
#include <deque>
#include <memory>
#include <optional>

namespace pclab {

struct NotNormal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Echelonized generating sequence: table[k] is either empty or an element
// with leading generator k and leading exponent 1. The represented subgroup
// is the set of products over occupied slots in increasing order.
class Subgroup {
 public:
  explicit Subgroup(const PcPresentation& P) : P_(&P), table_(P.ngens) {}

  const PcPresentation& pres() const { return *P_; }
  const std::vector<Vec>& table() const { return table_; }
  bool occupied(int k) const { return !table_[k].empty(); }

  int rank() const {
    int r = 0;
    for (const auto& t : table_)
      if (!t.empty()) ++r;
    return r;
  }
  long long index_log() const { return P_->ngens - rank(); }
  long long order_log() const { return rank(); }
  bool is_trivial() const { return rank() == 0; }
  bool is_whole() const { return rank() == P_->ngens; }

  std::vector<int> slots() const {
    std::vector<int> s;
    for (int k = 0; k < P_->ngens; ++k)
      if (occupied(k)) s.push_back(k);
    return s;
  }

  // Strip x against the table; the residue is identity iff x is a member.
  Vec sift(const Vec& x) const {
    Vec t = x;
    for (;;) {
      int k = leading_gen(t);
      if (k < 0 || table_[k].empty()) return t;
      int e = P_->prime - t[k];
      Vec y = power(*P_, table_[k], e);
      mul_in_place(*P_, y, t);
      t = std::move(y);
    }
  }
  bool contains(const Vec& x) const { return is_identity(sift(x)); }

  // Exponents of the normal form of a member w.r.t. the sequence, indexed
  // by ambient slot. Throws if x is not a member.
  std::vector<uint8_t> member_coordinates(const Vec& x) const {
    std::vector<uint8_t> coords(P_->ngens, 0);
    Vec t = x;
    for (;;) {
      int k = leading_gen(t);
      if (k < 0) return coords;
      if (table_[k].empty())
        throw PresentationError("element is not a member of the subgroup");
      coords[k] = t[k];
      Vec y = power(*P_, table_[k], P_->prime - t[k]);
      mul_in_place(*P_, y, t);
      t = std::move(y);
    }
  }

  // Insert one element (no closure). Returns the slot filled, or -1.
  int insert(const Vec& x) {
    Vec t = sift(x);
    int k = leading_gen(t);
    if (k < 0) return -1;
    // normalize leading exponent to 1
    int e = t[k];
    int inv = 1;
    while ((inv * e) % P_->prime != 1) ++inv;
    table_[k] = power(*P_, t, inv);
    return k;
  }

  bool is_normal() const {
    for (int k = 0; k < P_->ngens; ++k) {
      if (!occupied(k)) continue;
      for (int g = 0; g < P_->ngens; ++g)
        if (!contains(commutator(*P_, table_[k], gen_element(*P_, g)))) return false;
    }
    return true;
  }

  friend Subgroup span(const PcPresentation&, const std::vector<Vec>&, bool);
  friend Subgroup extend_span(Subgroup, const std::vector<Vec>&, bool);

 private:
  const PcPresentation* P_;
  std::vector<Vec> table_;
};

// Closure under products, powers and mutual commutators; with spin_normal
// also under commutation with all ambient generators (normal closure).
inline Subgroup extend_span(Subgroup H, const std::vector<Vec>& gens,
                            bool spin_normal = false) {
  const PcPresentation& P = H.pres();
  std::deque<Vec> queue(gens.begin(), gens.end());
  while (!queue.empty()) {
    Vec x = std::move(queue.front());
    queue.pop_front();
    int k = H.insert(x);
    if (k < 0) continue;
    const Vec& nw = H.table_[k];
    queue.push_back(power(P, nw, P.prime));
    for (int t = 0; t < P.ngens; ++t) {
      if (t != k && H.occupied(t)) {
        queue.push_back(commutator(P, H.table_[t], nw));
        queue.push_back(commutator(P, nw, H.table_[t]));
      }
    }
    if (spin_normal)
      for (int g = 0; g < P.ngens; ++g)
        queue.push_back(commutator(P, nw, gen_element(P, g)));
  }
  return H;
}

inline Subgroup span(const PcPresentation& P, const std::vector<Vec>& gens,
                     bool spin_normal = false) {
  return extend_span(Subgroup(P), gens, spin_normal);
}

inline Subgroup normal_closure(const PcPresentation& P, const std::vector<Vec>& gens) {
  return span(P, gens, true);
}

// Closure that also spins by commutation with the given conjugators
// (normal closure relative to the subgroup they generate).
inline Subgroup span_closed(const PcPresentation& P, const std::vector<Vec>& gens,
                            const std::vector<Vec>& conjugators) {
  Subgroup H(P);
  std::deque<Vec> queue(gens.begin(), gens.end());
  while (!queue.empty()) {
    Vec x = std::move(queue.front());
    queue.pop_front();
    int k = H.insert(x);
    if (k < 0) continue;
    const Vec nw = H.table()[k];
    queue.push_back(power(P, nw, P.prime));
    for (int t = 0; t < P.ngens; ++t)
      if (t != k && H.occupied(t)) {
        queue.push_back(commutator(P, H.table()[t], nw));
        queue.push_back(commutator(P, nw, H.table()[t]));
      }
    for (const Vec& c : conjugators) queue.push_back(commutator(P, nw, c));
  }
  return H;
}

// Derived subgroup of a subgroup given by its echelon table (normal in it).
inline Subgroup derived_of(const PcPresentation& P, const Subgroup& H) {
  auto slots = H.slots();
  std::vector<Vec> gens;
  for (size_t b = 1; b < slots.size(); ++b)
    for (size_t a = 0; a < b; ++a)
      gens.push_back(commutator(P, H.table()[slots[b]], H.table()[slots[a]]));
  std::vector<Vec> conj;
  for (int s : slots) conj.push_back(H.table()[s]);
  return span_closed(P, gens, conj);
}

inline Subgroup whole_group(const PcPresentation& P) {
  std::vector<Vec> g;
  for (int k = 0; k < P.ngens; ++k) g.push_back(gen_element(P, k));
  return span(P, g);
}

inline Subgroup trivial_subgroup(const PcPresentation& P) { return Subgroup(P); }

// ---------------------------------------------------------------------------
// Canonical coset representatives modulo a normal subgroup: the unique
// member of the coset with zero exponents at the subgroup's slots.

inline Vec coset_rep(const Subgroup& N, const Vec& x) {
  const PcPresentation& P = N.pres();
  Vec t = x;
  for (int s = 0; s < P.ngens; ++s) {
    if (!N.occupied(s) || !t[s]) continue;
    Vec y = power(P, N.table()[s], P.prime - t[s]);
    mul_in_place(P, y, t);
    t = std::move(y);
  }
  return t;
}

// Quotient presentation G/N together with the projection data.
struct QuotientMap {
  PcPresentation pres;            // presentation of G/N
  std::vector<int> surviving;     // quotient gen t  ->  ambient slot
  std::vector<int> slot_to_gen;   // ambient slot -> quotient gen or -1

  Vec project(const Subgroup& N, const Vec& x) const {
    Vec rep = coset_rep(N, x);
    Vec q((size_t)pres.ngens, 0);
    for (int t = 0; t < pres.ngens; ++t) q[t] = rep[surviving[t]];
    return q;
  }
};

inline QuotientMap quotient(const PcPresentation& P, const Subgroup& N) {
  if (&N.pres() != &P) throw PresentationError("subgroup belongs to a different presentation");
  if (!N.is_normal()) throw NotNormal("quotient by non-normal subgroup");
  QuotientMap Q;
  Q.slot_to_gen.assign(P.ngens, -1);
  for (int k = 0; k < P.ngens; ++k)
    if (!N.occupied(k)) {
      Q.slot_to_gen[k] = (int)Q.surviving.size();
      Q.surviving.push_back(k);
    }
  const int m = (int)Q.surviving.size();
  Q.pres = PcPresentation(P.prime, m);
  for (int t = 0; t < m; ++t) Q.pres.weights[t] = P.weights[Q.surviving[t]];
  auto project_vec = [&](const Vec& x) {
    Vec rep = coset_rep(N, x);
    Vec q((size_t)m, 0);
    for (int t = 0; t < m; ++t) q[t] = rep[Q.surviving[t]];
    return q;
  };
  for (int t = 0; t < m; ++t) {
    Vec v = project_vec(power(P, gen_element(P, Q.surviving[t]), P.prime));
    if (!is_identity(v)) Q.pres.set_power(t, v);
  }
  for (int b = 1; b < m; ++b)
    for (int a = 0; a < b; ++a) {
      Vec v = project_vec(commutator(P, gen_element(P, Q.surviving[b]),
                                     gen_element(P, Q.surviving[a])));
      if (!is_identity(v)) Q.pres.set_comm(b, a, v);
    }
  Q.pres.label.clear();
  Q.pres.validate();
  return Q;
}

// ---------------------------------------------------------------------------
// Induced presentation of a subgroup, with the embedding.

struct SubgroupHandle {
  Subgroup group;                 // echelon table in the ambient group
  PcPresentation induced;         // consistent presentation of the subgroup
  std::vector<Vec> embedding;     // induced generator -> ambient element

  long long index_log() const { return group.index_log(); }
};

inline SubgroupHandle make_handle(const PcPresentation& P, Subgroup H) {
  SubgroupHandle h{std::move(H), PcPresentation(), {}};
  auto slots = h.group.slots();
  const int m = (int)slots.size();
  h.induced = PcPresentation(P.prime, m);
  for (int t = 0; t < m; ++t) {
    h.induced.weights[t] = P.weights[slots[t]];
    h.embedding.push_back(h.group.table()[slots[t]]);
  }
  auto coords_of = [&](const Vec& x) {
    auto c = h.group.member_coordinates(x);
    Vec q((size_t)m, 0);
    for (int t = 0; t < m; ++t) q[t] = c[slots[t]];
    return q;
  };
  for (int t = 0; t < m; ++t) {
    Vec v = coords_of(power(P, h.embedding[t], P.prime));
    if (!is_identity(v)) h.induced.set_power(t, v);
  }
  for (int b = 1; b < m; ++b)
    for (int a = 0; a < b; ++a) {
      Vec v = coords_of(commutator(P, h.embedding[b], h.embedding[a]));
      if (!is_identity(v)) h.induced.set_comm(b, a, v);
    }
  h.induced.validate();
  return h;
}

inline SubgroupHandle subgroup(const PcPresentation& P, const std::vector<Vec>& gens) {
  return make_handle(P, span(P, gens));
}

// ---------------------------------------------------------------------------
// Lower exponent-p central series P_0 = G >= P_1 >= ... (P_{i+1} = [P_i,G]P_i^p)
// and reconstruction of a standard graded presentation with definitions.

inline std::vector<Subgroup> exponent_p_series(const PcPresentation& P) {
  std::vector<Subgroup> series;
  series.push_back(whole_group(P));
  for (;;) {
    const Subgroup& prev = series.back();
    if (prev.is_trivial()) break;
    std::vector<Vec> gens;
    for (int k = 0; k < P.ngens; ++k) {
      if (!prev.occupied(k)) continue;
      const Vec& h = prev.table()[k];
      gens.push_back(power(P, h, P.prime));
      for (int g = 0; g < P.ngens; ++g)
        gens.push_back(commutator(P, h, gen_element(P, g)));
    }
    Subgroup next = span(P, gens, true);
    if (next.rank() == prev.rank())
      throw PresentationError("exponent-p series does not descend");
    series.push_back(std::move(next));
  }
  return series;
}

// Coordinate frame for a layer S_i/S_{i+1}: an echelon table spanning S_i
// whose slots split into "lower" (inside S_{i+1}) and "new" (transversal).
struct LayerFrame {
  Subgroup combined;        // IGS of S_i extending an IGS of S_{i+1}
  std::vector<int> new_slots;

  // coordinates of x in S_i/S_{i+1}, indexed by new_slots order
  std::vector<uint8_t> coords(const Vec& x) const {
    auto c = combined.member_coordinates(x);
    std::vector<uint8_t> q;
    q.reserve(new_slots.size());
    for (int s : new_slots) q.push_back(c[s]);
    return q;
  }
};

inline LayerFrame layer_frame(const PcPresentation& P, const Subgroup& Si,
                              const Subgroup& Snext) {
  LayerFrame f{Snext, {}};
  std::vector<Vec> gens;
  for (int k = 0; k < P.ngens; ++k)
    if (Si.occupied(k)) gens.push_back(Si.table()[k]);
  std::vector<bool> before(P.ngens, false);
  for (int k = 0; k < P.ngens; ++k) before[k] = f.combined.occupied(k);
  f.combined = extend_span(std::move(f.combined), gens, false);
  for (int k = 0; k < P.ngens; ++k)
    if (f.combined.occupied(k) && !before[k]) f.new_slots.push_back(k);
  return f;
}

// Standard form: generators graded by the lower exponent-p central series,
// each generator beyond the first layer carrying a definition.
struct StandardForm {
  PcPresentation pres;
  std::vector<Vec> new_gens;   // standard generator -> element of the input group
  int d1 = 0;
  int cls = 0;                 // exponent-p class
};

inline StandardForm standardize(const PcPresentation& P) {
  auto series = exponent_p_series(P);
  const int c = (int)series.size() - 1;  // exponent-p class
  std::vector<LayerFrame> frames;
  for (int i = 0; i < c; ++i) frames.push_back(layer_frame(P, series[i], series[i + 1]));

  struct Chosen {
    Vec elt;
    int level;
    Definition def;
  };
  std::vector<Chosen> chosen;
  std::vector<std::vector<int>> by_level(c + 1);

  // Per-level Gaussian elimination state over layer coordinates.
  auto adopt_level = [&](int level, const std::vector<std::pair<Vec, Definition>>& cands) {
    const LayerFrame& f = frames[level - 1];
    const size_t dim = f.new_slots.size();
    std::vector<std::vector<uint8_t>> rows;  // reduced rows
    std::vector<int> pivots;
    auto reduce = [&](std::vector<uint8_t> v) {
      for (size_t r = 0; r < rows.size(); ++r) {
        int pc = pivots[r];
        if (v[pc]) {
          int m = v[pc];  // rows have pivot 1
          for (size_t t = 0; t < dim; ++t)
            v[t] = (uint8_t)((v[t] + (P.prime - m) * rows[r][t]) % P.prime);
        }
      }
      return v;
    };
    for (const auto& [elt, def] : cands) {
      if ((int)by_level[level].size() == (int)dim) break;
      Vec rep = series[level].is_trivial() ? elt : coset_rep(series[level], elt);
      // coords in the layer
      std::vector<uint8_t> v = f.coords(elt);
      v = reduce(v);
      int pc = -1;
      for (size_t t = 0; t < dim; ++t)
        if (v[t]) { pc = (int)t; break; }
      if (pc < 0) continue;
      // normalize pivot to 1
      int inv = 1;
      while ((inv * v[pc]) % P.prime != 1) ++inv;
      for (size_t t = 0; t < dim; ++t) v[t] = (uint8_t)((v[t] * inv) % P.prime);
      rows.push_back(v);
      pivots.push_back(pc);
      chosen.push_back({elt, level, def});
      by_level[level].push_back((int)chosen.size() - 1);
      (void)rep;
    }
    if ((int)by_level[level].size() != (int)dim)
      throw PresentationError("standardize: layer candidates do not span");
  };

  // level 1: ambient generators
  {
    std::vector<std::pair<Vec, Definition>> cands;
    for (int k = 0; k < P.ngens; ++k)
      cands.push_back({gen_element(P, k), Definition{}});
    adopt_level(1, cands);
  }
  // higher levels; definitions are [a_j, a_i] with j > i or a_i^p
  for (int level = 2; level <= c; ++level) {
    std::vector<std::pair<Vec, Definition>> cands;
    auto add_comms = [&](int right_level) {
      for (int xi : by_level[level - right_level])
        for (int bi : by_level[right_level]) {
          int j = std::max(xi, bi), i = std::min(xi, bi);
          if (j == i) continue;
          Definition d;
          d.kind = Definition::Comm;
          d.j = j;
          d.i = i;
          cands.push_back({commutator(P, chosen[j].elt, chosen[i].elt), d});
        }
    };
    add_comms(1);
    for (int xi : by_level[level - 1]) {
      Definition d;
      d.kind = Definition::Pow;
      d.i = xi;
      cands.push_back({power(P, chosen[xi].elt, P.prime), d});
    }
    for (int lv = 2; 2 * lv <= level; ++lv) add_comms(lv);
    adopt_level(level, cands);
  }

  const int m = (int)chosen.size();
  if (m != P.ngens) throw PresentationError("standardize: generator count mismatch");

  // Coordinates of an arbitrary element in the new graded basis.
  auto coordinates = [&](const Vec& x0) {
    Vec coords((size_t)m, 0);
    Vec x = x0;
    for (int level = 1; level <= c; ++level) {
      const LayerFrame& f = frames[level - 1];
      const size_t dim = f.new_slots.size();
      if (dim == 0) continue;
      // solve layer coords against this level's chosen generators
      std::vector<uint8_t> v = f.coords(x);
      // build matrix of chosen coords (cached per level would be nicer; cheap enough)
      // solve by Gaussian elimination each time
      std::vector<std::vector<uint8_t>> Mx;
      for (int xi : by_level[level]) Mx.push_back(f.coords(chosen[xi].elt));
      // solve sum e_t * Mx[t] = v  (over F_p)
      std::vector<std::vector<uint8_t>> A(dim, std::vector<uint8_t>(dim + 1, 0));
      for (size_t col = 0; col < dim; ++col)
        for (size_t row = 0; row < dim; ++row) A[row][col] = Mx[col][row];
      for (size_t row = 0; row < dim; ++row) A[row][dim] = v[row];
      // elimination
      std::vector<int> where(dim, -1);
      size_t r = 0;
      for (size_t col = 0; col < dim && r < dim; ++col) {
        size_t sel = r;
        while (sel < dim && !A[sel][col]) ++sel;
        if (sel == dim) continue;
        std::swap(A[sel], A[r]);
        int inv = 1;
        while ((inv * A[r][col]) % P.prime != 1) ++inv;
        for (size_t t = col; t <= dim; ++t) A[r][t] = (uint8_t)((A[r][t] * inv) % P.prime);
        for (size_t rr = 0; rr < dim; ++rr)
          if (rr != r && A[rr][col]) {
            int mfac = A[rr][col];
            for (size_t t = col; t <= dim; ++t)
              A[rr][t] = (uint8_t)((A[rr][t] + (P.prime - mfac) * A[r][t]) % P.prime);
          }
        where[col] = (int)r;
        ++r;
      }
      std::vector<uint8_t> e(dim, 0);
      for (size_t col = 0; col < dim; ++col)
        if (where[col] >= 0) e[col] = A[where[col]][dim];
      // peel: x <- (prod a_t^{e_t})^{-1} * x
      Vec prod = identity_element(P);
      for (size_t t = 0; t < dim; ++t)
        if (e[t]) {
          Vec q = power(P, chosen[by_level[level][t]].elt, e[t]);
          mul_in_place(P, prod, q);
        }
      for (size_t t = 0; t < dim; ++t) coords[(size_t)by_level[level][t]] = e[t];
      Vec inv = inverse(P, prod);
      mul_in_place(P, inv, x);
      x = std::move(inv);
    }
    if (!is_identity(x)) throw PresentationError("standardize: coordinate extraction failed");
    return coords;
  };

  StandardForm S;
  S.d1 = (int)by_level[1].size();
  S.cls = c;
  S.pres = PcPresentation(P.prime, m);
  S.pres.label = P.label;
  for (int t = 0; t < m; ++t) {
    S.pres.weights[t] = chosen[t].level;
    S.new_gens.push_back(chosen[t].elt);
  }
  S.pres.defs.assign(m, Definition{});
  for (int t = 0; t < m; ++t) S.pres.defs[t] = chosen[t].def;
  for (int t = 0; t < m; ++t) {
    Vec v = coordinates(power(P, chosen[t].elt, P.prime));
    if (!is_identity(v)) S.pres.set_power(t, v);
  }
  for (int b = 1; b < m; ++b)
    for (int a = 0; a < b; ++a) {
      Vec v = coordinates(commutator(P, chosen[b].elt, chosen[a].elt));
      if (!is_identity(v)) S.pres.set_comm(b, a, v);
    }
  S.pres.validate();
  return S;
}

// A presentation is in standard form if weights are non-decreasing, layer-1
// generators come first, and every later generator has a definition.
inline bool is_standard_form(const PcPresentation& P) {
  int d1 = 0;
  while (d1 < P.ngens && P.weights[d1] == 1) ++d1;
  for (int k = 1; k < P.ngens; ++k)
    if (P.weights[k] < P.weights[k - 1]) return false;
  return has_full_definitions(P, d1);
}

inline PcPresentation standardized(const PcPresentation& P) {
  if (is_standard_form(P)) return P;
  return standardize(P).pres;
}

}  // namespace pclab
