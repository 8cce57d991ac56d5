// The descendant-tree catalog: lazily expanded nodes addressed by
// ROOT(-#s;c)*, deterministic counters, the Schur sigma census, curated
// SmallGroups labels, topology symbols and tree export.
#pragma once

#include "pclab/genealogy.hpp"

#include <functional>
#include <iostream>
#include <thread>

namespace pclab {

struct TreeNode {
  TreeAddress addr;
  std::shared_ptr<const PcPresentation> pres;
  std::optional<TreeAddress> parent_addr;
  Fingerprint fp;  // filled in stages
  bool have_basic = false, have_artin = false, have_cover_data = false;
  std::shared_ptr<const PCoverData> cover;
  std::shared_ptr<const MultiplicatorAction> action;  // cached for expansion
  std::map<int, std::vector<TreeAddress>> children;   // step -> addresses
  std::map<int, std::pair<long long, long long>> counts;  // step -> (N_s, C_s)
};

struct CensusRecord {
  int lo = 0;
  std::string tkt_name;
  long long count = 0;
  std::vector<TreeAddress> addresses;
};

struct CatalogOptions {
  AutOptions aut;
  int jobs = 1;
  std::ostream* progress = nullptr;  // stream expansion progress
};

class Catalog {
 public:
  explicit Catalog(CatalogOptions opt = {}) : opt_(opt) {
    PcPresentation root(3, 2);
    root.defs.assign(2, Definition{});
    root.label = "C3xC3";
    add_root("C3xC3", root);
  }

  void add_root(const std::string& name, const PcPresentation& pres) {
    TreeNode n;
    n.addr = TreeAddress{name, {}};
    n.pres = std::make_shared<PcPresentation>(standardized(pres));
    std::lock_guard<std::mutex> lk(mu_);
    nodes_.emplace(n.addr.str(), std::move(n));
  }

  TreeNode& root(const std::string& name = "C3xC3") {
    auto it = nodes_.find(name);
    if (it == nodes_.end()) throw UnknownRoot("unknown root label: " + name);
    return it->second;
  }

  TreeNode* find(const TreeAddress& a) {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = nodes_.find(a.str());
    return it == nodes_.end() ? nullptr : &it->second;
  }

  // Walk the address, generating children as needed.
  TreeNode& resolve(const TreeAddress& a) {
    if (!nodes_.count(a.root)) throw UnknownRoot("unknown root label: " + a.root);
    TreeAddress cur{a.root, {}};
    TreeNode* node = &root(a.root);
    for (auto [step, counter] : a.path) {
      expand_step(*node, step);
      const auto& kids = node->children.at(step);
      if (counter < 1 || counter > (int)kids.size())
        throw CounterOutOfRange("counter " + std::to_string(counter) +
                                " out of range 1.." + std::to_string(kids.size()) +
                                " at " + cur.str() + " step " + std::to_string(step));
      cur = kids[counter - 1];
      node = find(cur);
      if (!node) throw PresentationError("internal: child node missing");
    }
    return *node;
  }

  const PCoverData& cover_of(TreeNode& n) {
    if (!n.cover) {
      auto C = std::make_shared<PCoverData>(p_cover(*n.pres));
      n.cover = C;
      n.fp.nu = C->nu;
      n.fp.mu = C->mu;
      n.fp.d1 = C->d1;
      n.have_cover_data = true;
    }
    return *n.cover;
  }

  const MultiplicatorAction& action_of(TreeNode& n) {
    if (!n.action) {
      const PCoverData& C = cover_of(n);
      AutOptions ao = opt_.aut;
      ao.jobs = opt_.jobs;
      auto A = automorphisms_standard(C.base, ao);
      n.action = std::make_shared<MultiplicatorAction>(multiplicator_image(C, A));
    }
    return *n.action;
  }

  // Materialize the children of one step (deterministic counters).
  void expand_step(TreeNode& n, int step, bool with_capable_counts = true) {
    {
      std::lock_guard<std::mutex> lk(mu_);
      if (n.children.count(step)) return;
    }
    const PCoverData& C = cover_of(n);
    if (step < 1 || step > C.nu)
      throw StepExceedsNucleus("step " + std::to_string(step) + " exceeds nu=" +
                               std::to_string(C.nu) + " at " + n.addr.str());
    const MultiplicatorAction& act = action_of(n);
    DescendantOptions dopt;
    dopt.compute_capable = false;
    auto slice = descendants_step(C, act, step, dopt);
    std::vector<TreeAddress> kids;
    long long capable = 0;
    std::vector<TreeNode> built;
    for (auto& ch : slice.children) {
      TreeNode kid;
      kid.addr = n.addr;
      kid.addr.path.push_back({step, ch.counter});
      kid.pres = std::make_shared<PcPresentation>(std::move(ch.pres));
      kid.parent_addr = n.addr;
      if (with_capable_counts) {
        auto CC = std::make_shared<PCoverData>(p_cover(*kid.pres));
        kid.cover = CC;
        kid.fp.nu = CC->nu;
        kid.fp.mu = CC->mu;
        kid.fp.d1 = CC->d1;
        kid.have_cover_data = true;
        if (CC->nu > 0) capable++;
      }
      kids.push_back(kid.addr);
      built.push_back(std::move(kid));
    }
    if (opt_.progress)
      (*opt_.progress) << "expand " << n.addr.str() << " step " << step << ": "
                       << slice.n_count << " orbits, " << capable << " capable\n";
    std::lock_guard<std::mutex> lk(mu_);
    if (n.children.count(step)) return;
    for (auto& kid : built) nodes_.emplace(kid.addr.str(), std::move(kid));
    n.children[step] = std::move(kids);
    n.counts[step] = {slice.n_count, capable};
  }

  // (N_s, C_s) for 1 <= s <= nu.
  std::vector<std::pair<long long, long long>> descendant_counts(TreeNode& n) {
    const PCoverData& C = cover_of(n);
    std::vector<std::pair<long long, long long>> out;
    for (int s = 1; s <= C.nu; ++s) {
      expand_step(n, s);
      out.push_back(n.counts.at(s));
    }
    return out;
  }

  // Fingerprint stages.
  void fill_basic(TreeNode& n) {
    if (n.have_basic) return;
    auto r = series_report(*n.pres);
    n.fp.lo = r.lo;
    n.fp.cl = r.cl;
    n.fp.cc = r.cc;
    n.fp.dl = r.dl;
    n.fp.ab = format_atype(abelian_type_invariants(*n.pres));
    n.have_basic = true;
  }
  void fill_artin(TreeNode& n) {
    if (n.have_artin) return;
    fill_basic(n);
    try {
      auto ap = artin_pattern(*n.pres);
      n.fp.tkt = kappa_string(ap.kappa.canonical);
      n.fp.tkt_name = ap.kappa.name;
      n.fp.ttt = format_ttt(ap.tau);
      n.fp.epsilon = ap.epsilon;
    } catch (const std::exception&) {
      n.fp.tkt = "-";
      n.fp.ttt = "-";
    }
    n.have_artin = true;
  }
  void fill_cover(TreeNode& n) { cover_of(n); }
  void fill_sigma(TreeNode& n) {
    if (n.fp.sigma.has_value()) return;
    AutOptions ao = opt_.aut;
    auto rep = is_schur_sigma(*n.pres, cover_of(n), ao);
    n.fp.sigma = rep.is_sigma;
    n.fp.schur = rep.is_schur_sigma;
  }
  Fingerprint full_fingerprint(TreeNode& n) {
    fill_basic(n);
    fill_artin(n);
    fill_cover(n);
    fill_sigma(n);
    return n.fp;
  }

  bool node_has_gia(TreeNode& n) {
    fill_sigma(n);
    return *n.fp.sigma;
  }

  std::vector<TreeAddress> purged_children(TreeNode& n, int step) {
    expand_step(n, step);
    std::vector<TreeAddress> out;
    for (const auto& a : n.children.at(step)) {
      TreeNode* kid = find(a);
      if (node_has_gia(*kid)) out.push_back(a);
    }
    return out;
  }

  // Breadth-first expansion of the abelianization-(p,p) tree up to max_lo;
  // returns all materialized node addresses with lo <= max_lo.
  std::vector<TreeAddress> grow(int max_lo, bool purged = false) {
    std::vector<TreeAddress> level = {root().addr};
    std::vector<TreeAddress> all = level;
    fill_basic(root());
    while (!level.empty()) {
      // group nodes by their order so expansion stays breadth-first
      std::vector<TreeAddress> next;
      // parallel expansion over this level
      std::atomic<size_t> cursor{0};
      std::mutex next_mu;
      auto work = [&]() {
        for (;;) {
          size_t idx = cursor.fetch_add(1);
          if (idx >= level.size()) return;
          TreeNode& n = *find(level[idx]);
          fill_basic(n);
          // only elementary rank-2 abelianization vertices are expanded:
          // abelianizations only grow along descent, so nothing is lost
          if (n.fp.ab != "1^2") continue;
          if (purged && n.fp.lo > 2 && !node_has_gia(n)) continue;
          const PCoverData& C = cover_of(n);
          int max_step = std::min(C.nu, max_lo - n.fp.lo);
          std::vector<TreeAddress> kids;
          for (int s = 1; s <= max_step; ++s) {
            expand_step(n, s);
            for (const auto& a : n.children.at(s)) kids.push_back(a);
          }
          std::lock_guard<std::mutex> lk(next_mu);
          for (auto& a : kids) next.push_back(a);
        }
      };
      int jobs = std::max(1, opt_.jobs);
      if (jobs == 1 || level.size() <= 1) {
        work();
      } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
      }
      std::sort(next.begin(), next.end());
      for (const auto& a : next) all.push_back(a);
      level = std::move(next);
    }
    std::sort(all.begin(), all.end());
    return all;
  }

  std::vector<CensusRecord> schur_census(int max_lo, const std::string& tkt_filter = "",
                                         bool purged = false) {
    if (purged && opt_.progress)
      (*opt_.progress)
          << "note: --purged prunes at GIA-free vertices; this is a heuristic unless "
             "every Schur sigma ancestor carries a GIA\n";
    auto addrs = grow(max_lo, purged);
    std::map<std::pair<int, std::string>, CensusRecord> grouped;
    for (const auto& a : addrs) {
      TreeNode& n = *find(a);
      fill_basic(n);
      if (n.fp.lo < 3 || n.fp.lo > max_lo) continue;
      if (n.fp.ab != "1^2") continue;
      fill_cover(n);
      if (n.fp.mu != n.fp.d1) continue;  // not balanced
      fill_sigma(n);
      if (!*n.fp.schur) continue;
      fill_artin(n);
      if (!tkt_filter.empty() && n.fp.tkt_name != tkt_filter) continue;
      auto& rec = grouped[{n.fp.lo, n.fp.tkt_name}];
      rec.lo = n.fp.lo;
      rec.tkt_name = n.fp.tkt_name;
      rec.count++;
      rec.addresses.push_back(a);
    }
    std::vector<CensusRecord> out;
    for (auto& [k, rec] : grouped) out.push_back(std::move(rec));
    return out;
  }

  std::vector<TreeAddress> all_addresses() {
    std::lock_guard<std::mutex> lk(mu_);
    std::vector<TreeAddress> out;
    for (auto& [k, n] : nodes_) out.push_back(n.addr);
    return out;
  }

  CatalogOptions& options() { return opt_; }

 private:
  CatalogOptions opt_;
  std::map<std::string, TreeNode> nodes_;
  std::mutex mu_;
};

// ---------------------------------------------------------------------------
// Curated label map: invariants -> SmallGroups-style label. Loaded from a
// data file; matches are validated against computed fingerprints, never
// computed from scratch.

struct LabelEntry {
  std::string label;
  std::string address;  // canonical address in this catalog ("-" if none)
  int lo = 0;
  std::string tkt_name;  // "-" when not applicable
  std::string ttt;       // canonical multiset string, "-" = wildcard
  int nu = -1, mu = -1;
  int sigma = -1;  // -1 = wildcard
};

class LabelMap {
 public:
  static const LabelMap& instance() {
    static LabelMap m;
    return m;
  }

  const std::vector<LabelEntry>& entries() const { return entries_; }

  // match computed invariants against the curated table
  std::vector<std::string> match(const Fingerprint& fp) const {
    std::vector<std::string> out;
    for (const auto& e : entries_) {
      if (e.lo != fp.lo) continue;
      if (e.tkt_name != "-" && e.tkt_name != fp.tkt_name) continue;
      if (e.ttt != "-" && e.ttt != fp.ttt) continue;
      if (e.nu >= 0 && fp.nu >= 0 && e.nu != fp.nu) continue;
      if (e.mu >= 0 && fp.mu >= 0 && e.mu != fp.mu) continue;
      if (e.sigma >= 0 && fp.sigma.has_value() && e.sigma != (int)*fp.sigma) continue;
      out.push_back(e.label);
    }
    return out;
  }

  const LabelEntry* find(const std::string& label) const {
    for (const auto& e : entries_)
      if (e.label == label) return &e;
    return nullptr;
  }

 private:
  std::vector<LabelEntry> entries_;

  LabelMap() {
    std::string path = TktNameTable::data_dir() + "/group_labels.txt";
    std::ifstream in(path);
    if (!in) return;  // label map is optional
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      LabelEntry e;
      std::string numu;
      if (!(ls >> e.label >> e.address >> e.lo >> e.tkt_name >> e.ttt >> numu)) continue;
      auto comma = numu.find(',');
      e.nu = std::stoi(numu.substr(1, comma - 1));
      e.mu = std::stoi(numu.substr(comma + 1, numu.size() - comma - 2));
      std::string sig;
      if (ls >> sig) e.sigma = std::stoi(sig);
      entries_.push_back(std::move(e));
    }
    // curated keys must be unambiguous
    for (size_t a = 0; a < entries_.size(); ++a)
      for (size_t b = a + 1; b < entries_.size(); ++b) {
        const auto& x = entries_[a];
        const auto& y = entries_[b];
        if (x.lo == y.lo && x.tkt_name == y.tkt_name && x.ttt == y.ttt &&
            x.nu == y.nu && x.mu == y.mu && x.sigma == y.sigma)
          throw FingerprintCollision("curated labels collide: " + x.label + " vs " +
                                     y.label);
      }
  }
};

// label(s) for a presentation, via the curated map
inline std::vector<std::string> fingerprint_match(Catalog& cat, TreeNode& n) {
  cat.full_fingerprint(n);
  return LabelMap::instance().match(n.fp);
}

// ---------------------------------------------------------------------------
// Topology symbols along root paths (with the metabelianization fork for
// derived length >= 3).

inline std::string path_vertex_key(const RootPathEntry& e) {
  return std::to_string(e.lo) + "|" + e.tkt + "|" + std::to_string(e.nu) + "," +
         std::to_string(e.mu);
}

inline std::string section_letter(const std::string& tkt_name) {
  if (tkt_name.empty()) return "?";
  auto dot = tkt_name.find('.');
  return tkt_name.substr(0, dot);
}

inline std::string topology_symbol(const PcPresentation& input) {
  PcPresentation G = standardized(input);
  RootPath rp = root_path(G);
  if (rp.vertices.empty()) return "";
  auto letter = [&](const RootPathEntry& e) { return section_letter(e.tkt_name); };
  int dl = series_report(G).dl;
  if (dl <= 2) {
    std::string s = letter(rp.vertices[0]);
    for (size_t i = 1; i < rp.vertices.size(); ++i)
      s += "(" + std::to_string(rp.steps[i - 1]) + "→)" + letter(rp.vertices[i]);
    return s;
  }
  // fork of the root paths of G and its metabelianization
  auto der = derived_series_groups(G);
  auto M = standardized(quotient(G, der[2]).pres);
  RootPath rm = root_path(M);
  size_t k = 0;
  while (k < rp.vertices.size() && k < rm.vertices.size()) {
    const auto& a = rp.vertices[rp.vertices.size() - 1 - k];
    const auto& b = rm.vertices[rm.vertices.size() - 1 - k];
    if (path_vertex_key(a) != path_vertex_key(b)) break;
    ++k;
  }
  size_t iG = rp.vertices.size() - k;
  size_t iM = rm.vertices.size() - k;
  std::string s = letter(rm.vertices[0]);
  for (size_t i = 1; i <= iM; ++i)
    s += "(" + std::to_string(rm.steps[i - 1]) + "→)" + letter(rm.vertices[i]);
  for (size_t i = iG; i >= 1; --i)
    s += "(" + std::to_string(rp.steps[i - 1]) + "←)" + letter(rp.vertices[i - 1]);
  return s;
}

}  // namespace pclab
