// Verification suite: named tables of expected values, evaluated against
// freshly computed invariants. Expected values live in a versioned data
// file so failures can cite the exact row.
#pragma once

#include "pclab/catalog.hpp"

#include <chrono>
#include <iostream>

namespace pclab {

struct ClaimResult {
  std::string table, id;
  std::string expected, computed;
  bool pass = false;
  double seconds = 0;
};

struct VerificationSuiteResult {
  std::vector<ClaimResult> claims;
  bool all_pass() const {
    for (const auto& c : claims)
      if (!c.pass) return false;
    return !claims.empty();
  }
};

namespace detail {

inline std::vector<std::pair<std::string, std::string>> load_claims(
    const std::string& table) {
  std::string path = TktNameTable::data_dir() + "/verify_tables.txt";
  std::ifstream in(path);
  if (!in) throw PresentationError("cannot open verify tables: " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tbl, id, expected;
    if (!(ls >> tbl >> id >> expected)) continue;
    if (tbl == table) out.push_back({id, expected});
  }
  return out;
}

inline std::string counts_string(const std::vector<std::pair<long long, long long>>& c) {
  std::string s = "(";
  for (size_t t = 0; t < c.size(); ++t) {
    if (t) s += ",";
    s += std::to_string(c[t].first) + "/" + std::to_string(c[t].second);
  }
  return s + ")";
}

inline TreeNode& node_for_label(Catalog& cat, const std::string& label) {
  const LabelEntry* e = LabelMap::instance().find(label);
  if (!e || e->address == "-")
    throw PresentationError("no curated address for label " + label);
  TreeNode& n = cat.resolve(parse_address(e->address));
  // validate the curated entry against computed invariants
  cat.fill_basic(n);
  cat.fill_artin(n);
  cat.fill_cover(n);
  if (n.fp.lo != e->lo || (e->tkt_name != "-" && n.fp.tkt_name != e->tkt_name) ||
      (e->ttt != "-" && n.fp.ttt != e->ttt))
    throw FingerprintCollision("curated label " + label +
                               " does not match the computed fingerprint at " +
                               e->address);
  return n;
}

// split "a:b:c" on ':'
inline std::vector<std::string> split_id(const std::string& id) {
  std::vector<std::string> parts;
  size_t at = 0;
  while (at <= id.size()) {
    size_t next = id.find(':', at);
    if (next == std::string::npos) {
      parts.push_back(id.substr(at));
      break;
    }
    parts.push_back(id.substr(at, next - at));
    at = next + 1;
  }
  return parts;
}

}  // namespace detail

// Evaluate one claim id; returns the computed value as a string.
inline std::string evaluate_claim(Catalog& cat, const std::string& id) {
  auto parts = detail::split_id(id);
  const std::string& kind = parts[0];
  if (kind == "numu") {
    TreeNode& n = detail::node_for_label(cat, parts[1]);
    return "(" + std::to_string(n.fp.nu) + "," + std::to_string(n.fp.mu) + ")";
  }
  if (kind == "tkt") {
    TreeNode& n = detail::node_for_label(cat, parts[1]);
    return n.fp.tkt_name.empty() ? n.fp.tkt : n.fp.tkt_name;
  }
  if (kind == "counts") {
    TreeNode& n = detail::node_for_label(cat, parts[1]);
    return detail::counts_string(cat.descendant_counts(n));
  }
  if (kind == "schur-child") {
    TreeNode& n = detail::node_for_label(cat, parts[1]);
    int step = std::stoi(parts[2]);
    cat.expand_step(n, step);
    std::map<std::string, int> found;
    std::string numu;
    for (auto& a : n.children.at(step)) {
      TreeNode& kid = *cat.find(a);
      auto fp = cat.full_fingerprint(kid);
      if (*fp.schur) {
        found[fp.tkt_name]++;
        numu = "(" + std::to_string(fp.nu) + "," + std::to_string(fp.mu) + ")";
      }
    }
    std::string s;
    for (auto& [name, cnt] : found)
      s += (s.empty() ? "" : ",") + std::to_string(cnt) + "x" + name + numu;
    return s.empty() ? "none" : s;
  }
  if (kind == "schur-child-extremal") {
    TreeNode& n = detail::node_for_label(cat, parts[1]);
    int step = std::stoi(parts[2]);
    cat.expand_step(n, step);
    std::string s;
    for (auto& a : n.children.at(step)) {
      TreeNode& kid = *cat.find(a);
      auto fp = cat.full_fingerprint(kid);
      if (!*fp.schur) continue;
      auto ex = is_extremal_path(*kid.pres);
      if (!ex.extremal) return "not-extremal";
      s = "(";
      for (size_t t = 0; t < ex.edges.size(); ++t) {
        if (t) s += ",";
        s += std::to_string(ex.edges[t].first);
      }
      s += ")";
    }
    return s.empty() ? "none" : s;
  }
  if (kind == "schur-child-invariants") {
    TreeNode& n = detail::node_for_label(cat, parts[1]);
    int step = std::stoi(parts[2]);
    cat.expand_step(n, step);
    for (auto& a : n.children.at(step)) {
      TreeNode& kid = *cat.find(a);
      auto fp = cat.full_fingerprint(kid);
      if (!*fp.schur) continue;
      return "lo=" + std::to_string(fp.lo) + ",cl=" + std::to_string(fp.cl) +
             ",cc=" + std::to_string(fp.cc) + ",dl=" + std::to_string(fp.dl);
    }
    return "none";
  }
  if (kind == "terminal-children") {
    TreeNode& n = detail::node_for_label(cat, parts[1]);
    int step = std::stoi(parts[2]);
    const std::string& name = parts[3];
    cat.expand_step(n, step);
    int count = 0;
    std::string numu;
    for (auto& a : n.children.at(step)) {
      TreeNode& kid = *cat.find(a);
      cat.fill_basic(kid);
      cat.fill_artin(kid);
      cat.fill_cover(kid);
      if (kid.fp.tkt_name == name && kid.fp.nu == 0) {
        count++;
        numu = "(" + std::to_string(kid.fp.nu) + "," + std::to_string(kid.fp.mu) + ")";
      }
    }
    return count == 0 ? "none" : std::to_string(count) + "x" + numu;
  }
  if (kind == "lo8-vertex") {
    // among step children of the label, find one with (nu,mu)=(1,3) and
    // report its descendant counts
    TreeNode& n = detail::node_for_label(cat, parts[1]);
    int step = std::stoi(parts[2]);
    const std::string& name = parts[3];
    cat.expand_step(n, step);
    for (auto& a : n.children.at(step)) {
      TreeNode& kid = *cat.find(a);
      cat.fill_basic(kid);
      cat.fill_artin(kid);
      cat.fill_cover(kid);
      if (kid.fp.tkt_name != name || kid.fp.nu != 1 || kid.fp.mu != 3) continue;
      auto counts = cat.descendant_counts(kid);
      return "(1,3)->" + detail::counts_string(counts);
    }
    return "none";
  }
  if (kind == "census") {
    int max_lo = std::stoi(parts[1]);
    auto recs = cat.schur_census(max_lo);
    std::map<std::string, long long> at_top;
    for (const auto& r : recs)
      if (r.lo == max_lo) at_top[r.tkt_name] += r.count;
    std::string s;
    for (auto& [name, cnt] : at_top)
      s += (s.empty() ? "" : ",") + name + "=" + std::to_string(cnt);
    return s.empty() ? "none" : s;
  }
  if (kind == "census-extremal") {
    int max_lo = std::stoi(parts[1]);
    auto recs = cat.schur_census(max_lo);
    long long checked = 0;
    for (const auto& r : recs)
      for (const auto& a : r.addresses) {
        TreeNode& n = *cat.find(a);
        auto ex = is_extremal_path(*n.pres);
        if (!ex.extremal) return "violation-at-" + a.str();
        ++checked;
      }
    return checked ? "all-pass" : "none";
  }
  if (kind == "fail") {
    TreeNode& n = detail::node_for_label(cat, parts[1]);
    auto ex = is_extremal_path(*n.pres);
    return ex.extremal ? "extremal" : "not-extremal";
  }
  if (kind == "scan") {
    // forbidden-type scan: all catalog groups of order <= 3^lo with
    // abelianization 1^2; no canonical TKT in sections B or C; A.1 only on
    // the <27,4> fingerprint
    int max_lo = std::stoi(parts[1]);
    cat.grow(max_lo);
    std::string bad;
    for (const auto& a : cat.all_addresses()) {
      TreeNode& n = *cat.find(a);
      cat.fill_basic(n);
      if (n.fp.lo > max_lo || n.fp.ab != "1^2" || n.fp.cl < 2) continue;
      cat.fill_artin(n);
      std::string sec = section_letter(n.fp.tkt_name);
      if (sec == "B" || sec == "C") return "forbidden-" + n.fp.tkt_name + "-at-" + a.str();
      if (n.fp.tkt_name == "A.1") {
        cat.fill_cover(n);
        const LabelEntry* e = LabelMap::instance().find("<27,4>");
        if (!e || n.fp.lo != e->lo || n.fp.nu != e->nu || n.fp.mu != e->mu)
          return "A.1-off-fingerprint-at-" + a.str();
      }
    }
    return "none";
  }
  throw PresentationError("unknown claim kind: " + kind);
}

inline VerificationSuiteResult run_verify_table(Catalog& cat, const std::string& table,
                                                std::ostream* out = nullptr) {
  VerificationSuiteResult res;
  auto claims = detail::load_claims(table);
  if (claims.empty()) throw PresentationError("no claims for table " + table);
  for (auto& [id, expected] : claims) {
    ClaimResult c;
    c.table = table;
    c.id = id;
    c.expected = expected;
    auto t0 = std::chrono::steady_clock::now();
    try {
      c.computed = evaluate_claim(cat, id);
    } catch (const std::exception& e) {
      c.computed = std::string("error: ") + e.what();
    }
    auto t1 = std::chrono::steady_clock::now();
    c.seconds = std::chrono::duration<double>(t1 - t0).count();
    c.pass = (c.computed == c.expected);
    if (out) {
      (*out) << (c.pass ? "PASS" : "FAIL") << " " << table << " " << id
             << " expected=" << c.expected;
      if (!c.pass) (*out) << " computed=" << c.computed;
      (*out) << " (" << (int)(c.seconds * 1000) << " ms)\n";
    }
    res.claims.push_back(std::move(c));
  }
  return res;
}

}  // namespace pclab
