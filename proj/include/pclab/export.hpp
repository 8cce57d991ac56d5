// JSON and DOT export of catalog trees, and JSON rendering of fingerprints.
#pragma once

#include "pclab/catalog.hpp"

#include "json.hpp"

namespace pclab {

inline nlohmann::json fingerprint_json(Catalog& cat, TreeNode& n, bool with_sigma = true) {
  cat.fill_basic(n);
  cat.fill_artin(n);
  cat.fill_cover(n);
  if (with_sigma) cat.fill_sigma(n);
  nlohmann::json j;
  j["address"] = n.addr.str();
  j["lo"] = n.fp.lo;
  j["order"] = std::to_string((long long)std::pow((double)n.pres->prime, n.fp.lo));
  j["cl"] = n.fp.cl;
  j["cc"] = n.fp.cc;
  j["dl"] = n.fp.dl;
  j["ab"] = n.fp.ab;
  j["tkt"] = n.fp.tkt;
  j["tkt_name"] = n.fp.tkt_name;
  j["ttt"] = n.fp.ttt;
  j["epsilon"] = n.fp.epsilon;
  j["nu"] = n.fp.nu;
  j["mu"] = n.fp.mu;
  j["d1"] = n.fp.d1;
  j["d2"] = n.fp.mu;
  if (n.fp.sigma.has_value()) {
    j["is_sigma"] = *n.fp.sigma;
    j["is_schur_sigma"] = *n.fp.schur;
  }
  auto labels = LabelMap::instance().match(n.fp);
  if (labels.size() == 1)
    j["label"] = labels.front();
  else if (!labels.empty())
    j["label_candidates"] = labels;
  return j;
}

inline nlohmann::json cover_json(const PCoverData& C) {
  nlohmann::json j;
  j["nu"] = C.nu;
  j["mu"] = C.mu;
  j["d1"] = C.d1;
  j["d2"] = C.d2;
  j["cover_label"] = C.cover_label;
  return j;
}

// Export the materialized subtree below `from` (or everything).
inline nlohmann::json tree_json(Catalog& cat, bool with_sigma = false) {
  nlohmann::json nodes = nlohmann::json::array();
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& a : cat.all_addresses()) {
    TreeNode& n = *cat.find(a);
    nodes.push_back(fingerprint_json(cat, n, with_sigma));
    for (auto& [step, kids] : n.children)
      for (auto& k : kids) {
        nlohmann::json e;
        e["from"] = a.str();
        e["to"] = k.str();
        e["step"] = step;
        edges.push_back(e);
      }
  }
  nlohmann::json j;
  j["nodes"] = nodes;
  j["edges"] = edges;
  return j;
}

// DOT with the paper-style conventions: box = terminal (nu = 0), filled
// dot marker for GIA-carrying vertices.
inline std::string tree_dot(Catalog& cat, bool with_sigma = true) {
  std::ostringstream os;
  os << "digraph descendants {\n  rankdir=TB;\n";
  for (const auto& a : cat.all_addresses()) {
    TreeNode& n = *cat.find(a);
    cat.fill_basic(n);
    cat.fill_cover(n);
    bool sigma = false;
    if (with_sigma && n.fp.lo <= 8) {
      cat.fill_sigma(n);
      sigma = *n.fp.sigma;
    }
    cat.fill_artin(n);
    std::string label = a.str();
    auto names = LabelMap::instance().match(n.fp);
    if (names.size() == 1) label = names.front();
    std::string tk = n.fp.tkt_name.empty() ? n.fp.tkt : n.fp.tkt_name;
    os << "  \"" << a.str() << "\" [label=\"" << label << "\\n" << tk << " ("
       << n.fp.nu << "," << n.fp.mu << ")\"";
    os << ", shape=" << (n.fp.nu == 0 ? "box" : "ellipse");
    if (sigma) os << ", style=filled, fillcolor=gray80";
    os << "];\n";
  }
  for (const auto& a : cat.all_addresses()) {
    TreeNode& n = *cat.find(a);
    for (auto& [step, kids] : n.children)
      for (auto& k : kids)
        os << "  \"" << a.str() << "\" -> \"" << k.str() << "\" [label=\"s=" << step
           << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace pclab
