// pclab: a finite p-group laboratory over power-commutator presentations.
// Identify groups, walk descendant trees, compute Artin patterns, run the
// Schur sigma census, verify the built-in tables, export DOT/JSON.
#include "pclab/export.hpp"
#include "pclab/store.hpp"
#include "pclab/verify.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

using namespace pclab;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// file path or tree address
TreeNode& node_from_arg(Catalog& cat, const std::string& arg) {
  if (std::ifstream(arg).good()) {
    auto P = parse_presentation(read_file(arg));
    auto rep = check_consistency(P);
    if (!rep.consistent)
      throw InconsistentInput("presentation is inconsistent: " + rep.failures.front());
    std::string name = P.label.empty() ? ("file:" + arg) : P.label;
    cat.add_root(name, P);
    return cat.root(name);
  }
  // a label from the curated map, or an address
  if (const LabelEntry* e = LabelMap::instance().find(arg)) {
    if (e->address != "-") return cat.resolve(parse_address(e->address));
  }
  return cat.resolve(parse_address(arg));
}

void print_root_path_table(Catalog& cat, TreeNode& n, bool check_extremal,
                           bool topology) {
  RootPath rp = root_path(*n.pres);
  if (rp.vertices.empty()) {
    std::cout << "abelian input: empty root path\n";
    return;
  }
  std::cout << "ancestor\tlabel\tlo\t(nu,mu)\t(N_s/C_s)\tTKT\n";
  for (size_t i = rp.vertices.size(); i-- > 0;) {
    const auto& v = rp.vertices[i];
    std::string anc = i == 0 ? "G" : ("pi^" + std::to_string(i) + "(G)");
    std::string nm = "path:" + std::to_string(i);
    cat.add_root(nm, v.pres);
    TreeNode& pn = cat.root(nm);
    std::string counts = "";
    if (v.nu > 0) counts = pclab::detail::counts_string(cat.descendant_counts(pn));
    std::string label = "?";
    if (v.lo <= 9) {
      auto labels = fingerprint_match(cat, pn);
      if (labels.size() == 1) label = labels.front();
    }
    std::cout << anc << "\t" << label << "\t" << v.lo << "\t(" << v.nu << "," << v.mu
              << ")\t" << counts << "\t"
              << (v.tkt_name.empty() ? v.tkt : v.tkt_name) << "\n";
  }
  if (check_extremal) {
    auto ex = is_extremal_path(rp);
    std::cout << "extremal: " << (ex.extremal ? "yes" : "no") << " edges=";
    for (auto [s, nu] : ex.edges) std::cout << "(s=" << s << ",nu=" << nu << ")";
    std::cout << "\n";
  }
  if (topology) std::cout << "topology: " << topology_symbol(*n.pres) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pclab: finite p-group laboratory"};
  app.require_subcommand(1);

  int jobs = (int)std::max(1u, std::thread::hardware_concurrency());
  int aut_budget = 8, gia_budget = 9;
  std::string catalog_dir;
  if (const char* env = std::getenv("PCLAB_CATALOG")) catalog_dir = env;
  app.add_option("--jobs", jobs, "worker threads for searches and tree expansion");
  app.add_option("--aut-budget", aut_budget, "max log order for full Aut enumeration");
  app.add_option("--gia-budget", gia_budget, "max log order for GIA search");
  app.add_option("--catalog", catalog_dir, "persistent catalog directory");

  auto* cmd_identify = app.add_subcommand("identify", "fingerprint a presentation file");
  std::string identify_file;
  cmd_identify->add_option("file", identify_file)->required();

  auto* cmd_rootpath =
      app.add_subcommand("root-path", "iterated parents down to the class-2 floor");
  std::string rootpath_arg;
  bool check_extremal = false, topology = false;
  cmd_rootpath->add_option("target", rootpath_arg, "presentation file, label or address")
      ->required();
  cmd_rootpath->add_flag("--check-extremal", check_extremal);
  cmd_rootpath->add_flag("--topology", topology);

  auto* cmd_desc = app.add_subcommand("descendants", "immediate descendants of a vertex");
  std::string desc_arg, desc_export;
  int desc_step = 0;
  bool desc_purged = false;
  cmd_desc->add_option("target", desc_arg)->required();
  cmd_desc->add_option("--step", desc_step, "only this step size");
  cmd_desc->add_flag("--purged", desc_purged, "keep only GIA-carrying children");
  cmd_desc->add_option("--export", desc_export, "dot|json tree export to stdout");

  auto* cmd_census = app.add_subcommand("census", "Schur sigma census up to 3^max-lo");
  int census_maxlo = 5;
  std::string census_tkt;
  bool census_purged = false;
  cmd_census->add_option("--max-lo", census_maxlo)->required();
  cmd_census->add_option("--tkt", census_tkt, "restrict to one TKT name");
  cmd_census->add_flag("--purged", census_purged,
                       "prune GIA-free vertices while growing (heuristic)");

  auto* cmd_verify = app.add_subcommand("verify", "check a built-in table of expected values");
  std::string verify_table;
  cmd_verify
      ->add_option("--table", verify_table,
                   "d10|h4|e6|e8|g19|counts-lo5|counts-lo8|forbidden-bc|fork-2187|extremal")
      ->required();

  CLI11_PARSE(app, argc, argv);

  CatalogOptions copt;
  copt.jobs = jobs;
  copt.aut.full_budget_lo = aut_budget;
  copt.aut.gia_budget_lo = gia_budget;
  copt.progress = &std::cerr;
  Catalog cat(copt);

  std::optional<CatalogStore> store;
  if (!catalog_dir.empty()) store.emplace(catalog_dir);
  auto persist = [&]() {
    if (!store) return;
    for (const auto& a : cat.all_addresses()) {
      TreeNode& n = *cat.find(a);
      cat.fill_basic(n);
      store->put(cat, n);
    }
    store->flush();
  };

  try {
    if (*cmd_identify) {
      PcPresentation P;
      try {
        P = parse_presentation(read_file(identify_file));
      } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
      }
      auto rep = check_consistency(P);
      if (!rep.consistent) {
        std::cerr << "inconsistent presentation; failing test words:\n";
        for (const auto& f : rep.failures) std::cerr << "  " << f << "\n";
        return 3;
      }
      if (P.ngens == 0) {
        std::cout << nlohmann::json({{"lo", 0}, {"order", 1}, {"ab", "1^0"},
                                     {"cl", 0}, {"abelian", true}})
                         .dump(1)
                  << "\n";
        return 0;
      }
      std::string name = P.label.empty() ? "input" : P.label;
      cat.add_root(name, P);
      TreeNode& n = cat.root(name);
      bool sigma_ok = P.ngens <= gia_budget;
      std::cout << fingerprint_json(cat, n, sigma_ok).dump(1) << "\n";
      persist();
      return 0;
    }
    if (*cmd_rootpath) {
      TreeNode& n = node_from_arg(cat, rootpath_arg);
      print_root_path_table(cat, n, check_extremal, topology);
      persist();
      return 0;
    }
    if (*cmd_desc) {
      TreeNode& n = node_from_arg(cat, desc_arg);
      const PCoverData& C = cat.cover_of(n);
      std::vector<int> steps;
      if (desc_step > 0)
        steps.push_back(desc_step);
      else
        for (int s = 1; s <= C.nu; ++s) steps.push_back(s);
      for (int s : steps) {
        cat.expand_step(n, s);
        auto kids = desc_purged ? cat.purged_children(n, s) : n.children.at(s);
        auto [N, Cc] = n.counts.at(s);
        std::cout << "step " << s << ": N=" << N << " C=" << Cc
                  << (desc_purged ? " (purged listing)" : "") << "\n";
        for (const auto& a : kids) {
          TreeNode& kid = *cat.find(a);
          cat.fill_basic(kid);
          cat.fill_artin(kid);
          cat.fill_cover(kid);
          std::cout << "  " << a.str() << " lo=" << kid.fp.lo << " (" << kid.fp.nu << ","
                    << kid.fp.mu << ") "
                    << (kid.fp.tkt_name.empty() ? kid.fp.tkt : kid.fp.tkt_name) << " "
                    << kid.fp.ttt << "\n";
        }
      }
      if (desc_export == "json") std::cout << tree_json(cat).dump(1) << "\n";
      if (desc_export == "dot") std::cout << tree_dot(cat);
      persist();
      return 0;
    }
    if (*cmd_census) {
      auto recs = cat.schur_census(census_maxlo, census_tkt, census_purged);
      long long total = 0;
      for (const auto& r : recs) {
        std::cout << "lo=" << r.lo << " tkt=" << r.tkt_name << " count=" << r.count;
        for (const auto& a : r.addresses) std::cout << " " << a.str();
        std::cout << "\n";
        total += r.count;
      }
      std::cout << "total " << total << "\n";
      persist();
      return 0;
    }
    if (*cmd_verify) {
      auto res = run_verify_table(cat, verify_table, &std::cout);
      persist();
      return res.all_pass() ? 0 : 1;
    }
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
