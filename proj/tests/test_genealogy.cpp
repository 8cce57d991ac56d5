#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pclab/catalog.hpp"
#include "pclab/export.hpp"
#include "pclab/store.hpp"
#include "pclab/verify.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

using namespace pclab;

static CatalogOptions test_opts() {
  CatalogOptions o;
  o.jobs = 2;
  return o;
}

TEST_CASE("descendant counts of <27,3> match the root-path table") {
  Catalog cat(test_opts());
  TreeNode& g = cat.resolve(parse_address("C3xC3-#1;2"));
  auto counts = cat.descendant_counts(g);
  REQUIRE(counts.size() == 2);
  CHECK(counts[0] == std::pair<long long, long long>{4, 1});
  CHECK(counts[1] == std::pair<long long, long long>{7, 5});
}

TEST_CASE("orbit method equals brute-force isomorphism deduplication for <27,3>") {
  Catalog cat(test_opts());
  TreeNode& g = cat.resolve(parse_address("C3xC3-#1;2"));
  const PCoverData& C = cat.cover_of(g);
  for (int s = 1; s <= C.nu; ++s) {
    // all allowable subgroups, no orbit reduction
    auto subs = fpmat::subspaces(3, C.mu, C.mu - s);
    std::vector<PcPresentation> quotients;
    for (auto& b : subs) {
      fpmat::Mat stack = b;
      for (const auto& r : C.nucleus_rows) stack.push_back(r);
      if (fpmat::rank_of(stack, 3) != C.mu) continue;
      quotients.push_back(cover_quotient(C, b));
    }
    // deduplicate by exhaustive generator-image isomorphism testing
    std::vector<PcPresentation> reps;
    for (auto& q : quotients) {
      bool fresh = true;
      for (auto& r : reps)
        if (oracle::isomorphic_bruteforce(q, r)) {
          fresh = false;
          break;
        }
      if (fresh) reps.push_back(q);
    }
    cat.expand_step(g, s);
    CHECK((long long)reps.size() == g.counts.at(s).first);
  }
}

TEST_CASE("pi-consistency and edge increments on generated edges to order 3^5") {
  Catalog cat(test_opts());
  auto addrs = cat.grow(5);
  for (const auto& a : addrs) {
    TreeNode& n = *cat.find(a);
    if (!n.parent_addr) continue;
    TreeNode& par = *cat.find(*n.parent_addr);
    cat.fill_basic(n);
    cat.fill_basic(par);
    int s = a.path.back().first;
    // edge laws: lo, cl, cc increments
    CHECK(n.fp.lo - par.fp.lo == s);
    if (par.fp.cl >= 1 && n.fp.ab == "1^2" && par.fp.lo >= 3) {
      CHECK(n.fp.cl - par.fp.cl == 1);
      CHECK(n.fp.cc - par.fp.cc == s - 1);
    }
    // step size bounded by the parent's nuclear rank
    cat.fill_cover(par);
    CHECK(s <= par.fp.nu);
    // parent operator: quotient by gamma_cl has the parent's fingerprint;
    // brute-force isomorphism confirms it at the smallest orders
    if (n.fp.ab == "1^2" && par.fp.lo >= 3 && n.fp.cl >= 2) {
      auto P = parent(*n.pres);
      CHECK(P.ngens == par.fp.lo);
      if (n.fp.lo <= 4) CHECK(oracle::isomorphic_bruteforce(standardized(P), *par.pres));
      Catalog scratch(test_opts());
      scratch.add_root("q", P);
      CHECK(scratch.full_fingerprint(scratch.root("q")).key() ==
            cat.full_fingerprint(par).key());
    }
  }
}

TEST_CASE("parent of the D.10 group has the <27,3> fingerprint") {
  Catalog cat(test_opts());
  TreeNode& d10 = cat.resolve(parse_address("C3xC3-#1;2-#2;4"));
  auto fp = cat.full_fingerprint(d10);
  CHECK(fp.tkt_name == "D.10");
  auto P = parent(*d10.pres);
  Catalog cat2(test_opts());
  cat2.add_root("q", P);
  auto fq = cat2.full_fingerprint(cat2.root("q"));
  TreeNode& g27 = cat.resolve(parse_address("C3xC3-#1;2"));
  CHECK(fq.key() == cat.full_fingerprint(g27).key());
  // class-2 input: parent is the abelianization (path floor)
  auto P2 = parent(*g27.pres);
  CHECK(P2.ngens == 2);
  CHECK(is_abelian(P2));
  // abelian input has no parent
  CHECK_THROWS_AS(parent(P2), AbelianInput);
}

TEST_CASE("root path of the D.10 group: single edge with s = 2, extremal") {
  Catalog cat(test_opts());
  TreeNode& d10 = cat.resolve(parse_address("C3xC3-#1;2-#2;4"));
  auto rp = root_path(*d10.pres);
  REQUIRE(rp.vertices.size() == 2);
  CHECK(rp.steps == std::vector<int>{2});
  CHECK(rp.vertices[1].nu == 2);
  CHECK(rp.vertices[1].tkt_name == "a.1");
  auto ex = is_extremal_path(rp);
  CHECK(ex.extremal);
  REQUIRE(ex.edges.size() == 1);
  CHECK(ex.edges[0] == std::pair<int, int>{2, 2});
  CHECK(topology_symbol(*d10.pres) == "D(2→)a");
  // empty path for the abelian root
  PcPresentation E(3, 2);
  CHECK(topology_symbol(E).empty());
}

TEST_CASE("coclass-1 vertices of order 3^4 fail the extremal path condition") {
  Catalog cat(test_opts());
  for (const char* lbl : {"<81,7>", "<81,8>", "<81,10>"}) {
    const LabelEntry* e = LabelMap::instance().find(lbl);
    REQUIRE(e != nullptr);
    TreeNode& n = cat.resolve(parse_address(e->address));
    auto ex = is_extremal_path(*n.pres);
    CHECK_FALSE(ex.extremal);
    REQUIRE(ex.edges.size() == 1);
    CHECK(ex.edges[0] == std::pair<int, int>{1, 2});
  }
}

TEST_CASE("address parsing and resolution") {
  Catalog cat(test_opts());
  CHECK(cat.resolve(parse_address("C3xC3")).fp.lo == 0);  // fp not yet filled
  TreeNode& r = cat.resolve(parse_address("C3xC3"));
  cat.fill_basic(r);
  CHECK(r.fp.lo == 2);
  // unicode dash and angle-bracket labels
  auto a = parse_address("⟨729,54⟩−#2;3−#1;1");
  CHECK(a.root == "<729,54>");
  CHECK(a.path == std::vector<std::pair<int, int>>{{2, 3}, {1, 1}});
  CHECK_THROWS_AS(parse_address("C3xC3-#1;0"), CounterOutOfRange);
  CHECK_THROWS_AS(cat.resolve(parse_address("NoSuchRoot-#1;1")), UnknownRoot);
  CHECK_THROWS_AS(cat.resolve(parse_address("C3xC3-#1;99")), CounterOutOfRange);
  CHECK_THROWS_AS(cat.resolve(parse_address("C3xC3-#7;1")), StepExceedsNucleus);
}

TEST_CASE("purged children: purge keeps GIA carriers and never drops Schur groups") {
  Catalog cat(test_opts());
  TreeNode& g = cat.resolve(parse_address("C3xC3-#1;2"));
  auto purged = cat.purged_children(g, 2);
  // D.10 and D.5 are Schur sigma groups and must survive the purge
  std::set<std::string> kept;
  for (const auto& a : purged) kept.insert(a.str());
  for (const auto& a : g.children.at(2)) {
    TreeNode& kid = *cat.find(a);
    auto fp = cat.full_fingerprint(kid);
    if (*fp.schur) CHECK(kept.count(a.str()));
    if (kept.count(a.str())) CHECK(*fp.sigma);
  }
}

TEST_CASE("Schur census to order 3^5: exactly the two metabelian groups") {
  Catalog cat(test_opts());
  auto recs = cat.schur_census(5);
  long long total = 0;
  std::map<std::string, long long> by_name;
  for (const auto& r : recs) {
    total += r.count;
    by_name[r.tkt_name] += r.count;
  }
  CHECK(total == 2);
  CHECK(by_name["D.10"] == 1);
  CHECK(by_name["D.5"] == 1);
  // both of order 3^5, class 3, coclass 2, metabelian
  for (const auto& r : recs) {
    CHECK(r.lo == 5);
    for (const auto& a : r.addresses) {
      TreeNode& n = *cat.find(a);
      CHECK(n.fp.cl == 3);
      CHECK(n.fp.cc == 2);
      CHECK(n.fp.dl == 2);
      // desk-scale validation of the extremal-path conjecture
      CHECK(is_extremal_path(*n.pres).extremal);
    }
  }
}

TEST_CASE("bb series laws") {
  CHECK(bb_series_laws(0) == std::array<int, 3>{8, 5, 3});
  CHECK(bb_series_laws(2) == std::array<int, 3>{14, 9, 5});
  CHECK_THROWS_AS(bb_series_laws(-1), PresentationError);
}

TEST_CASE("determinism: two regenerations assign identical addresses and keys") {
  auto snapshot = [](Catalog& cat) {
    std::vector<std::string> rows;
    for (const auto& a : cat.all_addresses()) {
      TreeNode& n = *cat.find(a);
      cat.fill_basic(n);
      rows.push_back(a.str() + "|" + n.fp.ab + "|" + std::to_string(n.fp.cl));
    }
    return rows;
  };
  Catalog c1(test_opts()), c2(test_opts());
  c1.grow(5);
  c2.grow(5);
  CHECK(snapshot(c1) == snapshot(c2));
}

TEST_CASE("curated labels resolve and validate") {
  Catalog cat(test_opts());
  for (const char* lbl : {"<27,3>", "<27,4>", "<243,3>", "<243,4>", "<243,5>",
                          "<243,6>", "<243,7>", "<243,8>", "<243,9>"}) {
    const LabelEntry* e = LabelMap::instance().find(lbl);
    REQUIRE(e != nullptr);
    TreeNode& n = cat.resolve(parse_address(e->address));
    auto matches = fingerprint_match(cat, n);
    REQUIRE(matches.size() == 1);
    CHECK(matches.front() == lbl);
  }
}

TEST_CASE("catalog store round trip") {
  Catalog cat(test_opts());
  TreeNode& g = cat.resolve(parse_address("C3xC3-#1;2"));
  cat.full_fingerprint(g);
  std::string dir = "/tmp/pclab_store_test";
  std::filesystem::remove_all(dir);
  {
    CatalogStore store(dir);
    store.put(cat, g);
    store.flush();
  }
  CatalogStore store(dir);
  auto back = store.get("C3xC3-#1;2");
  REQUIRE(back.has_value());
  Catalog cat2(test_opts());
  cat2.add_root("back", *back);
  CHECK(cat2.full_fingerprint(cat2.root("back")).key() == g.fp.key());
  CHECK(store.list().size() == 1);
  CHECK(store.find_fingerprint(g.fp.key()) == std::vector<std::string>{"C3xC3-#1;2"});
}

TEST_CASE("check_consistency rejects all ten corrupted fixtures") {
  for (int t = 1; t <= 10; ++t) {
    auto P = load_fixture("corrupted_" + std::to_string(t) + ".pcp");
    auto rep = check_consistency(P);
    CHECK_FALSE(rep.consistent);
    CHECK(rep.failures.size() >= 1);
  }
}

TEST_CASE("frozen <243,5> fixture identifies as the D.10 Schur group") {
  Catalog cat(test_opts());
  auto P = load_fixture("g243_5.pcp");
  REQUIRE(check_consistency(P).consistent);
  cat.add_root("fx", P);
  TreeNode& n = cat.root("fx");
  auto fp = cat.full_fingerprint(n);
  CHECK(fp.tkt_name == "D.10");
  CHECK(fp.nu == 0);
  CHECK(fp.mu == 2);
  CHECK(*fp.schur);
  auto labels = fingerprint_match(cat, n);
  REQUIRE(labels.size() == 1);
  CHECK(labels.front() == "<243,5>");
  // kernel of each transfer on this group is cyclic of order 3
  auto maxs = maximal_subgroups(P);
  auto f = abelian_quotient_frame(P);
  for (const auto& h : maxs) {
    Subgroup hder = derived_of(P, h.group);
    auto T = artin_transfer(P, h.group);
    long long ker = 0;
    for (const Vec& r : f.reps)
      if (hder.contains(T.apply_ambient(r))) ++ker;
    CHECK(ker == 3);
  }
}

TEST_CASE("class-2 quotients in the tree share the <27,3> fingerprint (A.1 aside)") {
  Catalog cat(test_opts());
  cat.grow(5);
  TreeNode& g27 = cat.resolve(parse_address("C3xC3-#1;2"));
  std::string want = cat.full_fingerprint(g27).key();
  for (const auto& a : cat.all_addresses()) {
    TreeNode& n = *cat.find(a);
    cat.fill_basic(n);
    if (n.fp.ab != "1^2" || n.fp.cl < 2) continue;
    cat.fill_artin(n);
    if (n.fp.tkt_name == "A.1") continue;
    auto rp = root_path(*n.pres);
    REQUIRE(!rp.vertices.empty());
    Catalog scratch(test_opts());
    scratch.add_root("floor", rp.vertices.back().pres);
    CHECK(scratch.full_fingerprint(scratch.root("floor")).key() == want);
  }
}

TEST_CASE("transfer kernels of 2-generated catalog groups have order 3 or 9") {
  Catalog cat(test_opts());
  cat.grow(5);
  for (const auto& a : cat.all_addresses()) {
    TreeNode& n = *cat.find(a);
    cat.fill_basic(n);
    if (n.fp.ab != "1^2" || n.fp.lo < 3) continue;
    const PcPresentation& P = *n.pres;
    auto maxs = maximal_subgroups(P);
    auto f = abelian_quotient_frame(P);
    for (const auto& h : maxs) {
      Subgroup hder = derived_of(P, h.group);
      auto T = artin_transfer(P, h.group);
      long long ker = 0;
      for (const Vec& r : f.reps)
        if (hder.contains(T.apply_ambient(r))) ++ker;
      CHECK((ker == 3 || ker == 9));
    }
  }
}

TEST_CASE("topology symbol of the E.8 ground state") {
  Catalog cat(test_opts());
  const LabelEntry* e = LabelMap::instance().find("<729,54>");
  REQUIRE(e != nullptr);
  TreeNode& u = cat.resolve(parse_address(e->address));
  cat.expand_step(u, 2);
  bool found = false;
  for (auto& a : u.children.at(2)) {
    TreeNode& kid = *cat.find(a);
    auto fp = cat.full_fingerprint(kid);
    if (!*fp.schur || fp.tkt_name != "E.8") continue;
    found = true;
    CHECK(topology_symbol(*kid.pres) == "E(1→)c(2←)E");
    CHECK(fp.dl == 3);
  }
  CHECK(found);
}
