// Walks the descendant tree of the elementary abelian 3-group of rank two
// down to order 3^5 and prints each vertex with its transfer kernel type
// and nuclear data.
#include "pclab/catalog.hpp"

#include <iostream>

int main() {
  using namespace pclab;
  CatalogOptions opt;
  opt.jobs = 2;
  Catalog cat(opt);
  for (const auto& addr : cat.grow(5)) {
    TreeNode& n = *cat.find(addr);
    cat.fill_basic(n);
    if (n.fp.ab != "1^2") continue;
    cat.fill_artin(n);
    cat.fill_cover(n);
    auto labels = LabelMap::instance().match(n.fp);
    std::cout << addr.str() << "  lo=" << n.fp.lo << "  (" << n.fp.nu << "," << n.fp.mu
              << ")  " << (n.fp.tkt_name.empty() ? n.fp.tkt : n.fp.tkt_name);
    if (labels.size() == 1) std::cout << "  " << labels.front();
    std::cout << "\n";
  }
  return 0;
}
