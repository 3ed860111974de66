// Builds the structure for a small 3x3 grid and prints the maximal clusters
// for a few TDP thresholds.

#include <iostream>

#include "ari/ari.hpp"

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : ARI_DEMO_DATA;
  try {
    const auto in = ari::load_edge_list(dir + "/small.edges", dir + "/small.pvalues");
    const auto x = ari::AriIndex::build(in.graph, in.pvalues, 0.05);
    std::cout << "m = " << x.m << ", h = " << x.h << ", zeta = " << x.zeta << "\n\n";

    auto session = x.session();
    for (double gamma : {0.0, 0.3, 0.5, 0.8}) {
      ari::write_cluster_table(std::cout, gamma, ari::cluster_rows(x, session, gamma, false));
      std::cout << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
}
