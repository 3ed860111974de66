#ifndef ARI_ARI_HPP
#define ARI_ARI_HPP

// Umbrella header for the core library. The HTTP layer (ari/serve.hpp) is
// kept separate because it pulls in cpp-httplib.

#include "ari/bench.hpp"
#include "ari/chain_bounds.hpp"
#include "ari/cluster_forest.hpp"
#include "ari/error.hpp"
#include "ari/graph.hpp"
#include "ari/index.hpp"
#include "ari/persist.hpp"
#include "ari/report.hpp"
#include "ari/stats.hpp"
#include "ari/tdp_engine.hpp"

#endif // ARI_ARI_HPP
