#pragma once

#include <string>
#include <vector>

#include "lfid/graph.hpp"

namespace lfid::examples {

// One latent factor over a six-node chain 1->2->3->4->5->6 with the extra edge 1->5.
LatentFactorGraph fig2a();
// Two proxies: h1 -> {1,2,3,4}, 1->2, 2->3, 4->3.
LatentFactorGraph fig2b();
// h1 -> {1..6}, 1->2->3->4, 4->5, 4->6.
LatentFactorGraph fig4a();
// Household energy consumption with socio-economic status as the latent factor.
LatentFactorGraph household();
// Six nodes where the W_z superset loop matters for node 6.
LatentFactorGraph fig3();

std::vector<std::string> names();
// Throws GraphError(unknown_node) for unknown names.
LatentFactorGraph by_name(const std::string& name);

}  // namespace lfid::examples
