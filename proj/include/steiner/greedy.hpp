#pragma once

#include "steiner/instance.hpp"

namespace steiner {

struct GreedyResult {
    SteinerTree tree;
    /// Cost of MST(G*[T]); the tree cost never exceeds it.
    Cost terminal_mst_cost = 0;
};

/// 2-approximation: MST of the terminal metric built from a single
/// multi-source Dijkstra (Voronoi regions + bridging edges), expanded to
/// graph paths, re-spanned and leaf-pruned. O(|E| log |V|).
GreedyResult greedy_steiner_detailed(const SteinerInstance& instance);

inline SteinerTree greedy_steiner(const SteinerInstance& instance) {
    return greedy_steiner_detailed(instance).tree;
}

/// Reference variant: full metric closure restricted to T. O(|V| |E| log |V|).
GreedyResult greedy_steiner_naive(const SteinerInstance& instance);

}  // namespace steiner
