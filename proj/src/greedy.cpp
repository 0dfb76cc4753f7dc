#include "steiner/greedy.hpp"

#include <algorithm>
#include <map>

namespace steiner {

GreedyResult greedy_steiner_detailed(const SteinerInstance& instance) {
    const Graph& g = instance.graph;
    if (instance.terminals.size() <= 1) return {};
    const VoronoiPartition vor = voronoi_regions(g, instance.terminals);

    // Cheapest bridging graph edge per pair of Voronoi regions.
    struct Bridge {
        Cost weight;
        Edge edge;
    };
    std::map<std::pair<NodeId, NodeId>, Bridge> bridges;
    for (const Edge& e : g.edges()) {
        NodeId a = vor.owner[e.u], b = vor.owner[e.v];
        if (a == b || a == kNoNode || b == kNoNode) continue;
        const Cost w = vor.dist_to_owner[e.u] + e.weight + vor.dist_to_owner[e.v];
        if (a > b) std::swap(a, b);
        auto [it, inserted] = bridges.try_emplace({a, b}, Bridge{w, e});
        if (!inserted && w < it->second.weight) it->second = {w, e};
    }

    std::vector<Edge> aux;
    aux.reserve(bridges.size());
    for (const auto& [key, bridge] : bridges) aux.push_back({key.first, key.second, bridge.weight});
    const TreeEdges terminal_tree = mst_of_edges(aux);
    if (terminal_tree.edges.size() + 1 != instance.terminals.size())
        throw GraphError("greedy: terminals are not connected");

    std::vector<Edge> expanded;
    auto walk_to_owner = [&](NodeId x) {
        while (vor.pred[x] != kNoNode) {
            const NodeId p = vor.pred[x];
            expanded.push_back(canonical({p, x, g.weight(p, x)}));
            x = p;
        }
    };
    for (const Edge& te : terminal_tree.edges) {
        const Edge& bridge = bridges.at({te.u, te.v}).edge;
        expanded.push_back(bridge);
        walk_to_owner(bridge.u);
        walk_to_owner(bridge.v);
    }
    return {finalize_tree(std::move(expanded), instance), terminal_tree.cost};
}

GreedyResult greedy_steiner_naive(const SteinerInstance& instance) {
    if (instance.terminals.size() <= 1) return {};
    const Metric metric = metric_closure(instance.graph);
    const TreeEdges terminal_tree = mst(metric, instance.terminals);
    return {tree_from_metric_edges(instance, metric, terminal_tree.edges), terminal_tree.cost};
}

}  // namespace steiner
