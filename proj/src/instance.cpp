#include "steiner/instance.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace steiner {

bool SteinerInstance::is_terminal(NodeId n) const {
    return std::binary_search(terminals.begin(), terminals.end(), n);
}

std::vector<bool> SteinerInstance::terminal_mask() const {
    std::vector<bool> mask(static_cast<std::size_t>(graph.node_count()), false);
    for (NodeId t : terminals) mask[t] = true;
    return mask;
}

SteinerInstance make_instance(NodeId node_count, std::span<const Edge> edges,
                              std::vector<NodeId> terminals, std::string name) {
    if (terminals.empty()) throw GraphError("empty terminal set");
    std::sort(terminals.begin(), terminals.end());
    terminals.erase(std::unique(terminals.begin(), terminals.end()), terminals.end());
    Graph full(node_count, edges);
    for (NodeId t : terminals)
        if (!full.valid(t)) throw GraphError("terminal " + std::to_string(t) + " out of range");

    const ShortestPaths sp = multi_source_dijkstra(full, std::span<const NodeId>(&terminals[0], 1));
    for (NodeId t : terminals)
        if (sp.dist[t] == kInfCost)
            throw GraphError("terminals " + std::to_string(terminals[0]) + " and " + std::to_string(t) +
                             " lie in different components");

    SteinerInstance inst;
    inst.name = std::move(name);
    const bool connected =
        std::all_of(sp.dist.begin(), sp.dist.end(), [](Cost d) { return d != kInfCost; });
    if (connected) {
        inst.graph = std::move(full);
        inst.terminals = std::move(terminals);
        return inst;
    }

    std::vector<NodeId> renumber(static_cast<std::size_t>(node_count), kNoNode);
    NodeId next = 0;
    for (NodeId n = 0; n < node_count; ++n)
        if (sp.dist[n] != kInfCost) renumber[n] = next++;
    std::vector<Edge> kept;
    for (const Edge& e : full.edges())
        if (renumber[e.u] != kNoNode) kept.push_back({renumber[e.u], renumber[e.v], e.weight});
    inst.graph = Graph(next, kept);
    for (NodeId t : terminals) inst.terminals.push_back(renumber[t]);
    return inst;
}

SteinerTree make_tree(std::vector<Edge> edges) {
    SteinerTree tree;
    for (Edge& e : edges) {
        e = canonical(e);
        tree.cost += e.weight;
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
    tree.edges = std::move(edges);
    return tree;
}

SteinerTree prune_leaves(const SteinerTree& tree, const std::vector<bool>& is_terminal) {
    NodeId max_id = -1;
    for (const Edge& e : tree.edges) max_id = std::max({max_id, e.u, e.v});
    std::vector<int> degree(static_cast<std::size_t>(max_id + 1), 0);
    std::vector<std::vector<std::size_t>> incident(degree.size());
    for (std::size_t i = 0; i < tree.edges.size(); ++i) {
        ++degree[tree.edges[i].u];
        ++degree[tree.edges[i].v];
        incident[tree.edges[i].u].push_back(i);
        incident[tree.edges[i].v].push_back(i);
    }
    std::vector<bool> removed(tree.edges.size(), false);
    std::vector<NodeId> leaves;
    for (NodeId n = 0; n <= max_id; ++n)
        if (degree[n] == 1 && !is_terminal[n]) leaves.push_back(n);
    while (!leaves.empty()) {
        const NodeId leaf = leaves.back();
        leaves.pop_back();
        if (degree[leaf] != 1) continue;
        for (std::size_t id : incident[leaf]) {
            if (removed[id]) continue;
            removed[id] = true;
            const NodeId other = tree.edges[id].u == leaf ? tree.edges[id].v : tree.edges[id].u;
            --degree[leaf];
            if (--degree[other] == 1 && !is_terminal[other]) leaves.push_back(other);
            break;
        }
    }
    std::vector<Edge> kept;
    for (std::size_t i = 0; i < tree.edges.size(); ++i)
        if (!removed[i]) kept.push_back(tree.edges[i]);
    return make_tree(std::move(kept));
}

SteinerTree finalize_tree(std::vector<Edge> edges, const SteinerInstance& instance) {
    TreeEdges forest = mst_of_edges(std::move(edges));
    return prune_leaves(make_tree(std::move(forest.edges)), instance.terminal_mask());
}

SteinerTree tree_from_metric_edges(const SteinerInstance& instance, const Metric& metric,
                                   std::span<const Edge> metric_edges) {
    std::vector<Edge> edges;
    for (const Edge& me : metric_edges) {
        const std::vector<NodeId> path = expand_metric_edge(metric, me.u, me.v);
        for (std::size_t i = 0; i + 1 < path.size(); ++i)
            edges.push_back(canonical({path[i], path[i + 1], instance.graph.weight(path[i], path[i + 1])}));
    }
    return finalize_tree(std::move(edges), instance);
}

std::optional<std::string> validate_tree(const SteinerInstance& instance, const SteinerTree& tree) {
    const Graph& g = instance.graph;
    Cost sum = 0;
    DisjointSets sets(static_cast<std::size_t>(g.node_count()));
    for (const Edge& e : tree.edges) {
        if (!g.valid(e.u) || !g.valid(e.v)) return "edge references an invalid node";
        const Cost w = g.weight(e.u, e.v);
        if (w == kInfCost)
            return "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") is not in the graph";
        if (w != e.weight) return "edge weight does not match the graph";
        if (!sets.unite_into(e.u, e.v)) return "edge set contains a cycle";
        sum += w;
    }
    if (sum != tree.cost)
        return "reported cost " + std::to_string(tree.cost) + " differs from edge sum " + std::to_string(sum);
    if (instance.terminals.size() > 1) {
        std::vector<bool> touched(static_cast<std::size_t>(g.node_count()), false);
        for (const Edge& e : tree.edges) touched[e.u] = touched[e.v] = true;
        const NodeId root = sets.find(instance.terminals.front());
        for (NodeId t : instance.terminals) {
            if (!touched[t]) return "terminal " + std::to_string(t) + " is not covered";
            if (sets.find(t) != root) return "terminal " + std::to_string(t) + " is disconnected";
        }
        // Acyclic + every edge attached to the terminals' component.
        for (const Edge& e : tree.edges)
            if (sets.find(e.u) != root) return "edge set is not connected";
    } else if (!tree.edges.empty()) {
        return "single-terminal instance must yield an empty tree";
    }
    return std::nullopt;
}

}  // namespace steiner
