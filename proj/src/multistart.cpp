#include "steiner/multistart.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <numeric>
#include <random>
#include <string>

#include "steiner/hill_climb.hpp"

namespace steiner::ls {

namespace {

std::vector<std::vector<std::pair<NodeId, Cost>>> adjacency(NodeId n, const std::vector<Edge>& edges) {
    std::vector<std::vector<std::pair<NodeId, Cost>>> adj(static_cast<std::size_t>(n));
    for (const Edge& e : edges) {
        adj[e.u].emplace_back(e.v, e.weight);
        adj[e.v].emplace_back(e.u, e.weight);
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
    return adj;
}

// Node sequence from a source of `paths` to `target`.
std::vector<NodeId> trace_back(const ShortestPaths& paths, NodeId target) {
    std::vector<NodeId> out{target};
    while (paths.pred[out.back()] != kNoNode) out.push_back(paths.pred[out.back()]);
    std::reverse(out.begin(), out.end());
    return out;
}

void add_path(const Graph& g, const std::vector<NodeId>& path, std::vector<Edge>& edges) {
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        edges.push_back(canonical({path[i], path[i + 1], g.weight(path[i], path[i + 1])}));
}

}  // namespace

bool LsTree::contains(NodeId v) const { return std::binary_search(nodes.begin(), nodes.end(), v); }

LsTree make_ls_tree(const SteinerInstance& instance, std::vector<Edge> edges) {
    LsTree t;
    for (Edge& e : edges) e = canonical(e);
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return std::pair(a.u, a.v) < std::pair(b.u, b.v);
    });
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (const Edge& e : edges) {
        t.nodes.push_back(e.u);
        t.nodes.push_back(e.v);
        t.cost += e.weight;
    }
    if (edges.empty() && !instance.terminals.empty()) t.nodes.push_back(instance.terminals.front());
    std::sort(t.nodes.begin(), t.nodes.end());
    t.nodes.erase(std::unique(t.nodes.begin(), t.nodes.end()), t.nodes.end());
    t.edges = std::move(edges);
    return t;
}

LsTree pruned(const SteinerInstance& instance, const LsTree& tree) {
    return make_ls_tree(instance, prune_leaves(to_steiner_tree(tree), instance.terminal_mask()).edges);
}

SteinerTree to_steiner_tree(const LsTree& tree) { return make_tree(tree.edges); }

std::vector<NodeId> key_nodes(const SteinerInstance& instance, const LsTree& tree) {
    std::vector<int> degree(static_cast<std::size_t>(instance.graph.node_count()), 0);
    for (const Edge& e : tree.edges) ++degree[e.u], ++degree[e.v];
    std::vector<NodeId> out;
    for (NodeId v : tree.nodes)
        if (degree[v] >= 3 && !instance.is_terminal(v)) out.push_back(v);
    return out;
}

std::vector<KeyPath> key_paths(const SteinerInstance& instance, const LsTree& tree) {
    const auto adj = adjacency(instance.graph.node_count(), tree.edges);
    // path ends: terminals, key nodes, and anything not of degree 2
    auto end_node = [&](NodeId v) { return instance.is_terminal(v) || adj[v].size() != 2; };
    std::vector<KeyPath> out;
    for (NodeId start : tree.nodes) {
        if (!end_node(start)) continue;
        for (auto [next, w] : adj[start]) {
            KeyPath p;
            p.nodes = {start, next};
            p.cost = w;
            NodeId prev = start, cur = next;
            while (!end_node(cur)) {
                const auto& nb = adj[cur];
                const auto step = nb[0].first == prev ? nb[1] : nb[0];
                prev = cur;
                cur = step.first;
                p.nodes.push_back(cur);
                p.cost += step.second;
            }
            if (start < cur) out.push_back(std::move(p));
        }
    }
    return out;
}

std::optional<std::string> check_ls_tree(const SteinerInstance& instance, const LsTree& tree) {
    if (auto err = validate_tree(instance, to_steiner_tree(tree))) return err;
    Cost sum = 0;
    for (const Edge& e : tree.edges) sum += e.weight;
    if (sum != tree.cost) return "tree cost does not match its edges";
    std::vector<NodeId> nodes;
    for (const Edge& e : tree.edges) nodes.push_back(e.u), nodes.push_back(e.v);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    if (!tree.edges.empty() && nodes != tree.nodes) return "node set does not match the edges";
    const auto keys = key_nodes(instance, tree);
    auto crucial = [&](NodeId v) {
        return instance.is_terminal(v) || std::binary_search(keys.begin(), keys.end(), v);
    };
    std::vector<Edge> covered;
    for (const KeyPath& p : key_paths(instance, tree)) {
        if (!crucial(p.nodes.front()) || !crucial(p.nodes.back())) return "key path ends at a non-crucial node";
        for (std::size_t i = 1; i + 1 < p.nodes.size(); ++i)
            if (crucial(p.nodes[i])) return "key path passes a crucial node";
        for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i)
            covered.push_back(canonical({p.nodes[i], p.nodes[i + 1], instance.graph.weight(p.nodes[i], p.nodes[i + 1])}));
    }
    std::sort(covered.begin(), covered.end(), [](const Edge& a, const Edge& b) {
        return std::pair(a.u, a.v) < std::pair(b.u, b.v);
    });
    if (covered != tree.edges) return "key paths do not partition the tree edges";
    return std::nullopt;
}

LsTree sph(const SteinerInstance& instance, NodeId start) {
    const Graph& g = instance.graph;
    if (!g.valid(start)) throw GraphError("sph: invalid start node " + std::to_string(start));
    std::vector<bool> in_tree(static_cast<std::size_t>(g.node_count()), false);
    std::vector<NodeId> tree_nodes{start};
    in_tree[start] = true;
    std::vector<Edge> edges;
    std::size_t missing = 0;
    for (NodeId t : instance.terminals) missing += !in_tree[t];
    while (missing > 0) {
        const ShortestPaths sp = multi_source_dijkstra(g, tree_nodes);
        NodeId best = kNoNode;
        for (NodeId t : instance.terminals)
            if (!in_tree[t] && (best == kNoNode || sp.dist[t] < sp.dist[best])) best = t;
        const std::vector<NodeId> path = trace_back(sp, best);
        add_path(g, path, edges);
        for (NodeId v : path) {
            if (in_tree[v]) continue;
            in_tree[v] = true;
            tree_nodes.push_back(v);
            if (instance.is_terminal(v)) --missing;
        }
    }
    return pruned(instance, make_ls_tree(instance, edges));
}

const char* to_string(MoveFamily family) {
    switch (family) {
        case MoveFamily::insert_steiner: return "insert-steiner";
        case MoveFamily::key_path_exchange: return "key-path-exchange";
        case MoveFamily::key_vertex_elimination: return "key-vertex-elimination";
    }
    return "?";
}

std::optional<LsMove> move_insert_steiner(const SteinerInstance& instance, const LsTree& tree) {
    const Graph& g = instance.graph;
    std::optional<LsMove> best;
    std::vector<NodeId> nodes = tree.nodes;
    for (NodeId v = 0; v < g.node_count(); ++v) {
        if (tree.contains(v)) continue;
        bool adjacent = false;
        for (const Arc& a : g.neighbours(v)) adjacent = adjacent || tree.contains(a.to);
        if (!adjacent) continue;
        nodes = tree.nodes;
        nodes.insert(std::upper_bound(nodes.begin(), nodes.end(), v), v);
        const TreeEdges m = mst(g, nodes);
        const std::int64_t gain = tree.cost - m.cost;
        if (gain > 0 && (!best || gain > best->gain)) best = LsMove{MoveFamily::insert_steiner, gain, v, {}};
    }
    if (best) {
        nodes = tree.nodes;
        nodes.insert(std::upper_bound(nodes.begin(), nodes.end(), best->vertex), best->vertex);
        best->result = pruned(instance, make_ls_tree(instance, mst(g, nodes).edges));
    }
    return best;
}

std::optional<LsMove> move_key_path_exchange(const SteinerInstance& instance, const LsTree& tree) {
    const Graph& g = instance.graph;
    const NodeId n = g.node_count();
    std::optional<LsMove> best;
    std::vector<Edge> best_edges;
    for (const KeyPath& p : key_paths(instance, tree)) {
        // split the tree along p
        std::vector<std::pair<NodeId, NodeId>> removed;
        for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i)
            removed.emplace_back(std::min(p.nodes[i], p.nodes[i + 1]), std::max(p.nodes[i], p.nodes[i + 1]));
        std::sort(removed.begin(), removed.end());
        std::vector<Edge> rest;
        for (const Edge& e : tree.edges)
            if (!std::binary_search(removed.begin(), removed.end(), std::pair(e.u, e.v))) rest.push_back(e);
        const auto adj = adjacency(n, rest);
        std::vector<int> side(static_cast<std::size_t>(n), -1);
        for (int s = 0; s < 2; ++s) {
            const NodeId root = s == 0 ? p.nodes.front() : p.nodes.back();
            std::vector<NodeId> stack{root};
            side[root] = s;
            while (!stack.empty()) {
                const NodeId u = stack.back();
                stack.pop_back();
                for (auto [v, w] : adj[u])
                    if (side[v] < 0) side[v] = s, stack.push_back(v);
            }
        }
        std::vector<NodeId> sources;
        for (NodeId v = 0; v < n; ++v)
            if (side[v] == 0) sources.push_back(v);
        const ShortestPaths sp = multi_source_dijkstra(g, sources);
        NodeId target = kNoNode;
        for (NodeId v = 0; v < n; ++v)
            if (side[v] == 1 && sp.dist[v] != kInfCost && (target == kNoNode || sp.dist[v] < sp.dist[target]))
                target = v;
        if (target == kNoNode) continue;
        std::vector<NodeId> path = trace_back(sp, target);
        // stop at the first node of the far side
        for (std::size_t i = 1; i < path.size(); ++i)
            if (side[path[i]] == 1) {
                path.resize(i + 1);
                break;
            }
        Cost added = 0;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) added += g.weight(path[i], path[i + 1]);
        const std::int64_t gain = p.cost - added;
        if (gain > 0 && (!best || gain > best->gain)) {
            best = LsMove{MoveFamily::key_path_exchange, gain, p.nodes.front(), {}};
            best_edges = rest;
            add_path(g, path, best_edges);
        }
    }
    if (best) best->result = pruned(instance, make_ls_tree(instance, best_edges));
    return best;
}

std::optional<LsMove> move_key_vertex_elimination(const SteinerInstance& instance, const Metric& metric,
                                                  const LsTree& tree) {
    const std::vector<NodeId> keys = key_nodes(instance, tree);
    if (keys.empty()) return std::nullopt;
    std::vector<NodeId> nodes = instance.terminals;
    nodes.insert(nodes.end(), keys.begin(), keys.end());
    std::sort(nodes.begin(), nodes.end());
    const Cost base = mst(metric, nodes).cost;
    std::optional<LsMove> best;
    std::vector<NodeId> reduced;
    for (NodeId v : keys) {
        reduced.clear();
        for (NodeId u : nodes)
            if (u != v) reduced.push_back(u);
        const std::int64_t gain = base - mst(metric, reduced).cost;
        if (gain > 0 && (!best || gain > best->gain)) best = LsMove{MoveFamily::key_vertex_elimination, gain, v, {}};
    }
    if (best) {
        reduced.clear();
        for (NodeId u : nodes)
            if (u != best->vertex) reduced.push_back(u);
        const TreeEdges m = mst(metric, reduced);
        best->result = make_ls_tree(instance, tree_from_metric_edges(instance, metric, m.edges).edges);
    }
    return best;
}

ClimbTrace local_search(const SteinerInstance& instance, const Metric& metric, LsTree seed, const Deadline& deadline) {
    ClimbTrace start;
    start.seed_cost = seed.cost;
    start.tree = std::move(seed);
    SearchComponents<ClimbTrace, LsMove> components;
    components.neighbourhood = [&](const ClimbTrace& s) {
        deadline.check();
        std::vector<LsMove> out;
        if (auto m = move_insert_steiner(instance, s.tree)) out.push_back(std::move(*m));
        else if (auto m2 = move_key_path_exchange(instance, s.tree)) out.push_back(std::move(*m2));
        else if (auto m3 = move_key_vertex_elimination(instance, metric, s.tree)) out.push_back(std::move(*m3));
        return out;
    };
    components.gain = [](const ClimbTrace&, const LsMove& m) { return m.gain; };
    components.commit = [](ClimbTrace& s, const LsMove& m) {
        if (m.result.cost >= s.tree.cost)
            throw SearchError(std::string(to_string(m.family)) + " move does not decrease the cost");
        s.tree = m.result;
        s.costs.push_back(s.tree.cost);
        s.families.push_back(m.family);
    };
    return hill_climb(std::move(start), components, SearchStrategy::choose_first).state;
}

std::vector<NodeId> start_nodes(NodeId node_count, int restarts, std::uint64_t seed) {
    if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
    if (node_count < 1) throw std::invalid_argument("empty graph");
    std::mt19937_64 rng(seed);
    std::vector<NodeId> perm(static_cast<std::size_t>(node_count));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<NodeId> out;
    std::uniform_int_distribution<NodeId> any(0, node_count - 1);
    for (int i = 0; i < restarts; ++i) out.push_back(i < node_count ? perm[i] : any(rng));
    return out;
}

MultistartReport multistart_detailed(const SteinerInstance& instance, const MultistartOptions& options,
                                     const Deadline& deadline) {
    MultistartReport report;
    if (instance.terminals.size() <= 1) {
        report.restarts.resize(1);
        report.restarts[0].tree = make_ls_tree(instance, {});
        return report;
    }
    const Metric metric = metric_closure(instance.graph);
    const std::vector<NodeId> starts = start_nodes(instance.graph.node_count(), options.restarts, options.seed);
    report.restarts.resize(starts.size());
    const auto count = static_cast<std::int64_t>(starts.size());
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic, 1) if (options.parallel)
    for (std::int64_t i = 0; i < count; ++i) {
        if (failed.load()) continue;
        try {
            ClimbTrace t = local_search(instance, metric, sph(instance, starts[i]), deadline);
            t.start = starts[i];
            report.restarts[i] = std::move(t);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
            failed = true;
        }
    }
    if (failure) std::rethrow_exception(failure);
    for (std::size_t i = 1; i < report.restarts.size(); ++i)
        if (report.restarts[i].tree.cost < report.restarts[report.best_restart].tree.cost) report.best_restart = i;
    report.tree = to_steiner_tree(report.restarts[report.best_restart].tree);
    return report;
}

}  // namespace steiner::ls
