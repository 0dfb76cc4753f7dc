#include "steiner/graph.hpp"

#include <algorithm>
#include <queue>
#include <tuple>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace steiner {

Graph::Graph(NodeId node_count, std::span<const Edge> edges) : node_count_(node_count) {
    if (node_count < 0) throw GraphError("negative node count");
    std::vector<Edge> canon;
    canon.reserve(edges.size());
    for (const Edge& e : edges) {
        if (!valid(e.u) || !valid(e.v))
            throw GraphError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                             ") references a node outside [0, " + std::to_string(node_count) + ")");
        if (e.u == e.v) throw GraphError("self-loop at node " + std::to_string(e.u));
        if (e.weight < 0) throw GraphError("negative edge weight");
        canon.push_back(canonical(e));
    }
    std::sort(canon.begin(), canon.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.u, a.v, a.weight) < std::tie(b.u, b.v, b.weight);
    });
    for (const Edge& e : canon) {
        if (!edges_.empty() && edges_.back().u == e.u && edges_.back().v == e.v) continue;
        edges_.push_back(e);
    }

    std::vector<std::size_t> degree(static_cast<std::size_t>(node_count_) + 1, 0);
    for (const Edge& e : edges_) {
        ++degree[e.u];
        ++degree[e.v];
    }
    offsets_.assign(static_cast<std::size_t>(node_count_) + 1, 0);
    for (NodeId n = 0; n < node_count_; ++n) offsets_[n + 1] = offsets_[n] + degree[n];
    arcs_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const Edge& e : edges_) {
        arcs_[fill[e.u]++] = {e.v, e.weight};
        arcs_[fill[e.v]++] = {e.u, e.weight};
    }
}

Cost Graph::weight(NodeId u, NodeId v) const {
    for (const Arc& a : neighbours(u))
        if (a.to == v) return a.weight;
    return kInfCost;
}

ShortestPaths multi_source_dijkstra(const Graph& graph, std::span<const NodeId> sources) {
    if (sources.empty()) throw GraphError("multi_source_dijkstra: empty source set");
    const auto n = static_cast<std::size_t>(graph.node_count());
    ShortestPaths sp{std::vector<Cost>(n, kInfCost), std::vector<NodeId>(n, kNoNode),
                     std::vector<NodeId>(n, kNoNode)};

    // (dist, nearest source, node): lexicographic keys give lowest-id ties.
    using Key = std::tuple<Cost, NodeId, NodeId>;
    std::priority_queue<Key, std::vector<Key>, std::greater<>> heap;
    for (NodeId s : sources) {
        if (!graph.valid(s)) throw GraphError("multi_source_dijkstra: invalid source");
        if (sp.nearest[s] == kNoNode || s < sp.nearest[s]) {
            sp.dist[s] = 0;
            sp.nearest[s] = s;
            heap.emplace(0, s, s);
        }
    }
    while (!heap.empty()) {
        auto [d, src, u] = heap.top();
        heap.pop();
        if (d != sp.dist[u] || src != sp.nearest[u]) continue;
        for (const Arc& a : graph.neighbours(u)) {
            const Cost nd = d + a.weight;
            if (nd < sp.dist[a.to] || (nd == sp.dist[a.to] && src < sp.nearest[a.to])) {
                sp.dist[a.to] = nd;
                sp.nearest[a.to] = src;
                sp.pred[a.to] = u;
                heap.emplace(nd, src, a.to);
            }
        }
    }
    return sp;
}

void dijkstra_row(const Graph& graph, NodeId source, const std::vector<bool>* blocked, Cost* dist,
                  NodeId* pred) {
    const NodeId n = graph.node_count();
    std::fill(dist, dist + n, kInfCost);
    std::fill(pred, pred + n, kNoNode);
    using Key = std::pair<Cost, NodeId>;
    std::priority_queue<Key, std::vector<Key>, std::greater<>> heap;
    dist[source] = 0;
    heap.emplace(0, source);
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d != dist[u]) continue;
        if (blocked && u != source && (*blocked)[u]) continue;
        for (const Arc& a : graph.neighbours(u)) {
            const Cost nd = d + a.weight;
            if (nd < dist[a.to]) {
                dist[a.to] = nd;
                pred[a.to] = u;
                heap.emplace(nd, a.to);
            }
        }
    }
}

namespace {

void check_connected(const Metric& metric) {
    for (NodeId v = 0; v < metric.size(); ++v)
        if (metric.dist(0, v) == kInfCost)
            throw GraphError("graph is disconnected: nodes 0 and " + std::to_string(v) +
                             " are mutually unreachable");
}

Metric closure_impl(const Graph& graph, const std::vector<bool>* blocked, bool parallel) {
    const NodeId n = graph.node_count();
    Metric metric(n);
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
    for (NodeId s = 0; s < n; ++s) dijkstra_row(graph, s, blocked, metric.dist_row(s), metric.pred_row(s));
    return metric;
}

}  // namespace

Metric metric_closure(const Graph& graph) {
    Metric m = closure_impl(graph, nullptr, true);
    check_connected(m);
    return m;
}

Metric metric_closure_serial(const Graph& graph) {
    Metric m = closure_impl(graph, nullptr, false);
    check_connected(m);
    return m;
}

Metric restricted_closure(const Graph& graph, const std::vector<bool>& blocked) {
    return closure_impl(graph, &blocked, true);
}

Metric restricted_closure_serial(const Graph& graph, const std::vector<bool>& blocked) {
    return closure_impl(graph, &blocked, false);
}

std::vector<NodeId> expand_metric_edge(const Metric& metric, NodeId u, NodeId v) {
    if (u < 0 || v < 0 || u >= metric.size() || v >= metric.size())
        throw GraphError("expand_metric_edge: invalid node id");
    if (u != v && metric.dist(u, v) == kInfCost) throw GraphError("expand_metric_edge: no path");
    std::vector<NodeId> path{v};
    for (NodeId x = v; x != u;) {
        x = metric.pred(u, x);
        path.push_back(x);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

TreeEdges mst_of_edges(std::vector<Edge> edges) {
    std::sort(edges.begin(), edges.end(), edge_key_less);
    NodeId max_id = -1;
    for (const Edge& e : edges) max_id = std::max({max_id, e.u, e.v});
    DisjointSets sets(static_cast<std::size_t>(max_id + 1));
    TreeEdges tree;
    for (const Edge& e : edges) {
        if (sets.unite_into(e.u, e.v)) {
            tree.edges.push_back(canonical(e));
            tree.cost += e.weight;
        }
    }
    return tree;
}

namespace {

void check_spanning(const TreeEdges& tree, std::size_t node_count) {
    if (tree.edges.size() + 1 != node_count)
        throw GraphError("mst: induced subgraph on the requested nodes is disconnected");
}

}  // namespace

TreeEdges mst(const Metric& metric, std::span<const NodeId> nodes) {
    if (nodes.empty()) throw GraphError("mst: empty node set");
    std::vector<Edge> candidates;
    candidates.reserve(nodes.size() * (nodes.size() - 1) / 2);
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            const Cost d = metric.dist(nodes[i], nodes[j]);
            if (d != kInfCost) candidates.push_back(canonical({nodes[i], nodes[j], d}));
        }
    TreeEdges tree = mst_of_edges(std::move(candidates));
    check_spanning(tree, nodes.size());
    return tree;
}

TreeEdges mst(const Graph& graph, std::span<const NodeId> nodes) {
    if (nodes.empty()) throw GraphError("mst: empty node set");
    std::vector<bool> inside(static_cast<std::size_t>(graph.node_count()), false);
    for (NodeId n : nodes) inside[n] = true;
    std::vector<Edge> candidates;
    for (const Edge& e : graph.edges())
        if (inside[e.u] && inside[e.v]) candidates.push_back(e);
    TreeEdges tree = mst_of_edges(std::move(candidates));
    check_spanning(tree, nodes.size());
    return tree;
}

VoronoiPartition voronoi_regions(const Graph& graph, std::span<const NodeId> terminals) {
    if (terminals.empty()) throw GraphError("voronoi_regions: empty terminal set");
    ShortestPaths sp = multi_source_dijkstra(graph, terminals);
    return {std::move(sp.nearest), std::move(sp.dist), std::move(sp.pred)};
}

namespace {

constexpr double kResidualEps = 1e-12;

class Dinic {
  public:
    explicit Dinic(const Digraph& g) : adj_(static_cast<std::size_t>(g.node_count)) {
        for (const auto& a : g.arcs) {
            adj_[a.from].push_back(edges_.size());
            edges_.push_back({a.to, a.capacity});
            adj_[a.to].push_back(edges_.size());
            edges_.push_back({a.from, 0.0});
        }
    }

    double run(int s, int t) {
        double flow = 0.0;
        while (bfs(s, t)) {
            iter_.assign(adj_.size(), 0);
            while (true) {
                const double pushed = dfs(s, t, kInfCapacity);
                if (pushed <= kResidualEps) break;
                if (pushed == kInfCapacity) return kInfCapacity;
                flow += pushed;
            }
        }
        return flow;
    }

    std::vector<int> reachable(int s) const {
        std::vector<bool> seen(adj_.size(), false);
        std::vector<int> stack{s}, out;
        seen[s] = true;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            out.push_back(u);
            for (std::size_t id : adj_[u]) {
                const auto& e = edges_[id];
                if (e.residual > kResidualEps && !seen[e.to]) {
                    seen[e.to] = true;
                    stack.push_back(e.to);
                }
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

  private:
    struct ResidualArc {
        int to;
        double residual;
    };

    bool bfs(int s, int t) {
        level_.assign(adj_.size(), -1);
        std::queue<int> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (std::size_t id : adj_[u]) {
                const auto& e = edges_[id];
                if (e.residual > kResidualEps && level_[e.to] < 0) {
                    level_[e.to] = level_[u] + 1;
                    q.push(e.to);
                }
            }
        }
        return level_[t] >= 0;
    }

    double dfs(int u, int t, double limit) {
        if (u == t) return limit;
        for (std::size_t& i = iter_[u]; i < adj_[u].size(); ++i) {
            const std::size_t id = adj_[u][i];
            auto& e = edges_[id];
            if (e.residual <= kResidualEps || level_[e.to] != level_[u] + 1) continue;
            const double got = dfs(e.to, t, std::min(limit, e.residual));
            if (got > kResidualEps) {
                if (got != kInfCapacity) {
                    e.residual -= got;
                    edges_[id ^ 1].residual += got;
                }
                return got;
            }
        }
        return 0.0;
    }

    std::vector<std::vector<std::size_t>> adj_;
    std::vector<ResidualArc> edges_;
    std::vector<int> level_;
    std::vector<std::size_t> iter_;
};

}  // namespace

CutResult min_st_cut(const Digraph& graph, int s, int t) {
    if (s == t) throw GraphError("min_st_cut: source equals sink");
    if (s < 0 || t < 0 || s >= graph.node_count || t >= graph.node_count)
        throw GraphError("min_st_cut: invalid terminal node");
    for (const auto& a : graph.arcs)
        if (!(a.capacity >= 0.0)) throw GraphError("min_st_cut: negative capacity");
    Dinic dinic(graph);
    CutResult result;
    result.value = dinic.run(s, t);
    result.source_side = dinic.reachable(s);
    return result;
}

}  // namespace steiner
