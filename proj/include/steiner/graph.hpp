#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace steiner {

using NodeId = std::int32_t;
using Cost = std::int64_t;

inline constexpr Cost kInfCost = std::numeric_limits<Cost>::max();
inline constexpr NodeId kNoNode = -1;

/// Saturating addition so that kInfCost absorbs everything.
inline Cost add_cost(Cost a, Cost b) {
    if (a == kInfCost || b == kInfCost) return kInfCost;
    return a + b;
}

struct Edge {
    NodeId u = 0;
    NodeId v = 0;
    Cost weight = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Canonical orientation (u < v).
inline Edge canonical(Edge e) {
    if (e.u > e.v) std::swap(e.u, e.v);
    return e;
}

/// Lexicographic (weight, min endpoint, max endpoint) order used for every MST tie-break.
inline bool edge_key_less(const Edge& a, const Edge& b) {
    const Edge ca = canonical(a), cb = canonical(b);
    if (ca.weight != cb.weight) return ca.weight < cb.weight;
    if (ca.u != cb.u) return ca.u < cb.u;
    return ca.v < cb.v;
}

class GraphError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Arc {
    NodeId to;
    Cost weight;
};

/// Undirected graph with non-negative integer weights. Parallel edges are
/// collapsed to the minimum weight on construction; self-loops are rejected.
class Graph {
  public:
    Graph() = default;
    Graph(NodeId node_count, std::span<const Edge> edges);

    NodeId node_count() const { return node_count_; }
    std::size_t edge_count() const { return edges_.size(); }

    /// Canonical edges (u < v), sorted by (u, v).
    const std::vector<Edge>& edges() const { return edges_; }

    std::span<const Arc> neighbours(NodeId n) const {
        return {arcs_.data() + offsets_[n], arcs_.data() + offsets_[n + 1]};
    }

    /// Weight of edge {u, v}, or kInfCost when absent.
    Cost weight(NodeId u, NodeId v) const;

    bool valid(NodeId n) const { return n >= 0 && n < node_count_; }

  private:
    NodeId node_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<Arc> arcs_;
};

/// All-pairs shortest paths. `pred(u, v)` is the node preceding v on the
/// stored shortest u-v path (kNoNode for u == v or unreachable v), which is
/// enough to expand any metric edge back into graph edges.
class Metric {
  public:
    Metric() = default;
    explicit Metric(NodeId n)
        : n_(n), dist_(static_cast<std::size_t>(n) * n, kInfCost),
          pred_(static_cast<std::size_t>(n) * n, kNoNode) {}

    NodeId size() const { return n_; }
    Cost dist(NodeId u, NodeId v) const { return dist_[index(u, v)]; }
    NodeId pred(NodeId u, NodeId v) const { return pred_[index(u, v)]; }

    const Cost* dist_row(NodeId u) const { return dist_.data() + index(u, 0); }
    Cost* dist_row(NodeId u) { return dist_.data() + index(u, 0); }
    NodeId* pred_row(NodeId u) { return pred_.data() + index(u, 0); }
    void set_dist(NodeId u, NodeId v, Cost d) { dist_[index(u, v)] = d; }
    void set_pred(NodeId u, NodeId v, NodeId p) { pred_[index(u, v)] = p; }

    friend bool operator==(const Metric&, const Metric&) = default;

  private:
    std::size_t index(NodeId u, NodeId v) const {
        return static_cast<std::size_t>(u) * n_ + static_cast<std::size_t>(v);
    }

    NodeId n_ = 0;
    std::vector<Cost> dist_;
    std::vector<NodeId> pred_;
};

struct ShortestPaths {
    std::vector<Cost> dist;
    std::vector<NodeId> nearest;
    std::vector<NodeId> pred;
};

/// One Dijkstra run seeded with every source at distance 0. Ties on distance
/// go to the lowest source id; unreachable nodes keep kInfCost / kNoNode.
ShortestPaths multi_source_dijkstra(const Graph& graph, std::span<const NodeId> sources);

/// Single-source Dijkstra in which nodes flagged in `blocked` (other than the
/// source itself) may be reached but are never expanded. Fills one metric row.
void dijkstra_row(const Graph& graph, NodeId source, const std::vector<bool>* blocked,
                  Cost* dist, NodeId* pred);

/// Full metric closure; throws GraphError naming two mutually unreachable
/// nodes when the graph is disconnected.
Metric metric_closure(const Graph& graph);
Metric metric_closure_serial(const Graph& graph);

/// Shortest paths whose internal nodes are all unblocked. Unlike
/// metric_closure, disconnection is allowed (distances stay kInfCost).
Metric restricted_closure(const Graph& graph, const std::vector<bool>& blocked);
Metric restricted_closure_serial(const Graph& graph, const std::vector<bool>& blocked);

/// Node sequence u .. v along the stored shortest path.
std::vector<NodeId> expand_metric_edge(const Metric& metric, NodeId u, NodeId v);

struct TreeEdges {
    std::vector<Edge> edges;
    Cost cost = 0;
};

/// Kruskal over the metric restricted to `nodes`.
TreeEdges mst(const Metric& metric, std::span<const NodeId> nodes);
/// Kruskal over the subgraph of `graph` induced by `nodes`.
TreeEdges mst(const Graph& graph, std::span<const NodeId> nodes);
/// Kruskal over an explicit edge list (spanning forest of its endpoints).
TreeEdges mst_of_edges(std::vector<Edge> edges);

struct VoronoiPartition {
    std::vector<NodeId> owner;
    std::vector<Cost> dist_to_owner;
    std::vector<NodeId> pred;
};

VoronoiPartition voronoi_regions(const Graph& graph, std::span<const NodeId> terminals);

/// Directed capacitated graph used for the separation oracle. Capacities may
/// be +infinity (std::numeric_limits<double>::infinity()).
struct Digraph {
    struct Arc {
        int from;
        int to;
        double capacity;
    };
    int node_count = 0;
    std::vector<Arc> arcs;

    int add_node() { return node_count++; }
    void add_arc(int from, int to, double capacity) { arcs.push_back({from, to, capacity}); }
};

inline constexpr double kInfCapacity = std::numeric_limits<double>::infinity();

struct CutResult {
    double value = 0.0;
    /// Nodes reachable from s in the final residual graph.
    std::vector<int> source_side;
};

/// Minimum s-t cut by Dinic's max-flow.
CutResult min_st_cut(const Digraph& graph, int s, int t);

/// Tiny union-find with path halving.
class DisjointSets {
  public:
    explicit DisjointSets(std::size_t n) : parent_(n) {
        for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<NodeId>(i);
    }
    NodeId find(NodeId x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    /// Attaches b's set under a's representative. Returns false if already joined.
    bool unite_into(NodeId a, NodeId b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[b] = a;
        return true;
    }

  private:
    std::vector<NodeId> parent_;
};

}  // namespace steiner
