#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "steiner/graph.hpp"

namespace steiner {

struct SteinerInstance {
    Graph graph;
    /// Sorted, unique terminal ids.
    std::vector<NodeId> terminals;
    std::string name;
    std::optional<Cost> best_known;

    bool is_terminal(NodeId n) const;
    std::vector<bool> terminal_mask() const;
};

/// Builds an instance, checking terminals and trimming the graph to the
/// connected component that holds them (node ids are renumbered in order).
/// Throws GraphError if the terminals are spread over several components.
SteinerInstance make_instance(NodeId node_count, std::span<const Edge> edges,
                              std::vector<NodeId> terminals, std::string name = {});

/// An edge set of the instance graph plus its re-summed cost.
struct SteinerTree {
    std::vector<Edge> edges;
    Cost cost = 0;
};

SteinerTree make_tree(std::vector<Edge> edges);

/// Repeatedly removes non-terminal leaves.
SteinerTree prune_leaves(const SteinerTree& tree, const std::vector<bool>& is_terminal);

/// MST of the subgraph formed by `edges`, followed by leaf pruning.
SteinerTree finalize_tree(std::vector<Edge> edges, const SteinerInstance& instance);

/// Expands each metric edge into graph edges and finalizes the union.
SteinerTree tree_from_metric_edges(const SteinerInstance& instance, const Metric& metric,
                                   std::span<const Edge> metric_edges);

/// Checks that every edge exists with its graph weight, the edge set is
/// acyclic and connected, every terminal is covered and the cost re-sums.
/// Returns a diagnostic on failure.
std::optional<std::string> validate_tree(const SteinerInstance& instance, const SteinerTree& tree);

class Timeout : public std::runtime_error {
  public:
    Timeout() : std::runtime_error("deadline exceeded") {}
};

/// Cooperative wall-clock limit polled by solvers at loop boundaries.
class Deadline {
  public:
    using Clock = std::chrono::steady_clock;

    Deadline() = default;
    explicit Deadline(std::chrono::duration<double> budget)
        : end_(Clock::now() + std::chrono::duration_cast<Clock::duration>(budget)) {}

    static Deadline never() { return {}; }

    bool expired() const { return end_ && Clock::now() >= *end_; }
    void check() const {
        if (expired()) throw Timeout();
    }

  private:
    std::optional<Clock::time_point> end_;
};

}  // namespace steiner
