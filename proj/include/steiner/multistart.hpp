#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "steiner/graph.hpp"
#include "steiner/instance.hpp"

namespace steiner::ls {

/// Tree over original graph edges together with its node set.
struct LsTree {
    /// Sorted; a lone terminal when there are no edges.
    std::vector<NodeId> nodes;
    /// Canonical edges sorted by (u, v).
    std::vector<Edge> edges;
    Cost cost = 0;

    bool contains(NodeId v) const;
};

LsTree make_ls_tree(const SteinerInstance& instance, std::vector<Edge> edges);
/// Removes non-terminal leaves.
LsTree pruned(const SteinerInstance& instance, const LsTree& tree);
SteinerTree to_steiner_tree(const LsTree& tree);

/// Non-terminal nodes of tree degree at least three.
std::vector<NodeId> key_nodes(const SteinerInstance& instance, const LsTree& tree);

/// Maximal tree path whose interior nodes are degree-2 non-terminals.
struct KeyPath {
    std::vector<NodeId> nodes;  // first and last are crucial
    Cost cost = 0;
};
std::vector<KeyPath> key_paths(const SteinerInstance& instance, const LsTree& tree);

/// Returns a diagnostic if the tree is not connected, misses a terminal,
/// mis-sums its cost, or its key paths do not partition the edge set.
std::optional<std::string> check_ls_tree(const SteinerInstance& instance, const LsTree& tree);

/// Shortest Path Heuristic from `start`: repeatedly attach the terminal
/// nearest to the tree along a shortest path, ties to the lowest id; the
/// result is leaf-pruned.
LsTree sph(const SteinerInstance& instance, NodeId start);

enum class MoveFamily { insert_steiner, key_path_exchange, key_vertex_elimination };

const char* to_string(MoveFamily family);

struct LsMove {
    MoveFamily family = MoveFamily::insert_steiner;
    std::int64_t gain = 0;
    /// Inserted or eliminated node, or the first node of the replaced key path.
    NodeId vertex = kNoNode;
    /// Tree after the move (leaf-pruned).
    LsTree result;
};

/// Best positive gain cost(tree) - MST(G[tree + v]) over v outside the tree.
std::optional<LsMove> move_insert_steiner(const SteinerInstance& instance, const LsTree& tree);
/// Best positive gain of replacing one key path by the shortest path between
/// the two parts its removal leaves.
std::optional<LsMove> move_key_path_exchange(const SteinerInstance& instance, const LsTree& tree);
/// Best positive gain MST*(K + T) - MST*(K + T - v) over key nodes v.
std::optional<LsMove> move_key_vertex_elimination(const SteinerInstance& instance, const Metric& metric,
                                                  const LsTree& tree);

struct ClimbTrace {
    NodeId start = kNoNode;
    Cost seed_cost = 0;
    /// Tree cost after each committed move.
    std::vector<Cost> costs;
    std::vector<MoveFamily> families;
    LsTree tree;
};

/// Hill climbing cycling insertion, key-path exchange and key-vertex
/// elimination, each family offering its best move, the first family with
/// an improving move winning.
ClimbTrace local_search(const SteinerInstance& instance, const Metric& metric, LsTree seed,
                        const Deadline& deadline = Deadline::never());

struct MultistartOptions {
    int restarts = 100;
    std::uint64_t seed = 0;
    bool parallel = true;
};

struct MultistartReport {
    SteinerTree tree;
    /// Restart with the cheapest tree (lowest index on ties).
    std::size_t best_restart = 0;
    std::vector<ClimbTrace> restarts;
};

/// Start nodes are drawn without replacement until every node was used,
/// then with replacement. Restarts run independently; the result does not
/// depend on `parallel`.
MultistartReport multistart_detailed(const SteinerInstance& instance, const MultistartOptions& options,
                                     const Deadline& deadline = Deadline::never());

inline SteinerTree multistart(const SteinerInstance& instance, int restarts, std::uint64_t seed,
                              const Deadline& deadline = Deadline::never()) {
    return multistart_detailed(instance, {restarts, seed, true}, deadline).tree;
}

/// Start node sequence used by multistart_detailed.
std::vector<NodeId> start_nodes(NodeId node_count, int restarts, std::uint64_t seed);

}  // namespace steiner::ls
