#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include "steiner/graph.hpp"
#include "steiner/instance.hpp"
#include "steiner/lp.hpp"

namespace steiner::ir {

/// Optimal Steiner tree on a small set of active terminals, oriented towards
/// one of them (the sink). Variants of one subset share cost and tree.
struct DirectedComponent {
    /// Sorted active terminal ids.
    std::vector<NodeId> terminals;
    NodeId sink = kNoNode;
    Cost cost = 0;
    /// Edges of the underlying tree in the original graph.
    std::vector<Edge> tree;

    std::vector<NodeId> sources() const;
    bool has_source(NodeId t) const { return t != sink && contains(t); }
    bool contains(NodeId t) const;
};

struct ComponentSet {
    int k = 0;
    std::vector<DirectedComponent> components;
    /// Subsets for which a tree was computed (before sink expansion).
    std::size_t subset_count = 0;
    /// Subsets skipped by the reachability filter.
    std::size_t pruned_count = 0;
};

/// For each terminal, the terminals reachable along paths whose internal
/// nodes are all non-terminals.
class ReachabilityTable {
  public:
    ReachabilityTable() = default;
    ReachabilityTable(const Graph& graph, std::vector<NodeId> terminals);

    const std::vector<NodeId>& terminals() const { return terminals_; }
    bool reachable(NodeId a, NodeId b) const;
    /// Every pair of `subset` reachable.
    bool admits(std::span<const NodeId> subset) const;
    /// `from` joins `into`: into reaches everything either reached.
    void merge(NodeId into, NodeId from);

    friend bool operator==(const ReachabilityTable&, const ReachabilityTable&) = default;

  private:
    int index(NodeId t) const;

    std::vector<NodeId> terminals_;
    std::vector<int> index_;  // node -> terminal index, -1 for non-terminals
    std::vector<std::uint8_t> bits_;
};

ReachabilityTable nonterminal_connectivity_preprocess(const Graph& graph, std::span<const NodeId> terminals);

/// Graph after contraction: merged terminals are identified with their
/// super-terminal, original terminals outside the active set are isolated.
struct ContractedGraph {
    Graph graph;
    /// Original edge behind each contracted edge, keyed by u * n + v (u < v).
    std::unordered_map<std::uint64_t, Edge> origin;

    Edge original(NodeId u, NodeId v) const;
};

class ContractionState {
  public:
    explicit ContractionState(const SteinerInstance& instance);

    const SteinerInstance& instance() const { return *instance_; }
    /// Sorted active super-terminals.
    const std::vector<NodeId>& active() const { return active_; }
    bool is_active(NodeId t) const;
    /// Lowest active terminal.
    NodeId root() const { return active_.front(); }
    NodeId representative(NodeId terminal) const;

    /// Distances between nodes with every merged group shrunk to a point.
    /// Only distances are maintained.
    const Metric& metric() const { return metric_; }
    const ReachabilityTable& reachability() const { return reachability_; }
    /// Union of the trees of every contracted component.
    const std::vector<Edge>& accumulated() const { return accumulated_; }

    ContractedGraph contracted_graph() const;

    /// Merges the sources of `c` into its sink.
    void contract(const DirectedComponent& c);

  private:
    const SteinerInstance* instance_;
    std::vector<NodeId> rep_;  // node -> super-terminal (terminals only)
    std::vector<NodeId> active_;
    Metric metric_;
    ReachabilityTable reachability_;
    std::vector<Edge> accumulated_;
};

ContractionState contract_component(ContractionState state, const DirectedComponent& c);

struct GenerationOptions {
    int k = 3;
    /// One Dreyfus-Wagner state cache for the whole phase instead of one per subset.
    bool shared_cache = true;
    /// Skip subsets containing a pair not linked through non-terminals.
    bool pruning = true;
    bool parallel = true;
};

/// All components on 2..k active terminals, each an optimal tree that avoids
/// the other active terminals, expanded into one variant per sink.
ComponentSet generate_components(const ContractionState& state, const GenerationOptions& options,
                                 const Deadline& deadline = Deadline::never());

/// Row of the cut U: components with a source in U and the sink outside.
lp::Row cut_row(const ComponentSet& components, std::span<const NodeId> cut);

/// min sum c(C) x_C with one singleton cut row per non-root active terminal.
lp::LpProblem build_k_dcr_lp(const ComponentSet& components, NodeId root, std::span<const NodeId> active);

inline constexpr double kViolationTol = 1e-7;

struct Violation {
    /// Terminal side of the cut, sorted.
    std::vector<NodeId> cut;
    double value = 0.0;
    lp::Row row;
};

/// Checks the cut constraints through min cuts from each terminal of
/// `order` (in that order) to the root; reports the first one below 1.
std::optional<Violation> separation_oracle(std::span<const double> x, const ComponentSet& components,
                                           NodeId root, std::span<const NodeId> order);

using SeparationOracle = std::function<std::optional<lp::Row>(std::span<const double>, std::mt19937_64&)>;

/// Oracle over the non-root active terminals in a fresh random order per call.
SeparationOracle make_oracle(const ComponentSet& components, NodeId root, std::vector<NodeId> active);

struct RowGenerationResult {
    lp::LpSolution solution;
    int generated_rows = 0;
};

/// Solve, ask the oracle, add its row, resolve, until the oracle is satisfied.
/// Returns the last LP solution when it is not optimal.
RowGenerationResult row_generation_solve(lp::LpProblem& problem, const SeparationOracle& oracle,
                                         std::mt19937_64& rng, lp::LpSolver& solver, int max_rows = 10000,
                                         const Deadline& deadline = Deadline::never());

/// Index drawn with probability x_i / sum(x).
std::size_t sample_component(std::span<const double> x, std::mt19937_64& rng);

struct PhaseReport {
    int phase = 0;
    const ContractionState* state = nullptr;
    const ComponentSet* components = nullptr;
    double lp_objective = 0.0;
    int generated_rows = 0;
    std::size_t chosen = 0;
    double generation_seconds = 0.0;
};

struct IrOptions {
    int k = 3;
    std::uint64_t seed = 0;
    bool shared_cache = true;
    bool pruning = true;
    bool parallel = true;
    int max_rows = 10000;
    /// Defaults to the bundled simplex.
    lp::LpSolver* solver = nullptr;
    /// Called after each phase's LP is solved, before contraction.
    std::function<void(const PhaseReport&)> observer;
};

struct IrReport {
    SteinerTree tree;
    int phases = 0;
    std::vector<double> lp_objectives;
    double generation_seconds = 0.0;
};

IrReport ir_steiner_detailed(const SteinerInstance& instance, const IrOptions& options,
                             const Deadline& deadline = Deadline::never());

inline SteinerTree ir_steiner(const SteinerInstance& instance, int k, std::uint64_t seed,
                              const Deadline& deadline = Deadline::never()) {
    IrOptions options;
    options.k = k;
    options.seed = seed;
    return ir_steiner_detailed(instance, options, deadline).tree;
}

}  // namespace steiner::ir
