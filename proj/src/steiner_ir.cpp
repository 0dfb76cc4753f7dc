#include "steiner/steiner_ir.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <numeric>
#include <string>

#include <spdlog/spdlog.h>

#include "steiner/dreyfus_wagner.hpp"
#include "steiner/iterative_rounding.hpp"

namespace steiner::ir {

std::vector<NodeId> DirectedComponent::sources() const {
    std::vector<NodeId> out;
    for (NodeId t : terminals)
        if (t != sink) out.push_back(t);
    return out;
}

bool DirectedComponent::contains(NodeId t) const {
    return std::binary_search(terminals.begin(), terminals.end(), t);
}

// ---------------------------------------------------------------- reachability

ReachabilityTable::ReachabilityTable(const Graph& graph, std::vector<NodeId> terminals)
    : terminals_(std::move(terminals)), index_(static_cast<std::size_t>(graph.node_count()), -1) {
    std::sort(terminals_.begin(), terminals_.end());
    const std::size_t t = terminals_.size();
    for (std::size_t i = 0; i < t; ++i) index_[terminals_[i]] = static_cast<int>(i);
    bits_.assign(t * t, 0);
    std::vector<int> seen(static_cast<std::size_t>(graph.node_count()), -1);
    std::deque<NodeId> queue;
    for (std::size_t i = 0; i < t; ++i) {
        const NodeId start = terminals_[i];
        seen[start] = static_cast<int>(i);
        queue.assign(1, start);
        while (!queue.empty()) {
            const NodeId u = queue.front();
            queue.pop_front();
            for (const Arc& a : graph.neighbours(u)) {
                if (seen[a.to] == static_cast<int>(i)) continue;
                seen[a.to] = static_cast<int>(i);
                if (index_[a.to] >= 0)
                    bits_[i * t + index_[a.to]] = 1;
                else
                    queue.push_back(a.to);
            }
        }
    }
}

int ReachabilityTable::index(NodeId t) const {
    if (t < 0 || static_cast<std::size_t>(t) >= index_.size() || index_[t] < 0)
        throw IrError("not a terminal: " + std::to_string(t));
    return index_[t];
}

bool ReachabilityTable::reachable(NodeId a, NodeId b) const {
    return bits_[static_cast<std::size_t>(index(a)) * terminals_.size() + index(b)] != 0;
}

bool ReachabilityTable::admits(std::span<const NodeId> subset) const {
    for (std::size_t i = 0; i < subset.size(); ++i)
        for (std::size_t j = i + 1; j < subset.size(); ++j)
            if (!reachable(subset[i], subset[j])) return false;
    return true;
}

void ReachabilityTable::merge(NodeId into, NodeId from) {
    const std::size_t t = terminals_.size();
    const std::size_t a = index(into), b = index(from);
    for (std::size_t j = 0; j < t; ++j) {
        bits_[a * t + j] |= bits_[b * t + j];
        bits_[j * t + a] |= bits_[j * t + b];
        bits_[b * t + j] = 0;
        bits_[j * t + b] = 0;
    }
    bits_[a * t + a] = 0;
}

ReachabilityTable nonterminal_connectivity_preprocess(const Graph& graph, std::span<const NodeId> terminals) {
    return ReachabilityTable(graph, std::vector<NodeId>(terminals.begin(), terminals.end()));
}

// ---------------------------------------------------------------- contraction

Edge ContractedGraph::original(NodeId u, NodeId v) const {
    if (u > v) std::swap(u, v);
    const auto n = static_cast<std::uint64_t>(graph.node_count());
    auto it = origin.find(static_cast<std::uint64_t>(u) * n + static_cast<std::uint64_t>(v));
    if (it == origin.end()) throw IrError("no contracted edge between " + std::to_string(u) + " and " + std::to_string(v));
    return it->second;
}

ContractionState::ContractionState(const SteinerInstance& instance)
    : instance_(&instance), rep_(static_cast<std::size_t>(instance.graph.node_count())),
      active_(instance.terminals), metric_(metric_closure(instance.graph)),
      reachability_(instance.graph, instance.terminals) {
    std::iota(rep_.begin(), rep_.end(), 0);
}

bool ContractionState::is_active(NodeId t) const {
    return std::binary_search(active_.begin(), active_.end(), t);
}

NodeId ContractionState::representative(NodeId terminal) const {
    if (!instance_->graph.valid(terminal)) throw IrError("invalid node " + std::to_string(terminal));
    return rep_[terminal];
}

ContractedGraph ContractionState::contracted_graph() const {
    const NodeId n = instance_->graph.node_count();
    ContractedGraph out;
    for (const Edge& e : instance_->graph.edges()) {
        NodeId a = rep_[e.u], b = rep_[e.v];
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        const std::uint64_t key = static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(n) + b;
        auto [it, inserted] = out.origin.try_emplace(key, e);
        if (!inserted && e.weight < it->second.weight) it->second = e;
    }
    std::vector<Edge> edges;
    edges.reserve(out.origin.size());
    for (const auto& [key, e] : out.origin) {
        edges.push_back({static_cast<NodeId>(key / static_cast<std::uint64_t>(n)),
                         static_cast<NodeId>(key % static_cast<std::uint64_t>(n)), e.weight});
    }
    out.graph = Graph(n, edges);
    return out;
}

void ContractionState::contract(const DirectedComponent& c) {
    if (c.terminals.size() < 2 || !c.contains(c.sink)) throw IrError("malformed component");
    for (NodeId t : c.terminals)
        if (!is_active(t)) throw IrError("component references inactive terminal " + std::to_string(t));
    const NodeId n = instance_->graph.node_count();
    const NodeId sink = c.sink;
    Cost* srow = metric_.dist_row(sink);
    for (NodeId s : c.sources()) {
        const Cost* row = metric_.dist_row(s);
        for (NodeId v = 0; v < n; ++v) srow[v] = std::min(srow[v], row[v]);
        for (NodeId v = 0; v < n; ++v)
            if (rep_[v] == s) rep_[v] = sink;
        reachability_.merge(sink, s);
    }
    srow[sink] = 0;
    for (NodeId v = 0; v < n; ++v) metric_.set_dist(v, sink, srow[v]);
    // shortest paths may now pass through the shrunk group
    for (NodeId a = 0; a < n; ++a) {
        const Cost da = metric_.dist(a, sink);
        if (da == kInfCost) continue;
        Cost* row = metric_.dist_row(a);
        for (NodeId b = 0; b < n; ++b) row[b] = std::min(row[b], add_cost(da, srow[b]));
    }
    for (NodeId m = 0; m < n; ++m) {
        if (m == sink || rep_[m] != sink) continue;
        for (NodeId v = 0; v < n; ++v) {
            metric_.set_dist(m, v, metric_.dist(sink, v));
            metric_.set_dist(v, m, metric_.dist(v, sink));
        }
        metric_.set_dist(m, m, 0);
    }
    std::vector<NodeId> next;
    for (NodeId t : active_)
        if (!c.has_source(t)) next.push_back(t);
    active_ = std::move(next);
    accumulated_.insert(accumulated_.end(), c.tree.begin(), c.tree.end());
}

ContractionState contract_component(ContractionState state, const DirectedComponent& c) {
    state.contract(c);
    return state;
}

// ---------------------------------------------------------------- components

namespace {

void for_each_subset(int n, int size, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> pick(static_cast<std::size_t>(size));
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
        fn(pick);
        int i = size - 1;
        while (i >= 0 && pick[i] == n - size + i) --i;
        if (i < 0) return;
        ++pick[i];
        for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
}

std::vector<Edge> original_tree(const ContractedGraph& cg, const Metric& metric, const std::vector<Edge>& metric_edges) {
    std::vector<Edge> edges;
    for (const Edge& me : metric_edges) {
        const std::vector<NodeId> path = expand_metric_edge(metric, me.u, me.v);
        for (std::size_t i = 0; i + 1 < path.size(); ++i) edges.push_back(canonical(cg.original(path[i], path[i + 1])));
    }
    std::sort(edges.begin(), edges.end(), edge_key_less);
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

}  // namespace

ComponentSet generate_components(const ContractionState& state, const GenerationOptions& options,
                                 const Deadline& deadline) {
    if (options.k < 2) throw IrError("k must be at least 2");
    const auto& active = state.active();
    if (active.size() < 2) throw IrError("component generation needs at least two active terminals");
    if (active.size() > static_cast<std::size_t>(TerminalSet::kCapacity))
        throw IrError("too many active terminals for component generation: " + std::to_string(active.size()) +
                      " (limit " + std::to_string(TerminalSet::kCapacity) + ")");

    const SteinerInstance& inst = state.instance();
    const NodeId n = inst.graph.node_count();
    const ContractedGraph cg = state.contracted_graph();
    std::vector<bool> blocked(static_cast<std::size_t>(n), false);
    for (NodeId t : active) blocked[t] = true;
    const Metric metric = options.parallel ? restricted_closure(cg.graph, blocked)
                                           : restricted_closure_serial(cg.graph, blocked);
    std::vector<bool> branchable(static_cast<std::size_t>(n));
    for (NodeId v = 0; v < n; ++v) branchable[v] = !inst.is_terminal(v);

    ComponentSet out;
    out.k = options.k;
    const int a = static_cast<int>(active.size());
    std::vector<std::vector<int>> subsets;
    std::vector<NodeId> nodes;
    for (int size = 2; size <= std::min(options.k, a); ++size) {
        for_each_subset(a, size, [&](const std::vector<int>& pick) {
            nodes.clear();
            for (int i : pick) nodes.push_back(active[i]);
            if (options.pruning && !state.reachability().admits(nodes)) {
                ++out.pruned_count;
                return;
            }
            subsets.push_back(pick);
        });
    }

    auto rest_of = [](const std::vector<int>& pick) {
        TerminalSet x;
        for (std::size_t i = 1; i < pick.size(); ++i) x.insert(pick[i]);
        return x;
    };

    std::unique_ptr<DreyfusWagner> shared;
    if (options.shared_cache) {
        shared = std::make_unique<DreyfusWagner>(metric, active, branchable);
        if (options.parallel) {
            std::vector<TerminalSet> targets;
            targets.reserve(subsets.size());
            for (const auto& pick : subsets) targets.push_back(rest_of(pick));
            shared->prepare(targets, deadline);
        }
    }

    for (const auto& pick : subsets) {
        deadline.check();
        std::unique_ptr<DreyfusWagner> fresh;
        if (!shared) fresh = std::make_unique<DreyfusWagner>(metric, active, branchable);
        DreyfusWagner& dw = shared ? *shared : *fresh;
        const TerminalSet x = rest_of(pick);
        const NodeId first = active[pick.front()];
        const Cost cost = dw.c(first, x);
        if (cost == kInfCost) continue;
        ++out.subset_count;
        DirectedComponent base;
        for (int i : pick) base.terminals.push_back(active[i]);
        base.cost = cost;
        base.tree = original_tree(cg, metric, dw.metric_tree(first, x));
        for (NodeId sink : base.terminals) {
            DirectedComponent c = base;
            c.sink = sink;
            out.components.push_back(std::move(c));
        }
    }
    return out;
}

// ---------------------------------------------------------------- LP

lp::Row cut_row(const ComponentSet& components, std::span<const NodeId> cut) {
    auto inside = [&](NodeId t) { return std::find(cut.begin(), cut.end(), t) != cut.end(); };
    lp::Row row;
    row.relation = lp::Relation::ge;
    row.rhs = 1.0;
    for (std::size_t i = 0; i < components.components.size(); ++i) {
        const DirectedComponent& c = components.components[i];
        if (inside(c.sink)) continue;
        for (NodeId t : c.terminals) {
            if (t != c.sink && inside(t)) {
                row.coeffs.emplace_back(static_cast<int>(i), 1.0);
                break;
            }
        }
    }
    return row;
}

lp::LpProblem build_k_dcr_lp(const ComponentSet& components, NodeId root, std::span<const NodeId> active) {
    if (std::find(active.begin(), active.end(), root) == active.end())
        throw IrError("root " + std::to_string(root) + " is not active");
    lp::LpProblem problem;
    for (const DirectedComponent& c : components.components) problem.add_column({static_cast<double>(c.cost)});
    for (NodeId t : active) {
        if (t == root) continue;
        const NodeId cut[] = {t};
        lp::Row row = cut_row(components, cut);
        if (row.coeffs.empty())
            throw IrError("instance infeasible under pruning: no component leaves terminal " + std::to_string(t));
        problem.add_row(std::move(row));
    }
    return problem;
}

std::optional<Violation> separation_oracle(std::span<const double> x, const ComponentSet& components,
                                           NodeId root, std::span<const NodeId> order) {
    const auto& comps = components.components;
    if (x.size() != comps.size()) throw IrError("separation oracle: solution size does not match components");
    std::vector<NodeId> terms(order.begin(), order.end());
    terms.push_back(root);
    for (const auto& c : comps) terms.insert(terms.end(), c.terminals.begin(), c.terminals.end());
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    auto id = [&](NodeId t) {
        return static_cast<int>(std::lower_bound(terms.begin(), terms.end(), t) - terms.begin());
    };

    Digraph g;
    g.node_count = static_cast<int>(terms.size());
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (!(x[i] > 0.0)) continue;
        const int vc = g.add_node();
        g.add_arc(vc, id(comps[i].sink), x[i]);
        for (NodeId s : comps[i].terminals)
            if (s != comps[i].sink) g.add_arc(id(s), vc, kInfCapacity);
    }
    for (NodeId v : order) {
        if (v == root) continue;
        const CutResult cut = min_st_cut(g, id(v), id(root));
        if (cut.value >= 1.0 - kViolationTol) continue;
        Violation out;
        for (int node : cut.source_side)
            if (node < static_cast<int>(terms.size())) out.cut.push_back(terms[node]);
        std::sort(out.cut.begin(), out.cut.end());
        out.row = cut_row(components, out.cut);
        for (auto [j, coef] : out.row.coeffs) out.value += coef * x[j];
        return out;
    }
    return std::nullopt;
}

SeparationOracle make_oracle(const ComponentSet& components, NodeId root, std::vector<NodeId> active) {
    std::vector<NodeId> others;
    for (NodeId t : active)
        if (t != root) others.push_back(t);
    return [&components, root, others](std::span<const double> x, std::mt19937_64& rng) -> std::optional<lp::Row> {
        std::vector<NodeId> order = others;
        std::shuffle(order.begin(), order.end(), rng);
        auto v = separation_oracle(x, components, root, order);
        if (!v) return std::nullopt;
        return std::move(v->row);
    };
}

RowGenerationResult row_generation_solve(lp::LpProblem& problem, const SeparationOracle& oracle,
                                         std::mt19937_64& rng, lp::LpSolver& solver, int max_rows,
                                         const Deadline& deadline) {
    RowGenerationResult out;
    out.solution = solver.solve(problem);
    while (out.solution.status == lp::LpStatus::optimal) {
        deadline.check();
        auto row = oracle(out.solution.values, rng);
        if (!row) break;
        if (out.generated_rows >= max_rows)
            throw IrError("row generation stopped after " + std::to_string(max_rows) + " rows");
        problem.add_row(std::move(*row));
        ++out.generated_rows;
        out.solution = solver.resolve(problem, out.solution.basis);
    }
    return out;
}

std::size_t sample_component(std::span<const double> x, std::mt19937_64& rng) {
    double total = 0.0;
    for (double v : x) total += std::max(v, 0.0);
    if (!(total > 0.0)) throw IrError("cannot sample a component: no positive LP mass");
    const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    double prefix = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0)) continue;
        prefix += x[i];
        last = i;
        if (u < prefix) return i;
    }
    return last;
}

// ---------------------------------------------------------------- driver

namespace {

struct IrState {
    const SteinerInstance* instance = nullptr;
    std::optional<ContractionState> contraction;
    ComponentSet components;
    lp::LpProblem problem;
    std::mt19937_64 rng;
    int phase = 0;
    int generated_rows = 0;
    double generation_seconds = 0.0;
    IrReport report;
};

}  // namespace

IrReport ir_steiner_detailed(const SteinerInstance& instance, const IrOptions& options, const Deadline& deadline) {
    if (options.k < 2) throw IrError("k must be at least 2");
    lp::SimplexSolver default_solver;
    lp::LpSolver& solver = options.solver ? *options.solver : default_solver;
    const GenerationOptions gen{options.k, options.shared_cache, options.pruning, options.parallel};

    IrComponents<IrState, SteinerTree> c;
    c.init = [&](IrState& s) {
        s.instance = &instance;
        s.contraction.emplace(instance);
        s.rng.seed(options.seed);
    };
    c.stop_condition = [](const IrState& s) { return s.contraction->active().size() <= 1; };
    c.solve_lp = [&](IrState& s) {
        ++s.phase;
        try {
            deadline.check();
            const auto start = std::chrono::steady_clock::now();
            s.components = generate_components(*s.contraction, gen, deadline);
            s.generation_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            s.report.generation_seconds += s.generation_seconds;
            const NodeId root = s.contraction->root();
            s.problem = build_k_dcr_lp(s.components, root, s.contraction->active());
            const SeparationOracle oracle = make_oracle(s.components, root, s.contraction->active());
            RowGenerationResult rg = row_generation_solve(s.problem, oracle, s.rng, solver, options.max_rows, deadline);
            s.generated_rows = rg.generated_rows;
            spdlog::debug("ir phase {}: {} active, {} components, {} rows generated, lp {} ({})", s.phase,
                          s.contraction->active().size(), s.components.components.size(), rg.generated_rows,
                          rg.solution.objective, lp::to_string(rg.solution.status));
            return rg.solution;
        } catch (const Timeout&) {
            throw;
        } catch (const IrError& e) {
            throw IrError("phase " + std::to_string(s.phase) + ": " + e.what());
        } catch (const std::exception& e) {
            throw IrError("phase " + std::to_string(s.phase) + ": " + e.what());
        }
    };
    c.resolve_lp = [&](IrState& s, const lp::LpBasis& basis) { return solver.resolve(s.problem, basis); };
    c.dependent_round = [&](IrState& s, const lp::LpSolution& sol) {
        s.report.lp_objectives.push_back(sol.objective);
        std::size_t chosen = 0;
        try {
            chosen = sample_component(sol.values, s.rng);
        } catch (const IrError& e) {
            throw IrError("phase " + std::to_string(s.phase) + ": " + e.what());
        }
        if (options.observer) {
            PhaseReport r;
            r.phase = s.phase;
            r.state = &*s.contraction;
            r.components = &s.components;
            r.lp_objective = sol.objective;
            r.generated_rows = s.generated_rows;
            r.chosen = chosen;
            r.generation_seconds = s.generation_seconds;
            options.observer(r);
        }
        s.contraction->contract(s.components.components[chosen]);
        return true;  // contraction changes the component set, so the LP is rebuilt
    };
    c.set_solution = [&](IrState& s) { return finalize_tree(s.contraction->accumulated(), instance); };

    IrState state;
    const int fuel = 10 * std::max<int>(1, static_cast<int>(instance.terminals.size()));
    auto outcome = run_ir(c, state, fuel);
    state.report.tree = std::move(outcome.result);
    state.report.phases = outcome.iterations;
    return std::move(state.report);
}

}  // namespace steiner::ir
