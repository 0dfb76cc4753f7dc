#include "steiner/zelikovsky.hpp"

#include <algorithm>

#include "steiner/hill_climb.hpp"

namespace steiner {

namespace {

void split_on_heaviest(int k, const std::vector<int>& nodes, std::vector<Edge> edges, SaveMatrix& save) {
    if (nodes.size() <= 1) return;
    std::size_t heaviest = 0;
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (edges[i].weight > edges[heaviest].weight) heaviest = i;
    const Edge cut = edges[heaviest];
    edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(heaviest));

    // Flood the side holding cut.u over the remaining edges.
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(k));
    for (const Edge& e : edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    std::vector<bool> left_side(static_cast<std::size_t>(k));
    std::vector<int> stack{cut.u};
    left_side[cut.u] = true;
    while (!stack.empty()) {
        const int x = stack.back();
        stack.pop_back();
        for (int y : adj[x])
            if (!left_side[y]) left_side[y] = true, stack.push_back(y);
    }
    std::vector<int> left, right;
    for (int v : nodes) (left_side[v] ? left : right).push_back(v);
    for (int a : left)
        for (int b : right) save.set(a, b, cut.weight);
    std::vector<Edge> left_edges, right_edges;
    for (const Edge& e : edges) (left_side[e.u] ? left_edges : right_edges).push_back(e);
    split_on_heaviest(k, left, std::move(left_edges), save);
    split_on_heaviest(k, right, std::move(right_edges), save);
}

std::vector<Triple> triples_impl(const Metric& metric, std::span<const NodeId> terminals, bool terminal_centers,
                                 bool parallel) {
    const int k = static_cast<int>(terminals.size());
    const NodeId n = metric.size();
    std::vector<bool> is_terminal(static_cast<std::size_t>(n));
    for (NodeId t : terminals) is_terminal[t] = true;
    if (k < 3) return {};

    // Output slot of the lexicographic triple (a, b, c) is known up front.
    std::vector<std::size_t> first_slot(static_cast<std::size_t>(k) + 1, 0);
    for (int a = 0; a < k; ++a) {
        const std::size_t rest = static_cast<std::size_t>(k - a - 1);
        first_slot[a + 1] = first_slot[a] + (rest == 0 ? 0 : rest * (rest - 1) / 2);
    }
    std::vector<Triple> out(first_slot[k]);

#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (int a = 0; a < k; ++a) {
        std::size_t slot = first_slot[a];
        const Cost* da = metric.dist_row(terminals[a]);
        for (int b = a + 1; b < k; ++b) {
            const Cost* db = metric.dist_row(terminals[b]);
            for (int c = b + 1; c < k; ++c) {
                const Cost* dc = metric.dist_row(terminals[c]);
                Triple t;
                t.terminals = {terminals[a], terminals[b], terminals[c]};
                t.index = {a, b, c};
                t.cost = kInfCost;
                for (NodeId v = 0; v < n; ++v) {
                    if (!terminal_centers && is_terminal[v]) continue;
                    const Cost sum = add_cost(add_cost(da[v], db[v]), dc[v]);
                    if (sum < t.cost) {
                        t.cost = sum;
                        t.center = v;
                    }
                }
                out[slot++] = t;
            }
        }
    }
    // Without terminal centers a triple can lack any candidate (no Steiner nodes).
    std::erase_if(out, [](const Triple& t) { return t.center == kNoNode; });
    return out;
}

struct ZelState {
    int k = 0;
    std::vector<Cost> working;  // k x k terminal metric with contracted pairs zeroed
    SaveMatrix save;
    std::vector<NodeId> selected;
    std::vector<Triple> accepted;
};

void rebuild_save(ZelState& s) {
    std::vector<Edge> complete;
    complete.reserve(static_cast<std::size_t>(s.k) * (s.k - 1) / 2);
    for (int a = 0; a < s.k; ++a)
        for (int b = a + 1; b < s.k; ++b) complete.push_back({a, b, s.working[static_cast<std::size_t>(a) * s.k + b]});
    const TreeEdges tree = mst_of_edges(std::move(complete));
    s.save = compute_save(s.k, tree.edges);
}

}  // namespace

SaveMatrix compute_save(int k, std::span<const Edge> tree) {
    if (k < 1) throw GraphError("save matrix needs at least one terminal");
    if (tree.size() + 1 != static_cast<std::size_t>(k)) throw GraphError("save matrix input is not a spanning tree");
    DisjointSets sets(static_cast<std::size_t>(k));
    for (const Edge& e : tree) {
        if (e.u < 0 || e.v < 0 || e.u >= k || e.v >= k) throw GraphError("save matrix edge out of range");
        if (!sets.unite_into(e.u, e.v)) throw GraphError("save matrix input is not a spanning tree");
    }
    SaveMatrix save(k);
    std::vector<int> nodes(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) nodes[i] = i;
    split_on_heaviest(k, nodes, std::vector<Edge>(tree.begin(), tree.end()), save);
    return save;
}

std::vector<Triple> find_triples(const Metric& metric, std::span<const NodeId> terminals, bool terminal_centers) {
    return triples_impl(metric, terminals, terminal_centers, true);
}

std::vector<Triple> find_triples_serial(const Metric& metric, std::span<const NodeId> terminals,
                                        bool terminal_centers) {
    return triples_impl(metric, terminals, terminal_centers, false);
}

Cost triple_gain(const Triple& triple, const SaveMatrix& save, bool two_largest) {
    const auto [a, b, c] = triple.index;
    std::array<Cost, 3> s{save.at(a, b), save.at(b, c), save.at(a, c)};
    std::sort(s.begin(), s.end());
    const Cost second = two_largest ? s[1] : s[0];
    return s[2] + second - triple.cost;
}

ZelikovskyReport zelikovsky_detailed(const SteinerInstance& instance, const ZelikovskyOptions& options,
                                     const Deadline& deadline) {
    ZelikovskyReport report;
    const auto& terms = instance.terminals;
    if (terms.size() <= 1) return report;
    const Metric metric = metric_closure(instance.graph);
    const int k = static_cast<int>(terms.size());

    ZelState start;
    start.k = k;
    start.working.assign(static_cast<std::size_t>(k) * k, 0);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) start.working[static_cast<std::size_t>(a) * k + b] = metric.dist(terms[a], terms[b]);
    rebuild_save(start);
    report.start_cost = mst(metric, terms).cost;

    const std::vector<Triple> triples = options.parallel ? find_triples(metric, terms, options.terminal_centers)
                                                         : find_triples_serial(metric, terms, options.terminal_centers);

    // Every triple stays a candidate; contracted ones score -cost and are never picked.
    SearchComponents<ZelState, const Triple*> components;
    components.neighbourhood = [&](const ZelState&) {
        deadline.check();
        std::vector<const Triple*> moves(triples.size());
        for (std::size_t i = 0; i < triples.size(); ++i) moves[i] = &triples[i];
        return moves;
    };
    components.gain = [&](const ZelState& s, const Triple* t) { return triple_gain(*t, s.save, options.two_largest_gain); };
    components.commit = [&](ZelState& s, const Triple* t) {
        const auto [a, b, c] = t->index;
        for (auto [x, y] : {std::pair{a, b}, {b, c}, {a, c}}) {
            s.working[static_cast<std::size_t>(x) * k + y] = 0;
            s.working[static_cast<std::size_t>(y) * k + x] = 0;
        }
        if (!instance.is_terminal(t->center) &&
            std::find(s.selected.begin(), s.selected.end(), t->center) == s.selected.end())
            s.selected.push_back(t->center);
        s.accepted.push_back(*t);
        rebuild_save(s);
    };
    // Each accepted triple strictly lowers an integer bound that starts at the terminal MST cost.
    ZelState final_state =
        hill_climb(std::move(start), components, SearchStrategy::choose_best, static_cast<std::size_t>(k) * k).state;

    std::vector<NodeId> nodes = terms;
    nodes.insert(nodes.end(), final_state.selected.begin(), final_state.selected.end());
    std::sort(nodes.begin(), nodes.end());
    const TreeEdges final_tree = mst(metric, nodes);
    report.tree = tree_from_metric_edges(instance, metric, final_tree.edges);
    report.accepted = std::move(final_state.accepted);
    return report;
}

}  // namespace steiner
