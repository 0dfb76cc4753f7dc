#include "steiner/dreyfus_wagner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <unordered_set>

namespace steiner {

std::vector<int> TerminalSet::elements() const {
    std::vector<int> out;
    for (int w = 0; w < 4; ++w)
        for (std::uint64_t bits = words_[w]; bits; bits &= bits - 1)
            out.push_back(w * 64 + std::countr_zero(bits));
    return out;
}

DreyfusWagner::DreyfusWagner(const Metric& metric, std::vector<NodeId> terminals, std::vector<bool> branchable,
                             bool self_branch)
    : metric_(metric), terminals_(std::move(terminals)), branchable_(std::move(branchable)), self_branch_(self_branch),
      terminal_index_(static_cast<std::size_t>(metric.size()), -1) {
    if (terminals_.size() > static_cast<std::size_t>(TerminalSet::kCapacity))
        throw DwError("too many terminals for the subset cache (max " +
                      std::to_string(TerminalSet::kCapacity) + ")");
    if (branchable_.size() != static_cast<std::size_t>(metric.size()))
        throw DwError("branchable mask size differs from the metric size");
    for (std::size_t i = 0; i < terminals_.size(); ++i) terminal_index_[terminals_[i]] = static_cast<int>(i);
    for (NodeId u = 0; u < metric.size(); ++u)
        if (branchable_[u]) branch_nodes_.push_back(u);
}

void DreyfusWagner::check_terminal_index(const TerminalSet& x) const {
    const auto elems = x.elements();
    if (!elems.empty() && elems.back() >= static_cast<int>(terminals_.size()))
        throw DwError("subset references a terminal index outside the ordering");
}

Cost DreyfusWagner::b(NodeId v, const TerminalSet& x) {
    if (x.size() < 2) throw DwError("B(v, X) needs |X| >= 2");
    check_terminal_index(x);
    if (terminal_index_[v] >= 0 && x.contains(terminal_index_[v])) throw DwError("B(v, X) needs v outside X");
    return ensure(x).b[v];
}

Cost DreyfusWagner::c(NodeId v, const TerminalSet& x) {
    if (x.empty()) throw DwError("C(v, X) needs a nonempty X");
    check_terminal_index(x);
    if (terminal_index_[v] >= 0 && x.contains(terminal_index_[v])) throw DwError("C(v, X) needs v outside X");
    return ensure(x).c[v];
}

const DreyfusWagner::Entry& DreyfusWagner::lookup(const TerminalSet& x) const {
    auto it = cache_.find(x);
    if (it == cache_.end() || !it->second.ready) throw DwError("internal: subset state not prepared");
    return it->second;
}

DreyfusWagner::Entry& DreyfusWagner::ensure(const TerminalSet& x) {
    Entry& entry = cache_[x];
    if (entry.ready) return entry;
    const auto elems = x.elements();
    if (elems.size() > 1) {
        for (int i : elems) {
            TerminalSet sub = x;
            sub.erase(i);
            ensure(sub);
        }
    }
    compute(x, entry);
    return entry;
}

void DreyfusWagner::compute(const TerminalSet& x, Entry& entry) {
    const NodeId n = metric_.size();
    const auto elems = x.elements();
    const int s = static_cast<int>(elems.size());
    std::vector<NodeId> members(elems.size());
    for (int i = 0; i < s; ++i) members[i] = terminals_[elems[i]];

    entry.c.assign(n, kInfCost);
    entry.c_node.assign(n, kNoNode);
    entry.c_via.assign(n, Via::none);

    if (s == 1) {
        const NodeId u = members[0];
        const Cost* du = metric_.dist_row(u);
        for (NodeId v = 0; v < n; ++v) {
            if (v == u) continue;
            entry.c[v] = du[v];
            entry.c_node[v] = u;
            entry.c_via[v] = Via::base;
        }
        entry.ready = true;
        return;
    }

    const std::uint32_t full = (s >= 32) ? 0xffffffffU : ((std::uint32_t{1} << s) - 1);
    auto subset_of = [&](std::uint32_t local) {
        TerminalSet sub;
        for (int i = 0; i < s; ++i)
            if (local >> i & 1U) sub.insert(elems[i]);
        return sub;
    };

    // B: splits Y always contain the lowest member, so each unordered split is seen once.
    entry.b.assign(n, kInfCost);
    entry.b_split.assign(n, 0);
    const std::uint32_t rest = full & ~std::uint32_t{1};
    for (std::uint32_t r = rest;; r = (r - 1) & rest) {
        const std::uint32_t y = r | 1U;
        if (y != full) {
            const std::vector<Cost>& cy = lookup(subset_of(y)).c;
            const std::vector<Cost>& cz = lookup(subset_of(full ^ y)).c;
            for (NodeId v = 0; v < n; ++v) {
                const Cost val = add_cost(cy[v], cz[v]);
                if (val < entry.b[v]) {
                    entry.b[v] = val;
                    entry.b_split[v] = y;
                }
            }
        }
        if (r == 0) break;
    }
    for (NodeId m : members) entry.b[m] = kInfCost;

    // C, first term: the path from v ends at a member u.
    for (int i = 0; i < s; ++i) {
        const NodeId u = members[i];
        const Cost cu = lookup(subset_of(full ^ (std::uint32_t{1} << i))).c[u];
        if (cu == kInfCost) continue;
        const Cost* du = metric_.dist_row(u);
        for (NodeId v = 0; v < n; ++v) {
            const Cost val = add_cost(cu, du[v]);
            if (val < entry.c[v]) {
                entry.c[v] = val;
                entry.c_node[v] = u;
                entry.c_via[v] = Via::terminal;
            }
        }
    }
    // Second term: the path ends at a branching node u (u == v allowed, d = 0).
    for (NodeId v = 0; self_branch_ && v < n; ++v) {
        if (entry.b[v] < entry.c[v]) {
            entry.c[v] = entry.b[v];
            entry.c_node[v] = v;
            entry.c_via[v] = Via::branch;
        }
    }
    for (NodeId u : branch_nodes_) {
        const Cost bu = entry.b[u];
        if (bu == kInfCost) continue;
        const Cost* du = metric_.dist_row(u);
        for (NodeId v = 0; v < n; ++v) {
            if (v == u && !self_branch_) continue;
            const Cost val = add_cost(bu, du[v]);
            if (val < entry.c[v]) {
                entry.c[v] = val;
                entry.c_node[v] = u;
                entry.c_via[v] = Via::branch;
            }
        }
    }
    for (NodeId m : members) {
        entry.c[m] = kInfCost;
        entry.c_via[m] = Via::none;
    }
    entry.ready = true;
}

void DreyfusWagner::prepare(const std::vector<TerminalSet>& targets, const Deadline& deadline) {
    std::map<int, std::vector<TerminalSet>> levels;
    std::unordered_set<TerminalSet, TerminalSetHash> queued;
    for (const TerminalSet& x : targets) {
        check_terminal_index(x);
        const auto elems = x.elements();
        const int s = static_cast<int>(elems.size());
        if (s == 0) continue;
        if (auto it = cache_.find(x); it != cache_.end() && it->second.ready) continue;
        const std::uint32_t full = (s >= 32) ? 0xffffffffU : ((std::uint32_t{1} << s) - 1);
        for (std::uint32_t local = full;; local = (local - 1) & full) {
            if (local == 0) break;
            TerminalSet sub;
            for (int i = 0; i < s; ++i)
                if (local >> i & 1U) sub.insert(elems[i]);
            auto [it, inserted] = cache_.try_emplace(sub);
            if (!it->second.ready && queued.insert(sub).second) levels[std::popcount(local)].push_back(sub);
        }
    }
    for (auto& [size, subsets] : levels) {
        deadline.check();
        std::vector<Entry*> slots(subsets.size());
        for (std::size_t i = 0; i < subsets.size(); ++i) slots[i] = &cache_.find(subsets[i])->second;
        const auto count = static_cast<std::int64_t>(subsets.size());
        std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic, 8)
        for (std::int64_t i = 0; i < count; ++i) {
            if (failed.load(std::memory_order_relaxed)) continue;
            try {
                compute(subsets[i], *slots[i]);
            } catch (...) {
                failed = true;
            }
        }
        if (failed) throw DwError("subset state computation failed");
    }
}

void DreyfusWagner::unwind_c(NodeId v, const TerminalSet& x, std::vector<Edge>& out) {
    const Entry& e = lookup(x);
    const NodeId u = e.c_node[v];
    switch (e.c_via[v]) {
        case Via::none: throw DwError("no finite tree for this state");
        case Via::base:
            out.push_back({u, v, metric_.dist(u, v)});
            return;
        case Via::terminal: {
            out.push_back({u, v, metric_.dist(u, v)});
            TerminalSet rest = x;
            rest.erase(terminal_index_[u]);
            unwind_c(u, rest, out);
            return;
        }
        case Via::branch:
            if (u != v) out.push_back({u, v, metric_.dist(u, v)});
            unwind_b(u, x, out);
            return;
    }
}

void DreyfusWagner::unwind_b(NodeId v, const TerminalSet& x, std::vector<Edge>& out) {
    const Entry& e = lookup(x);
    const auto elems = x.elements();
    TerminalSet y, z;
    for (std::size_t i = 0; i < elems.size(); ++i) {
        if (e.b_split[v] >> i & 1U)
            y.insert(elems[i]);
        else
            z.insert(elems[i]);
    }
    unwind_c(v, y, out);
    unwind_c(v, z, out);
}

std::vector<Edge> DreyfusWagner::metric_tree(NodeId v, const TerminalSet& x) {
    c(v, x);
    std::vector<Edge> out;
    unwind_c(v, x, out);
    return out;
}

SteinerTree solve_exact(const SteinerInstance& instance, const Deadline& deadline, const ExactOptions& options) {
    const auto& terms = instance.terminals;
    if (terms.size() <= 1) return {};
    const int bits = static_cast<int>(terms.size()) - 1;
    if (bits > options.max_terminal_bits) throw DwError("too many terminals for exact solver");
    const double states = std::ldexp(1.0, bits) * instance.graph.node_count();
    const double bytes_per_state = 2 * sizeof(Cost) + sizeof(std::uint32_t) + sizeof(NodeId) + 1;
    if (states * bytes_per_state > static_cast<double>(options.max_state_bytes))
        throw DwError("exact solver state table exceeds the memory limit");

    const Metric metric = metric_closure(instance.graph);
    std::vector<NodeId> rest(terms.begin() + 1, terms.end());
    DreyfusWagner dw(metric, rest, std::vector<bool>(static_cast<std::size_t>(metric.size()), true),
                     options.self_branch);
    TerminalSet all;
    for (int i = 0; i < bits; ++i) all.insert(i);
    if (options.parallel) dw.prepare({all}, deadline);
    const std::vector<Edge> metric_edges = dw.metric_tree(terms.front(), all);
    return tree_from_metric_edges(instance, metric, metric_edges);
}

}  // namespace steiner
