#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "steiner/graph.hpp"
#include "steiner/instance.hpp"

namespace steiner {

/// Subset of a fixed terminal ordering (indices 0..255).
class TerminalSet {
  public:
    static constexpr int kCapacity = 256;

    TerminalSet() = default;
    static TerminalSet of(std::initializer_list<int> indices) {
        TerminalSet s;
        for (int i : indices) s.insert(i);
        return s;
    }

    void insert(int i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void erase(int i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    bool contains(int i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
    bool empty() const { return (words_[0] | words_[1] | words_[2] | words_[3]) == 0; }
    int size() const {
        int n = 0;
        for (auto w : words_) n += std::popcount(w);
        return n;
    }
    /// Members in increasing order.
    std::vector<int> elements() const;

    friend bool operator==(const TerminalSet&, const TerminalSet&) = default;

    std::size_t hash() const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (auto w : words_) h = (h ^ w) * 0xff51afd7ed558ccdULL, h ^= h >> 32;
        return static_cast<std::size_t>(h);
    }

  private:
    std::array<std::uint64_t, 4> words_{};
};

struct TerminalSetHash {
    std::size_t operator()(const TerminalSet& s) const { return s.hash(); }
};

class DwError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Dreyfus-Wagner recursion over a metric with memoized (node, subset) states.
///
///   B(v, X) = min over nonempty Y ⊊ X of C(v, Y) + C(v, X \ Y)
///   C(v, X) = min( min_{u in X}  C(u, X \ {u}) + d(u, v),
///                  min_{u notin X, u branchable or u == v}  B(u, X) + d(u, v) )
///   C(v, {u}) = d(u, v)
///
/// States for one subset X are computed together for every node v, so the
/// cache maps X to per-node arrays. Subsets are over `terminals` (ordering
/// fixed at construction); every state ever computed is kept, so one cache
/// can serve many queries over overlapping subsets.
class DreyfusWagner {
  public:
    /// `branchable[u]` marks nodes allowed as degree >= 3 Steiner points.
    /// `self_branch` admits u == v in the second term of C (zero-length path).
    DreyfusWagner(const Metric& metric, std::vector<NodeId> terminals, std::vector<bool> branchable,
                  bool self_branch = true);

    const std::vector<NodeId>& terminals() const { return terminals_; }

    /// B(v, X); requires |X| >= 2 and v not a member of X.
    Cost b(NodeId v, const TerminalSet& x);
    /// C(v, X); requires X nonempty and v not a member of X.
    Cost c(NodeId v, const TerminalSet& x);

    /// Computes every subset of every target level by level, each level in
    /// parallel. Produces the same states as the lazy recursive path.
    void prepare(const std::vector<TerminalSet>& targets, const Deadline& deadline = Deadline::never());

    /// Metric edges of an optimal tree for C(v, X).
    std::vector<Edge> metric_tree(NodeId v, const TerminalSet& x);

    std::size_t state_count() const { return cache_.size(); }

  private:
    enum class Via : std::uint8_t { none, base, terminal, branch };

    struct Entry {
        bool ready = false;
        std::vector<Cost> b;
        std::vector<Cost> c;
        std::vector<std::uint32_t> b_split;  // local mask of Y within X's members
        std::vector<NodeId> c_node;
        std::vector<Via> c_via;
    };

    Entry& ensure(const TerminalSet& x);
    void compute(const TerminalSet& x, Entry& entry);
    const Entry& lookup(const TerminalSet& x) const;
    void unwind_c(NodeId v, const TerminalSet& x, std::vector<Edge>& out);
    void unwind_b(NodeId v, const TerminalSet& x, std::vector<Edge>& out);
    void check_terminal_index(const TerminalSet& x) const;

    const Metric& metric_;
    std::vector<NodeId> terminals_;
    std::vector<bool> branchable_;
    bool self_branch_;
    std::vector<NodeId> branch_nodes_;
    std::vector<int> terminal_index_;  // node -> position in terminals_, or -1
    std::unordered_map<TerminalSet, Entry, TerminalSetHash> cache_;
};

struct ExactOptions {
    /// Largest admissible |T| - 1 (subset bitmask width).
    int max_terminal_bits = 30;
    /// Refuse instances whose full state table would exceed this many bytes.
    std::size_t max_state_bytes = std::size_t{6} << 30;
    bool parallel = true;
    /// See DreyfusWagner; false gives the variant without the u == v case.
    bool self_branch = true;
};

/// Optimum Steiner tree: C(t0, T \ {t0}) over the metric closure, with the
/// argmin choices unwound and expanded back to graph edges.
SteinerTree solve_exact(const SteinerInstance& instance, const Deadline& deadline = Deadline::never(),
                        const ExactOptions& options = {});

}  // namespace steiner
