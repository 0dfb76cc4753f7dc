#pragma once

#include <array>
#include <vector>

#include "steiner/graph.hpp"
#include "steiner/instance.hpp"

namespace steiner {

/// save[a][b]: heaviest edge on the a-b path of a spanning tree over
/// terminal indices 0..k-1.
class SaveMatrix {
  public:
    SaveMatrix() = default;
    explicit SaveMatrix(int k) : k_(k), save_(static_cast<std::size_t>(k) * k, 0) {}
    int size() const { return k_; }
    Cost at(int a, int b) const { return save_[static_cast<std::size_t>(a) * k_ + b]; }
    void set(int a, int b, Cost w) {
        save_[static_cast<std::size_t>(a) * k_ + b] = w;
        save_[static_cast<std::size_t>(b) * k_ + a] = w;
    }

  private:
    int k_ = 0;
    std::vector<Cost> save_;
};

/// Recursive split on the heaviest edge. `tree` must be a spanning tree of
/// 0..k-1 (throws GraphError otherwise).
SaveMatrix compute_save(int k, std::span<const Edge> tree);

struct Triple {
    /// Terminal node ids in increasing order.
    std::array<NodeId, 3> terminals{};
    /// Positions of those terminals in the instance's terminal list.
    std::array<int, 3> index{};
    NodeId center = kNoNode;
    Cost cost = 0;
};

/// One triple per 3-subset of `terminals`, in lexicographic order, each with
/// the node minimizing the summed distance (ties to the lowest id). Terminals
/// are candidate centers unless `terminal_centers` is false.
std::vector<Triple> find_triples(const Metric& metric, std::span<const NodeId> terminals,
                                 bool terminal_centers = true);
std::vector<Triple> find_triples_serial(const Metric& metric, std::span<const NodeId> terminals,
                                        bool terminal_centers = true);

/// max + min of the three pair saves minus the triple cost; with
/// `two_largest` the two largest saves are used instead.
Cost triple_gain(const Triple& triple, const SaveMatrix& save, bool two_largest = false);

struct ZelikovskyOptions {
    bool terminal_centers = true;
    bool two_largest_gain = false;
    bool parallel = true;
};

struct ZelikovskyReport {
    SteinerTree tree;
    std::vector<Triple> accepted;
    /// Cost of the initial terminal MST.
    Cost start_cost = 0;
};

ZelikovskyReport zelikovsky_detailed(const SteinerInstance& instance, const ZelikovskyOptions& options = {},
                                     const Deadline& deadline = Deadline::never());

inline SteinerTree zelikovsky(const SteinerInstance& instance, const ZelikovskyOptions& options = {},
                              const Deadline& deadline = Deadline::never()) {
    return zelikovsky_detailed(instance, options, deadline).tree;
}

}  // namespace steiner
