#include <random>

#include "doctest.h"
#include "steiner/graph.hpp"
#include "test_support.hpp"

using namespace steiner;
using steiner::test::brute_force_tree_cost;

namespace {

// Bellman-Ford style relaxation, used as an independent distance oracle.
std::vector<std::vector<Cost>> floyd(const Graph& g, const std::vector<bool>* blocked = nullptr) {
    const NodeId n = g.node_count();
    std::vector<std::vector<Cost>> d(n, std::vector<Cost>(n, kInfCost));
    for (NodeId v = 0; v < n; ++v) d[v][v] = 0;
    for (const Edge& e : g.edges()) d[e.u][e.v] = d[e.v][e.u] = e.weight;
    for (NodeId k = 0; k < n; ++k) {
        if (blocked && (*blocked)[k]) continue;
        for (NodeId i = 0; i < n; ++i)
            for (NodeId j = 0; j < n; ++j)
                d[i][j] = std::min(d[i][j], add_cost(d[i][k], d[k][j]));
    }
    return d;
}

}  // namespace

TEST_CASE("star3 distances and nearest terminal") {
    const auto inst = test::star3();
    const auto sp = multi_source_dijkstra(inst.graph, inst.terminals);
    CHECK(sp.dist[3] == 1);
    CHECK(sp.nearest[3] == 0);
    const Metric m = metric_closure(inst.graph);
    for (NodeId a = 0; a < 3; ++a)
        for (NodeId b = 0; b < 3; ++b) CHECK(m.dist(a, b) == (a == b ? 0 : 2));
    CHECK(mst(m, inst.terminals).cost == 4);
    const std::vector<NodeId> all{0, 1, 2, 3};
    CHECK(mst(m, all).cost == 3);
    CHECK(mst(inst.graph, all).cost == 3);
    const auto vor = voronoi_regions(inst.graph, inst.terminals);
    CHECK(vor.owner[3] == 0);
    CHECK(vor.dist_to_owner[3] == 1);
}

TEST_CASE("path3 predecessor expands through the middle node") {
    const auto inst = test::path3();
    const Metric m = metric_closure(inst.graph);
    CHECK(m.dist(0, 2) == 2);
    CHECK(m.pred(0, 2) == 1);
    CHECK(expand_metric_edge(m, 0, 2) == std::vector<NodeId>{0, 1, 2});
    CHECK(expand_metric_edge(m, 2, 0) == std::vector<NodeId>{2, 1, 0});
    CHECK(expand_metric_edge(m, 1, 1) == std::vector<NodeId>{1});
}

TEST_CASE("graph construction") {
    SUBCASE("parallel edges keep the minimum") {
        const std::vector<Edge> edges{{0, 1, 5}, {1, 0, 3}, {0, 1, 4}};
        Graph g(2, edges);
        CHECK(g.edge_count() == 1);
        CHECK(g.weight(0, 1) == 3);
        CHECK(g.weight(1, 0) == 3);
    }
    SUBCASE("self-loop rejected") {
        const std::vector<Edge> edges{{1, 1, 2}};
        CHECK_THROWS_AS(Graph(2, edges), GraphError);
    }
    SUBCASE("negative weight rejected") {
        const std::vector<Edge> edges{{0, 1, -1}};
        CHECK_THROWS_AS(Graph(2, edges), GraphError);
    }
    SUBCASE("out of range endpoint rejected") {
        const std::vector<Edge> edges{{0, 2, 1}};
        CHECK_THROWS_AS(Graph(2, edges), GraphError);
    }
    SUBCASE("absent edge weight") {
        const std::vector<Edge> edges{{0, 1, 1}};
        Graph g(3, edges);
        CHECK(g.weight(0, 2) == kInfCost);
    }
}

TEST_CASE("disconnected closure names an unreachable pair") {
    const std::vector<Edge> edges{{0, 1, 1}, {2, 3, 1}};
    Graph g(4, edges);
    try {
        (void)metric_closure(g);
        FAIL("expected GraphError");
    } catch (const GraphError& e) {
        CHECK(std::string(e.what()).find("nodes 0 and 2") != std::string::npos);
    }
    const Metric r = restricted_closure(g, std::vector<bool>(4, false));
    CHECK(r.dist(0, 2) == kInfCost);
    CHECK(r.dist(2, 3) == 1);
}

TEST_CASE("restricted closure avoids blocked interior nodes") {
    // 0 - 1 - 2 with weight 1 each and a direct 0 - 2 edge of weight 5.
    const std::vector<Edge> edges{{0, 1, 1}, {1, 2, 1}, {0, 2, 5}};
    Graph g(3, edges);
    std::vector<bool> blocked{false, true, false};
    const Metric r = restricted_closure(g, blocked);
    CHECK(r.dist(0, 2) == 5);
    CHECK(r.dist(0, 1) == 1);
    CHECK(r.dist(1, 2) == 1);  // blocked endpoint is fine, only expansion is forbidden
}

TEST_CASE("property: closures match an all-pairs oracle, serial equals parallel") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 60; ++round) {
        const auto inst = test::random_instance(rng, 2, 12, 4, 10);
        const Graph& g = inst.graph;
        const auto ref = floyd(g);
        const Metric m = metric_closure(g);
        CHECK(m == metric_closure_serial(g));
        for (NodeId u = 0; u < g.node_count(); ++u)
            for (NodeId v = 0; v < g.node_count(); ++v) {
                REQUIRE(m.dist(u, v) == ref[u][v]);
                // the stored path has the stored length
                const auto path = expand_metric_edge(m, u, v);
                Cost len = 0;
                for (std::size_t i = 1; i < path.size(); ++i) len += g.weight(path[i - 1], path[i]);
                CHECK(len == m.dist(u, v));
            }

        std::vector<bool> blocked(static_cast<std::size_t>(g.node_count()));
        std::bernoulli_distribution coin(0.3);
        for (std::size_t i = 0; i < blocked.size(); ++i) blocked[i] = coin(rng);
        const Metric r = restricted_closure(g, blocked);
        CHECK(r == restricted_closure_serial(g, blocked));
        // Oracle: shortest path with unblocked interior = Floyd over unblocked pivots.
        const auto rref = floyd(g, &blocked);
        for (NodeId u = 0; u < g.node_count(); ++u)
            for (NodeId v = 0; v < g.node_count(); ++v) CHECK(r.dist(u, v) == rref[u][v]);
    }
}

TEST_CASE("property: MST cost equals brute-force minimum spanning tree") {
    std::mt19937_64 rng(12);
    for (int round = 0; round < 80; ++round) {
        const auto inst = test::random_instance(rng, 2, 7, 4, 10);
        const Graph& g = inst.graph;
        std::vector<NodeId> all(static_cast<std::size_t>(g.node_count()));
        for (NodeId v = 0; v < g.node_count(); ++v) all[v] = v;
        const auto tree = mst(g, all);
        CHECK(tree.edges.size() + 1 == all.size());
        CHECK(tree.cost == brute_force_tree_cost(all, [&](NodeId a, NodeId b) { return g.weight(a, b); }));
        const Metric m = metric_closure(g);
        CHECK(mst(m, inst.terminals).cost ==
              brute_force_tree_cost(inst.terminals, [&](NodeId a, NodeId b) { return m.dist(a, b); }));
    }
}

TEST_CASE("MST ties break on (weight, min endpoint, max endpoint)") {
    // Unit triangle: Kruskal takes (0,1) then (0,2).
    const std::vector<Edge> edges{{1, 2, 1}, {0, 2, 1}, {0, 1, 1}};
    const auto tree = mst_of_edges(edges);
    REQUIRE(tree.edges.size() == 2);
    CHECK(tree.edges[0] == Edge{0, 1, 1});
    CHECK(tree.edges[1] == Edge{0, 2, 1});
}

TEST_CASE("mst errors") {
    const std::vector<Edge> edges{{0, 1, 1}};
    Graph g(3, edges);
    const std::vector<NodeId> nodes{0, 1, 2};
    CHECK_THROWS_AS(mst(g, nodes), GraphError);
    CHECK_THROWS_AS(mst(g, std::span<const NodeId>{}), GraphError);
}

TEST_CASE("min cut examples") {
    SUBCASE("single arc") {
        Digraph d;
        d.add_node();
        d.add_node();
        d.add_arc(0, 1, 0.5);
        const auto cut = min_st_cut(d, 0, 1);
        CHECK(cut.value == doctest::Approx(0.5));
        CHECK(cut.source_side == std::vector<int>{0});
    }
    SUBCASE("two parallel paths") {
        Digraph d;
        for (int i = 0; i < 4; ++i) d.add_node();
        d.add_arc(0, 1, 0.3);
        d.add_arc(1, 3, kInfCapacity);
        d.add_arc(0, 2, 0.7);
        d.add_arc(2, 3, kInfCapacity);
        CHECK(min_st_cut(d, 0, 3).value == doctest::Approx(1.0));
    }
    SUBCASE("infinite path") {
        Digraph d;
        d.add_node();
        d.add_node();
        d.add_arc(0, 1, kInfCapacity);
        CHECK(min_st_cut(d, 0, 1).value == kInfCapacity);
    }
}

TEST_CASE("property: min cut equals brute-force subset enumeration") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> cap(0.0, 1.0);
    std::bernoulli_distribution arc(0.35), inf_arc(0.1);
    for (int round = 0; round < 200; ++round) {
        Digraph d;
        const int n = 2 + static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) d.add_node();
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (a != b && arc(rng)) d.add_arc(a, b, inf_arc(rng) ? kInfCapacity : cap(rng));
        const double expected = test::brute_force_min_cut(d, 0, n - 1);
        const auto cut = min_st_cut(d, 0, n - 1);
        if (expected == kInfCapacity) {
            CHECK(cut.value == kInfCapacity);
            continue;
        }
        CHECK(cut.value == doctest::Approx(expected).epsilon(1e-9));
        // the reported side is itself a cut of that value
        std::vector<bool> side(static_cast<std::size_t>(n));
        for (int v : cut.source_side) side[v] = true;
        CHECK(side[0]);
        CHECK_FALSE(side[n - 1]);
        double value = 0;
        for (const auto& a : d.arcs)
            if (side[a.from] && !side[a.to]) value += a.capacity;
        CHECK(value == doctest::Approx(expected).epsilon(1e-9));
    }
}
