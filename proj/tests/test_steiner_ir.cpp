#include <algorithm>
#include <random>

#include "doctest.h"
#include "steiner/dreyfus_wagner.hpp"
#include "steiner/iterative_rounding.hpp"
#include "steiner/steiner_ir.hpp"
#include "test_support.hpp"

using namespace steiner;
using namespace steiner::ir;

namespace {

// t1 = 0, t2 = 1, t3 = 2; every t1-t2 path runs through t3.
SteinerInstance witness() {
    const std::vector<Edge> edges{{0, 3, 1}, {3, 2, 1}, {2, 4, 1}, {4, 1, 1}};
    return make_instance(5, edges, {0, 1, 2}, "WITNESS");
}

std::vector<std::size_t> subset_costs(const ComponentSet& set, std::vector<std::vector<NodeId>>* keys = nullptr) {
    std::vector<std::size_t> out;
    for (const auto& c : set.components) {
        out.push_back(static_cast<std::size_t>(c.cost));
        if (keys) keys->push_back(c.terminals);
    }
    return out;
}

int count_size(const ComponentSet& set, std::size_t size) {
    return static_cast<int>(std::count_if(set.components.begin(), set.components.end(),
                                          [&](const DirectedComponent& c) { return c.terminals.size() == size; }));
}

const DirectedComponent& find_component(const ComponentSet& set, std::vector<NodeId> terms, NodeId sink) {
    for (const auto& c : set.components)
        if (c.terminals == terms && c.sink == sink) return c;
    throw std::runtime_error("component not found");
}

Cost tree_sum(const std::vector<Edge>& edges) {
    Cost s = 0;
    for (const Edge& e : edges) s += e.weight;
    return s;
}

// Drives a contraction sequence by picking components uniformly at random.
template <class Visit>
void random_phases(const SteinerInstance& inst, int k, std::mt19937_64& rng, Visit&& visit) {
    ContractionState state(inst);
    while (state.active().size() > 1) {
        GenerationOptions opts;
        opts.k = k;
        const ComponentSet set = generate_components(state, opts);
        visit(state, set);
        REQUIRE(!set.components.empty());
        state.contract(set.components[rng() % set.components.size()]);
    }
}

}  // namespace

// ---------------------------------------------------------------- reachability

TEST_CASE("reachability examples") {
    SUBCASE("STAR3 all pairs") {
        const auto inst = test::star3();
        const auto table = nonterminal_connectivity_preprocess(inst.graph, inst.terminals);
        for (NodeId a : inst.terminals)
            for (NodeId b : inst.terminals)
                if (a != b) CHECK(table.reachable(a, b));
        const NodeId all[] = {0, 1, 2};
        CHECK(table.admits(all));
    }
    SUBCASE("witness pair blocked by a third terminal") {
        const auto inst = witness();
        const auto table = nonterminal_connectivity_preprocess(inst.graph, inst.terminals);
        CHECK_FALSE(table.reachable(0, 1));
        CHECK(table.reachable(0, 2));
        CHECK(table.reachable(1, 2));
        CHECK_FALSE(test::brute_force_reachable(inst.graph, inst.terminal_mask(), 0, 1));
    }
    SUBCASE("single terminal") {
        const auto inst = make_instance(2, std::vector<Edge>{{0, 1, 3}}, {1});
        const auto table = nonterminal_connectivity_preprocess(inst.graph, inst.terminals);
        CHECK_FALSE(table.reachable(1, 1));
        CHECK_THROWS_AS((void)table.reachable(0, 1), IrError);
    }
}

TEST_CASE("property: reachability matches simple-path enumeration") {
    std::mt19937_64 rng(71);
    for (int round = 0; round < 200; ++round) {
        const auto inst = test::random_instance(rng, 2, 8, 6, 5, 0.2);
        const auto table = nonterminal_connectivity_preprocess(inst.graph, inst.terminals);
        const auto mask = inst.terminal_mask();
        for (NodeId a : inst.terminals)
            for (NodeId b : inst.terminals)
                if (a != b) CHECK(table.reachable(a, b) == test::brute_force_reachable(inst.graph, mask, a, b));
    }
}

TEST_CASE("property: merged reachability equals recomputation on the contracted graph") {
    std::mt19937_64 rng(72);
    for (int round = 0; round < 100; ++round) {
        const auto inst = test::random_instance(rng, 3, 8, 6, 5, 0.2);
        if (inst.terminals.size() < 2) continue;
        random_phases(inst, 3, rng, [&](const ContractionState& state, const ComponentSet&) {
            const ReachabilityTable fresh(state.contracted_graph().graph, inst.terminals);
            CHECK(fresh == state.reachability());
        });
    }
}

// ---------------------------------------------------------------- components

TEST_CASE("component generation examples") {
    SUBCASE("STAR3, k = 3") {
        const auto inst = test::star3();
        const ContractionState state(inst);
        const ComponentSet set = generate_components(state, {3});
        CHECK(set.components.size() == 9);
        CHECK(set.subset_count == 4);
        CHECK(count_size(set, 2) == 6);
        CHECK(count_size(set, 3) == 3);
        for (const auto& c : set.components) {
            CHECK(c.cost == (c.terminals.size() == 2 ? 2 : 3));
            CHECK(c.cost == test::brute_force_component_cost(state, c.terminals));
            CHECK(tree_sum(c.tree) == c.cost);
        }
    }
    SUBCASE("k = 2 gives pair distances through non-terminals") {
        const auto inst = test::star4();
        const ComponentSet set = generate_components(ContractionState(inst), {2});
        CHECK(set.components.size() == 12);
        for (const auto& c : set.components) CHECK(c.cost == 2);
    }
    SUBCASE("pruned pair is absent") {
        const auto inst = witness();
        const ContractionState state(inst);
        const ComponentSet pruned = generate_components(state, {3});
        CHECK(pruned.pruned_count == 2);  // {t1, t2} and {t1, t2, t3}
        CHECK(pruned.subset_count == 2);
        for (const auto& c : pruned.components) CHECK(c.terminals != std::vector<NodeId>{0, 1});
        GenerationOptions open;
        open.pruning = false;
        const ComponentSet all = generate_components(state, open);
        CHECK(all.pruned_count == 0);
        // the pair has no tree avoiding t3; the triple is the whole path
        CHECK(all.subset_count == 3);
        CHECK(find_component(all, {0, 1, 2}, 0).cost == 4);
    }
    SUBCASE("errors") {
        const auto inst = test::star3();
        const ContractionState state(inst);
        CHECK_THROWS_AS(generate_components(state, {1}), IrError);
        const auto single = make_instance(2, std::vector<Edge>{{0, 1, 3}}, {1});
        CHECK_THROWS_AS(generate_components(ContractionState(single), {3}), IrError);
    }
}

TEST_CASE("property: components are optimal avoiding other terminals, shared cache equals fresh") {
    std::mt19937_64 rng(73);
    int phases = 0;
    for (int round = 0; round < 80; ++round) {
        const auto inst = test::random_instance(rng, 3, 8, 5, 8);
        if (inst.terminals.size() < 2) continue;
        const int k = 2 + static_cast<int>(rng() % 3);
        random_phases(inst, k, rng, [&](const ContractionState& state, const ComponentSet& set) {
            ++phases;
            GenerationOptions fresh_opts;
            fresh_opts.k = k;
            fresh_opts.shared_cache = false;
            const ComponentSet fresh = generate_components(state, fresh_opts);
            std::vector<std::vector<NodeId>> a_keys, b_keys;
            CHECK(subset_costs(set, &a_keys) == subset_costs(fresh, &b_keys));
            CHECK(a_keys == b_keys);
            GenerationOptions serial_opts;
            serial_opts.k = k;
            serial_opts.parallel = false;
            CHECK(subset_costs(generate_components(state, serial_opts)) == subset_costs(set));

            for (std::size_t i = 0; i < set.components.size(); i += set.components[i].terminals.size()) {
                const auto& c = set.components[i];
                CHECK(c.cost == test::brute_force_component_cost(state, c.terminals));
                CHECK(tree_sum(c.tree) == c.cost);
                for (const Edge& e : c.tree) CHECK(inst.graph.weight(e.u, e.v) == e.weight);
                // the variants of one subset follow each other, one per sink
                for (std::size_t j = 0; j < c.terminals.size(); ++j) {
                    CHECK(set.components[i + j].terminals == c.terminals);
                    CHECK(set.components[i + j].sink == c.terminals[j]);
                    CHECK(set.components[i + j].cost == c.cost);
                }
                // no active terminal outside the subset is touched
                for (const Edge& e : c.tree)
                    for (NodeId end : {state.representative(e.u), state.representative(e.v)})
                        if (state.is_active(end)) CHECK(c.contains(end));
            }
        });
    }
    CHECK(phases > 100);
}

// ---------------------------------------------------------------- LP and oracle

TEST_CASE("k-DCR LP construction") {
    const auto inst = test::star3();
    const ContractionState state(inst);
    const ComponentSet set = generate_components(state, {3});
    const auto lp = build_k_dcr_lp(set, 0, state.active());
    CHECK(lp.column_count() == 9);
    CHECK(lp.row_count() == 2);
    // every row is a singleton cut: components with that terminal as a source
    for (int r = 0; r < 2; ++r) {
        const NodeId t = r + 1;
        for (auto [j, a] : lp.rows()[r].coeffs) CHECK(set.components[j].has_source(t));
        CHECK(lp.rows()[r].coeffs.size() == 4);  // two pairs and two triple variants
    }
    CHECK_THROWS_AS(build_k_dcr_lp(set, 3, state.active()), IrError);

    SUBCASE("2-terminal instance, k = 2") {
        const auto p = test::path3();
        const ContractionState ps(p);
        const ComponentSet pset = generate_components(ps, {2});
        auto plp = build_k_dcr_lp(pset, 0, ps.active());
        CHECK(lp::SimplexSolver().solve(plp).objective == doctest::Approx(2.0));
    }
    SUBCASE("terminal without a crossing component") {
        ComponentSet empty;
        const NodeId act[] = {0, 1};
        CHECK_THROWS_WITH_AS(build_k_dcr_lp(empty, 0, act),
                             "instance infeasible under pruning: no component leaves terminal 1", IrError);
    }
}

TEST_CASE("separation oracle examples") {
    const auto inst = test::star3();
    const ContractionState state(inst);
    const ComponentSet set = generate_components(state, {3});
    std::vector<double> x(set.components.size(), 0.0);
    const std::size_t triple_to_t1 =
        static_cast<std::size_t>(&find_component(set, {0, 1, 2}, 0) - set.components.data());
    const NodeId order[] = {1, 2};

    x[triple_to_t1] = 1.0;
    CHECK_FALSE(separation_oracle(x, set, 0, order).has_value());

    x[triple_to_t1] = 0.5;
    auto v = separation_oracle(x, set, 0, order);
    REQUIRE(v.has_value());
    CHECK(v->cut == std::vector<NodeId>{1});
    CHECK(v->value == doctest::Approx(0.5));

    std::fill(x.begin(), x.end(), 0.0);
    v = separation_oracle(x, set, 0, order);
    REQUIRE(v.has_value());
    CHECK(v->value == 0.0);
    CHECK(std::find(v->cut.begin(), v->cut.end(), 1) != v->cut.end());
}

TEST_CASE("property: oracle verdict matches exhaustive cut enumeration") {
    std::mt19937_64 rng(74);
    int violated = 0, feasible = 0;
    for (int probe = 0; probe < 300; ++probe) {
        const auto inst = test::random_instance(rng, 3, 8, 6, 6);
        if (inst.terminals.size() < 2) continue;
        const ContractionState state(inst);
        const ComponentSet set = generate_components(state, {2 + static_cast<int>(rng() % 2)});
        std::vector<double> x(set.components.size());
        const double scale = 0.3 + static_cast<double>(rng() % 100) / 40.0;
        for (auto& v : x) v = (rng() % 3 == 0) ? scale * static_cast<double>(rng() % 1000) / 1000.0 : 0.0;
        const NodeId root = state.root();
        std::vector<NodeId> order;
        for (NodeId t : state.active())
            if (t != root) order.push_back(t);
        std::shuffle(order.begin(), order.end(), rng);
        const double min_mass = test::brute_force_min_cut_mass(x, set, root, state.active());
        const auto v = separation_oracle(x, set, root, order);
        CHECK(v.has_value() == (min_mass < 1.0 - kViolationTol));
        if (v) {
            ++violated;
            CHECK(v->value < 1.0 - kViolationTol);
            CHECK(v->value == doctest::Approx(test::cut_mass(x, set, v->cut)));
            double lhs = 0;
            for (auto [j, a] : v->row.coeffs) lhs += a * x[j];
            CHECK(lhs == doctest::Approx(v->value));
            CHECK(std::find(v->cut.begin(), v->cut.end(), root) == v->cut.end());
        } else {
            ++feasible;
        }
    }
    CHECK(violated > 20);
    CHECK(feasible > 20);
}

TEST_CASE("row generation") {
    lp::SimplexSolver solver;
    std::mt19937_64 rng(75);
    SUBCASE("STAR3, k = 3") {
        const auto inst = test::star3();
        const ContractionState state(inst);
        const ComponentSet set = generate_components(state, {3});
        auto lp = build_k_dcr_lp(set, 0, state.active());
        const auto rg = row_generation_solve(lp, make_oracle(set, 0, state.active()), rng, solver);
        REQUIRE(rg.solution.status == lp::LpStatus::optimal);
        CHECK(rg.solution.objective == doctest::Approx(3.0).epsilon(1e-6));
        CHECK(test::full_k_dcr(set, 0, state.active()).objective == doctest::Approx(3.0).epsilon(1e-6));
    }
    SUBCASE("two terminals need no generated rows") {
        const auto inst = test::path3();
        const ContractionState state(inst);
        const ComponentSet set = generate_components(state, {3});
        auto lp = build_k_dcr_lp(set, 0, state.active());
        const auto rg = row_generation_solve(lp, make_oracle(set, 0, state.active()), rng, solver);
        CHECK(rg.generated_rows == 0);
        CHECK(rg.solution.objective == doctest::Approx(2.0));
    }
    SUBCASE("k = 2 on STAR4 exceeds the Steiner optimum") {
        // Pair components cost 2 each, so the LP is the terminal spanning tree bound.
        const auto inst = test::star4();
        const ContractionState state(inst);
        const ComponentSet set = generate_components(state, {2});
        auto lp = build_k_dcr_lp(set, 0, state.active());
        const auto rg = row_generation_solve(lp, make_oracle(set, 0, state.active()), rng, solver);
        CHECK(rg.solution.objective == doctest::Approx(6.0));
        CHECK(solve_exact(inst).cost == 4);
    }
    SUBCASE("row cap") {
        lp::LpProblem p;
        p.add_column({1.0});
        SeparationOracle always = [](std::span<const double>, std::mt19937_64&) -> std::optional<lp::Row> {
            return lp::Row{{{0, 1.0}}, lp::Relation::ge, 0.0};
        };
        CHECK_THROWS_WITH_AS(row_generation_solve(p, always, rng, solver, 5), "row generation stopped after 5 rows",
                             IrError);
        CHECK(p.row_count() == 5);
    }
    SUBCASE("infeasible LP is returned, not hidden") {
        lp::LpProblem p;
        p.add_column({1.0, 0.0, 1.0});
        p.add_row({{{0, 1.0}}, lp::Relation::ge, 2.0});
        int calls = 0;
        SeparationOracle never = [&](std::span<const double>, std::mt19937_64&) -> std::optional<lp::Row> {
            ++calls;
            return std::nullopt;
        };
        CHECK(row_generation_solve(p, never, rng, solver).solution.status == lp::LpStatus::infeasible);
        CHECK(calls == 0);
    }
}

TEST_CASE("property: row generation equals the full k-DCR LP and stays below exact when k >= |T|") {
    std::mt19937_64 rng(76);
    lp::SimplexSolver solver;
    for (int round = 0; round < 120; ++round) {
        const auto inst = test::random_instance(rng, 3, 8, 6, 8);
        if (inst.terminals.size() < 2) continue;
        const ContractionState state(inst);
        const int k = 2 + static_cast<int>(round % 3);
        const ComponentSet set = generate_components(state, {k});
        auto lp = build_k_dcr_lp(set, state.root(), state.active());
        const auto rg = row_generation_solve(lp, make_oracle(set, state.root(), state.active()), rng, solver);
        REQUIRE(rg.solution.status == lp::LpStatus::optimal);
        const auto full = test::full_k_dcr(set, state.root(), state.active());
        REQUIRE(full.status == lp::LpStatus::optimal);
        CHECK(rg.solution.objective == doctest::Approx(full.objective).epsilon(1e-6).scale(1.0));
        // the returned point satisfies every cut
        CHECK(test::brute_force_min_cut_mass(rg.solution.values, set, state.root(), state.active()) >=
              1.0 - kViolationTol);
        if (k >= static_cast<int>(inst.terminals.size()))
            CHECK(rg.solution.objective <= static_cast<double>(test::brute_force_steiner(inst)) + 1e-6);
    }
}

TEST_CASE("property: k-DCR value does not increase with k") {
    std::mt19937_64 rng(77);
    lp::SimplexSolver solver;
    for (int round = 0; round < 60; ++round) {
        const auto inst = test::random_instance(rng, 3, 8, 5, 8);
        if (inst.terminals.size() < 3) continue;
        const ContractionState state(inst);
        double previous = 1e300;
        for (int k = 2; k <= 4; ++k) {
            const ComponentSet set = generate_components(state, {k});
            const double value = test::full_k_dcr(set, state.root(), state.active()).objective;
            CHECK(value <= previous + 1e-6);
            previous = value;
        }
    }
}

// ---------------------------------------------------------------- sampling and contraction

TEST_CASE("component sampling") {
    std::mt19937_64 rng(78);
    const std::vector<double> one{0.0, 2.5, 0.0};
    for (int i = 0; i < 100; ++i) CHECK(sample_component(one, rng) == 1);

    auto frequency = [&](const std::vector<double>& x) {
        int hits = 0;
        for (int i = 0; i < 10000; ++i) hits += sample_component(x, rng) == 0;
        return hits / 10000.0;
    };
    CHECK(std::abs(frequency({1.0, 1.0}) - 0.5) <= 0.05);
    CHECK(std::abs(frequency({3.0, 1.0}) - 0.75) <= 0.05);
    CHECK_THROWS_AS(sample_component(std::vector<double>{0.0, 0.0}, rng), IrError);
    CHECK_THROWS_AS(sample_component(std::vector<double>{}, rng), IrError);
}

TEST_CASE("contraction examples") {
    const auto inst = test::star3();
    const ComponentSet set = generate_components(ContractionState(inst), {3});
    SUBCASE("triple leaves one terminal") {
        const auto next = contract_component(ContractionState(inst), find_component(set, {0, 1, 2}, 0));
        CHECK(next.active() == std::vector<NodeId>{0});
        CHECK(tree_sum(next.accumulated()) == 3);
    }
    SUBCASE("pair t1 t2 into t1") {
        ContractionState state(inst);
        CHECK(state.metric().dist(0, 2) == 2);
        state.contract(find_component(set, {0, 1}, 0));
        CHECK(state.active() == std::vector<NodeId>{0, 2});
        CHECK_FALSE(state.is_active(1));
        CHECK(state.representative(1) == 0);
        CHECK(state.metric().dist(0, 2) == 2);
        CHECK(state.metric().dist(1, 0) == 0);
        CHECK_THROWS_WITH_AS(state.contract(find_component(set, {1, 2}, 2)),
                             "component references inactive terminal 1", IrError);
    }
}

TEST_CASE("property: contracted metric is the closure of the contracted graph") {
    std::mt19937_64 rng(79);
    for (int round = 0; round < 100; ++round) {
        const auto inst = test::random_instance(rng, 3, 8, 6, 9);
        if (inst.terminals.size() < 2) continue;
        random_phases(inst, 2 + static_cast<int>(rng() % 2), rng, [&](const ContractionState& state, const ComponentSet&) {
            const NodeId n = inst.graph.node_count();
            const Metric& m = state.metric();
            // merged terminals sit at distance 0 from their representative
            std::vector<Edge> edges;
            for (const Edge& e : inst.graph.edges()) edges.push_back(e);
            for (NodeId v = 0; v < n; ++v)
                if (state.representative(v) != v) edges.push_back({v, state.representative(v), 0});
            const Metric closure = metric_closure(Graph(n, edges));
            for (NodeId a = 0; a < n; ++a)
                for (NodeId b = 0; b < n; ++b) {
                    CHECK(m.dist(a, b) == closure.dist(a, b));
                    for (NodeId c = 0; c < n; ++c) CHECK(m.dist(a, b) <= m.dist(a, c) + m.dist(c, b));
                }
        });
    }
}

// ---------------------------------------------------------------- driver

TEST_CASE("ir_steiner examples") {
    SUBCASE("STAR3, k = 3, 20 seeds") {
        const auto inst = test::star3();
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto tree = ir_steiner(inst, 3, seed);
            CHECK(tree.cost == 3);
            CHECK_FALSE(validate_tree(inst, tree).has_value());
        }
    }
    SUBCASE("two terminals give the shortest path") {
        const std::vector<Edge> edges{{0, 1, 4}, {1, 2, 4}, {0, 3, 1}, {3, 4, 1}, {4, 2, 1}};
        const auto inst = make_instance(5, edges, {0, 2});
        for (int k = 2; k <= 4; ++k) CHECK(ir_steiner(inst, k, 9).cost == 3);
    }
    SUBCASE("single terminal") {
        const auto inst = make_instance(2, std::vector<Edge>{{0, 1, 3}}, {1});
        const auto report = ir_steiner_detailed(inst, {});
        CHECK(report.phases == 0);
        CHECK(report.tree.cost == 0);
    }
    SUBCASE("bad k") {
        CHECK_THROWS_AS(ir_steiner(test::star3(), 1, 0), IrError);
    }
    SUBCASE("errors carry the phase") {
        struct Failing : lp::LpSolver {
            lp::LpSolution solve(const lp::LpProblem&) override { return {}; }
            lp::LpSolution resolve(const lp::LpProblem&, const lp::LpBasis&) override { return {}; }
        } failing;
        IrOptions opts;
        opts.solver = &failing;
        CHECK_THROWS_WITH_AS(ir_steiner_detailed(test::star3(), opts), "iteration 1: LP numerical-failure", IrError);
    }
    SUBCASE("deadline") {
        const Deadline past(std::chrono::duration<double>(-1.0));
        CHECK_THROWS_AS(ir_steiner(test::star3(), 3, 0, past), Timeout);
    }
}

TEST_CASE("property: ir_steiner is valid, above exact, and makes progress") {
    const auto suite = test::small_suite(60, 80);
    int differing = 0, compared = 0;
    for (const auto& inst : suite) {
        const Cost opt = solve_exact(inst).cost;
        for (int k = 2; k <= 3; ++k) {
            for (std::uint64_t seed = 0; seed < 3; ++seed) {
                IrOptions opts;
                opts.k = k;
                opts.seed = seed;
                std::size_t last_active = inst.terminals.size() + 1;
                opts.observer = [&](const PhaseReport& r) {
                    CHECK(r.state->active().size() < last_active);
                    last_active = r.state->active().size();
                    CHECK(r.chosen < r.components->components.size());
                };
                const auto report = ir_steiner_detailed(inst, opts);
                CHECK_FALSE(validate_tree(inst, report.tree).has_value());
                CHECK(report.tree.cost >= opt);
                CHECK(report.phases <= std::max<int>(0, static_cast<int>(inst.terminals.size()) - 1));

                opts.pruning = false;
                opts.observer = nullptr;
                const auto open = ir_steiner_detailed(inst, opts);
                CHECK_FALSE(validate_tree(inst, open.tree).has_value());
                if (!report.lp_objectives.empty()) {
                    ++compared;
                    if (std::abs(report.lp_objectives[0] - open.lp_objectives[0]) > 1e-6) ++differing;
                }
            }
        }
    }
    MESSAGE("pruning changed the phase-1 LP on " << differing << " of " << compared << " runs");
}

TEST_CASE("ir_steiner is deterministic per seed") {
    const auto suite = test::small_suite(20, 81);
    for (const auto& inst : suite) {
        const auto a = ir_steiner(inst, 3, 42), b = ir_steiner(inst, 3, 42);
        CHECK(a.edges == b.edges);
    }
}
