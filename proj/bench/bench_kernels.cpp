// Serial reference versus OpenMP kernels on the bundled B replicas.

#include <benchmark/benchmark.h>

#include <map>
#include <string>

#include "steiner/dreyfus_wagner.hpp"
#include "steiner/graph.hpp"
#include "steiner/multistart.hpp"
#include "steiner/steinlib.hpp"
#include "steiner/zelikovsky.hpp"

using namespace steiner;

namespace {

const SteinerInstance& replica(const std::string& name) {
    static std::map<std::string, SteinerInstance> cache;
    auto it = cache.find(name);
    if (it == cache.end()) {
        it = cache.emplace(name, read_stp_file(std::string(STEINER_DATA_DIR) + "/b-replica/" + name + ".stp")).first;
    }
    return it->second;
}

void closure(benchmark::State& state, bool parallel) {
    const auto& inst = replica("b18r");
    for (auto _ : state) {
        Metric m = parallel ? metric_closure(inst.graph) : metric_closure_serial(inst.graph);
        benchmark::DoNotOptimize(m);
    }
}

void restricted(benchmark::State& state, bool parallel) {
    const auto& inst = replica("b18r");
    const auto blocked = inst.terminal_mask();
    for (auto _ : state) {
        Metric m = parallel ? restricted_closure(inst.graph, blocked) : restricted_closure_serial(inst.graph, blocked);
        benchmark::DoNotOptimize(m);
    }
}

void triples(benchmark::State& state, bool parallel) {
    const auto& inst = replica("b18r");
    const Metric metric = metric_closure(inst.graph);
    for (auto _ : state) {
        auto t = parallel ? find_triples(metric, inst.terminals) : find_triples_serial(metric, inst.terminals);
        benchmark::DoNotOptimize(t);
    }
}

void exact(benchmark::State& state, bool parallel) {
    const auto& inst = replica("b01r");
    ExactOptions opts;
    opts.parallel = parallel;
    for (auto _ : state) {
        auto t = solve_exact(inst, Deadline::never(), opts);
        benchmark::DoNotOptimize(t);
    }
}

void restarts(benchmark::State& state, bool parallel) {
    const auto& inst = replica("b13r");
    for (auto _ : state) {
        auto r = ls::multistart_detailed(inst, {16, 1, parallel});
        benchmark::DoNotOptimize(r);
    }
}

}  // namespace

BENCHMARK_CAPTURE(closure, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(closure, openmp, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(restricted, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(restricted, openmp, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(triples, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(triples, openmp, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(exact, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(exact, openmp, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(restarts, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(restarts, openmp, true)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
