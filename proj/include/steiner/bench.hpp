#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "steiner/instance.hpp"
#include "steiner/steinlib.hpp"

namespace steiner::bench {

struct AlgorithmSpec {
    /// greedy | zel | dw | ir | msls
    std::string algo;
    int k = 3;
    std::uint64_t seed = 0;
    int restarts = 100;
    /// IR only: one Dreyfus-Wagner cache per phase instead of one per subset.
    bool cache = true;

    /// Column name in reports: greedy, zel, dw, ir-k3, ir-k5-nocache, msls.
    std::string label() const;
};

/// Throws std::invalid_argument for unknown ids or bad parameters.
void check_spec(const AlgorithmSpec& spec);

using SolverFn = std::function<SteinerTree(const SteinerInstance&, const Deadline&)>;

SolverFn make_solver(const AlgorithmSpec& spec);

struct RunRecord {
    std::string instance;
    std::string steinlib_class;
    std::string algorithm;  // AlgorithmSpec::label()
    int k = 0;
    std::uint64_t seed = 0;
    int restarts = 0;
    std::optional<Cost> cost;
    std::optional<Cost> best_known;
    std::optional<double> ratio;
    /// NaN when not measured (imported results); such cells are left empty.
    double seconds = 0.0;
    RunStatus status = RunStatus::ok;
    std::string message;
};

/// Runs one solver under a cooperative deadline and validates its tree.
/// A run that returns after the limit counts as a timeout.
RunRecord run_one(const SteinerInstance& instance, const AlgorithmSpec& spec, const SolverFn& solver,
                  double timeout_sec, const BestKnownTable& best_known);

/// Same contract as run_one, in a forked child killed at the limit.
RunRecord run_one_isolated(const SteinerInstance& instance, const AlgorithmSpec& spec, const SolverFn& solver,
                           double timeout_sec, const BestKnownTable& best_known);

struct SuiteOptions {
    double timeout_sec = 600.0;
    int jobs = 1;
    /// Run every pair in a forked child that is killed at the limit.
    bool isolate = false;
};

/// Every *.stp file of `dir` (sorted by name) against every spec. Records
/// come back sorted by (instance, position of the spec in `specs`).
std::vector<RunRecord> run_suite(const std::string& dir, const BestKnownTable& best_known,
                                 const std::vector<AlgorithmSpec>& specs, const SuiteOptions& options);

/// Same as run_suite for already loaded instances.
std::vector<RunRecord> run_instances(const std::vector<SteinerInstance>& instances, const BestKnownTable& best_known,
                                     const std::vector<AlgorithmSpec>& specs, const SuiteOptions& options);

inline constexpr const char* kRecordHeader =
    "instance,class,algorithm,k,seed,restarts,cost,best_known,ratio,seconds,status,message";

std::string records_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> parse_records_csv(std::istream& in);
std::string records_json(const std::vector<RunRecord>& records);
std::vector<RunRecord> parse_records_json(std::istream& in);
/// Picks the parser from the file extension (.json, else CSV).
std::vector<RunRecord> load_records(const std::string& path);

/// Short results in the steinlib-io layout.
std::string results_csv(const std::vector<RunRecord>& records);

struct AggregateRow {
    std::string steinlib_class;  // "Average" for the global row
    std::size_t instances = 0;
    std::vector<double> mean_ratio;    // per algorithm
    std::vector<double> mean_seconds;  // per algorithm
};

struct SolvedCount {
    std::string algorithm;
    std::size_t solved = 0;
    std::size_t total = 0;
};

struct Aggregate {
    /// In order of first appearance in the records.
    std::vector<std::string> algorithms;
    /// False for algorithms none of whose records carries a time.
    std::vector<bool> timed;
    /// One row per class (sorted), then the Average row; means over the
    /// instances every algorithm solved with a known ratio.
    std::vector<AggregateRow> rows;
    std::vector<SolvedCount> solved;
    std::size_t common_instances = 0;
};

Aggregate aggregate(const std::vector<RunRecord>& records);

/// class,<alg>_ratio,<alg>_seconds,... with three decimals; the seconds
/// column is left out for untimed algorithms.
std::string ratio_table_csv(const Aggregate& agg);
/// algorithm,solved,total,percent
std::string solved_table_csv(const Aggregate& agg);

struct PlotData {
    /// bin,<alg>,... with bins of width 0.01 from 1.00.
    std::string histogram;
    /// (file name, contents): instance,<A>,<B> per algorithm pair.
    std::vector<std::pair<std::string, std::string>> scatter;
};

/// Histogram and scatter data over the common solved set. Throws
/// std::invalid_argument when no record is ok.
PlotData emit_plots(const std::vector<RunRecord>& records);

}  // namespace steiner::bench
