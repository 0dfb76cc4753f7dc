#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "steiner/bench.hpp"
#include "steiner/steinlib.hpp"

namespace fs = std::filesystem;
using namespace steiner;
using namespace steiner::bench;

namespace {

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
    spdlog::info("wrote {}", path.string());
}

// "ir:k=5:nocache" or "msls:restarts=10:seed=3"; bare ids take the defaults.
AlgorithmSpec parse_algo(const std::string& text, const AlgorithmSpec& defaults) {
    AlgorithmSpec spec = defaults;
    std::stringstream ss(text);
    std::string part;
    std::getline(ss, spec.algo, ':');
    while (std::getline(ss, part, ':')) {
        auto eq = part.find('=');
        std::string key = part.substr(0, eq);
        std::string value = eq == std::string::npos ? "" : part.substr(eq + 1);
        if (key == "k") {
            spec.k = std::stoi(value);
        } else if (key == "seed") {
            spec.seed = std::stoull(value);
        } else if (key == "restarts") {
            spec.restarts = std::stoi(value);
        } else if (key == "nocache") {
            spec.cache = false;
        } else {
            throw std::invalid_argument("unknown algorithm option '" + key + "' in '" + text + "'");
        }
    }
    check_spec(spec);
    return spec;
}

void write_tables(const std::vector<RunRecord>& records, const fs::path& out) {
    Aggregate agg = aggregate(records);
    write_file(out / "table_ratios.csv", ratio_table_csv(agg));
    write_file(out / "table_solved.csv", solved_table_csv(agg));
}

int exit_code(const std::vector<RunRecord>& records) {
    for (const RunRecord& r : records) {
        if (r.status == RunStatus::error) return 1;
    }
    return 0;
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("steiner");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("STEINER_LOG")) {
        auto level = spdlog::level::from_str(env);
        if (level == spdlog::level::off && std::string(env) != "off") {
            spdlog::warn("STEINER_LOG='{}' not understood; using warn", env);
        } else {
            spdlog::set_level(level);
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Steiner tree solvers and benchmark harness"};
    app.require_subcommand(1);

    std::vector<std::string> algos;
    AlgorithmSpec defaults;
    bool no_cache = false;
    std::string instances_dir, best_known_file, out_dir, format = "csv", records_file;
    double timeout_sec = 600;
    int jobs = 1;
    bool isolate = false;

    auto* run = app.add_subcommand("run", "run algorithms over a directory of .stp files");
    run->add_option("--algo", algos, "greedy|zel|dw|ir|msls, repeatable, with :k=N :seed=N :restarts=N :nocache")
        ->required();
    run->add_option("--k", defaults.k, "IR component size")->check(CLI::Range(2, 64));
    run->add_option("--seed", defaults.seed, "seed for ir and msls");
    run->add_option("--restarts", defaults.restarts, "msls restarts")->check(CLI::PositiveNumber);
    run->add_flag("--ir-no-cache", no_cache, "one Dreyfus-Wagner cache per subset instead of per phase");
    run->add_option("--instances", instances_dir, "directory of .stp files")->required()->check(CLI::ExistingDirectory);
    run->add_option("--best-known", best_known_file, "CSV name,class,cost")->check(CLI::ExistingFile);
    run->add_option("--timeout-sec", timeout_sec, "per-run wall-clock limit")->check(CLI::PositiveNumber);
    run->add_option("--jobs", jobs, "parallel (instance, algorithm) pairs")->check(CLI::PositiveNumber);
    run->add_flag("--isolate", isolate, "run each pair in a child process killed at the limit");
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--format", format, "records format")->check(CLI::IsMember({"csv", "json"}));

    auto* agg = app.add_subcommand("aggregate", "ratio and solved-count tables from records");
    agg->add_option("--records", records_file, "records.csv or records.json")->required()->check(CLI::ExistingFile);
    agg->add_option("--out", out_dir, "output directory")->required();

    auto* plots = app.add_subcommand("plots", "histogram and scatter data from records");
    plots->add_option("--records", records_file, "records.csv or records.json")->required()->check(CLI::ExistingFile);
    plots->add_option("--out", out_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (!out_dir.empty()) fs::create_directories(out_dir);
        if (run->parsed()) {
            defaults.cache = !no_cache;
            std::vector<AlgorithmSpec> specs;
            for (const std::string& a : algos) specs.push_back(parse_algo(a, defaults));
            BestKnownTable best = best_known_file.empty() ? BestKnownTable{} : load_best_known_file(best_known_file);
            spdlog::info("seed {} timeout {}s jobs {}", defaults.seed, timeout_sec, jobs);
            auto records = run_suite(instances_dir, best, specs, {timeout_sec, jobs, isolate});
            fs::path out(out_dir);
            write_file(out / (format == "json" ? "records.json" : "records.csv"),
                       format == "json" ? records_json(records) : records_csv(records));
            write_file(out / "results.csv", results_csv(records));
            write_tables(records, out);
            return exit_code(records);
        }
        auto records = load_records(records_file);
        if (agg->parsed()) {
            write_tables(records, out_dir);
            return exit_code(records);
        }
        PlotData data = emit_plots(records);
        write_file(fs::path(out_dir) / "histogram.csv", data.histogram);
        for (const auto& [name, body] : data.scatter) write_file(fs::path(out_dir) / name, body);
        return exit_code(records);
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 2;
    }
}
