#include "steiner/bench.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <json.hpp>

#include "steiner/dreyfus_wagner.hpp"
#include "steiner/greedy.hpp"
#include "steiner/multistart.hpp"
#include "steiner/steiner_ir.hpp"
#include "steiner/zelikovsky.hpp"

namespace steiner::bench {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Messages land in a CSV cell.
std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = c == ',' ? ';' : ' ';
    }
    return s;
}

std::string fmt3(double v) { return fmt::format("{:.3f}", v); }

std::string seconds_cell(double s) { return std::isnan(s) ? std::string() : format_seconds(s); }

std::string opt_cost(const std::optional<Cost>& c) { return c ? std::to_string(*c) : std::string(); }

RunRecord blank_record(const SteinerInstance& instance, const AlgorithmSpec& spec, const BestKnownTable& best_known) {
    RunRecord rec;
    rec.instance = instance.name;
    rec.algorithm = spec.label();
    rec.k = spec.algo == "ir" ? spec.k : 0;
    rec.seed = spec.algo == "ir" || spec.algo == "msls" ? spec.seed : 0;
    rec.restarts = spec.algo == "msls" ? spec.restarts : 0;
    if (auto it = best_known.find(instance.name); it != best_known.end()) {
        rec.steinlib_class = it->second.steinlib_class;
        rec.best_known = it->second.cost;
    } else if (instance.best_known) {
        rec.best_known = instance.best_known;
    }
    return rec;
}

// Validates the tree and fills cost and ratio.
void record_tree(RunRecord& rec, const SteinerInstance& instance, const SteinerTree& tree) {
    if (auto why = validate_tree(instance, tree)) {
        rec.status = RunStatus::error;
        rec.message = "INVALID TREE: " + *why;
        spdlog::error("{} {}: solver returned an invalid tree: {}", rec.instance, rec.algorithm, *why);
        return;
    }
    rec.status = RunStatus::ok;
    rec.cost = tree.cost;
    if (rec.best_known && *rec.best_known > 0) {
        rec.ratio = static_cast<double>(tree.cost) / static_cast<double>(*rec.best_known);
    } else if (rec.best_known && *rec.best_known == 0 && tree.cost == 0) {
        rec.ratio = 1.0;
    }
}

void mark_timeout(RunRecord& rec) {
    rec.status = RunStatus::timeout;
    rec.cost.reset();
    rec.ratio.reset();
}

// Child side of the isolated mode: "ok" plus edges, or a status line.
std::string child_payload(const SteinerInstance& instance, const SolverFn& solver, double timeout_sec) {
    try {
        Deadline deadline{std::chrono::duration<double>(timeout_sec)};
        SteinerTree tree = solver(instance, deadline);
        std::string out = "ok\n";
        for (const Edge& e : tree.edges) out += fmt::format("{} {} {}\n", e.u, e.v, e.weight);
        return out;
    } catch (const Timeout&) {
        return "timeout\n";
    } catch (const DwError& e) {
        return std::string("refused\n") + e.what() + "\n";
    } catch (const std::exception& e) {
        return std::string("error\n") + e.what() + "\n";
    }
}

bool write_all(int fd, const std::string& data) {
    std::size_t done = 0;
    while (done < data.size()) {
        ssize_t n = ::write(fd, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        done += static_cast<std::size_t>(n);
    }
    return true;
}

RunRecord unparsable(const std::string& name, const AlgorithmSpec& spec, const BestKnownTable& best_known,
                     const std::string& why) {
    SteinerInstance stub;
    stub.name = name;
    RunRecord rec = blank_record(stub, spec, best_known);
    rec.status = RunStatus::error;
    rec.message = sanitize("unparsable instance: " + why);
    return rec;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    out.push_back(cell);
    return out;
}

std::optional<Cost> parse_opt_cost(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return static_cast<Cost>(std::stoll(s));
}

std::optional<double> parse_opt_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return std::stod(s);
}

struct CommonSet {
    std::vector<std::string> algorithms;
    // instance -> per-algorithm record (all ok with a ratio)
    std::map<std::string, std::vector<const RunRecord*>> rows;
};

CommonSet common_solved(const std::vector<RunRecord>& records) {
    CommonSet cs;
    std::map<std::string, std::size_t> column;
    for (const RunRecord& r : records) {
        if (column.emplace(r.algorithm, cs.algorithms.size()).second) cs.algorithms.push_back(r.algorithm);
    }
    std::map<std::string, std::vector<const RunRecord*>> all;
    for (const RunRecord& r : records) {
        auto& row = all[r.instance];
        row.resize(cs.algorithms.size(), nullptr);
        const RunRecord*& slot = row[column[r.algorithm]];
        if (slot) throw std::invalid_argument("duplicate record for " + r.instance + " / " + r.algorithm);
        slot = &r;
    }
    for (auto& [name, row] : all) {
        bool solved = std::all_of(row.begin(), row.end(), [](const RunRecord* r) {
            return r && r->status == RunStatus::ok && r->ratio.has_value();
        });
        if (solved) cs.rows.emplace(name, row);
    }
    return cs;
}

}  // namespace

std::string AlgorithmSpec::label() const {
    if (algo == "ir") return fmt::format("ir-k{}{}", k, cache ? "" : "-nocache");
    return algo;
}

void check_spec(const AlgorithmSpec& spec) {
    static const std::set<std::string> known{"greedy", "zel", "dw", "ir", "msls"};
    if (!known.count(spec.algo)) throw std::invalid_argument("unknown algorithm '" + spec.algo + "'");
    if (spec.algo == "ir" && spec.k < 2) throw std::invalid_argument("ir needs k >= 2");
    if (spec.algo == "msls" && spec.restarts < 1) throw std::invalid_argument("msls needs restarts >= 1");
}

SolverFn make_solver(const AlgorithmSpec& spec) {
    check_spec(spec);
    if (spec.algo == "greedy") {
        return [](const SteinerInstance& inst, const Deadline&) { return greedy_steiner(inst); };
    }
    if (spec.algo == "zel") {
        return [](const SteinerInstance& inst, const Deadline& d) { return zelikovsky(inst, {}, d); };
    }
    if (spec.algo == "dw") {
        return [](const SteinerInstance& inst, const Deadline& d) { return solve_exact(inst, d); };
    }
    if (spec.algo == "ir") {
        ir::IrOptions opts;
        opts.k = spec.k;
        opts.seed = spec.seed;
        opts.shared_cache = spec.cache;
        return [opts](const SteinerInstance& inst, const Deadline& d) {
            return ir::ir_steiner_detailed(inst, opts, d).tree;
        };
    }
    ls::MultistartOptions opts;
    opts.restarts = spec.restarts;
    opts.seed = spec.seed;
    return [opts](const SteinerInstance& inst, const Deadline& d) {
        return ls::multistart_detailed(inst, opts, d).tree;
    };
}

RunRecord run_one(const SteinerInstance& instance, const AlgorithmSpec& spec, const SolverFn& solver,
                  double timeout_sec, const BestKnownTable& best_known) {
    RunRecord rec = blank_record(instance, spec, best_known);
    Deadline deadline{std::chrono::duration<double>(timeout_sec)};
    auto start = Clock::now();
    try {
        SteinerTree tree = solver(instance, deadline);
        rec.seconds = since(start);
        record_tree(rec, instance, tree);
        if (rec.status == RunStatus::ok && rec.seconds > timeout_sec) mark_timeout(rec);
    } catch (const Timeout&) {
        rec.seconds = since(start);
        mark_timeout(rec);
    } catch (const DwError& e) {
        // The exact solver refuses instances it cannot hold in memory; these
        // count as unsolved within the limits, like a timeout.
        rec.seconds = since(start);
        mark_timeout(rec);
        rec.message = sanitize(std::string("refused: ") + e.what());
    } catch (const std::exception& e) {
        rec.seconds = since(start);
        rec.status = RunStatus::error;
        rec.message = sanitize(e.what());
        spdlog::error("{} {}: {}", rec.instance, rec.algorithm, e.what());
    }
    spdlog::debug("{} {} {} cost={} {:.3f}s", rec.instance, rec.algorithm, to_string(rec.status), opt_cost(rec.cost),
                 rec.seconds);
    return rec;
}

RunRecord run_one_isolated(const SteinerInstance& instance, const AlgorithmSpec& spec, const SolverFn& solver,
                           double timeout_sec, const BestKnownTable& best_known) {
    RunRecord rec = blank_record(instance, spec, best_known);
    int fds[2];
    if (::pipe(fds) != 0) throw std::runtime_error("pipe failed");
    auto start = Clock::now();
    pid_t pid = ::fork();
    if (pid < 0) {
        ::close(fds[0]);
        ::close(fds[1]);
        throw std::runtime_error("fork failed");
    }
    if (pid == 0) {
        ::close(fds[0]);
        bool ok = write_all(fds[1], child_payload(instance, solver, timeout_sec));
        ::close(fds[1]);
        ::_exit(ok ? 0 : 1);
    }
    ::close(fds[1]);
    std::string data;
    bool killed = false;
    char buf[4096];
    for (;;) {
        double left = timeout_sec - since(start);
        if (left <= 0) {
            ::kill(pid, SIGKILL);
            killed = true;
            break;
        }
        pollfd p{fds[0], POLLIN, 0};
        int r = ::poll(&p, 1, static_cast<int>(std::ceil(left * 1000.0)));
        if (r < 0 && errno == EINTR) continue;
        if (r <= 0) continue;
        ssize_t n = ::read(fds[0], buf, sizeof buf);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) break;
        data.append(buf, static_cast<std::size_t>(n));
    }
    ::close(fds[0]);
    int wstatus = 0;
    ::waitpid(pid, &wstatus, 0);
    rec.seconds = since(start);
    if (killed) {
        mark_timeout(rec);
        rec.message = "killed at the limit";
        return rec;
    }
    std::istringstream in(data);
    std::string head;
    std::getline(in, head);
    std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    while (!rest.empty() && rest.back() == '\n') rest.pop_back();
    if (head == "ok") {
        std::vector<Edge> edges;
        std::istringstream lines(rest);
        Edge e;
        while (lines >> e.u >> e.v >> e.weight) edges.push_back(e);
        record_tree(rec, instance, make_tree(std::move(edges)));
        if (rec.status == RunStatus::ok && rec.seconds > timeout_sec) mark_timeout(rec);
    } else if (head == "timeout" || head == "refused") {
        mark_timeout(rec);
        rec.message = sanitize(rest);
    } else {
        rec.status = RunStatus::error;
        rec.message = sanitize(head == "error" ? rest : fmt::format("child exited abnormally (status {})", wstatus));
    }
    return rec;
}

std::vector<RunRecord> run_instances(const std::vector<SteinerInstance>& instances, const BestKnownTable& best_known,
                                     const std::vector<AlgorithmSpec>& specs, const SuiteOptions& options) {
    std::vector<SolverFn> solvers;
    for (const AlgorithmSpec& s : specs) solvers.push_back(make_solver(s));
    const std::size_t pairs = instances.size() * specs.size();
    std::vector<RunRecord> records(pairs);
    std::vector<std::string> failures(pairs);
    auto run_pair = [&](std::size_t p) {
        const SteinerInstance& inst = instances[p / specs.size()];
        std::size_t a = p % specs.size();
        records[p] = options.isolate ? run_one_isolated(inst, specs[a], solvers[a], options.timeout_sec, best_known)
                                     : run_one(inst, specs[a], solvers[a], options.timeout_sec, best_known);
    };
    if (options.isolate || options.jobs <= 1) {
        for (std::size_t p = 0; p < pairs; ++p) run_pair(p);
    } else {
#pragma omp parallel for schedule(dynamic, 1) num_threads(options.jobs)
        for (std::size_t p = 0; p < pairs; ++p) {
            try {
                run_pair(p);
            } catch (const std::exception& e) {
                failures[p] = e.what();
            }
        }
        for (const std::string& f : failures) {
            if (!f.empty()) throw std::runtime_error(f);
        }
    }
    // Pair index order is (instance order, spec order); sort instances by name.
    std::vector<std::size_t> order(pairs);
    for (std::size_t p = 0; p < pairs; ++p) order[p] = p;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return records[x].instance < records[y].instance;
    });
    std::vector<RunRecord> sorted;
    sorted.reserve(pairs);
    for (std::size_t p : order) sorted.push_back(std::move(records[p]));
    return sorted;
}

std::vector<RunRecord> run_suite(const std::string& dir, const BestKnownTable& best_known,
                                 const std::vector<AlgorithmSpec>& specs, const SuiteOptions& options) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".stp") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<SteinerInstance> instances;
    std::vector<RunRecord> broken;
    for (const fs::path& f : files) {
        try {
            SteinerInstance inst = read_stp_file(f.string());
            inst.name = f.stem().string();
            instances.push_back(std::move(inst));
        } catch (const std::exception& e) {
            spdlog::error("{}: {}", f.string(), e.what());
            for (const AlgorithmSpec& s : specs) broken.push_back(unparsable(f.stem().string(), s, best_known, e.what()));
        }
    }
    std::vector<RunRecord> records = run_instances(instances, best_known, specs, options);
    if (broken.empty()) return records;
    records.insert(records.end(), std::make_move_iterator(broken.begin()), std::make_move_iterator(broken.end()));
    std::map<std::string, std::size_t> spec_pos;
    for (std::size_t i = 0; i < specs.size(); ++i) spec_pos.emplace(specs[i].label(), i);
    std::stable_sort(records.begin(), records.end(), [&](const RunRecord& x, const RunRecord& y) {
        if (x.instance != y.instance) return x.instance < y.instance;
        return spec_pos[x.algorithm] < spec_pos[y.algorithm];
    });
    return records;
}

std::string records_csv(const std::vector<RunRecord>& records) {
    std::string out = std::string(kRecordHeader) + '\n';
    for (const RunRecord& r : records) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", r.instance, r.steinlib_class, r.algorithm, r.k,
                           r.seed, r.restarts, opt_cost(r.cost), opt_cost(r.best_known),
                           r.ratio ? fmt::format("{:.6f}", *r.ratio) : std::string(), seconds_cell(r.seconds),
                           to_string(r.status), sanitize(r.message));
    }
    return out;
}

std::vector<RunRecord> parse_records_csv(std::istream& in) {
    std::vector<RunRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (line.rfind("instance,", 0) == 0) continue;
        auto f = split_csv(line);
        if (f.size() != 12) throw std::invalid_argument(fmt::format("records line {}: expected 12 fields", line_no));
        try {
            RunRecord r;
            r.instance = f[0];
            r.steinlib_class = f[1];
            r.algorithm = f[2];
            r.k = std::stoi(f[3]);
            r.seed = std::stoull(f[4]);
            r.restarts = std::stoi(f[5]);
            r.cost = parse_opt_cost(f[6]);
            r.best_known = parse_opt_cost(f[7]);
            r.ratio = parse_opt_double(f[8]);
            r.seconds = f[9].empty() ? std::nan("") : std::stod(f[9]);
            r.status = parse_status(f[10]);
            r.message = f[11];
            out.push_back(std::move(r));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(fmt::format("records line {}: {}", line_no, e.what()));
        } catch (const std::out_of_range&) {
            throw std::invalid_argument(fmt::format("records line {}: number out of range", line_no));
        }
    }
    return out;
}

std::string records_json(const std::vector<RunRecord>& records) {
    json arr = json::array();
    for (const RunRecord& r : records) {
        json j;
        j["instance"] = r.instance;
        j["class"] = r.steinlib_class;
        j["algorithm"] = r.algorithm;
        j["k"] = r.k;
        j["seed"] = r.seed;
        j["restarts"] = r.restarts;
        j["cost"] = r.cost ? json(*r.cost) : json(nullptr);
        j["best_known"] = r.best_known ? json(*r.best_known) : json(nullptr);
        j["ratio"] = r.ratio ? json(*r.ratio) : json(nullptr);
        j["seconds"] = std::isnan(r.seconds) ? json(nullptr) : json(r.seconds);
        j["status"] = to_string(r.status);
        j["message"] = r.message;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + '\n';
}

std::vector<RunRecord> parse_records_json(std::istream& in) {
    std::vector<RunRecord> out;
    json arr;
    try {
        arr = json::parse(in);
        for (const json& j : arr) {
            RunRecord r;
            r.instance = j.at("instance").get<std::string>();
            r.steinlib_class = j.value("class", "");
            r.algorithm = j.at("algorithm").get<std::string>();
            r.k = j.value("k", 0);
            r.seed = j.value("seed", std::uint64_t{0});
            r.restarts = j.value("restarts", 0);
            if (j.contains("cost") && !j["cost"].is_null()) r.cost = j["cost"].get<Cost>();
            if (j.contains("best_known") && !j["best_known"].is_null()) r.best_known = j["best_known"].get<Cost>();
            if (j.contains("ratio") && !j["ratio"].is_null()) r.ratio = j["ratio"].get<double>();
            r.seconds = j.contains("seconds") && !j["seconds"].is_null() ? j["seconds"].get<double>() : std::nan("");
            r.status = parse_status(j.at("status").get<std::string>());
            r.message = j.value("message", "");
            out.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("records json: ") + e.what());
    }
    return out;
}

std::vector<RunRecord> load_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    if (std::filesystem::path(path).extension() == ".json") return parse_records_json(in);
    return parse_records_csv(in);
}

std::string results_csv(const std::vector<RunRecord>& records) {
    std::string out = std::string(kResultHeader) + '\n';
    for (const RunRecord& r : records) {
        out += write_result({r.instance, r.algorithm, r.cost, std::isnan(r.seconds) ? 0.0 : r.seconds, r.status}) + '\n';
    }
    return out;
}

Aggregate aggregate(const std::vector<RunRecord>& records) {
    Aggregate agg;
    CommonSet cs = common_solved(records);
    agg.algorithms = cs.algorithms;
    agg.common_instances = cs.rows.size();
    const std::size_t m = agg.algorithms.size();

    std::set<std::string> instances;
    for (const RunRecord& r : records) instances.insert(r.instance);
    for (const std::string& a : agg.algorithms) agg.solved.push_back({a, 0, instances.size()});
    std::map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < m; ++i) column[agg.algorithms[i]] = i;
    agg.timed.assign(m, false);
    for (const RunRecord& r : records) {
        if (r.status == RunStatus::ok) ++agg.solved[column[r.algorithm]].solved;
        if (!std::isnan(r.seconds)) agg.timed[column[r.algorithm]] = true;
    }

    std::map<std::string, std::vector<const std::vector<const RunRecord*>*>> by_class;
    for (const auto& [name, row] : cs.rows) by_class[row.front()->steinlib_class].push_back(&row);
    auto make_row = [&](const std::string& label, const std::vector<const std::vector<const RunRecord*>*>& rows) {
        AggregateRow out;
        out.steinlib_class = label;
        out.instances = rows.size();
        out.mean_ratio.assign(m, 0.0);
        out.mean_seconds.assign(m, 0.0);
        for (const auto* row : rows) {
            for (std::size_t a = 0; a < m; ++a) {
                out.mean_ratio[a] += *(*row)[a]->ratio;
                out.mean_seconds[a] += (*row)[a]->seconds;
            }
        }
        for (std::size_t a = 0; a < m && !rows.empty(); ++a) {
            out.mean_ratio[a] /= static_cast<double>(rows.size());
            out.mean_seconds[a] /= static_cast<double>(rows.size());
        }
        return out;
    };
    std::vector<const std::vector<const RunRecord*>*> everything;
    for (const auto& [cls, rows] : by_class) {
        agg.rows.push_back(make_row(cls, rows));
        everything.insert(everything.end(), rows.begin(), rows.end());
    }
    agg.rows.push_back(make_row("Average", everything));
    return agg;
}

std::string ratio_table_csv(const Aggregate& agg) {
    std::string out = "class";
    for (std::size_t a = 0; a < agg.algorithms.size(); ++a) {
        out += fmt::format(",{}_ratio", agg.algorithms[a]);
        if (agg.timed[a]) out += fmt::format(",{}_seconds", agg.algorithms[a]);
    }
    out += '\n';
    for (const AggregateRow& row : agg.rows) {
        out += row.steinlib_class;
        for (std::size_t a = 0; a < agg.algorithms.size(); ++a) {
            out += ',';
            if (row.instances) out += fmt3(row.mean_ratio[a]);
            if (!agg.timed[a]) continue;
            out += ',';
            if (row.instances && !std::isnan(row.mean_seconds[a])) out += fmt3(row.mean_seconds[a]);
        }
        out += '\n';
    }
    return out;
}

std::string solved_table_csv(const Aggregate& agg) {
    std::string out = "algorithm,solved,total,percent\n";
    for (const SolvedCount& s : agg.solved) {
        double pct = s.total ? 100.0 * static_cast<double>(s.solved) / static_cast<double>(s.total) : 0.0;
        out += fmt::format("{},{},{},{:.0f}\n", s.algorithm, s.solved, s.total, pct);
    }
    return out;
}

PlotData emit_plots(const std::vector<RunRecord>& records) {
    if (std::none_of(records.begin(), records.end(), [](const RunRecord& r) { return r.status == RunStatus::ok; })) {
        throw std::invalid_argument("no ok record to plot");
    }
    CommonSet cs = common_solved(records);
    const std::size_t m = cs.algorithms.size();
    PlotData out;

    // Bin b holds ratios in [b/100, (b+1)/100); the nudge keeps 1.05 in bin 105.
    auto bin_of = [](double ratio) { return static_cast<long>(std::floor(ratio * 100.0 + 1e-9)); };
    long lo = 100, hi = 100;
    for (const auto& [name, row] : cs.rows) {
        for (const RunRecord* r : row) {
            lo = std::min(lo, bin_of(*r->ratio));
            hi = std::max(hi, bin_of(*r->ratio));
        }
    }
    std::vector<std::vector<std::size_t>> counts(static_cast<std::size_t>(hi - lo + 1), std::vector<std::size_t>(m, 0));
    for (const auto& [name, row] : cs.rows) {
        for (std::size_t a = 0; a < m; ++a) ++counts[static_cast<std::size_t>(bin_of(*row[a]->ratio) - lo)][a];
    }
    out.histogram = "bin";
    for (const std::string& a : cs.algorithms) out.histogram += ',' + a;
    out.histogram += '\n';
    for (long b = lo; b <= hi; ++b) {
        out.histogram += fmt::format("{:.2f}", static_cast<double>(b) / 100.0);
        for (std::size_t c : counts[static_cast<std::size_t>(b - lo)]) out.histogram += fmt::format(",{}", c);
        out.histogram += '\n';
    }

    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            std::string body = fmt::format("instance,{},{}\n", cs.algorithms[a], cs.algorithms[b]);
            for (const auto& [name, row] : cs.rows) {
                body += fmt::format("{},{:.4f},{:.4f}\n", name, *row[a]->ratio, *row[b]->ratio);
            }
            out.scatter.emplace_back(fmt::format("scatter_{}__{}.csv", cs.algorithms[a], cs.algorithms[b]),
                                     std::move(body));
        }
    }
    return out;
}

}  // namespace steiner::bench
