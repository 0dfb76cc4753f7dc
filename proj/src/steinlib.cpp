#include "steiner/steinlib.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace steiner {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    for (std::string tok; ss >> tok;) out.push_back(tok);
    return out;
}

std::optional<long long> parse_int(const std::string& tok) {
    long long value = 0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return value;
}

enum class Section { none, comment, graph, terminals, skipped };

}  // namespace

SteinerInstance parse_stp(std::istream& in, std::string name) {
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    bool saw_graph = false;
    bool saw_terminals = false;
    Section section = Section::none;

    std::optional<long long> nodes;
    std::optional<long long> declared_edges;
    std::optional<long long> declared_terminals;
    std::size_t edge_lines = 0;
    std::size_t terminal_lines = 0;
    std::vector<Edge> edges;
    std::vector<NodeId> terminals;
    std::vector<std::pair<long long, std::size_t>> pending_terminals;

    auto node_id = [&](const std::string& tok) -> NodeId {
        const auto v = parse_int(tok);
        if (!v) throw ParseError(line_no, "malformed node index '" + tok + "'");
        if (!nodes) throw ParseError(line_no, "node reference before the Nodes declaration");
        if (*v < 1 || *v > *nodes) throw ParseError(line_no, "node index out of range: " + tok);
        return static_cast<NodeId>(*v - 1);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        if (!saw_header) {
            if (lower(tokens[0]) != "33d32945") throw ParseError(line_no, "missing STP magic header");
            saw_header = true;
            continue;
        }
        const std::string key = lower(tokens[0]);

        if (section == Section::none) {
            if (key == "eof") break;
            if (key != "section" || tokens.size() < 2)
                throw ParseError(line_no, "expected SECTION or EOF, got '" + tokens[0] + "'");
            const std::string which = lower(tokens[1]);
            if (which == "graph") {
                if (saw_graph) throw ParseError(line_no, "duplicate Graph section");
                saw_graph = true;
                section = Section::graph;
            } else if (which == "terminals") {
                if (saw_terminals) throw ParseError(line_no, "duplicate Terminals section");
                saw_terminals = true;
                section = Section::terminals;
            } else if (which == "comment") {
                section = Section::comment;
            } else {
                section = Section::skipped;
            }
            continue;
        }

        if (key == "end") {
            if (section == Section::graph) {
                if (!nodes) throw ParseError(line_no, "Graph section lacks a Nodes declaration");
                if (declared_edges && static_cast<std::size_t>(*declared_edges) != edge_lines)
                    throw ParseError(line_no, "declared Edges " + std::to_string(*declared_edges) +
                                                  " but found " + std::to_string(edge_lines) + " E lines");
            } else if (section == Section::terminals) {
                if (declared_terminals && static_cast<std::size_t>(*declared_terminals) != terminal_lines)
                    throw ParseError(line_no, "declared Terminals " + std::to_string(*declared_terminals) +
                                                  " but found " + std::to_string(terminal_lines) + " T lines");
                if (terminal_lines == 0) throw ParseError(line_no, "empty terminal set");
            }
            section = Section::none;
            continue;
        }

        switch (section) {
            case Section::comment:
            case Section::skipped:
            case Section::none:
                break;
            case Section::graph:
                if (key == "nodes" && tokens.size() == 2) {
                    nodes = parse_int(tokens[1]);
                    if (!nodes || *nodes < 1) throw ParseError(line_no, "invalid Nodes count");
                } else if (key == "edges" && tokens.size() == 2) {
                    declared_edges = parse_int(tokens[1]);
                    if (!declared_edges || *declared_edges < 0) throw ParseError(line_no, "invalid Edges count");
                } else if (key == "e") {
                    if (tokens.size() != 4) throw ParseError(line_no, "E line needs 3 fields");
                    const NodeId u = node_id(tokens[1]);
                    const NodeId v = node_id(tokens[2]);
                    const auto w = parse_int(tokens[3]);
                    if (!w) throw ParseError(line_no, "non-integer weight '" + tokens[3] + "'");
                    if (*w < 0) throw ParseError(line_no, "negative weight");
                    if (u == v) throw ParseError(line_no, "self-loop edge");
                    edges.push_back({u, v, static_cast<Cost>(*w)});
                    ++edge_lines;
                } else if (key == "a" || key == "arcs") {
                    throw ParseError(line_no, "directed arcs are not supported");
                } else {
                    throw ParseError(line_no, "unexpected keyword '" + tokens[0] + "' in Graph section");
                }
                break;
            case Section::terminals:
                if (key == "terminals" && tokens.size() == 2) {
                    declared_terminals = parse_int(tokens[1]);
                    if (!declared_terminals || *declared_terminals < 0)
                        throw ParseError(line_no, "invalid Terminals count");
                    if (*declared_terminals == 0) throw ParseError(line_no, "empty terminal set");
                } else if (key == "t") {
                    if (tokens.size() != 2) throw ParseError(line_no, "T line needs 1 field");
                    if (nodes) {
                        terminals.push_back(node_id(tokens[1]));
                    } else {
                        // Terminals before Graph: range-checked once Nodes is known.
                        const auto v = parse_int(tokens[1]);
                        if (!v) throw ParseError(line_no, "malformed node index '" + tokens[1] + "'");
                        pending_terminals.push_back({*v, line_no});
                    }
                    ++terminal_lines;
                } else if (key == "root") {
                    // rooted variants only; the undirected problem ignores it
                } else {
                    throw ParseError(line_no, "unexpected keyword '" + tokens[0] + "' in Terminals section");
                }
                break;
        }
    }

    if (!saw_header) throw ParseError(0, "missing STP magic header");
    if (section != Section::none) throw ParseError(0, "unterminated SECTION (missing END)");
    if (!saw_graph) throw ParseError(0, "missing Graph section");
    if (!saw_terminals) throw ParseError(0, "missing Terminals section");
    for (auto [v, at] : pending_terminals) {
        if (v < 1 || v > *nodes) throw ParseError(at, "node index out of range: " + std::to_string(v));
        terminals.push_back(static_cast<NodeId>(v - 1));
    }

    try {
        return make_instance(static_cast<NodeId>(*nodes), edges, std::move(terminals), std::move(name));
    } catch (const GraphError& e) {
        throw ParseError(0, e.what());
    }
}

SteinerInstance read_stp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open " + path);
    std::string stem = path.substr(path.find_last_of('/') + 1);
    if (const auto dot = stem.rfind('.'); dot != std::string::npos) stem.resize(dot);
    return parse_stp(in, stem);
}

std::string write_stp(const SteinerInstance& instance) {
    std::ostringstream out;
    out << "33D32945 STP File, STP Format Version 1.0\n\n";
    out << "SECTION Comment\nName \"" << instance.name << "\"\nEND\n\n";
    out << "SECTION Graph\n";
    out << "Nodes " << instance.graph.node_count() << "\n";
    out << "Edges " << instance.graph.edge_count() << "\n";
    for (const Edge& e : instance.graph.edges()) out << "E " << e.u + 1 << ' ' << e.v + 1 << ' ' << e.weight << "\n";
    out << "END\n\n";
    out << "SECTION Terminals\n";
    out << "Terminals " << instance.terminals.size() << "\n";
    for (NodeId t : instance.terminals) out << "T " << t + 1 << "\n";
    out << "END\n\nEOF\n";
    return out.str();
}

BestKnownTable load_best_known(std::istream& in) {
    BestKnownTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<std::string> fields;
        std::istringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
        if (fields.size() != 3) throw ParseError(line_no, "best-known row needs name,class,cost");
        if (line_no == 1 && lower(fields[0]) == "name") continue;
        const auto cost = parse_int(fields[2]);
        if (!cost) throw ParseError(line_no, "malformed cost '" + fields[2] + "'");
        if (*cost < 1) throw ParseError(line_no, "non-positive cost for " + fields[0]);
        if (!table.emplace(fields[0], BestKnownEntry{*cost, fields[1]}).second)
            throw ParseError(line_no, "duplicate instance name " + fields[0]);
    }
    return table;
}

BestKnownTable load_best_known_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open " + path);
    return load_best_known(in);
}

std::string to_string(RunStatus status) {
    switch (status) {
        case RunStatus::ok: return "ok";
        case RunStatus::timeout: return "timeout";
        case RunStatus::error: return "error";
    }
    return "error";
}

RunStatus parse_status(const std::string& text) {
    if (text == "ok") return RunStatus::ok;
    if (text == "timeout") return RunStatus::timeout;
    if (text == "error") return RunStatus::error;
    throw ParseError(0, "unknown status '" + text + "'");
}

std::string format_seconds(double seconds) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", seconds);
    std::string s(buf);
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return s;
}

std::string write_result(const ResultRow& row) {
    std::string out = row.instance + ',' + row.algorithm + ',';
    if (row.cost && row.status == RunStatus::ok) out += std::to_string(*row.cost);
    out += ',' + format_seconds(row.seconds) + ',' + to_string(row.status);
    return out;
}

}  // namespace steiner
