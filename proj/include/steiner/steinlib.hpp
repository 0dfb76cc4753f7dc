#pragma once

#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "steiner/instance.hpp"

namespace steiner {

/// Parse failure carrying the 1-based line number of the offending line
/// (0 when the problem is detected at end of input).
class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

/// Reads the STP subset used by the SteinLib undirected classes. STP node
/// ids are 1-based; the returned instance uses 0-based ids.
SteinerInstance parse_stp(std::istream& in, std::string name = {});
SteinerInstance read_stp_file(const std::string& path);

/// Canonical STP text for an instance (inverse of parse_stp).
std::string write_stp(const SteinerInstance& instance);

struct BestKnownEntry {
    Cost cost = 0;
    std::string steinlib_class;
};

using BestKnownTable = std::map<std::string, BestKnownEntry>;

/// CSV "name,class,cost". A leading header row (first field "name") is skipped.
BestKnownTable load_best_known(std::istream& in);
BestKnownTable load_best_known_file(const std::string& path);

enum class RunStatus { ok, timeout, error };

std::string to_string(RunStatus status);
RunStatus parse_status(const std::string& text);

struct ResultRow {
    std::string instance;
    std::string algorithm;
    std::optional<Cost> cost;
    double seconds = 0.0;
    RunStatus status = RunStatus::ok;
};

inline constexpr const char* kResultHeader = "instance,algorithm,cost,seconds,status";

/// One "instance,algorithm,cost,seconds,status" line (no trailing newline).
std::string write_result(const ResultRow& row);

/// Shortest decimal text for a time in seconds (up to microseconds).
std::string format_seconds(double seconds);

}  // namespace steiner
