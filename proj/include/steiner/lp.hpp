#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace steiner::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { ge, le, eq };
enum class LpStatus { optimal, infeasible, unbounded, numerical_failure };

std::string to_string(LpStatus status);

class LpError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct Column {
    double cost = 0.0;
    double lower = 0.0;
    double upper = kInf;
};

struct Row {
    std::vector<std::pair<int, double>> coeffs;
    Relation relation = Relation::ge;
    double rhs = 0.0;
};

/// Minimization problem over bounded columns and sparse rows.
class LpProblem {
  public:
    int add_column(Column column);
    /// Validates column indices; duplicate indices are summed.
    int add_row(Row row);

    int column_count() const { return static_cast<int>(columns_.size()); }
    int row_count() const { return static_cast<int>(rows_.size()); }
    const std::vector<Column>& columns() const { return columns_; }
    const std::vector<Row>& rows() const { return rows_; }

  private:
    std::vector<Column> columns_;
    std::vector<Row> rows_;
};

/// Warm-start handle. Variables 0..columns-1 are structural, the rest are
/// the row logicals (one per row, activity of that row).
struct LpBasis {
    int columns = 0;
    int rows = 0;
    std::vector<int> head;                 // basic variable per basis position
    std::vector<std::uint8_t> at_upper;    // per variable; meaningful when nonbasic
    bool empty() const { return columns == 0 && rows == 0 && head.empty(); }
};

struct LpSolution {
    LpStatus status = LpStatus::numerical_failure;
    double objective = 0.0;
    std::vector<double> values;
    LpBasis basis;
    int iterations = 0;
    /// True when resolve actually reused the supplied basis.
    bool warm_started = false;
};

/// Boundary for plugging in an external LP engine.
class LpSolver {
  public:
    virtual ~LpSolver() = default;
    virtual LpSolution solve(const LpProblem& problem) = 0;
    /// Same contract as solve; `basis` is only a hint.
    virtual LpSolution resolve(const LpProblem& problem, const LpBasis& basis) = 0;
};

struct SimplexOptions {
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-9;
    /// Degenerate pivots in a row before switching to Bland's rule.
    int bland_after = 50;
    int refactor_every = 64;
    /// 0 means 50 * (rows + columns) + 10000.
    int max_iterations = 0;
};

/// Dense revised simplex with bounded variables: two-phase primal for cold
/// solves, dual simplex when resolving after added rows.
class SimplexSolver final : public LpSolver {
  public:
    explicit SimplexSolver(SimplexOptions options = {}) : options_(options) {}
    LpSolution solve(const LpProblem& problem) override;
    LpSolution resolve(const LpProblem& problem, const LpBasis& basis) override;

  private:
    SimplexOptions options_;
};

std::unique_ptr<LpSolver> make_default_solver();

}  // namespace steiner::lp
