#include "steiner/lp.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace steiner::lp {

std::string to_string(LpStatus status) {
    switch (status) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
        case LpStatus::numerical_failure: return "numerical-failure";
    }
    return "numerical-failure";
}

int LpProblem::add_column(Column column) {
    if (std::isnan(column.cost) || std::isnan(column.lower) || std::isnan(column.upper))
        throw LpError("column data is NaN");
    if (column.lower > column.upper) throw LpError("column lower bound exceeds upper bound");
    if (column.lower == kInf || column.upper == -kInf) throw LpError("column bounds admit no finite value");
    columns_.push_back(column);
    return column_count() - 1;
}

int LpProblem::add_row(Row row) {
    std::map<int, double> merged;
    for (auto [j, a] : row.coeffs) {
        if (j < 0 || j >= column_count()) throw LpError("row references column " + std::to_string(j) + " of " +
                                                        std::to_string(column_count()));
        if (!std::isfinite(a)) throw LpError("row coefficient is not finite");
        merged[j] += a;
    }
    if (!std::isfinite(row.rhs)) throw LpError("row right-hand side is not finite");
    row.coeffs.clear();
    for (auto [j, a] : merged)
        if (a != 0.0) row.coeffs.emplace_back(j, a);
    rows_.push_back(std::move(row));
    return row_count() - 1;
}

namespace {

enum class Outcome { optimal, infeasible, unbounded, failure, iteration_limit };

// Variables 0..n-1 are structural; n + i is the logical of row i, with
// row_i(x) - r_i = 0 and the row relation moved into r_i's bounds.
class Engine {
  public:
    Engine(const LpProblem& p, const SimplexOptions& opt) : opt_(opt), n_(p.column_count()), m_(p.row_count()) {
        const int total = n_ + m_;
        lo_.resize(total);
        up_.resize(total);
        cost_.assign(total, 0.0);
        cols_.resize(n_);
        for (int j = 0; j < n_; ++j) {
            const Column& c = p.columns()[j];
            lo_[j] = c.lower;
            up_[j] = c.upper;
            cost_[j] = c.cost;
        }
        for (int i = 0; i < m_; ++i) {
            const Row& r = p.rows()[i];
            for (auto [j, a] : r.coeffs) cols_[j].emplace_back(i, a);
            lo_[n_ + i] = r.relation == Relation::le ? -kInf : r.rhs;
            up_[n_ + i] = r.relation == Relation::ge ? kInf : r.rhs;
        }
        x_.assign(total, 0.0);
        pos_.assign(total, -1);
        at_upper_.assign(total, 0);
        head_.resize(m_);
        max_iter_ = opt.max_iterations > 0 ? opt.max_iterations : 50 * (m_ + n_) + 10000;
    }

    int iterations() const { return iterations_; }

    void slack_basis() {
        for (int j = 0; j < n_ + m_; ++j) pos_[j] = -1;
        for (int i = 0; i < m_; ++i) {
            head_[i] = n_ + i;
            pos_[n_ + i] = i;
        }
        for (int j = 0; j < n_; ++j) {
            at_upper_[j] = !std::isfinite(lo_[j]) && std::isfinite(up_[j]);
            x_[j] = nonbasic_value(j);
        }
        binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i) binv_[idx(i, i)] = -1.0;
        since_refactor_ = 0;
        basic_values();
    }

    /// Installs a previous basis; rows added since become basic logicals.
    bool load_basis(const LpBasis& b) {
        if (b.columns != n_ || b.rows > m_ || static_cast<int>(b.head.size()) != b.rows ||
            static_cast<int>(b.at_upper.size()) != b.columns + b.rows)
            return false;
        for (int j = 0; j < n_ + m_; ++j) pos_[j] = -1;
        // Logical n + i keeps its index; new rows start with their logical basic.
        for (int k = 0; k < b.rows; ++k) {
            const int v = b.head[k];
            if (v < 0 || v >= n_ + b.rows || pos_[v] >= 0) return false;
            head_[k] = v;
            pos_[v] = k;
        }
        for (int i = b.rows; i < m_; ++i) {
            head_[i] = n_ + i;
            pos_[n_ + i] = i;
        }
        for (int j = 0; j < n_ + m_; ++j) {
            at_upper_[j] = j < n_ + b.rows ? b.at_upper[j] : 0;
            if (at_upper_[j] && !std::isfinite(up_[j])) at_upper_[j] = 0;
            if (!at_upper_[j] && !std::isfinite(lo_[j]) && std::isfinite(up_[j])) at_upper_[j] = 1;
            if (pos_[j] < 0) x_[j] = nonbasic_value(j);
        }
        return refactor();
    }

    LpBasis basis() const {
        LpBasis b;
        b.columns = n_;
        b.rows = m_;
        b.head = head_;
        b.at_upper = at_upper_;
        return b;
    }

    /// Composite primal simplex: minimizes the sum of infeasibilities while
    /// any basic variable is out of bounds, the true objective afterwards.
    Outcome primal() {
        std::vector<double> cb(m_), y(m_), w(m_);
        int degenerate = 0;
        bool bland = false;
        while (true) {
            if (iterations_ >= max_iter_) return Outcome::iteration_limit;
            if (since_refactor_ >= opt_.refactor_every && !refactor()) return Outcome::failure;

            bool infeasible = false;
            for (int k = 0; k < m_; ++k) {
                const int v = head_[k];
                const double tol = ftol(v);
                if (x_[v] < lo_[v] - tol) {
                    cb[k] = -1.0;
                    infeasible = true;
                } else if (x_[v] > up_[v] + tol) {
                    cb[k] = 1.0;
                    infeasible = true;
                } else {
                    cb[k] = 0.0;
                }
            }
            if (!infeasible)
                for (int k = 0; k < m_; ++k) cb[k] = cost_[head_[k]];
            btran(cb, y);

            // Pricing.
            int q = -1;
            double q_dir = 0.0, best = 0.0;
            for (int j = 0; j < n_ + m_; ++j) {
                if (pos_[j] >= 0 || lo_[j] == up_[j]) continue;
                const double d = (infeasible ? 0.0 : cost_[j]) - dot_column(y.data(), j);
                double dir = 0.0;
                if (d < -opt_.optimality_tol && x_[j] < up_[j]) dir = 1.0;
                else if (d > opt_.optimality_tol && x_[j] > lo_[j]) dir = -1.0;
                if (dir == 0.0) continue;
                if (bland) {
                    q = j;
                    q_dir = dir;
                    break;
                }
                const double score = std::abs(d) / column_scale(j);
                if (score > best) {
                    best = score;
                    q = j;
                    q_dir = dir;
                }
            }
            if (q < 0) return infeasible ? Outcome::infeasible : Outcome::optimal;

            ftran(q, w);
            // Ratio test: x_B moves by -dir * t * w.
            double t_best = kInf;
            int r = -1;
            double r_bound = 0.0;
            double r_mag = 0.0;
            for (int k = 0; k < m_; ++k) {
                const double rate = -q_dir * w[k];
                if (std::abs(w[k]) <= opt_.pivot_tol) continue;
                const int v = head_[k];
                const double tol = ftol(v);
                double bound;
                if (rate < 0) {
                    if (x_[v] > up_[v] + tol) bound = up_[v];
                    else if (x_[v] >= lo_[v] - tol && std::isfinite(lo_[v])) bound = lo_[v];
                    else continue;
                } else {
                    if (x_[v] < lo_[v] - tol) bound = lo_[v];
                    else if (x_[v] <= up_[v] + tol && std::isfinite(up_[v])) bound = up_[v];
                    else continue;
                }
                const double t = std::max(0.0, (bound - x_[v]) / rate);
                const bool better = bland ? (t < t_best - 1e-12 || (t <= t_best + 1e-12 && (r < 0 || v < head_[r])))
                                          : (t < t_best - 1e-12 || (t <= t_best + 1e-12 && std::abs(w[k]) > r_mag));
                if (better) {
                    t_best = t;
                    r = k;
                    r_bound = bound;
                    r_mag = std::abs(w[k]);
                }
            }
            const double own_range = up_[q] - lo_[q];
            ++iterations_;
            if (own_range <= t_best) {
                if (!std::isfinite(own_range)) {
                    if (infeasible) return Outcome::failure;
                    return Outcome::unbounded;
                }
                // Bound flip, basis unchanged.
                for (int k = 0; k < m_; ++k) x_[head_[k]] -= q_dir * own_range * w[k];
                at_upper_[q] = q_dir > 0;
                x_[q] = at_upper_[q] ? up_[q] : lo_[q];
                degenerate = 0;
                continue;
            }
            for (int k = 0; k < m_; ++k) x_[head_[k]] -= q_dir * t_best * w[k];
            x_[q] += q_dir * t_best;
            const int leaving = head_[r];
            x_[leaving] = r_bound;
            at_upper_[leaving] = r_bound == up_[leaving] && std::isfinite(up_[leaving]) && r_bound != lo_[leaving];
            pivot(q, r, w);

            if (t_best <= 1e-12) {
                if (++degenerate > opt_.bland_after) bland = true;
            } else {
                degenerate = 0;
                bland = false;
            }
        }
    }

    /// Dual simplex from a dual-feasible basis. Returns failure when the
    /// starting basis is not dual feasible.
    Outcome dual() {
        std::vector<double> cb(m_), y(m_), w(m_), d(n_ + m_);
        int stalls = 0;
        while (true) {
            if (iterations_ >= max_iter_) return Outcome::iteration_limit;
            if (since_refactor_ >= opt_.refactor_every && !refactor()) return Outcome::failure;
            for (int k = 0; k < m_; ++k) cb[k] = cost_[head_[k]];
            btran(cb, y);
            for (int j = 0; j < n_ + m_; ++j) {
                if (pos_[j] >= 0) continue;
                d[j] = cost_[j] - dot_column(y.data(), j);
                if (lo_[j] == up_[j]) continue;
                const bool can_up = x_[j] < up_[j], can_down = x_[j] > lo_[j];
                if ((can_up && d[j] < -1e-7) || (can_down && d[j] > 1e-7)) return Outcome::failure;
            }

            int r = -1;
            double worst = 0.0;
            for (int k = 0; k < m_; ++k) {
                const int v = head_[k];
                const double viol = std::max(lo_[v] - x_[v], x_[v] - up_[v]);
                if (viol > ftol(v) && viol > worst) {
                    worst = viol;
                    r = k;
                }
            }
            if (r < 0) return Outcome::optimal;
            const int leaving = head_[r];
            const bool raise = x_[leaving] < lo_[leaving];
            const double target = raise ? lo_[leaving] : up_[leaving];
            const double s = raise ? 1.0 : -1.0;

            const double* rho = binv_.data() + idx(r, 0);
            int q = -1;
            double ratio_best = kInf, alpha_q = 0.0;
            for (int j = 0; j < n_ + m_; ++j) {
                if (pos_[j] >= 0 || lo_[j] == up_[j]) continue;
                const double alpha = dot_column(rho, j);
                if (std::abs(alpha) <= opt_.pivot_tol) continue;
                const bool ok = (s * alpha < 0 && x_[j] < up_[j]) || (s * alpha > 0 && x_[j] > lo_[j]);
                if (!ok) continue;
                const double ratio = std::abs(d[j]) / std::abs(alpha);
                if (ratio < ratio_best - 1e-12 || (ratio <= ratio_best + 1e-12 && std::abs(alpha) > std::abs(alpha_q))) {
                    ratio_best = ratio;
                    q = j;
                    alpha_q = alpha;
                }
            }
            if (q < 0) return Outcome::infeasible;

            ftran(q, w);
            if (std::abs(w[r] - alpha_q) > 1e-7 * (1.0 + std::abs(alpha_q))) {
                if (!refactor()) return Outcome::failure;
                if (++stalls > 5) return Outcome::failure;
                continue;
            }
            ++iterations_;
            const double delta = (x_[leaving] - target) / w[r];
            for (int k = 0; k < m_; ++k) x_[head_[k]] -= delta * w[k];
            x_[q] += delta;
            x_[leaving] = target;
            at_upper_[leaving] = !raise;
            pivot(q, r, w);
        }
    }

    bool refactor() {
        const std::size_t mm = static_cast<std::size_t>(m_) * m_;
        std::vector<double> b(mm, 0.0);
        for (int k = 0; k < m_; ++k) {
            const int v = head_[k];
            if (v < n_) {
                for (auto [i, a] : cols_[v]) b[idx(i, k)] = a;
            } else {
                b[idx(v - n_, k)] = -1.0;
            }
        }
        // Gauss-Jordan with partial pivoting on [B | I].
        std::vector<double> inv(mm, 0.0);
        for (int i = 0; i < m_; ++i) inv[idx(i, i)] = 1.0;
        for (int c = 0; c < m_; ++c) {
            int p = c;
            for (int i = c + 1; i < m_; ++i)
                if (std::abs(b[idx(i, c)]) > std::abs(b[idx(p, c)])) p = i;
            if (std::abs(b[idx(p, c)]) < 1e-11) return false;
            if (p != c)
                for (int k = 0; k < m_; ++k) {
                    std::swap(b[idx(p, k)], b[idx(c, k)]);
                    std::swap(inv[idx(p, k)], inv[idx(c, k)]);
                }
            const double piv = b[idx(c, c)];
            for (int k = 0; k < m_; ++k) {
                b[idx(c, k)] /= piv;
                inv[idx(c, k)] /= piv;
            }
            for (int i = 0; i < m_; ++i) {
                if (i == c) continue;
                const double f = b[idx(i, c)];
                if (f == 0.0) continue;
                for (int k = 0; k < m_; ++k) {
                    b[idx(i, k)] -= f * b[idx(c, k)];
                    inv[idx(i, k)] -= f * inv[idx(c, k)];
                }
            }
        }
        binv_ = std::move(inv);
        since_refactor_ = 0;
        basic_values();
        return true;
    }

    /// Final answer check against the original rows and bounds.
    bool verify(const LpProblem& p, std::vector<double>& values, double& objective) const {
        values.assign(x_.begin(), x_.begin() + n_);
        for (int j = 0; j < n_; ++j) {
            const double tol = opt_.feasibility_tol * (1.0 + std::abs(values[j]));
            if (values[j] < lo_[j] - tol || values[j] > up_[j] + tol) return false;
            values[j] = std::clamp(values[j], lo_[j], up_[j]);
        }
        for (const Row& r : p.rows()) {
            double act = 0.0, scale = 1.0;
            for (auto [j, a] : r.coeffs) {
                act += a * values[j];
                scale = std::max(scale, std::abs(a * values[j]));
            }
            const double tol = opt_.feasibility_tol * std::max(scale, std::abs(r.rhs));
            if (r.relation != Relation::le && act < r.rhs - tol) return false;
            if (r.relation != Relation::ge && act > r.rhs + tol) return false;
        }
        objective = 0.0;
        for (int j = 0; j < n_; ++j) objective += cost_[j] * values[j];
        return true;
    }

  private:
    std::size_t idx(int i, int k) const { return static_cast<std::size_t>(i) * m_ + k; }

    double ftol(int v) const { return opt_.feasibility_tol * (1.0 + std::abs(x_[v])); }

    double nonbasic_value(int j) const {
        if (at_upper_[j] && std::isfinite(up_[j])) return up_[j];
        if (std::isfinite(lo_[j])) return lo_[j];
        if (std::isfinite(up_[j])) return up_[j];
        return 0.0;
    }

    double column_scale(int j) const {
        if (j >= n_) return 1.0;
        double s = 1.0;
        for (auto [i, a] : cols_[j]) s = std::max(s, std::abs(a));
        return s;
    }

    double dot_column(const double* vec, int j) const {
        if (j >= n_) return -vec[j - n_];
        double s = 0.0;
        for (auto [i, a] : cols_[j]) s += vec[i] * a;
        return s;
    }

    void ftran(int j, std::vector<double>& w) const {
        std::fill(w.begin(), w.end(), 0.0);
        if (j >= n_) {
            const int r = j - n_;
            for (int i = 0; i < m_; ++i) w[i] = -binv_[idx(i, r)];
            return;
        }
        for (auto [r, a] : cols_[j])
            for (int i = 0; i < m_; ++i) w[i] += binv_[idx(i, r)] * a;
    }

    void btran(const std::vector<double>& cb, std::vector<double>& y) const {
        std::fill(y.begin(), y.end(), 0.0);
        for (int k = 0; k < m_; ++k) {
            if (cb[k] == 0.0) continue;
            const double* row = binv_.data() + idx(k, 0);
            for (int i = 0; i < m_; ++i) y[i] += cb[k] * row[i];
        }
    }

    void basic_values() {
        std::vector<double> rhs(m_, 0.0);
        for (int j = 0; j < n_ + m_; ++j) {
            if (pos_[j] >= 0) continue;
            const double v = x_[j];
            if (v == 0.0) continue;
            if (j < n_) {
                for (auto [i, a] : cols_[j]) rhs[i] -= a * v;
            } else {
                rhs[j - n_] += v;
            }
        }
        for (int k = 0; k < m_; ++k) {
            double s = 0.0;
            const double* row = binv_.data() + idx(k, 0);
            for (int i = 0; i < m_; ++i) s += row[i] * rhs[i];
            x_[head_[k]] = s;
        }
    }

    void pivot(int q, int r, const std::vector<double>& w) {
        const int leaving = head_[r];
        pos_[leaving] = -1;
        head_[r] = q;
        pos_[q] = r;
        double* prow = binv_.data() + idx(r, 0);
        const double piv = w[r];
        for (int i = 0; i < m_; ++i) prow[i] /= piv;
        for (int k = 0; k < m_; ++k) {
            if (k == r || w[k] == 0.0) continue;
            double* row = binv_.data() + idx(k, 0);
            const double f = w[k];
            for (int i = 0; i < m_; ++i) row[i] -= f * prow[i];
        }
        ++since_refactor_;
    }

    const SimplexOptions& opt_;
    int n_, m_;
    std::vector<double> lo_, up_, cost_;
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<int> head_, pos_;
    std::vector<std::uint8_t> at_upper_;
    std::vector<double> x_;
    std::vector<double> binv_;
    int iterations_ = 0;
    int since_refactor_ = 0;
    int max_iter_ = 0;
};

LpSolution finish(const LpProblem& problem, Engine& engine, Outcome outcome) {
    LpSolution sol;
    sol.iterations = engine.iterations();
    switch (outcome) {
        case Outcome::infeasible: sol.status = LpStatus::infeasible; return sol;
        case Outcome::unbounded: sol.status = LpStatus::unbounded; return sol;
        case Outcome::failure:
        case Outcome::iteration_limit: sol.status = LpStatus::numerical_failure; return sol;
        case Outcome::optimal: break;
    }
    // Recompute from a fresh factorization before trusting the answer.
    if (!engine.refactor() || !engine.verify(problem, sol.values, sol.objective)) {
        sol.status = LpStatus::numerical_failure;
        sol.values.clear();
        return sol;
    }
    sol.status = LpStatus::optimal;
    sol.basis = engine.basis();
    return sol;
}

}  // namespace

LpSolution SimplexSolver::solve(const LpProblem& problem) {
    Engine engine(problem, options_);
    engine.slack_basis();
    Outcome out = engine.primal();
    LpSolution sol = finish(problem, engine, out);
    if (sol.status == LpStatus::numerical_failure) {
        // One retry with Bland's rule from the first degenerate pivot.
        SimplexOptions careful = options_;
        careful.bland_after = 0;
        careful.refactor_every = std::max(8, options_.refactor_every / 4);
        Engine retry(problem, careful);
        retry.slack_basis();
        sol = finish(problem, retry, retry.primal());
    }
    return sol;
}

LpSolution SimplexSolver::resolve(const LpProblem& problem, const LpBasis& basis) {
    Engine engine(problem, options_);
    if (!basis.empty() && engine.load_basis(basis)) {
        Outcome out = engine.dual();
        if (out == Outcome::failure) out = engine.primal();  // basis was not dual feasible
        if (out == Outcome::optimal) out = engine.primal();  // polish any tiny dual infeasibility
        if (out == Outcome::optimal || out == Outcome::infeasible || out == Outcome::unbounded) {
            LpSolution sol = finish(problem, engine, out);
            if (sol.status != LpStatus::numerical_failure) {
                sol.warm_started = true;
                return sol;
            }
        }
    }
    return solve(problem);
}

std::unique_ptr<LpSolver> make_default_solver() { return std::make_unique<SimplexSolver>(); }

}  // namespace steiner::lp
