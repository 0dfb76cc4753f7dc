#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "steiner/lp.hpp"

namespace steiner {

class IrError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The six primitives of an iterative rounding algorithm over a problem state.
///
/// dependent_round returns true when it replaced the LP (the next iteration
/// then calls solve_lp again instead of resolve_lp).
template <class State, class Result>
struct IrComponents {
    std::function<void(State&)> init;
    std::function<lp::LpSolution(State&)> solve_lp;
    std::function<lp::LpSolution(State&, const lp::LpBasis&)> resolve_lp;
    std::function<bool(State&, const lp::LpSolution&)> dependent_round;
    std::function<bool(const State&)> stop_condition;
    std::function<Result(State&)> set_solution;
};

template <class Result>
struct IrOutcome {
    Result result;
    int iterations = 0;
};

/// init; loop { stop? -> break; solve or resolve; dependent_round }; set_solution.
/// Throws IrError naming the iteration when an LP is not optimal, and when
/// the stop condition is still false after `fuel` iterations.
template <class State, class Result>
IrOutcome<Result> run_ir(const IrComponents<State, Result>& c, State& state,
                         int fuel = std::numeric_limits<int>::max()) {
    c.init(state);
    bool fresh = true;
    lp::LpBasis basis;
    int iteration = 0;
    while (!c.stop_condition(state)) {
        if (iteration >= fuel)
            throw IrError("stop condition not reached after " + std::to_string(iteration) + " iterations");
        ++iteration;
        lp::LpSolution sol = fresh ? c.solve_lp(state) : c.resolve_lp(state, basis);
        if (sol.status != lp::LpStatus::optimal)
            throw IrError("iteration " + std::to_string(iteration) + ": LP " + lp::to_string(sol.status));
        basis = sol.basis;
        fresh = c.dependent_round(state, sol);
    }
    return {c.set_solution(state), iteration};
}

}  // namespace steiner
