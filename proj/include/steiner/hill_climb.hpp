#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace steiner {

enum class SearchStrategy { choose_best, choose_first };

class SearchError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The three primitives of a local search. `gain` is the decrease of the
/// objective if the move were applied; it must not touch the state.
template <class State, class Move>
struct SearchComponents {
    std::function<std::vector<Move>(const State&)> neighbourhood;
    std::function<std::int64_t(const State&, const Move&)> gain;
    std::function<void(State&, const Move&)> commit;
};

template <class State>
struct ClimbResult {
    State state;
    std::size_t steps = 0;
};

/// Applies improving moves until none has a positive gain. choose_best picks
/// the first move of maximum gain, choose_first the first positive one. The
/// neighbourhood is re-enumerated after every commit. `fuel` bounds the step
/// count; running out is an error, not a silent stop.
template <class State, class Move>
ClimbResult<State> hill_climb(State initial, const SearchComponents<State, Move>& components,
                              SearchStrategy strategy,
                              std::size_t fuel = std::numeric_limits<std::size_t>::max()) {
    ClimbResult<State> result{std::move(initial), 0};
    while (true) {
        const std::vector<Move> moves = components.neighbourhood(result.state);
        const Move* chosen = nullptr;
        std::int64_t best = 0;
        for (const Move& m : moves) {
            const std::int64_t g = components.gain(result.state, m);
            if (g > best) {
                best = g;
                chosen = &m;
                if (strategy == SearchStrategy::choose_first) break;
            }
        }
        if (!chosen) return result;
        if (result.steps == fuel) throw SearchError("hill climbing ran out of fuel after " + std::to_string(fuel) + " steps");
        try {
            components.commit(result.state, *chosen);
        } catch (const std::exception& e) {
            throw SearchError("commit failed at step " + std::to_string(result.steps + 1) + ": " + e.what());
        }
        ++result.steps;
    }
}

}  // namespace steiner
