#ifndef EDGEAVAIL_STATESPACE_HPP
#define EDGEAVAIL_STATESPACE_HPP

#include "edgeavail/san.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace edgeavail {

/// Edge of a state graph. `weight` is a rate (h^-1) when leaving a tangible
/// state and a probability when leaving a vanishing one. `label` is
/// "activity/case", chained with '>' once vanishing states are folded.
struct Transition
{
    std::size_t from = 0;
    std::size_t to = 0;
    double weight = 0.0;
    std::string label;
};

struct StateGraph
{
    std::vector<Marking> states;
    std::vector<bool> tangible;
    std::vector<Transition> transitions;
    /// Index of the initial marking.
    std::size_t initial = 0;
    /// Where the initial marking lands among tangible states; filled by
    /// eliminate_vanishing (a single entry when the initial marking is tangible).
    std::vector<std::pair<std::size_t, double>> initial_distribution;

    std::size_t tangible_count() const;
    std::size_t vanishing_count() const;
    bool is_tangible_only() const { return vanishing_count() == 0; }
};

/// Breadth-first reachability closure from the initial marking.
///
/// A marking is vanishing iff some instantaneous activity is enabled in it;
/// there, only instantaneous activities fire, each chosen with equal weight.
/// Cases of probability zero produce no edge. Throws StateSpaceExceeded, or
/// EvaluationError/NegativeTokens naming the offending marking.
StateGraph explore(const SanModel& model, std::size_t max_states = 100000);

/// Folds every vanishing state into its predecessors, preserving the total
/// exit rate of each tangible state. Throws VanishingLoop when a cycle of
/// vanishing states returns with probability >= 1 - 1e-12.
StateGraph eliminate_vanishing(const StateGraph& graph);

/// Sparse generator: off-diagonal entries per row plus the diagonal.
class Generator
{
public:
    Generator() = default;
    explicit Generator(std::size_t n);

    /// Accumulates a rate into entry (from, to); self-loops are dropped.
    void add(std::size_t from, std::size_t to, double rate);

    std::size_t size() const noexcept { return diagonal_.size(); }
    const std::vector<std::pair<std::size_t, double>>& row(std::size_t i) const { return rows_[i]; }
    double diagonal(std::size_t i) const { return diagonal_[i]; }
    double at(std::size_t i, std::size_t j) const;
    /// Largest |row sum|.
    double max_row_sum() const;

    /// Multiplies every entry by a positive factor.
    Generator scaled(double factor) const;

    std::vector<std::vector<double>> dense() const;

private:
    std::vector<std::vector<std::pair<std::size_t, double>>> rows_;
    std::vector<double> diagonal_;
};

struct Ctmc
{
    std::vector<Marking> states;
    Generator generator;
    /// 1 where the reward predicate holds, 0 elsewhere.
    std::vector<double> reward;
    std::string reward_name;
};

/// Builds the chain from a tangible-only graph, summing parallel edges.
/// Throws UnknownReward, PreconditionError for vanishing states, or
/// NotIrreducible when the chain is not a single communicating class.
Ctmc to_ctmc(const SanModel& model, const StateGraph& graph, std::string_view reward);

/// explore, eliminate_vanishing and to_ctmc in one call.
Ctmc build_ctmc(const SanModel& model, std::string_view reward, std::size_t max_states = 100000);

/// Checks that every state reaches every other one; throws NotIrreducible.
void check_irreducible(const Generator& q, std::size_t root = 0);

/// Text edge list `state_i -> state_j rate r label a/c`, preceded by one
/// `state_i tangible|vanishing {marking}` line per state.
std::string dump(const SanModel& model, const StateGraph& graph);

} // namespace edgeavail

#endif // EDGEAVAIL_STATESPACE_HPP
