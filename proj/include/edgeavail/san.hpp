#ifndef EDGEAVAIL_SAN_HPP
#define EDGEAVAIL_SAN_HPP

#include "edgeavail/expr.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace edgeavail {

struct Place
{
    std::string name;
    std::int64_t initial_tokens = 0;

    friend bool operator==(const Place&, const Place&) = default;
};

/// Token counts, one per place, in the owning model's declaration order.
class Marking
{
public:
    Marking() = default;
    explicit Marking(std::vector<std::int64_t> counts)
    : counts_(std::move(counts))
    {
    }

    std::size_t size() const noexcept { return counts_.size(); }
    std::int64_t operator[](std::size_t place) const { return counts_[place]; }
    std::int64_t& operator[](std::size_t place) { return counts_[place]; }
    const std::vector<std::int64_t>& counts() const noexcept { return counts_; }

    std::int64_t total() const;

    friend bool operator==(const Marking&, const Marking&) = default;
    friend auto operator<=>(const Marking&, const Marking&) = default;

private:
    std::vector<std::int64_t> counts_;
};

struct MarkingHash
{
    std::size_t operator()(const Marking& m) const noexcept;
};

/// `place += value`, `place -= value` or `place = value`.
struct Effect
{
    enum class Op
    {
        add,
        subtract,
        assign
    };

    std::string place;
    Op op = Op::add;
    Expr value;

    friend bool operator==(const Effect&, const Effect&) = default;
};

/// Input gate: enabling predicate plus effects applied before the case effects.
struct InputSpec
{
    Expr predicate = Expr::literal(1.0);
    std::vector<Effect> effects;

    friend bool operator==(const InputSpec&, const InputSpec&) = default;
};

/// One probabilistic outcome of an activity. The probability may reference
/// parameters but not the marking.
struct CaseSpec
{
    Expr probability = Expr::literal(1.0);
    std::vector<Effect> effects;

    friend bool operator==(const CaseSpec&, const CaseSpec&) = default;
};

struct Activity
{
    enum class Kind
    {
        timed,
        instantaneous
    };

    std::string name;
    Kind kind = Kind::timed;
    Expr rate; // h^-1, timed activities only
    InputSpec input;
    std::vector<CaseSpec> cases;

    bool is_timed() const noexcept { return kind == Kind::timed; }

    friend bool operator==(const Activity&, const Activity&) = default;
};

struct RewardPredicate
{
    std::string name;
    Expr predicate;

    friend bool operator==(const RewardPredicate&, const RewardPredicate&) = default;
};

/// A Stochastic Activity Network.
///
/// Built incrementally, then treated as immutable; all analysis functions
/// take it by const reference and are safe to call concurrently.
class SanModel
{
public:
    SanModel() = default;

    SanModel& add_place(std::string name, std::int64_t initial_tokens = 0);
    /// Adds or overwrites a parameter; declaration order is kept.
    SanModel& set_parameter(std::string name, double value);
    SanModel& add_activity(Activity activity);
    SanModel& add_reward(std::string name, Expr predicate);
    SanModel& set_description(std::string text);

    const std::vector<Place>& places() const noexcept { return places_; }
    const std::vector<std::pair<std::string, double>>& parameters() const noexcept { return parameters_; }
    const std::vector<Activity>& activities() const noexcept { return activities_; }
    const std::vector<RewardPredicate>& rewards() const noexcept { return rewards_; }
    const std::string& description() const noexcept { return description_; }

    std::optional<std::size_t> place_index(std::string_view name) const;
    std::optional<std::size_t> activity_index(std::string_view name) const;
    std::optional<double> parameter(std::string_view name) const;
    const RewardPredicate* reward(std::string_view name) const;

    Marking initial_marking() const;

    /// Tokens of a named place; throws UnknownIdentifier.
    std::int64_t tokens(const Marking& m, std::string_view place) const;

    /// "{A=1, B=0}" listing every place.
    std::string format(const Marking& m) const;
    /// "{A=1}" listing only marked places.
    std::string format_compact(const Marking& m) const;

    friend bool operator==(const SanModel& lhs, const SanModel& rhs);

private:
    std::vector<Place> places_;
    std::vector<std::pair<std::string, double>> parameters_;
    std::vector<Activity> activities_;
    std::vector<RewardPredicate> rewards_;
    std::string description_;
    std::map<std::string, std::size_t, std::less<>> place_index_;
    std::map<std::string, std::size_t, std::less<>> parameter_index_;
    std::map<std::string, std::size_t, std::less<>> activity_index_;
};

/// Scope resolving `#Place` against a marking and identifiers against the
/// model parameters.
class ModelScope : public Scope
{
public:
    ModelScope(const SanModel& model, const Marking& marking)
    : model_(model),
      marking_(marking)
    {
    }

    std::optional<double> parameter(std::string_view name) const override;
    std::optional<double> tokens(std::string_view place) const override;

private:
    const SanModel& model_;
    const Marking& marking_;
};

/// Scope exposing only the parameters; any `#Place` is unknown.
class ParameterScope : public Scope
{
public:
    explicit ParameterScope(const SanModel& model)
    : model_(model)
    {
    }

    std::optional<double> parameter(std::string_view name) const override;
    std::optional<double> tokens(std::string_view place) const override;

private:
    const SanModel& model_;
};

/// Every well-formedness violation of the model; empty means valid.
std::vector<std::string> validate(const SanModel& model);

/// Throws SemanticError listing the diagnostics when the model is invalid.
void require_valid(const SanModel& model);

/// Indices of activities whose input predicate holds in `m`.
std::vector<std::size_t> enabled_indices(const SanModel& model, const Marking& m);

/// Names of activities whose input predicate holds in `m`.
std::vector<std::string> enabled_activities(const SanModel& model, const Marking& m);

/// Rate of a timed activity in `m`; throws EvaluationError unless finite and > 0.
double activity_rate(const SanModel& model, std::size_t activity, const Marking& m);

/// Case probabilities of an activity.
std::vector<double> case_probabilities(const SanModel& model, std::size_t activity);

/// Applies input effects then the chosen case's effects, in declaration order.
/// Each effect sees the marking left by the previous one. Throws NotEnabled,
/// NegativeTokens, or PreconditionError for a bad case index.
Marking fire(const SanModel& model, const Marking& m, std::size_t activity, std::size_t case_index);
Marking fire(const SanModel& model, const Marking& m, std::string_view activity, std::size_t case_index);

/// Evaluates a reward predicate in `m`; throws UnknownReward.
bool reward_holds(const SanModel& model, std::string_view reward, const Marking& m);

} // namespace edgeavail

#endif // EDGEAVAIL_SAN_HPP
