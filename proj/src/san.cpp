#include "edgeavail/san.hpp"

#include "edgeavail/error.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <regex>
#include <set>

namespace edgeavail {

std::int64_t Marking::total() const
{
    return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

std::size_t MarkingHash::operator()(const Marking& m) const noexcept
{
    // FNV-1a over the counts in place order.
    std::uint64_t h = 1469598103934665603ULL;
    for (std::int64_t c : m.counts())
    {
        h ^= static_cast<std::uint64_t>(c);
        h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
}

SanModel& SanModel::add_place(std::string name, std::int64_t initial_tokens)
{
    place_index_.emplace(name, places_.size());
    places_.push_back(Place{std::move(name), initial_tokens});
    return *this;
}

SanModel& SanModel::set_parameter(std::string name, double value)
{
    auto it = parameter_index_.find(name);
    if (it != parameter_index_.end())
    {
        parameters_[it->second].second = value;
        return *this;
    }
    parameter_index_.emplace(name, parameters_.size());
    parameters_.emplace_back(std::move(name), value);
    return *this;
}

SanModel& SanModel::add_activity(Activity activity)
{
    activity_index_.emplace(activity.name, activities_.size());
    activities_.push_back(std::move(activity));
    return *this;
}

SanModel& SanModel::add_reward(std::string name, Expr predicate)
{
    rewards_.push_back(RewardPredicate{std::move(name), std::move(predicate)});
    return *this;
}

SanModel& SanModel::set_description(std::string text)
{
    description_ = std::move(text);
    return *this;
}

std::optional<std::size_t> SanModel::place_index(std::string_view name) const
{
    auto it = place_index_.find(name);
    if (it == place_index_.end())
    {
        return std::nullopt;
    }
    return it->second;
}

std::optional<std::size_t> SanModel::activity_index(std::string_view name) const
{
    auto it = activity_index_.find(name);
    if (it == activity_index_.end())
    {
        return std::nullopt;
    }
    return it->second;
}

std::optional<double> SanModel::parameter(std::string_view name) const
{
    auto it = parameter_index_.find(name);
    if (it == parameter_index_.end())
    {
        return std::nullopt;
    }
    return parameters_[it->second].second;
}

const RewardPredicate* SanModel::reward(std::string_view name) const
{
    for (const auto& r : rewards_)
    {
        if (r.name == name)
        {
            return &r;
        }
    }
    return nullptr;
}

Marking SanModel::initial_marking() const
{
    std::vector<std::int64_t> counts;
    counts.reserve(places_.size());
    for (const auto& p : places_)
    {
        counts.push_back(p.initial_tokens);
    }
    return Marking(std::move(counts));
}

std::int64_t SanModel::tokens(const Marking& m, std::string_view place) const
{
    auto idx = place_index(place);
    if (!idx)
    {
        throw UnknownIdentifier("unknown place '" + std::string(place) + "'");
    }
    return m[*idx];
}

std::string SanModel::format(const Marking& m) const
{
    std::string out = "{";
    for (std::size_t i = 0; i < places_.size(); ++i)
    {
        if (i > 0)
        {
            out += ", ";
        }
        out += places_[i].name + "=" + std::to_string(m[i]);
    }
    return out + "}";
}

std::string SanModel::format_compact(const Marking& m) const
{
    std::string out = "{";
    bool first = true;
    for (std::size_t i = 0; i < places_.size(); ++i)
    {
        if (m[i] == 0)
        {
            continue;
        }
        if (!first)
        {
            out += ", ";
        }
        out += places_[i].name + "=" + std::to_string(m[i]);
        first = false;
    }
    return out + "}";
}

bool operator==(const SanModel& lhs, const SanModel& rhs)
{
    return lhs.places_ == rhs.places_ && lhs.parameters_ == rhs.parameters_ && lhs.activities_ == rhs.activities_
           && lhs.rewards_ == rhs.rewards_ && lhs.description_ == rhs.description_;
}

std::optional<double> ModelScope::parameter(std::string_view name) const
{
    return model_.parameter(name);
}

std::optional<double> ModelScope::tokens(std::string_view place) const
{
    auto idx = model_.place_index(place);
    if (!idx)
    {
        return std::nullopt;
    }
    return static_cast<double>(marking_[*idx]);
}

std::optional<double> ParameterScope::parameter(std::string_view name) const
{
    return model_.parameter(name);
}

std::optional<double> ParameterScope::tokens(std::string_view) const
{
    return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

bool is_identifier(const std::string& s)
{
    static const std::regex re("[A-Za-z_][A-Za-z0-9_]*");
    return std::regex_match(s, re);
}

std::string fmt6(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

class Validator
{
public:
    explicit Validator(const SanModel& model)
    : model_(model)
    {
    }

    std::vector<std::string> run()
    {
        check_names();
        for (const auto& p : model_.places())
        {
            if (p.initial_tokens < 0)
            {
                report("place '" + p.name + "' has negative initial tokens " + std::to_string(p.initial_tokens));
            }
        }
        for (const auto& [name, value] : model_.parameters())
        {
            if (!std::isfinite(value))
            {
                report("parameter '" + name + "' is not finite");
            }
        }
        for (std::size_t i = 0; i < model_.activities().size(); ++i)
        {
            check_activity(i);
        }
        for (const auto& r : model_.rewards())
        {
            check_expr(r.predicate, "reward '" + r.name + "'");
        }
        return std::move(diagnostics_);
    }

private:
    void report(std::string message) { diagnostics_.push_back(std::move(message)); }

    template <typename Range, typename NameOf>
    void check_unique(const Range& items, NameOf name_of, const char* what)
    {
        std::set<std::string> seen;
        for (const auto& item : items)
        {
            const std::string& name = name_of(item);
            if (!is_identifier(name))
            {
                report(std::string("invalid ") + what + " name '" + name + "'");
            }
            if (!seen.insert(name).second)
            {
                report(std::string("duplicate ") + what + " name '" + name + "'");
            }
        }
    }

    void check_names()
    {
        check_unique(model_.places(), [](const Place& p) -> const std::string& { return p.name; }, "place");
        check_unique(
            model_.parameters(), [](const auto& p) -> const std::string& { return p.first; }, "parameter");
        check_unique(model_.activities(), [](const Activity& a) -> const std::string& { return a.name; }, "activity");
        check_unique(model_.rewards(), [](const RewardPredicate& r) -> const std::string& { return r.name; }, "reward");
    }

    bool check_expr(const Expr& e, const std::string& where)
    {
        bool ok = true;
        std::set<std::string> params;
        std::set<std::string> places;
        e.collect_parameters(params);
        e.collect_places(places);
        for (const auto& p : params)
        {
            if (!model_.parameter(p))
            {
                report(where + " references undeclared parameter '" + p + "'");
                ok = false;
            }
        }
        for (const auto& p : places)
        {
            if (!model_.place_index(p))
            {
                report(where + " references undeclared place '#" + p + "'");
                ok = false;
            }
        }
        return ok;
    }

    void check_effects(const std::vector<Effect>& effects, const std::string& where)
    {
        for (const auto& eff : effects)
        {
            if (!model_.place_index(eff.place))
            {
                report(where + " assigns undeclared place '" + eff.place + "'");
            }
            check_expr(eff.value, where);
        }
    }

    void check_activity(std::size_t index)
    {
        const Activity& a = model_.activities()[index];
        const std::string where = "activity '" + a.name + "'";
        if (a.is_timed())
        {
            if (check_expr(a.rate, where + " rate") && a.rate.is_marking_independent())
            {
                try
                {
                    double r = eval(a.rate, ParameterScope(model_));
                    if (!(r > 0.0))
                    {
                        report(where + " has non-positive rate " + fmt6(r));
                    }
                }
                catch (const EvaluationError& ex)
                {
                    report(where + " rate: " + ex.what());
                }
            }
        }
        check_expr(a.input.predicate, where + " input predicate");
        check_effects(a.input.effects, where + " input");
        if (a.cases.empty())
        {
            report(where + " has no cases");
            return;
        }
        double sum = 0.0;
        bool probabilities_known = true;
        for (std::size_t c = 0; c < a.cases.size(); ++c)
        {
            const CaseSpec& cs = a.cases[c];
            const std::string case_where = where + " case " + std::to_string(c);
            check_effects(cs.effects, case_where);
            if (!check_expr(cs.probability, case_where + " probability"))
            {
                probabilities_known = false;
                continue;
            }
            if (!cs.probability.is_marking_independent())
            {
                report(case_where + " probability depends on the marking");
                probabilities_known = false;
                continue;
            }
            try
            {
                double p = eval(cs.probability, ParameterScope(model_));
                if (p < 0.0 || p > 1.0)
                {
                    report(case_where + " probability " + fmt6(p) + " outside [0,1]");
                }
                sum += p;
            }
            catch (const EvaluationError& ex)
            {
                report(case_where + " probability: " + ex.what());
                probabilities_known = false;
            }
        }
        if (probabilities_known && std::abs(sum - 1.0) > 1e-12)
        {
            report(where + ": case probabilities sum to " + fmt6(sum));
        }
    }

    const SanModel& model_;
    std::vector<std::string> diagnostics_;
};

} // namespace

std::vector<std::string> validate(const SanModel& model)
{
    return Validator(model).run();
}

void require_valid(const SanModel& model)
{
    auto diagnostics = validate(model);
    if (diagnostics.empty())
    {
        return;
    }
    std::string msg = "invalid model:";
    for (const auto& d : diagnostics)
    {
        msg += "\n  " + d;
    }
    throw SemanticError(msg);
}

std::vector<std::size_t> enabled_indices(const SanModel& model, const Marking& m)
{
    ModelScope scope(model, m);
    std::vector<std::size_t> out;
    const auto& acts = model.activities();
    for (std::size_t i = 0; i < acts.size(); ++i)
    {
        if (eval(acts[i].input.predicate, scope) != 0.0)
        {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::string> enabled_activities(const SanModel& model, const Marking& m)
{
    std::vector<std::string> out;
    for (std::size_t i : enabled_indices(model, m))
    {
        out.push_back(model.activities()[i].name);
    }
    return out;
}

double activity_rate(const SanModel& model, std::size_t activity, const Marking& m)
{
    const Activity& a = model.activities().at(activity);
    double r = eval(a.rate, ModelScope(model, m));
    if (!(r > 0.0) || !std::isfinite(r))
    {
        throw EvaluationError("activity '" + a.name + "' has rate " + fmt6(r) + " in marking " + model.format_compact(m));
    }
    return r;
}

std::vector<double> case_probabilities(const SanModel& model, std::size_t activity)
{
    const Activity& a = model.activities().at(activity);
    ParameterScope scope(model);
    std::vector<double> out;
    out.reserve(a.cases.size());
    for (const auto& c : a.cases)
    {
        out.push_back(eval(c.probability, scope));
    }
    return out;
}

namespace {

void apply(const SanModel& model, Marking& m, const std::vector<Effect>& effects, const Activity& a)
{
    for (const auto& eff : effects)
    {
        auto idx = model.place_index(eff.place);
        if (!idx)
        {
            throw UnknownIdentifier("unknown place '" + eff.place + "'");
        }
        double v = eval(eff.value, ModelScope(model, m));
        double rounded = std::round(v);
        if (std::abs(v - rounded) > 1e-9)
        {
            throw EvaluationError("activity '" + a.name + "': effect on '" + eff.place + "' yields non-integer "
                                  + fmt6(v));
        }
        auto amount = static_cast<std::int64_t>(rounded);
        std::int64_t& slot = m[*idx];
        switch (eff.op)
        {
        case Effect::Op::add: slot += amount; break;
        case Effect::Op::subtract: slot -= amount; break;
        case Effect::Op::assign: slot = amount; break;
        }
        if (slot < 0)
        {
            throw NegativeTokens("activity '" + a.name + "' drives place '" + eff.place + "' to "
                                 + std::to_string(slot));
        }
    }
}

} // namespace

Marking fire(const SanModel& model, const Marking& m, std::size_t activity, std::size_t case_index)
{
    const Activity& a = model.activities().at(activity);
    if (case_index >= a.cases.size())
    {
        throw PreconditionError("activity '" + a.name + "' has no case " + std::to_string(case_index));
    }
    if (eval(a.input.predicate, ModelScope(model, m)) == 0.0)
    {
        throw NotEnabled("activity '" + a.name + "' is not enabled in " + model.format_compact(m));
    }
    Marking next = m;
    apply(model, next, a.input.effects, a);
    apply(model, next, a.cases[case_index].effects, a);
    return next;
}

Marking fire(const SanModel& model, const Marking& m, std::string_view activity, std::size_t case_index)
{
    auto idx = model.activity_index(activity);
    if (!idx)
    {
        throw UnknownIdentifier("unknown activity '" + std::string(activity) + "'");
    }
    return fire(model, m, *idx, case_index);
}

bool reward_holds(const SanModel& model, std::string_view reward, const Marking& m)
{
    const RewardPredicate* r = model.reward(reward);
    if (r == nullptr)
    {
        throw UnknownReward("unknown reward '" + std::string(reward) + "'");
    }
    return eval(r->predicate, ModelScope(model, m)) != 0.0;
}

} // namespace edgeavail
