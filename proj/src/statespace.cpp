#include "edgeavail/statespace.hpp"

#include "edgeavail/error.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace edgeavail {

std::size_t StateGraph::tangible_count() const
{
    std::size_t n = 0;
    for (bool t : tangible)
    {
        n += t ? 1 : 0;
    }
    return n;
}

std::size_t StateGraph::vanishing_count() const
{
    return tangible.size() - tangible_count();
}

StateGraph explore(const SanModel& model, std::size_t max_states)
{
    require_valid(model);

    StateGraph g;
    std::unordered_map<Marking, std::size_t, MarkingHash> index;
    std::deque<std::size_t> queue;

    auto intern = [&](const Marking& m) {
        auto [it, inserted] = index.try_emplace(m, g.states.size());
        if (inserted)
        {
            if (g.states.size() >= max_states)
            {
                throw StateSpaceExceeded("state space exceeds " + std::to_string(max_states) + " markings");
            }
            g.states.push_back(m);
            g.tangible.push_back(true);
            queue.push_back(it->second);
        }
        return it->second;
    };

    std::vector<std::vector<double>> probabilities;
    for (std::size_t a = 0; a < model.activities().size(); ++a)
    {
        probabilities.push_back(case_probabilities(model, a));
    }

    g.initial = intern(model.initial_marking());
    while (!queue.empty())
    {
        std::size_t s = queue.front();
        queue.pop_front();
        const Marking m = g.states[s];
        try
        {
            std::vector<std::size_t> enabled = enabled_indices(model, m);
            std::vector<std::size_t> instantaneous;
            for (std::size_t a : enabled)
            {
                if (!model.activities()[a].is_timed())
                {
                    instantaneous.push_back(a);
                }
            }
            const bool vanishing = !instantaneous.empty();
            g.tangible[s] = !vanishing;
            const std::vector<std::size_t>& firing = vanishing ? instantaneous : enabled;
            for (std::size_t a : firing)
            {
                const Activity& act = model.activities()[a];
                double base = vanishing ? 1.0 / static_cast<double>(instantaneous.size()) : activity_rate(model, a, m);
                for (std::size_t c = 0; c < act.cases.size(); ++c)
                {
                    double p = probabilities[a][c];
                    if (p <= 0.0)
                    {
                        continue;
                    }
                    Marking next = fire(model, m, a, c);
                    std::size_t t = intern(next);
                    g.transitions.push_back(Transition{s, t, base * p, act.name + "/" + std::to_string(c)});
                }
            }
        }
        catch (const StateSpaceExceeded&)
        {
            throw;
        }
        catch (const NegativeTokens& ex)
        {
            throw NegativeTokens(std::string(ex.what()) + " in marking " + model.format_compact(m));
        }
        catch (const EvaluationError& ex)
        {
            throw EvaluationError(std::string(ex.what()) + " in marking " + model.format_compact(m));
        }
    }
    if (g.tangible[g.initial])
    {
        g.initial_distribution = {{g.initial, 1.0}};
    }
    return g;
}

StateGraph eliminate_vanishing(const StateGraph& graph)
{
    struct Edge
    {
        std::size_t to;
        double weight;
        std::string label;
    };

    const std::size_t n = graph.states.size();
    const std::size_t source = n; // virtual predecessor of the initial marking
    std::vector<std::vector<Edge>> out(n + 1);
    std::vector<std::set<std::size_t>> preds(n + 1);
    for (const auto& t : graph.transitions)
    {
        out[t.from].push_back(Edge{t.to, t.weight, t.label});
        preds[t.to].insert(t.from);
    }
    out[source].push_back(Edge{graph.initial, 1.0, ""});
    preds[graph.initial].insert(source);

    for (std::size_t v = 0; v < n; ++v)
    {
        if (graph.tangible[v])
        {
            continue;
        }
        double loop = 0.0;
        std::vector<Edge> exits;
        for (auto& e : out[v])
        {
            if (e.to == v)
            {
                loop += e.weight;
            }
            else
            {
                exits.push_back(std::move(e));
            }
        }
        if (loop >= 1.0 - 1e-12)
        {
            throw VanishingLoop("vanishing states around state " + std::to_string(v)
                                + " form a loop with return probability " + std::to_string(loop));
        }
        const double scale = 1.0 / (1.0 - loop);
        for (const auto& x : exits)
        {
            preds[x.to].erase(v);
        }
        for (std::size_t u : preds[v])
        {
            if (u == v)
            {
                continue;
            }
            std::vector<Edge> kept;
            std::vector<Edge> into;
            for (auto& e : out[u])
            {
                (e.to == v ? into : kept).push_back(std::move(e));
            }
            for (const auto& in : into)
            {
                for (const auto& x : exits)
                {
                    std::string label = in.label.empty() ? x.label : in.label + ">" + x.label;
                    kept.push_back(Edge{x.to, in.weight * x.weight * scale, std::move(label)});
                    preds[x.to].insert(u);
                }
            }
            out[u] = std::move(kept);
        }
        preds[v].clear();
        out[v].clear();
    }

    StateGraph result;
    std::vector<std::size_t> remap(n, n);
    for (std::size_t s = 0; s < n; ++s)
    {
        if (graph.tangible[s])
        {
            remap[s] = result.states.size();
            result.states.push_back(graph.states[s]);
            result.tangible.push_back(true);
        }
    }
    for (std::size_t s = 0; s < n; ++s)
    {
        if (!graph.tangible[s])
        {
            continue;
        }
        for (const auto& e : out[s])
        {
            result.transitions.push_back(Transition{remap[s], remap[e.to], e.weight, e.label});
        }
    }
    std::map<std::size_t, double> initial;
    for (const auto& e : out[source])
    {
        initial[remap[e.to]] += e.weight;
    }
    result.initial_distribution.assign(initial.begin(), initial.end());
    result.initial = result.initial_distribution.front().first;
    return result;
}

// ---------------------------------------------------------------------------

Generator::Generator(std::size_t n)
: rows_(n),
  diagonal_(n, 0.0)
{
}

void Generator::add(std::size_t from, std::size_t to, double rate)
{
    if (from == to)
    {
        return;
    }
    auto& row = rows_[from];
    for (auto& [col, value] : row)
    {
        if (col == to)
        {
            value += rate;
            diagonal_[from] -= rate;
            return;
        }
    }
    row.emplace_back(to, rate);
    diagonal_[from] -= rate;
}

double Generator::at(std::size_t i, std::size_t j) const
{
    if (i == j)
    {
        return diagonal_[i];
    }
    for (const auto& [col, value] : rows_[i])
    {
        if (col == j)
        {
            return value;
        }
    }
    return 0.0;
}

double Generator::max_row_sum() const
{
    double worst = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
    {
        double sum = diagonal_[i];
        for (const auto& [col, value] : rows_[i])
        {
            sum += value;
        }
        worst = std::max(worst, std::abs(sum));
    }
    return worst;
}

Generator Generator::scaled(double factor) const
{
    Generator g = *this;
    for (std::size_t i = 0; i < size(); ++i)
    {
        g.diagonal_[i] *= factor;
        for (auto& entry : g.rows_[i])
        {
            entry.second *= factor;
        }
    }
    return g;
}

std::vector<std::vector<double>> Generator::dense() const
{
    std::vector<std::vector<double>> q(size(), std::vector<double>(size(), 0.0));
    for (std::size_t i = 0; i < size(); ++i)
    {
        q[i][i] = diagonal_[i];
        for (const auto& [col, value] : rows_[i])
        {
            q[i][col] = value;
        }
    }
    return q;
}

void check_irreducible(const Generator& q, std::size_t root)
{
    const std::size_t n = q.size();
    if (n == 0)
    {
        throw NotIrreducible("empty chain");
    }
    std::vector<std::vector<std::size_t>> reverse(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        for (const auto& [j, rate] : q.row(i))
        {
            if (rate > 0.0)
            {
                reverse[j].push_back(i);
            }
        }
    }
    auto reach = [&](bool forward) {
        std::vector<bool> seen(n, false);
        std::vector<std::size_t> stack{root};
        seen[root] = true;
        while (!stack.empty())
        {
            std::size_t s = stack.back();
            stack.pop_back();
            auto visit = [&](std::size_t t) {
                if (!seen[t])
                {
                    seen[t] = true;
                    stack.push_back(t);
                }
            };
            if (forward)
            {
                for (const auto& [t, rate] : q.row(s))
                {
                    if (rate > 0.0)
                    {
                        visit(t);
                    }
                }
            }
            else
            {
                for (std::size_t t : reverse[s])
                {
                    visit(t);
                }
            }
        }
        return seen;
    };
    std::vector<bool> fwd = reach(true);
    std::vector<bool> bwd = reach(false);
    std::vector<std::size_t> absorbing;
    std::size_t unreachable = 0;
    std::size_t no_return = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (q.row(i).empty())
        {
            absorbing.push_back(i);
        }
        unreachable += fwd[i] ? 0 : 1;
        no_return += bwd[i] ? 0 : 1;
    }
    if (unreachable == 0 && no_return == 0)
    {
        return;
    }
    std::string msg = "chain is not irreducible: " + std::to_string(unreachable) + " state(s) unreachable from state "
                      + std::to_string(root) + ", " + std::to_string(no_return) + " state(s) cannot return to it";
    if (!absorbing.empty())
    {
        msg += "; absorbing states:";
        for (std::size_t a : absorbing)
        {
            msg += " " + std::to_string(a);
        }
    }
    throw NotIrreducible(msg);
}

Ctmc to_ctmc(const SanModel& model, const StateGraph& graph, std::string_view reward)
{
    if (!graph.is_tangible_only())
    {
        throw PreconditionError("to_ctmc needs a tangible-only state graph; call eliminate_vanishing first");
    }
    const RewardPredicate* r = model.reward(reward);
    if (r == nullptr)
    {
        throw UnknownReward("model has no reward named '" + std::string(reward) + "'");
    }
    Ctmc c;
    c.states = graph.states;
    c.reward_name = std::string(reward);
    c.generator = Generator(graph.states.size());
    for (const auto& t : graph.transitions)
    {
        c.generator.add(t.from, t.to, t.weight);
    }
    c.reward.reserve(c.states.size());
    for (const auto& m : c.states)
    {
        c.reward.push_back(eval(r->predicate, ModelScope(model, m)) != 0.0 ? 1.0 : 0.0);
    }
    std::size_t root = graph.initial_distribution.empty() ? graph.initial : graph.initial_distribution.front().first;
    check_irreducible(c.generator, root);
    return c;
}

Ctmc build_ctmc(const SanModel& model, std::string_view reward, std::size_t max_states)
{
    return to_ctmc(model, eliminate_vanishing(explore(model, max_states)), reward);
}

std::string dump(const SanModel& model, const StateGraph& graph)
{
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < graph.states.size(); ++i)
    {
        out << "state_" << i << ' ' << (graph.tangible[i] ? "tangible " : "vanishing ")
            << model.format_compact(graph.states[i]) << '\n';
    }
    for (const auto& t : graph.transitions)
    {
        out << "state_" << t.from << " -> state_" << t.to << (graph.tangible[t.from] ? " rate " : " prob ")
            << t.weight << " label " << t.label << '\n';
    }
    return out.str();
}

} // namespace edgeavail
