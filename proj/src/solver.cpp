#include "edgeavail/solver.hpp"

#include "edgeavail/error.hpp"

#include <algorithm>
#include <cmath>

namespace edgeavail {

std::string to_string(SteadyState::Method method)
{
    return method == SteadyState::Method::gth ? "gth" : "iterative";
}

double residual(const Generator& q, const std::vector<double>& pi)
{
    std::vector<double> r(q.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i)
    {
        r[i] += pi[i] * q.diagonal(i);
        for (const auto& [j, rate] : q.row(i))
        {
            r[j] += pi[i] * rate;
        }
    }
    double worst = 0.0;
    for (double v : r)
    {
        worst = std::max(worst, std::abs(v));
    }
    return worst;
}

SteadyState steady_state_gth(const Generator& q)
{
    const std::size_t n = q.size();
    check_irreducible(q);
    SteadyState out;
    out.method = SteadyState::Method::gth;
    if (n == 1)
    {
        out.distribution = {1.0};
        return out;
    }

    std::vector<double> a(n * n, 0.0);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    for (std::size_t i = 0; i < n; ++i)
    {
        for (const auto& [j, rate] : q.row(i))
        {
            at(i, j) = rate;
        }
    }

    // Censor states n-1 .. 1 one at a time. The diagonal is never used: the
    // exit rate of state k is recomputed as the sum of its remaining
    // off-diagonal entries, which keeps every operation subtraction-free.
    std::vector<std::size_t> into;
    std::vector<std::size_t> from;
    for (std::size_t k = n - 1; k >= 1; --k)
    {
        double exit = 0.0;
        from.clear();
        for (std::size_t j = 0; j < k; ++j)
        {
            if (at(k, j) != 0.0)
            {
                exit += at(k, j);
                from.push_back(j);
            }
        }
        if (exit <= 0.0)
        {
            throw NotIrreducible("state " + std::to_string(k) + " has no path back to lower-indexed states");
        }
        into.clear();
        for (std::size_t i = 0; i < k; ++i)
        {
            if (at(i, k) != 0.0)
            {
                at(i, k) /= exit;
                into.push_back(i);
            }
        }
        for (std::size_t i : into)
        {
            const double via = at(i, k);
            for (std::size_t j : from)
            {
                if (j != i)
                {
                    at(i, j) += via * at(k, j);
                }
            }
        }
    }

    std::vector<double> pi(n, 0.0);
    pi[0] = 1.0;
    double total = 1.0;
    for (std::size_t k = 1; k < n; ++k)
    {
        double v = 0.0;
        for (std::size_t i = 0; i < k; ++i)
        {
            v += pi[i] * at(i, k);
        }
        pi[k] = v;
        total += v;
    }
    for (double& v : pi)
    {
        v /= total;
    }
    out.residual = residual(q, pi);
    out.distribution = std::move(pi);
    return out;
}

SteadyState steady_state_gth(const Ctmc& c)
{
    return steady_state_gth(c.generator);
}

SteadyState steady_state_iterative(const Generator& q, double tol, std::size_t max_iter)
{
    const std::size_t n = q.size();
    check_irreducible(q);
    std::vector<std::vector<std::pair<std::size_t, double>>> incoming(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        for (const auto& [j, rate] : q.row(i))
        {
            incoming[j].emplace_back(i, rate);
        }
    }

    std::vector<double> pi(n, 1.0 / static_cast<double>(n));
    std::vector<double> previous(n);
    double change = 0.0;
    for (std::size_t it = 1; it <= max_iter; ++it)
    {
        previous = pi;
        for (std::size_t j = 0; j < n; ++j)
        {
            double inflow = 0.0;
            for (const auto& [i, rate] : incoming[j])
            {
                inflow += pi[i] * rate;
            }
            pi[j] = inflow / -q.diagonal(j);
        }
        double total = 0.0;
        for (double v : pi)
        {
            total += v;
        }
        change = 0.0;
        for (std::size_t j = 0; j < n; ++j)
        {
            pi[j] /= total;
            change = std::max(change, std::abs(pi[j] - previous[j]));
        }
        if (change < tol)
        {
            SteadyState out;
            out.method = SteadyState::Method::iterative;
            out.iterations = it;
            out.residual = residual(q, pi);
            out.distribution = std::move(pi);
            return out;
        }
    }
    throw NotConverged(max_iter, change);
}

SteadyState steady_state_iterative(const Ctmc& c, double tol, std::size_t max_iter)
{
    return steady_state_iterative(c.generator, tol, max_iter);
}

double unavailability(const Ctmc& c, const SteadyState& s)
{
    // Summing the down mass directly avoids cancellation in 1 - A.
    double down = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < s.distribution.size(); ++i)
    {
        down += s.distribution[i] * (1.0 - c.reward[i]);
        total += s.distribution[i];
    }
    return std::clamp(down / total, 0.0, 1.0);
}

} // namespace edgeavail
