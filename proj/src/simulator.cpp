#include "edgeavail/simulator.hpp"

#include "edgeavail/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <thread>

namespace edgeavail {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
    std::uint64_t state = master ^ (0x632be59bd9b4e019ULL * (index + 1));
    splitmix64(state);
    return splitmix64(state);
}

double t_quantile_975(std::size_t dof)
{
    boost::math::students_t dist(static_cast<double>(dof));
    return boost::math::quantile(dist, 0.975);
}

namespace {

constexpr std::uint64_t livelock_limit = 1000000;

struct MeanCi
{
    double mean = 0.0;
    double halfwidth = 0.0;
};

MeanCi mean_ci(const std::vector<double>& samples)
{
    const auto n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double v : samples)
    {
        mean += v;
    }
    mean /= n;
    double ss = 0.0;
    for (double v : samples)
    {
        ss += (v - mean) * (v - mean);
    }
    double sd = std::sqrt(ss / (n - 1.0));
    return MeanCi{mean, t_quantile_975(samples.size() - 1) * sd / std::sqrt(n)};
}

class Trajectory
{
public:
    Trajectory(const SanModel& model, const RewardPredicate& reward, std::uint64_t seed)
    : model_(model),
      reward_(reward),
      marking_(model.initial_marking())
    {
        std::uint64_t state = seed;
        rng_.seed(splitmix64(state));
        for (std::size_t a = 0; a < model.activities().size(); ++a)
        {
            probabilities_.push_back(case_probabilities(model, a));
        }
    }

    /// Runs to `horizon`, handing each constant-reward interval to `sink`.
    template <typename Sink>
    void run(double horizon, Sink&& sink)
    {
        double now = 0.0;
        settle();
        while (now < horizon)
        {
            const double value = eval(reward_.predicate, ModelScope(model_, marking_)) != 0.0 ? 1.0 : 0.0;
            std::vector<std::size_t> enabled = enabled_indices(model_, marking_);
            double earliest = std::numeric_limits<double>::infinity();
            std::size_t winner = 0;
            for (std::size_t a : enabled)
            {
                std::exponential_distribution<double> clock(activity_rate(model_, a, marking_));
                double t = clock(rng_);
                if (t < earliest)
                {
                    earliest = t;
                    winner = a;
                }
            }
            double next = std::min(horizon, now + earliest);
            sink(now, next, value);
            now = next;
            if (now >= horizon)
            {
                break;
            }
            marking_ = fire(model_, marking_, winner, sample_case(winner));
            ++events_;
            settle();
        }
    }

    std::uint64_t events() const { return events_; }

private:
    std::size_t sample_case(std::size_t activity)
    {
        const auto& probs = probabilities_[activity];
        if (probs.size() == 1)
        {
            return 0;
        }
        double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
        double acc = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t c = 0; c < probs.size(); ++c)
        {
            if (probs[c] <= 0.0)
            {
                continue;
            }
            last_positive = c;
            acc += probs[c];
            if (u < acc)
            {
                return c;
            }
        }
        return last_positive;
    }

    // Fires instantaneous activities until the marking is tangible.
    void settle()
    {
        std::uint64_t streak = 0;
        for (;;)
        {
            std::vector<std::size_t> instantaneous;
            for (std::size_t a : enabled_indices(model_, marking_))
            {
                if (!model_.activities()[a].is_timed())
                {
                    instantaneous.push_back(a);
                }
            }
            if (instantaneous.empty())
            {
                return;
            }
            if (++streak > livelock_limit)
            {
                throw VanishingLivelock("more than " + std::to_string(livelock_limit)
                                        + " consecutive instantaneous firings without time advance");
            }
            std::size_t pick = instantaneous.size() == 1
                                   ? 0
                                   : std::uniform_int_distribution<std::size_t>(0, instantaneous.size() - 1)(rng_);
            std::size_t a = instantaneous[pick];
            marking_ = fire(model_, marking_, a, sample_case(a));
            ++events_;
        }
    }

    const SanModel& model_;
    const RewardPredicate& reward_;
    Marking marking_;
    std::mt19937_64 rng_;
    std::vector<std::vector<double>> probabilities_;
    std::uint64_t events_ = 0;
};

const RewardPredicate& find_reward(const SanModel& model, std::string_view reward)
{
    const RewardPredicate* r = model.reward(reward);
    if (r == nullptr)
    {
        throw UnknownReward("model has no reward named '" + std::string(reward) + "'");
    }
    return *r;
}

void check_window(double horizon, double warmup)
{
    if (!(warmup >= 0.0) || !(horizon > warmup) || !std::isfinite(horizon))
    {
        throw PreconditionError("simulation needs 0 <= warmup < horizon");
    }
}

// Time-average over (warmup, horizon] of a single run.
double run_average(const SanModel& model, const RewardPredicate& reward, double horizon, double warmup,
                   std::uint64_t seed, std::uint64_t* events)
{
    Trajectory traj(model, reward, seed);
    double area = 0.0;
    traj.run(horizon, [&](double t0, double t1, double value) {
        double lo = std::max(t0, warmup);
        if (t1 > lo)
        {
            area += value * (t1 - lo);
        }
    });
    if (events != nullptr)
    {
        *events = traj.events();
    }
    return area / (horizon - warmup);
}

} // namespace

SimEstimate simulate(const SanModel& model, std::string_view reward, double horizon, double warmup,
                     std::size_t batches, std::uint64_t seed)
{
    if (batches < 2)
    {
        throw PreconditionError("batch means need at least 2 batches");
    }
    check_window(horizon, warmup);
    require_valid(model);
    const RewardPredicate& r = find_reward(model, reward);

    const double width = (horizon - warmup) / static_cast<double>(batches);
    std::vector<double> area(batches, 0.0);
    Trajectory traj(model, r, seed);
    traj.run(horizon, [&](double t0, double t1, double value) {
        double lo = std::max(t0, warmup);
        while (t1 > lo)
        {
            auto b = std::min(batches - 1, static_cast<std::size_t>((lo - warmup) / width));
            double end = std::min(t1, warmup + width * static_cast<double>(b + 1));
            if (end <= lo)
            {
                // Rounding put `lo` on a boundary; move to the next batch.
                end = std::min(t1, warmup + width * static_cast<double>(b + 2));
                b = std::min(batches - 1, b + 1);
            }
            area[b] += value * (end - lo);
            lo = end;
        }
    });

    std::vector<double> means;
    means.reserve(batches);
    for (double a : area)
    {
        means.push_back(a / width);
    }
    MeanCi ci = mean_ci(means);
    SimEstimate out;
    out.point = std::clamp(ci.mean, 0.0, 1.0);
    out.ci_halfwidth = ci.halfwidth;
    out.batches = batches;
    out.horizon = horizon;
    out.seed = seed;
    out.events = traj.events();
    return out;
}

SimEstimate simulate_replicated(const SanModel& model, std::string_view reward, double horizon, double warmup,
                                std::size_t replications, std::uint64_t seed, std::size_t jobs)
{
    if (replications < 2)
    {
        throw PreconditionError("replicated estimate needs at least 2 replications");
    }
    check_window(horizon, warmup);
    require_valid(model);
    const RewardPredicate& r = find_reward(model, reward);

    if (jobs == 0)
    {
        jobs = std::max(1u, std::thread::hardware_concurrency());
    }
    jobs = std::min(jobs, replications);

    std::vector<double> averages(replications, 0.0);
    std::vector<std::uint64_t> events(replications, 0);
    auto work = [&](std::size_t worker) {
        for (std::size_t i = worker; i < replications; i += jobs)
        {
            averages[i] = run_average(model, r, horizon, warmup, derive_seed(seed, i), &events[i]);
        }
    };
    std::vector<std::future<void>> pending;
    for (std::size_t w = 1; w < jobs; ++w)
    {
        pending.push_back(std::async(std::launch::async, work, w));
    }
    work(0);
    for (auto& f : pending)
    {
        f.get();
    }

    MeanCi ci = mean_ci(averages);
    SimEstimate out;
    out.point = std::clamp(ci.mean, 0.0, 1.0);
    out.ci_halfwidth = ci.halfwidth;
    out.batches = replications;
    out.horizon = horizon;
    out.seed = seed;
    for (auto e : events)
    {
        out.events += e;
    }
    return out;
}

} // namespace edgeavail
