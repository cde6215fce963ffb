#ifndef EDGEAVAIL_SIMULATOR_HPP
#define EDGEAVAIL_SIMULATOR_HPP

#include "edgeavail/san.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace edgeavail {

struct SimEstimate
{
    /// Time-average of the reward over (warmup, horizon].
    double point = 0.0;
    /// Half-width of the 95% Student-t confidence interval.
    double ci_halfwidth = 0.0;
    std::size_t batches = 0;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    /// Timed plus instantaneous firings.
    std::uint64_t events = 0;

    double lower() const { return point - ci_halfwidth; }
    double upper() const { return point + ci_halfwidth; }
    bool covers(double value) const { return lower() <= value && value <= upper(); }

    friend bool operator==(const SimEstimate&, const SimEstimate&) = default;
};

/// SplitMix64 step; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed of replication `index` under a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Two-sided 95% Student-t quantile for `dof` degrees of freedom.
double t_quantile_975(std::size_t dof);

/// Single long run with batch means.
///
/// Timed activities race with exponential clocks resampled after every
/// event; instantaneous activities fire immediately (equal weights when
/// several are enabled). Streams come from std::mt19937_64 seeded through
/// SplitMix64, so a seed fixes the result bit for bit. Throws
/// PreconditionError (batches < 2, horizon <= warmup, warmup < 0),
/// UnknownReward, or VanishingLivelock after 10^6 consecutive
/// instantaneous firings.
SimEstimate simulate(const SanModel& model, std::string_view reward, double horizon, double warmup,
                     std::size_t batches, std::uint64_t seed);

/// Independent replications with derived seeds, run on up to `jobs` threads
/// (0 = hardware concurrency). The estimate is the mean across replications
/// and does not depend on `jobs`. Throws PreconditionError when
/// replications < 2.
SimEstimate simulate_replicated(const SanModel& model, std::string_view reward, double horizon, double warmup,
                                std::size_t replications, std::uint64_t seed, std::size_t jobs = 1);

} // namespace edgeavail

#endif // EDGEAVAIL_SIMULATOR_HPP
