#ifndef EDGEAVAIL_SOLVER_HPP
#define EDGEAVAIL_SOLVER_HPP

#include "edgeavail/statespace.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace edgeavail {

struct SteadyState
{
    enum class Method
    {
        gth,
        iterative
    };

    std::vector<double> distribution;
    Method method = Method::gth;
    /// Max-norm of pi * Q.
    double residual = 0.0;
    std::size_t iterations = 0;
};

std::string to_string(SteadyState::Method method);

/// Grassmann-Taksar-Heyman elimination on a dense copy of Q.
/// Subtraction-free, so stiff rate ratios lose no accuracy.
SteadyState steady_state_gth(const Generator& q);
SteadyState steady_state_gth(const Ctmc& c);

/// Gauss-Seidel sweeps on pi * Q = 0, renormalised after every sweep;
/// stops when successive iterates differ by less than `tol` in max-norm.
/// Throws NotConverged.
SteadyState steady_state_iterative(const Generator& q, double tol = 1e-12, std::size_t max_iter = 1000000);
SteadyState steady_state_iterative(const Ctmc& c, double tol = 1e-12, std::size_t max_iter = 1000000);

/// Max-norm of pi * Q.
double residual(const Generator& q, const std::vector<double>& pi);

/// 1 - sum_i pi_i * reward_i, clamped to [0, 1].
double unavailability(const Ctmc& c, const SteadyState& s);

} // namespace edgeavail

#endif // EDGEAVAIL_SOLVER_HPP
