#include "edgeavail/error.hpp"
#include "edgeavail/model_format.hpp"
#include "edgeavail/models.hpp"
#include "edgeavail/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace edgeavail;

namespace {

Ctmc two_state()
{
    return build_ctmc(load_model(std::filesystem::path(EDGEAVAIL_TEST_DATA) / "two_state.san"), "up");
}

double sum(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
    {
        s += x;
    }
    return s;
}

} // namespace

TEST_CASE("two-state chain")
{
    Ctmc c = two_state();
    SteadyState g = steady_state_gth(c);
    CHECK(g.method == SteadyState::Method::gth);
    CHECK(std::abs(g.distribution[0] - 0.9) <= 1e-15);
    CHECK(std::abs(g.distribution[1] - 0.1) <= 1e-15);
    CHECK(std::abs(unavailability(c, g) - 0.1) <= 1e-12);

    SteadyState it = steady_state_iterative(c);
    CHECK(it.method == SteadyState::Method::iterative);
    CHECK(it.iterations >= 1);
    CHECK(std::abs(unavailability(c, it) - 0.1) <= 1e-10);
}

TEST_CASE("symmetric ring is uniform")
{
    Generator q(3);
    q.add(0, 1, 2.0);
    q.add(1, 2, 2.0);
    q.add(2, 0, 2.0);
    for (const auto& s : {steady_state_gth(q), steady_state_iterative(q)})
    {
        for (double p : s.distribution)
        {
            CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("RU matches the single-token cyclic formula")
{
    auto t = IntensityTable::defaults();
    Ctmc c = build_ctmc(build_ru(t), "up");
    SteadyState s = steady_state_gth(c);
    double p_ok = 1.0 / (1.0 + t.lambda_RH / t.mu_RH + t.lambda_A / t.mu_A + t.lambda_FW / t.mu_FW);
    CHECK(std::abs(s.distribution[0] - p_ok) <= 1e-12);
    CHECK(std::abs(unavailability(c, s) - (1.0 - p_ok)) <= 1e-12);
}

TEST_CASE("all-up reward gives zero unavailability")
{
    Ctmc c = two_state();
    c.reward.assign(c.reward.size(), 1.0);
    CHECK(unavailability(c, steady_state_gth(c)) == 0.0);
}

TEST_CASE("methods agree on every built-in model")
{
    auto t = IntensityTable::defaults();
    for (ElementKind kind : all_element_kinds)
    {
        Ctmc c = build_ctmc(build_element(kind, t), "up");
        SteadyState g = steady_state_gth(c);
        SteadyState it = steady_state_iterative(c);
        double ug = unavailability(c, g);
        double ui = unavailability(c, it);
        CHECK_MESSAGE(std::abs(ug - ui) <= 1e-8 * ug, to_string(kind));
        CHECK(g.residual < 1e-10);
        CHECK(std::abs(sum(g.distribution) - 1.0) <= 1e-10);
        for (double p : g.distribution)
        {
            CHECK(p >= 0.0);
        }
        CHECK(residual(c.generator, g.distribution) == g.residual);
    }
}

TEST_CASE("scaling the generator leaves the distribution unchanged")
{
    auto t = IntensityTable::defaults();
    Ctmc c = build_ctmc(build_cu(t), "up");
    SteadyState a = steady_state_gth(c.generator);
    SteadyState b = steady_state_gth(c.generator.scaled(1024.0));
    for (std::size_t i = 0; i < a.distribution.size(); ++i)
    {
        // Power-of-two scaling is exact in floating point.
        CHECK(a.distribution[i] == b.distribution[i]);
    }
    SteadyState d = steady_state_gth(c.generator.scaled(3.7));
    for (std::size_t i = 0; i < a.distribution.size(); ++i)
    {
        CHECK(d.distribution[i] == doctest::Approx(a.distribution[i]).epsilon(1e-13));
    }
}

TEST_CASE("iteration limit")
{
    Ctmc c = build_ctmc(build_cluster(IntensityTable::defaults()), "up");
    try
    {
        steady_state_iterative(c, 1e-12, 1);
        FAIL("expected NotConverged");
    }
    catch (const NotConverged& e)
    {
        CHECK(e.iterations() == 1);
        CHECK(e.residual() > 0.0);
    }
}

TEST_CASE("reducible generators are rejected")
{
    Generator q(3);
    q.add(0, 1, 1.0);
    q.add(1, 0, 1.0);
    q.add(1, 2, 1.0);
    CHECK_THROWS_AS(check_irreducible(q), NotIrreducible);
    CHECK_THROWS_AS(steady_state_gth(q), NotIrreducible);
    CHECK_THROWS_AS(steady_state_iterative(q), NotIrreducible);
}

TEST_CASE("stiff chains stay accurate")
{
    // Rates spanning twelve orders of magnitude; the exact answer is
    // pi = (mu, lambda) / (lambda + mu).
    Generator q(2);
    const double lambda = 1e-9;
    const double mu = 1e3;
    q.add(0, 1, lambda);
    q.add(1, 0, mu);
    SteadyState s = steady_state_gth(q);
    CHECK(s.distribution[1] == doctest::Approx(lambda / (lambda + mu)).epsilon(1e-15));
}
