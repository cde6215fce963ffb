#include "edgeavail/error.hpp"
#include "edgeavail/experiments.hpp"
#include "edgeavail/fault_tree.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace edgeavail;

namespace {

FtNode b(double u)
{
    return FtNode::basic("e", u);
}

double closed_form(const RedundancyConfig& cfg, const ElementUnavailabilities& us)
{
    double ran = u_ran(us.at("RU"), us.at("DU"), us.at("CU"), cfg);
    return u_sys(ran, us.at("5GC"), us.at("MANO"), us.at("MEH"), cfg.n_meh);
}

ElementUnavailabilities all(double u)
{
    return {{"RU", u}, {"DU", u}, {"CU", u}, {"MEH", u}, {"5GC", u}, {"MANO", u}};
}

} // namespace

TEST_CASE("gates")
{
    CHECK(eval_ft(FtNode::any_of({b(0), b(0), b(0)})) == 0.0);
    CHECK(eval_ft(FtNode::all_of({b(0.5), b(0.5)})) == 0.25);
    CHECK(eval_ft(FtNode::any_of({b(0.5), b(0.5)})) == 0.75);
    CHECK(eval_ft(FtNode::redundant(b(0.1), 3)) == doctest::Approx(1e-3).epsilon(1e-14));
}

TEST_CASE("k-of-n against brute-force enumeration")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial)
    {
        const std::size_t n = 10;
        std::vector<double> u(n);
        std::vector<FtNode> kids;
        for (std::size_t i = 0; i < n; ++i)
        {
            u[i] = trial == 0 ? 0.1 : unit(rng);
            kids.push_back(b(u[i]));
        }
        for (std::size_t k = 1; k <= n; ++k)
        {
            double fail = 0.0;
            for (unsigned mask = 0; mask < (1u << n); ++mask)
            {
                double p = 1.0;
                std::size_t working = 0;
                for (std::size_t i = 0; i < n; ++i)
                {
                    bool up = (mask >> i) & 1u;
                    p *= up ? 1.0 - u[i] : u[i];
                    working += up ? 1 : 0;
                }
                if (working < k)
                {
                    fail += p;
                }
            }
            CHECK(eval_ft(FtNode::k_of_n(k, kids)) == doctest::Approx(fail).epsilon(1e-12));
        }
    }
    // Identical components: 1 - 0.9^10 - 10 * 0.9^9 * 0.1.
    std::vector<FtNode> same(10, b(0.1));
    CHECK(eval_ft(FtNode::k_of_n(9, same))
          == doctest::Approx(1 - std::pow(0.9, 10) - 10 * std::pow(0.9, 9) * 0.1).epsilon(1e-14));
    CHECK(eval_ft(FtNode::k_of_n(9, same)) == doctest::Approx(0.2639).epsilon(1e-3));
}

TEST_CASE("gate preconditions")
{
    CHECK_THROWS_AS(eval_ft(FtNode::all_of({})), PreconditionError);
    CHECK_THROWS_AS(eval_ft(FtNode::k_of_n(3, {b(0.1), b(0.2)})), PreconditionError);
    CHECK_THROWS_AS(eval_ft(FtNode::k_of_n(0, {b(0.1)})), PreconditionError);
    CHECK_THROWS_AS(eval_ft(b(1.5)), PreconditionError);
}

TEST_CASE("closed forms by hand")
{
    RedundancyConfig one;
    CHECK(u_ran(0, 0, 0, one) == 0.0);
    CHECK(u_ran(0.5, 0.5, 0.5, one) == 0.875);
    CHECK(u_sys(0, 0, 0, 0, 1) == 0.0);
    CHECK(u_sys(0.875, 0.5, 0.5, 0.5, 1) == 0.984375);
    CHECK_THROWS_AS(u_ran(0.1, 0.1, 0.1, RedundancyConfig{0, 1, 1, 1}), PreconditionError);
    CHECK_THROWS_AS(u_sys(0.1, 0.1, 0.1, 0.1, 0), PreconditionError);
}

TEST_CASE("RAN unavailability decreases with N_R")
{
    double prev = 1.0;
    for (std::size_t nr = 1; nr <= 12; ++nr)
    {
        double u = u_ran(0.3, 0.05, 0.02, RedundancyConfig{1, 1, nr, 1});
        CHECK(u <= prev);
        prev = u;
    }
    // Limit: only the DU and CU remain.
    CHECK(prev == doctest::Approx(1 - (1 - 0.05) * (1 - 0.02)).epsilon(1e-6));
}

TEST_CASE("system tree equals the closed form")
{
    CHECK(eval_ft(build_5gmec_ft(RedundancyConfig{}, all(0.5))) == 0.984375);
    CHECK(eval_ft(build_5gmec_ft(RedundancyConfig{2, 2, 2, 2}, all(0.0))) == 0.0);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto configs = table3_configs(IntensityTable::defaults());
    for (int i = 0; i < 1000; ++i)
    {
        ElementUnavailabilities us;
        for (const char* name : {"RU", "DU", "CU", "MEH", "5GC", "MANO"})
        {
            us[name] = unit(rng);
        }
        RedundancyConfig cfg = configs[static_cast<std::size_t>(i) % configs.size()].ran;
        CHECK(std::abs(eval_ft(build_5gmec_ft(cfg, us)) - closed_form(cfg, us)) <= 1e-12);
    }
    ElementUnavailabilities missing = all(0.1);
    missing.erase("MANO");
    CHECK_THROWS_AS(build_5gmec_ft(RedundancyConfig{}, missing), PreconditionError);
}

TEST_CASE("monotonicity")
{
    const double base[] = {0.01, 0.02, 0.03, 0.04, 0.05, 0.06};
    const char* names[] = {"RU", "DU", "CU", "MEH", "5GC", "MANO"};
    auto us_with = [&](std::size_t bumped, double factor) {
        ElementUnavailabilities us;
        for (std::size_t i = 0; i < 6; ++i)
        {
            us[names[i]] = base[i] * (i == bumped ? factor : 1.0);
        }
        return us;
    };
    for (const auto& c : table3_configs(IntensityTable::defaults()))
    {
        double ref = closed_form(c.ran, us_with(6, 1.0));
        for (std::size_t e = 0; e < 6; ++e)
        {
            CHECK(closed_form(c.ran, us_with(e, 2.0)) >= ref);
        }
        RedundancyConfig more = c.ran;
        for (std::size_t* n : {&more.n_cu, &more.n_du, &more.n_ru, &more.n_meh})
        {
            ++*n;
            CHECK(closed_form(more, us_with(6, 1.0)) <= ref);
            --*n;
        }
    }
}

TEST_CASE("text format")
{
    FtNode t = parse_ft("# comment\nor(basic(a, 0.5),\n and(basic(b, 0.5), basic(c, 0.5)),\n kofn(2, basic(d, "
                        "0.1), basic(e, 0.1), basic(f, 0.1)))");
    double kofn = 1 - std::pow(0.9, 3) - 3 * std::pow(0.9, 2) * 0.1;
    CHECK(eval_ft(t) == doctest::Approx(1 - 0.5 * 0.75 * (1 - kofn)).epsilon(1e-14));
    CHECK(eval_ft(parse_ft(to_string(t))) == eval_ft(t));
    CHECK(to_string(parse_ft("and(basic(x,0.25))")) == "and(basic(x, 0.25))");

    CHECK_THROWS_AS(parse_ft("or(basic(a, 0.1), and(basic(b, 0.2),"), SyntaxError);
    CHECK_THROWS_AS(parse_ft("xor(basic(a, 0.1))"), SyntaxError);
    CHECK_THROWS_AS(parse_ft("basic(a, 2)"), SyntaxError);
    CHECK_THROWS_AS(parse_ft("kofn(3, basic(a, 0.1))"), SyntaxError);
    CHECK_THROWS_AS(parse_ft("basic(a, 0.1) trailing"), SyntaxError);
    try
    {
        parse_ft("or(\n  basic(a, 0.1),\n  nope(1))");
        FAIL("expected SyntaxError");
    }
    catch (const SyntaxError& e)
    {
        CHECK(e.line() == 3);
    }
}
