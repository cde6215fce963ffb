#include "edgeavail/error.hpp"
#include "edgeavail/model_format.hpp"
#include "edgeavail/models.hpp"
#include "edgeavail/statespace.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <set>

using namespace edgeavail;
namespace fs = std::filesystem;

namespace {

SanModel data_model(const char* file)
{
    return load_model(fs::path(EDGEAVAIL_TEST_DATA) / file);
}

double exit_rate(const StateGraph& g, std::size_t state)
{
    double sum = 0.0;
    for (const auto& t : g.transitions)
    {
        if (t.from == state && t.to != state)
        {
            sum += t.weight;
        }
    }
    return sum;
}

// Graph built by hand: A -r-> V, V -> {B: 0.85, C: 0.15}, B and C back to A.
SanModel split_model()
{
    return parse_model(R"~(san-format 1
param r = 2
place A = 1
place V = 0
place B = 0
place C = 0
activity timed go rate "r" { input "#A >= 1" { A -= 1 } case 1 { V += 1 } }
activity instant split { input "#V >= 1" { V -= 1 } case 0.85 { B += 1 } case 0.15 { C += 1 } }
activity timed b rate 1 { input "#B >= 1" { B -= 1 } case 1 { A += 1 } }
activity timed c rate 1 { input "#C >= 1" { C -= 1 } case 1 { A += 1 } }
reward up = "#A >= 1"
)~");
}

} // namespace

TEST_CASE("two-state exploration")
{
    StateGraph g = explore(data_model("two_state.san"));
    CHECK(g.tangible_count() == 2);
    CHECK(g.vanishing_count() == 0);
    CHECK(g.transitions.size() == 2);
    CHECK(g.initial == 0);
}

TEST_CASE("element state-space sizes")
{
    auto t = IntensityTable::defaults();
    struct Expected
    {
        ElementKind kind;
        std::size_t tangible;
        std::size_t vanishing;
    };
    for (auto [kind, tangible, vanishing] : {Expected{ElementKind::RU, 4, 0}, Expected{ElementKind::DU, 6, 1},
                                             Expected{ElementKind::CU, 14, 2}, Expected{ElementKind::MEH, 13, 2},
                                             Expected{ElementKind::Cluster5GC, 946, 0}})
    {
        StateGraph g = explore(build_element(kind, t));
        CHECK_MESSAGE(g.tangible_count() == tangible, to_string(kind));
        CHECK_MESSAGE(g.vanishing_count() == vanishing, to_string(kind));
    }
}

TEST_CASE("DU vanishing state is SW_failed")
{
    SanModel du = build_du(IntensityTable::defaults());
    StateGraph g = explore(du);
    const auto sw_failed = *du.place_index("SW_failed");
    for (std::size_t i = 0; i < g.states.size(); ++i)
    {
        CHECK(g.tangible[i] == (g.states[i][sw_failed] == 0));
    }
}

TEST_CASE("cluster state count matches independent enumeration")
{
    // Counts produced by tests/oracles/cluster_states.py, which enumerates
    // (working, hw, os, sw, down) bookkeeping without the SAN machinery.
    const std::map<std::pair<std::size_t, std::size_t>, std::size_t> expected = {
        {{1, 1}, 7}, {{2, 1}, 22}, {{3, 2}, 50}, {{4, 3}, 95}, {{10, 9}, 946}, {{10, 5}, 946}};
    auto t = IntensityTable::defaults();
    for (auto [mk, count] : expected)
    {
        StateGraph g = explore(build_cluster(t, mk.first, mk.second, 1, 1, 1));
        CHECK_MESSAGE(g.states.size() == count, mk.first, ",", mk.second);
    }
}

TEST_CASE("single vanishing split")
{
    SanModel m = split_model();
    StateGraph g = explore(m);
    CHECK(g.vanishing_count() == 1);
    StateGraph f = eliminate_vanishing(g);
    REQUIRE(f.is_tangible_only());
    CHECK(f.states.size() == 3);

    std::map<std::string, double> out_of_a;
    for (const auto& tr : f.transitions)
    {
        if (m.format_compact(f.states[tr.from]) == "{A=1}")
        {
            out_of_a[m.format_compact(f.states[tr.to])] += tr.weight;
        }
    }
    CHECK(out_of_a["{B=1}"] == doctest::Approx(0.85 * 2.0).epsilon(1e-15));
    CHECK(out_of_a["{C=1}"] == doctest::Approx(0.15 * 2.0).epsilon(1e-15));
}

TEST_CASE("elimination leaves tangible graphs unchanged")
{
    StateGraph g = explore(build_ru(IntensityTable::defaults()));
    StateGraph f = eliminate_vanishing(g);
    CHECK(f.states == g.states);
    REQUIRE(f.transitions.size() == g.transitions.size());
    for (std::size_t i = 0; i < g.transitions.size(); ++i)
    {
        CHECK(f.transitions[i].weight == g.transitions[i].weight);
    }
}

TEST_CASE("elimination preserves exit rates")
{
    auto t = IntensityTable::defaults();
    for (ElementKind kind : {ElementKind::DU, ElementKind::CU, ElementKind::MEH})
    {
        SanModel m = build_element(kind, t);
        StateGraph g = explore(m);
        StateGraph f = eliminate_vanishing(g);
        std::map<Marking, double> before;
        for (std::size_t i = 0; i < g.states.size(); ++i)
        {
            if (g.tangible[i])
            {
                before[g.states[i]] = exit_rate(g, i);
            }
        }
        for (std::size_t i = 0; i < f.states.size(); ++i)
        {
            // Self-loops through a vanishing detour are folded away, so
            // compare including them.
            double total = 0.0;
            for (const auto& tr : f.transitions)
            {
                if (tr.from == i)
                {
                    total += tr.weight;
                }
            }
            CHECK(total == doctest::Approx(before.at(f.states[i])).epsilon(1e-12));
        }
    }
}

TEST_CASE("MEH exit rate from MEH_OK")
{
    auto t = IntensityTable::defaults();
    SanModel m = build_meh(t);
    Ctmc c = build_ctmc(m, "up");
    const auto ok = *m.place_index("MEH_OK");
    for (std::size_t i = 0; i < c.states.size(); ++i)
    {
        if (c.states[i][ok] == 1)
        {
            CHECK(-c.generator.diagonal(i)
                  == doctest::Approx(t.lambda_HYP + 2 * t.lambda_VM + t.lambda_SW + t.lambda_APP).epsilon(1e-14));
        }
    }
}

TEST_CASE("two-state generator and reward")
{
    Ctmc c = build_ctmc(data_model("two_state.san"), "up");
    REQUIRE(c.states.size() == 2);
    CHECK(c.generator.at(0, 0) == -0.1);
    CHECK(c.generator.at(0, 1) == 0.1);
    CHECK(c.generator.at(1, 0) == 0.9);
    CHECK(c.generator.at(1, 1) == -0.9);
    CHECK(c.reward == std::vector<double>{1.0, 0.0});
}

TEST_CASE("RU generator")
{
    auto t = IntensityTable::defaults();
    Ctmc c = build_ctmc(build_ru(t), "up");
    REQUIRE(c.states.size() == 4);
    CHECK(c.reward == std::vector<double>{1.0, 0.0, 0.0, 0.0});
    CHECK(c.generator.at(0, 0) == doctest::Approx(-(t.lambda_RH + t.lambda_A + t.lambda_FW)).epsilon(1e-15));
    std::multiset<double> repairs;
    for (std::size_t i = 1; i < 4; ++i)
    {
        repairs.insert(c.generator.at(i, 0));
        CHECK(c.generator.at(i, i) == -c.generator.at(i, 0));
    }
    CHECK(repairs == std::multiset<double>{t.mu_RH, t.mu_A, t.mu_FW});
}

TEST_CASE("generator rows sum to zero")
{
    auto t = IntensityTable::defaults();
    for (ElementKind kind : all_element_kinds)
    {
        Ctmc c = build_ctmc(build_element(kind, t), "up");
        for (std::size_t i = 0; i < c.generator.size(); ++i)
        {
            double sum = c.generator.diagonal(i);
            double scale = std::abs(c.generator.diagonal(i));
            for (auto [j, r] : c.generator.row(i))
            {
                CHECK(r >= 0.0);
                sum += r;
            }
            CHECK(std::abs(sum) <= 1e-12 * std::max(1.0, scale));
        }
    }
}

TEST_CASE("pipeline errors")
{
    CHECK_THROWS_AS(build_ctmc(data_model("reducible.san"), "up"), NotIrreducible);
    CHECK_THROWS_AS(build_ctmc(data_model("two_state.san"), "down"), UnknownReward);
    CHECK_THROWS_AS(explore(build_cluster(IntensityTable::defaults()), 100), StateSpaceExceeded);
    CHECK_THROWS_AS(eliminate_vanishing(explore(data_model("livelock.san"))), VanishingLoop);
    StateGraph g = explore(split_model());
    CHECK_THROWS_AS(to_ctmc(split_model(), g, "up"), PreconditionError);
}

TEST_CASE("exploration errors name the marking")
{
    SanModel m = parse_model(R"~(san-format 1
place A = 1
place B = 0
activity timed t rate "1 / #B" { input "#A >= 1" { A -= 1 } case 1 { B += 1 } }
reward up = "#A >= 1"
)~");
    try
    {
        explore(m);
        FAIL("expected EvaluationError");
    }
    catch (const EvaluationError& e)
    {
        CHECK(std::string(e.what()).find("A=1") != std::string::npos);
    }
}

TEST_CASE("exploration is deterministic")
{
    auto t = IntensityTable::defaults();
    SanModel m = build_cluster(t, 4, 3, 1, 1, 1);
    StateGraph a = explore(m);
    StateGraph b = explore(m);
    CHECK(a.states == b.states);
    CHECK(dump(m, a) == dump(m, b));
    CHECK(dump(m, a).find("->") != std::string::npos);
}
