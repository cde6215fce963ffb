#include "edgeavail/error.hpp"
#include "edgeavail/models.hpp"
#include "edgeavail/statespace.hpp"

#include <doctest.h>

#include <cmath>

using namespace edgeavail;

namespace {

// Frozen outputs of tests/oracles/element_ctmcs.py and cluster_states.py,
// which build each chain by hand and solve it with a least-squares solve.
// That dense solve loses a few digits on the stiff 946-state cluster chains,
// so those comparisons use a looser bound.
constexpr double oracle_ru = 7.206527840038157e-4;
constexpr double oracle_du = 6.542520393206715e-4;
constexpr double oracle_cu = 2.1327460360122267e-4;
constexpr double oracle_meh = 6.146198357519576e-4;
constexpr double oracle_cluster_10_10 = 1.675999957826434e-2;
constexpr double oracle_cluster_10_9 = 2.659970521586036e-4;
constexpr double oracle_cluster_10_8 = 7.625238173303108e-5;
constexpr double oracle_cluster_3_2 = 4.7909405651103255e-5;
constexpr double oracle_cluster_2_1 = 3.4159324451691895e-5;
constexpr double element_tol = 1e-9;
constexpr double cluster_tol = 1e-8;

void check_relative(double actual, double expected, double tol)
{
    CHECK_MESSAGE(std::abs(actual - expected) <= tol * expected, actual, " vs ", expected);
}

} // namespace

TEST_CASE("defaults are the reference intensities")
{
    auto t = IntensityTable::defaults();
    CHECK(t.lambda_RH == 1.0 / (17 * 8760.0));
    CHECK(t.lambda_HW == 1.0 / (6 * 730.0));
    CHECK(t.mu_cov == 2.0);
    CHECK(t.mu_HW_fo == doctest::Approx(20.0).epsilon(1e-15));
    CHECK(t.lambda_FW == 1.0 / (75 * 24.0));
    CHECK(t.mu_FW == doctest::Approx(60.0 / 65.0).epsilon(1e-15));
    CHECK(t.mu_HYP_rs == doctest::Approx(24.0).epsilon(1e-15));
    CHECK(t.mu_VM_rs == doctest::Approx(40.0).epsilon(1e-15));
    CHECK(t.lambda_APP == 1.0 / 336.0);
    CHECK(t.mu_APP_r == doctest::Approx(240.0).epsilon(1e-15));
    CHECK(t.mu_SW_r == doctest::Approx(120.0).epsilon(1e-15));
    CHECK(t.C_HW == 0.97);
    CHECK(t.C_APP == 0.8);
    CHECK(t.M == 10);
    CHECK(t.K == 9);
    CHECK(t.alpha_H == 1.0);
    CHECK(t.validate().empty());
}

TEST_CASE("named access and validation")
{
    auto t = IntensityTable::defaults();
    CHECK(IntensityTable::names().size() == 38);
    for (const auto& name : IntensityTable::names())
    {
        REQUIRE(t.get(name).has_value());
        IntensityTable copy = t;
        copy.set(name, *t.get(name));
        CHECK(copy == t);
    }
    CHECK_FALSE(t.get("lambda_XX").has_value());
    CHECK_THROWS_AS(t.set("lambda_XX", 1.0), PreconditionError);
    CHECK_THROWS_AS(t.set("M", 2.5), PreconditionError);

    t.set("lambda_SW", 0.0);
    t.set("C_OS", 1.5);
    t.set("K", 11);
    t.set("alpha_S", -1);
    auto problems = t.validate();
    CHECK(problems.size() == 4);
    CHECK_THROWS_AS(t.require_valid(), PreconditionError);
    CHECK_THROWS_AS(build_element(ElementKind::RU, t), PreconditionError);
}

TEST_CASE("element kind names")
{
    for (ElementKind k : all_element_kinds)
    {
        CHECK(parse_element_kind(to_string(k)) == k);
    }
    CHECK(to_string(ElementKind::Cluster5GC) == "5GC");
    CHECK_FALSE(parse_element_kind("gNB").has_value());
}

TEST_CASE("element unavailabilities match the independent oracle")
{
    auto t = IntensityTable::defaults();
    check_relative(element_unavailability(ElementKind::RU, t), oracle_ru, element_tol);
    check_relative(element_unavailability(ElementKind::DU, t), oracle_du, element_tol);
    check_relative(element_unavailability(ElementKind::CU, t), oracle_cu, element_tol);
    check_relative(element_unavailability(ElementKind::MEH, t), oracle_meh, element_tol);
    check_relative(element_unavailability(ElementKind::Cluster5GC, t), oracle_cluster_10_9, cluster_tol);
    check_relative(element_unavailability(ElementKind::ClusterMANO, t), oracle_cluster_10_9, cluster_tol);
    check_relative(model_unavailability(build_cluster(t, 10, 10, 1, 1, 1)), oracle_cluster_10_10, cluster_tol);
    check_relative(model_unavailability(build_cluster(t, 10, 8, 1, 1, 1)), oracle_cluster_10_8, cluster_tol);
    check_relative(model_unavailability(build_cluster(t, 3, 2, 1, 1, 1)), oracle_cluster_3_2, cluster_tol);
    check_relative(model_unavailability(build_cluster(t, 2, 1, 1, 1, 1)), oracle_cluster_2_1, cluster_tol);
}

TEST_CASE("RU analytic value")
{
    auto t = IntensityTable::defaults();
    double analytic = 1.0 - 1.0 / (1.0 + t.lambda_RH / t.mu_RH + t.lambda_A / t.mu_A + t.lambda_FW / t.mu_FW);
    CHECK(std::abs(element_unavailability(ElementKind::RU, t) - analytic) <= 1e-12);
    CHECK(analytic == doctest::Approx(7.2e-4).epsilon(0.01));

    IntensityTable fast = t;
    fast.mu_RH *= 1e6;
    fast.mu_A *= 1e6;
    fast.mu_FW *= 1e6;
    CHECK(element_unavailability(ElementKind::RU, fast) < cluster_tol);
}

TEST_CASE("every element lies in a sane range")
{
    auto t = IntensityTable::defaults();
    for (ElementKind k : all_element_kinds)
    {
        double u = element_unavailability(k, t);
        CHECK(u > 0.0);
        CHECK(u < 0.1);
    }
    CHECK(element_unavailability(ElementKind::CU, t) < element_unavailability(ElementKind::DU, t));
}

TEST_CASE("faster failures never help")
{
    auto base = IntensityTable::defaults();
    for (const auto& name : IntensityTable::names())
    {
        if (!name.starts_with("lambda_"))
        {
            continue;
        }
        IntensityTable worse = base;
        worse.set(name, *base.get(name) * 10.0);
        for (ElementKind k : all_element_kinds)
        {
            CHECK_MESSAGE(element_unavailability(k, worse) >= element_unavailability(k, base) * (1 - 1e-12),
                          name, " on ", to_string(k));
        }
    }
}

TEST_CASE("C_SW = 1 makes SW_Urep unreachable in the DU")
{
    auto t = IntensityTable::defaults();
    t.C_SW = 1.0;
    SanModel du = build_du(t);
    const auto urep = *du.place_index("SW_Urep");
    for (const auto& s : explore(du).states)
    {
        CHECK(s[urep] == 0);
    }
}

TEST_CASE("ideal failover reduces the CU to its OS/SW part")
{
    auto t = IntensityTable::defaults();
    t.C_HW = 1.0;
    t.mu_HW_fo *= 1e6;
    double cu = element_unavailability(ElementKind::CU, t);

    // The same OS/SW structure without hardware failures.
    IntensityTable no_hw = t;
    no_hw.lambda_HW = 1e-300;
    double os_sw_only = element_unavailability(ElementKind::CU, no_hw);
    CHECK(std::abs(cu - os_sw_only) <= 1e-6);
}

TEST_CASE("cluster rates")
{
    auto t = IntensityTable::defaults();
    SanModel one = build_cluster(t, 1, 1, 1, 1, 1);
    CHECK(*one.parameter("lambda_Hi") == t.lambda_HW);
    SanModel scaled = build_cluster(t, 10, 8, 2.0, 3.0, 1.0);
    CHECK(*scaled.parameter("lambda_Hi") == doctest::Approx(2.0 * t.lambda_HW * 10 / 8).epsilon(1e-15));
    CHECK(*scaled.parameter("lambda_Oi") == doctest::Approx(3.0 * t.lambda_OS * 10 / 8).epsilon(1e-15));
    CHECK_THROWS_AS(build_cluster(t, 3, 4, 1, 1, 1), PreconditionError);
    CHECK_THROWS_AS(build_cluster(t, 3, 0, 1, 1, 1), PreconditionError);

    // Aggregate software failure rate: alpha_S * lambda_SW * M while at
    // least K instances work, per-instance M times higher below K.
    Marking full = one.initial_marking();
    SanModel c = build_cluster(t);
    Marking m = c.initial_marking();
    const auto sw_f = *c.activity_index("SW_F");
    CHECK(activity_rate(c, sw_f, m) == doctest::Approx(t.lambda_SW * 10).epsilon(1e-15));
    m[*c.place_index("Working")] = 8;
    m[*c.place_index("HW_Fail")] = 2;
    CHECK(activity_rate(c, sw_f, m) == doctest::Approx(8 * t.lambda_SW * 10).epsilon(1e-15));
    (void)full;
}

TEST_CASE("two orders of magnitude between (10,10) and (10,9)")
{
    auto t = IntensityTable::defaults();
    double u1010 = model_unavailability(build_cluster(t, 10, 10, 1, 1, 1));
    double u109 = model_unavailability(build_cluster(t, 10, 9, 1, 1, 1));
    CHECK(u1010 / u109 >= 50.0);
}

TEST_CASE("crashed cluster states only recover")
{
    SanModel c = build_cluster(IntensityTable::defaults());
    StateGraph g = explore(c);
    const std::size_t downs[] = {*c.place_index("HW_Down"), *c.place_index("OS_Down"), *c.place_index("SW_Down")};
    for (const auto& tr : g.transitions)
    {
        const Marking& s = g.states[tr.from];
        bool crashed = s[downs[0]] + s[downs[1]] + s[downs[2]] > 0;
        if (!crashed)
        {
            continue;
        }
        std::string activity = tr.label.substr(0, tr.label.find('/'));
        bool allowed = activity == "UHW_R" || activity == "UOS_R" || activity == "USW_R" || activity == "HW_R"
                       || activity == "OS_R" || activity == "SW_R";
        CHECK_MESSAGE(allowed, tr.label);
    }
}
