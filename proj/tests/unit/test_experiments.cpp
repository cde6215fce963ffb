#include "edgeavail/error.hpp"
#include "edgeavail/experiments.hpp"
#include "edgeavail/expr.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace edgeavail;

namespace {

const IntensityTable& defaults()
{
    static const IntensityTable t = IntensityTable::defaults();
    return t;
}

std::size_t line_count(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

} // namespace

TEST_CASE("table3 configuration list")
{
    auto configs = table3_configs(defaults());
    REQUIRE(configs.size() == 36);
    CHECK(configs[0].name == "vary-NC-NC1-ND1-NR1-NH1");
    CHECK(configs[1].ran == RedundancyConfig{2, 1, 1, 1});
    CHECK(configs[3].ran == RedundancyConfig{1, 2, 2, 2});
    CHECK(configs[10].ran == RedundancyConfig{1, 2, 1, 1});
    CHECK(configs[19].ran == RedundancyConfig{1, 1, 2, 1});
    CHECK(configs[28].ran == RedundancyConfig{1, 1, 1, 2});
    CHECK(configs[30].ran == RedundancyConfig{2, 2, 2, 1});
    for (const auto& c : configs)
    {
        CHECK(c.core == ClusterSetting{10, 9});
        CHECK(c.mano == ClusterSetting{10, 9});
    }
}

TEST_CASE("table3 results")
{
    SweepResult r = run_table3(defaults());
    CHECK(r.experiment == "table3");
    CHECK(r.method == "gth");
    CHECK(r.table_hash == table_digest(defaults()));
    CHECK_FALSE(r.timestamp.empty());
    REQUIRE(r.rows.size() == 36);
    for (const auto& row : r.rows)
    {
        CHECK(row.unavailability > 0.0);
        CHECK(row.unavailability < 1.0);
    }
    // The four blocks share their all-ones row.
    for (std::size_t block = 1; block < 4; ++block)
    {
        CHECK(r.rows[block * 9].unavailability == r.rows[0].unavailability);
    }
    // Adding a replica of anything never hurts.
    const SweepRow* none = r.find("vary-NC-NC1-ND1-NR1-NH1");
    REQUIRE(none != nullptr);
    for (const auto& row : r.rows)
    {
        CHECK(row.unavailability <= none->unavailability);
    }
    CHECK(r.find("missing") == nullptr);

    std::string csv = r.to_csv();
    CHECK(csv.rfind(std::string(csv_header) + "\n", 0) == 0);
    CHECK(line_count(csv) == 37);
    CHECK(csv.find("\nvary-NC-NC2-ND1-NR1-NH1,2,1,1,1,10,9,10,9,1,1,1,") != std::string::npos);
}

TEST_CASE("results are reproducible and independent of worker count")
{
    SweepResult a = run_table3(defaults());
    SweepResult b = run_table3(defaults(), SweepOptions{4});
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i)
    {
        CHECK(a.rows[i].config.name == b.rows[i].config.name);
        CHECK(a.rows[i].unavailability == b.rows[i].unavailability);
    }
}

TEST_CASE("element cache")
{
    ElementCache cache(defaults());
    double first = cache.element(ElementKind::DU);
    CHECK(cache.element(ElementKind::DU) == first);
    CHECK(first == element_unavailability(ElementKind::DU, defaults()));

    double c1 = cache.cluster({10, 9}, 1, 1, 1);
    CHECK(cache.cluster_solves() == 1);
    CHECK(cache.cluster({10, 9}, 1, 1, 1) == c1);
    CHECK(cache.cluster_solves() == 1);
    cache.cluster({10, 9}, 1, 1, 2);
    CHECK(cache.cluster_solves() == 2);

    SystemConfig cfg;
    cfg.core = ClusterSetting{10, 9};
    cfg.mano = ClusterSetting{10, 10};
    auto us = cache.inputs(cfg);
    CHECK(us.size() == 6);
    CHECK(us.at("5GC") == c1);
    CHECK(us.at("MANO") == cache.cluster({10, 10}, 1, 1, 1));

    cfg.alpha_target = AlphaTarget::mano_only;
    cfg.alpha_s = 10;
    us = cache.inputs(cfg);
    CHECK(us.at("5GC") == c1);
    CHECK(us.at("MANO") == cache.cluster({10, 10}, 1, 1, 10));
}

TEST_CASE("table digest tracks every value")
{
    IntensityTable t = defaults();
    std::string base = table_digest(t);
    CHECK(base == table_digest(defaults()));
    CHECK(base.size() == 16);
    t.mu_SW_r *= 1.0000001;
    CHECK(table_digest(t) != base);
}

TEST_CASE("cluster sweep")
{
    SweepResult r = run_cluster_sweep(defaults(), default_cluster_grid());
    CHECK(r.experiment == "fig6");
    REQUIRE(r.rows.size() == 18);
    const SweepRow* worst = r.find("both-10-10");
    REQUIRE(worst != nullptr);
    for (const auto& row : r.rows)
    {
        if (&row != worst)
        {
            CHECK(row.unavailability < worst->unavailability);
        }
    }
    CHECK(worst->unavailability / r.find("both-10-9")->unavailability >= 50.0);
    // With a single cluster at (10,10) the other one still limits the system.
    CHECK(r.find("5GC-10-10")->unavailability < worst->unavailability);
    CHECK(r.find("5GC-10-10")->unavailability > r.find("both-10-9")->unavailability);
    CHECK_THROWS_AS(cluster_sweep_configs(defaults(), {{3, 4}}), PreconditionError);
}

TEST_CASE("redundancy configurations")
{
    SweepResult r = run_redundancy_configs(defaults());
    CHECK(r.experiment == "fig7");
    REQUIRE(r.rows.size() == 8);
    const char* names[] = {"No-Redun", "RAN", "MEH", "5GC-and-MANO", "5GC-or-MANO", "5G", "MEC", "FULL"};
    for (std::size_t i = 0; i < 8; ++i)
    {
        CHECK(r.rows[i].config.name == names[i]);
    }
    auto u = [&](const char* name) { return r.find(name)->unavailability; };
    for (const auto& row : r.rows)
    {
        CHECK(row.unavailability >= u("FULL"));
        CHECK(row.unavailability <= u("No-Redun"));
    }
    // Redundant RAN or MEH alone barely moves the needle.
    CHECK(u("RAN") * 2.0 >= u("No-Redun"));
    CHECK(u("MEH") * 2.0 >= u("No-Redun"));
}

TEST_CASE("alpha sweeps")
{
    auto grid = default_alpha_grid();
    CHECK(grid == std::vector<double>{0.01, 0.1, 1, 10, 100});
    CHECK_THROWS_AS(alpha_sweep_configs(AlphaTarget::both, {0.0}), PreconditionError);

    SweepResult full = run_configs(defaults(), "full", {redundancy_configs().back()});
    const double baseline = full.rows[0].unavailability;

    for (AlphaTarget target : {AlphaTarget::both, AlphaTarget::core_only, AlphaTarget::mano_only})
    {
        SweepResult r = run_alpha_sweep(defaults(), target, grid);
        CHECK(r.experiment == (target == AlphaTarget::both ? "fig8" : "fig9"));
        REQUIRE(r.rows.size() == 15);
        for (const char* which : {"H", "O", "S"})
        {
            double prev = 0.0;
            for (double a : grid)
            {
                std::ostringstream name;
                name << "alpha_" << which << "=" << format_real(a) << "@" << to_string(target);
                const SweepRow* row = r.find(name.str());
                REQUIRE_MESSAGE(row != nullptr, name.str());
                CHECK(row->unavailability >= prev);
                prev = row->unavailability;
                if (a == 1.0)
                {
                    CHECK(row->unavailability == baseline);
                }
            }
        }
    }
}
