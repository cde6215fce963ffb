#include "edgeavail/experiments.hpp"

#include "edgeavail/error.hpp"
#include "edgeavail/expr.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <future>
#include <thread>

namespace edgeavail {

std::string to_string(AlphaTarget target)
{
    switch (target)
    {
    case AlphaTarget::both: return "both";
    case AlphaTarget::core_only: return "5GC";
    case AlphaTarget::mano_only: return "MANO";
    }
    return "?";
}

namespace {

std::string fixed_digits(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string utc_now()
{
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct ClusterAlphas
{
    double h = 1.0;
    double o = 1.0;
    double s = 1.0;
};

ClusterAlphas alphas_for(const SystemConfig& c, bool is_core)
{
    bool applies = c.alpha_target == AlphaTarget::both || (is_core && c.alpha_target == AlphaTarget::core_only)
                   || (!is_core && c.alpha_target == AlphaTarget::mano_only);
    return applies ? ClusterAlphas{c.alpha_h, c.alpha_o, c.alpha_s} : ClusterAlphas{};
}

} // namespace

std::string SweepResult::to_csv() const
{
    std::string out = csv_header;
    out += '\n';
    for (const auto& r : rows)
    {
        const auto& c = r.config;
        out += c.name;
        for (std::size_t v : {c.ran.n_cu, c.ran.n_du, c.ran.n_ru, c.ran.n_meh, c.core.m, c.core.k, c.mano.m, c.mano.k})
        {
            out += ',' + std::to_string(v);
        }
        for (double v : {c.alpha_h, c.alpha_o, c.alpha_s, r.unavailability})
        {
            out += ',' + fixed_digits(v);
        }
        out += '\n';
    }
    return out;
}

const SweepRow* SweepResult::find(std::string_view config_name) const
{
    for (const auto& r : rows)
    {
        if (r.config.name == config_name)
        {
            return &r;
        }
    }
    return nullptr;
}

std::string table_digest(const IntensityTable& t)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& name : IntensityTable::names())
    {
        std::string field = name + '=' + format_real(*t.get(name)) + ';';
        for (unsigned char ch : field)
        {
            h ^= ch;
            h *= 0x100000001b3ULL;
        }
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------

ElementCache::ElementCache(IntensityTable t)
: table_(std::move(t))
{
    table_.require_valid();
}

double ElementCache::element(ElementKind kind)
{
    if (kind == ElementKind::Cluster5GC || kind == ElementKind::ClusterMANO)
    {
        return cluster({table_.M, table_.K}, table_.alpha_H, table_.alpha_O, table_.alpha_S);
    }
    {
        std::lock_guard lock(mutex_);
        if (auto it = elements_.find(kind); it != elements_.end())
        {
            return it->second;
        }
    }
    // Solved outside the lock; a concurrent duplicate produces the same value.
    double u = element_unavailability(kind, table_);
    std::lock_guard lock(mutex_);
    return elements_.emplace(kind, u).first->second;
}

double ElementCache::cluster(ClusterSetting setting, double alpha_h, double alpha_o, double alpha_s)
{
    auto key = std::make_tuple(setting.m, setting.k, alpha_h, alpha_o, alpha_s);
    {
        std::lock_guard lock(mutex_);
        if (auto it = clusters_.find(key); it != clusters_.end())
        {
            return it->second;
        }
    }
    if (!(alpha_h > 0.0) || !(alpha_o > 0.0) || !(alpha_s > 0.0))
    {
        throw PreconditionError("failure-rate multipliers must be > 0");
    }
    double u = model_unavailability(build_cluster(table_, setting.m, setting.k, alpha_h, alpha_o, alpha_s));
    std::lock_guard lock(mutex_);
    return clusters_.emplace(key, u).first->second;
}

std::size_t ElementCache::cluster_solves() const
{
    std::lock_guard lock(mutex_);
    return clusters_.size();
}

ElementUnavailabilities ElementCache::inputs(const SystemConfig& config)
{
    ClusterAlphas core = alphas_for(config, true);
    ClusterAlphas mano = alphas_for(config, false);
    return ElementUnavailabilities{
        {"RU", element(ElementKind::RU)},
        {"DU", element(ElementKind::DU)},
        {"CU", element(ElementKind::CU)},
        {"MEH", element(ElementKind::MEH)},
        {"5GC", cluster(config.core, core.h, core.o, core.s)},
        {"MANO", cluster(config.mano, mano.h, mano.o, mano.s)},
    };
}

double ElementCache::system_unavailability(const SystemConfig& config)
{
    ElementUnavailabilities us = inputs(config);
    double ran = u_ran(us.at("RU"), us.at("DU"), us.at("CU"), config.ran);
    return u_sys(ran, us.at("5GC"), us.at("MANO"), us.at("MEH"), config.ran.n_meh);
}

// ---------------------------------------------------------------------------

SweepResult run_configs(const IntensityTable& t, std::string experiment, const std::vector<SystemConfig>& configs,
                        const SweepOptions& options)
{
    ElementCache cache(t);
    SweepResult result;
    result.experiment = std::move(experiment);
    result.table_hash = table_digest(t);
    result.timestamp = utc_now();
    result.rows.resize(configs.size());

    std::size_t jobs = options.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.jobs;
    jobs = std::max<std::size_t>(1, std::min(jobs, configs.size()));

    // Each worker owns a fixed stride of rows, so placement never depends on
    // completion order.
    auto work = [&](std::size_t worker) {
        for (std::size_t i = worker; i < configs.size(); i += jobs)
        {
            result.rows[i] = SweepRow{configs[i], cache.system_unavailability(configs[i])};
        }
    };
    std::vector<std::future<void>> pending;
    for (std::size_t w = 1; w < jobs; ++w)
    {
        pending.push_back(std::async(std::launch::async, work, w));
    }
    std::exception_ptr first_error;
    try
    {
        work(0);
    }
    catch (...)
    {
        first_error = std::current_exception();
    }
    for (auto& f : pending)
    {
        try
        {
            f.get();
        }
        catch (...)
        {
            if (!first_error)
            {
                first_error = std::current_exception();
            }
        }
    }
    if (first_error)
    {
        std::rethrow_exception(first_error);
    }
    return result;
}

std::vector<SystemConfig> table3_configs(const IntensityTable& t)
{
    static constexpr const char* labels[] = {"NC", "ND", "NR", "NH"};
    std::vector<SystemConfig> out;
    for (std::size_t varied = 0; varied < 4; ++varied)
    {
        for (std::size_t base = 1; base <= 3; ++base)
        {
            for (std::size_t value = 1; value <= 3; ++value)
            {
                std::size_t n[4] = {base, base, base, base};
                n[varied] = value;
                SystemConfig c;
                c.name = std::string("vary-") + labels[varied];
                for (std::size_t i = 0; i < 4; ++i)
                {
                    c.name += std::string("-") + labels[i] + std::to_string(n[i]);
                }
                c.ran = RedundancyConfig{n[0], n[1], n[2], n[3]};
                c.core = c.mano = ClusterSetting{t.M, t.K};
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

SweepResult run_table3(const IntensityTable& t, const SweepOptions& options)
{
    return run_configs(t, "table3", table3_configs(t), options);
}

std::vector<ClusterSetting> default_cluster_grid()
{
    return {{10, 10}, {10, 9}, {10, 8}, {10, 7}, {10, 6}, {10, 5}};
}

std::vector<SystemConfig> cluster_sweep_configs(const IntensityTable& t, const std::vector<ClusterSetting>& grid)
{
    std::vector<SystemConfig> out;
    const ClusterSetting fixed{t.M, t.K};
    for (const auto& mk : grid)
    {
        if (mk.k < 1 || mk.k > mk.m)
        {
            throw PreconditionError("cluster setting needs 1 <= K <= M");
        }
        std::string suffix = "-" + std::to_string(mk.m) + "-" + std::to_string(mk.k);
        SystemConfig base;
        base.ran = RedundancyConfig{2, 2, 2, 2};

        SystemConfig both = base;
        both.name = "both" + suffix;
        both.core = both.mano = mk;
        SystemConfig core = base;
        core.name = "5GC" + suffix;
        core.core = mk;
        core.mano = fixed;
        SystemConfig mano = base;
        mano.name = "MANO" + suffix;
        mano.core = fixed;
        mano.mano = mk;
        out.push_back(std::move(both));
        out.push_back(std::move(core));
        out.push_back(std::move(mano));
    }
    return out;
}

SweepResult run_cluster_sweep(const IntensityTable& t, const std::vector<ClusterSetting>& grid,
                              const SweepOptions& options)
{
    return run_configs(t, "fig6", cluster_sweep_configs(t, grid), options);
}

std::vector<SystemConfig> redundancy_configs()
{
    const RedundancyConfig single{1, 1, 1, 1};
    const RedundancyConfig ran{2, 2, 2, 1};
    const RedundancyConfig meh{1, 1, 1, 2};
    const RedundancyConfig full{2, 2, 2, 2};
    const ClusterSetting plain{10, 10};
    const ClusterSetting spare{10, 9};
    auto make = [](const char* name, RedundancyConfig r, ClusterSetting core, ClusterSetting mano) {
        SystemConfig c;
        c.name = name;
        c.ran = r;
        c.core = core;
        c.mano = mano;
        return c;
    };
    return {
        make("No-Redun", single, plain, plain),  make("RAN", ran, plain, plain),
        make("MEH", meh, plain, plain),          make("5GC-and-MANO", single, spare, spare),
        make("5GC-or-MANO", single, spare, plain), make("5G", ran, spare, plain),
        make("MEC", meh, plain, spare),          make("FULL", full, spare, spare),
    };
}

SweepResult run_redundancy_configs(const IntensityTable& t, const SweepOptions& options)
{
    return run_configs(t, "fig7", redundancy_configs(), options);
}

std::vector<double> default_alpha_grid()
{
    return {0.01, 0.1, 1.0, 10.0, 100.0};
}

std::vector<SystemConfig> alpha_sweep_configs(AlphaTarget target, const std::vector<double>& values)
{
    static constexpr const char* curves[] = {"alpha_H", "alpha_O", "alpha_S"};
    std::vector<SystemConfig> out;
    for (std::size_t curve = 0; curve < 3; ++curve)
    {
        for (double v : values)
        {
            if (!(v > 0.0))
            {
                throw PreconditionError("alpha values must be > 0");
            }
            SystemConfig c;
            c.name = std::string(curves[curve]) + "=" + format_real(v) + "@" + to_string(target);
            c.ran = RedundancyConfig{2, 2, 2, 2};
            c.core = c.mano = ClusterSetting{10, 9};
            c.alpha_target = target;
            (curve == 0 ? c.alpha_h : curve == 1 ? c.alpha_o : c.alpha_s) = v;
            out.push_back(std::move(c));
        }
    }
    return out;
}

SweepResult run_alpha_sweep(const IntensityTable& t, AlphaTarget target, const std::vector<double>& values,
                            const SweepOptions& options)
{
    return run_configs(t, target == AlphaTarget::both ? "fig8" : "fig9", alpha_sweep_configs(target, values),
                       options);
}

} // namespace edgeavail
