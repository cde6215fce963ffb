// edgeavail: solve and simulate SAN models, evaluate fault trees and run the
// 5G-MEC availability experiments.
//
// Exit codes: 0 success, 1 input error, 2 computation error, 64 usage error.
// Results go to stdout as key=value lines, CSV, or one JSON object (--json);
// diagnostics go to stderr.

#include "edgeavail/error.hpp"
#include "edgeavail/experiments.hpp"
#include "edgeavail/expr.hpp"
#include "edgeavail/fault_tree.hpp"
#include "edgeavail/model_format.hpp"
#include "edgeavail/models.hpp"
#include "edgeavail/simulator.hpp"
#include "edgeavail/solver.hpp"
#include "edgeavail/statespace.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace edgeavail;
using Report = nlohmann::ordered_json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 1;
constexpr int exit_compute = 2;
constexpr int exit_usage = 64;

/// Bad flag values detected after CLI11 parsing.
struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Unreadable or malformed user input.
struct InputError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct Override
{
    std::string name;
    double value = 0.0;
};

double parse_number(const std::string& text, const std::string& what)
{
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end)
    {
        throw UsageError(what + ": '" + text + "' is not a number");
    }
    return v;
}

std::vector<Override> parse_overrides(const std::vector<std::string>& raw)
{
    std::vector<Override> out;
    for (const auto& item : raw)
    {
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
        {
            throw UsageError("--set expects name=value, got '" + item + "'");
        }
        out.push_back(Override{item.substr(0, eq), parse_number(item.substr(eq + 1), "--set " + item.substr(0, eq))});
    }
    return out;
}

/// Defaults with overrides applied, then validated.
IntensityTable intensity_table(const std::vector<std::string>& raw)
{
    IntensityTable t = IntensityTable::defaults();
    for (const auto& o : parse_overrides(raw))
    {
        try
        {
            t.set(o.name, o.value);
        }
        catch (const PreconditionError& e)
        {
            throw UsageError(e.what());
        }
    }
    auto problems = t.validate();
    if (!problems.empty())
    {
        std::string msg = "invalid --set override:";
        for (const auto& p : problems)
        {
            msg += " " + p + ";";
        }
        throw UsageError(msg);
    }
    return t;
}

SanModel load_with_overrides(const std::string& path, const std::vector<std::string>& raw)
{
    SanModel model = load_model(path);
    auto overrides = parse_overrides(raw);
    for (const auto& o : overrides)
    {
        if (!model.parameter(o.name))
        {
            throw UsageError("--set: model declares no parameter '" + o.name + "'");
        }
        model.set_parameter(o.name, o.value);
    }
    if (!overrides.empty())
    {
        auto problems = validate(model);
        if (!problems.empty())
        {
            throw UsageError("--set leaves the model invalid: " + problems.front());
        }
    }
    return model;
}

std::uint64_t default_seed()
{
    const char* env = std::getenv("EDGEAVAIL_SEED");
    if (env == nullptr || *env == '\0')
    {
        return 1;
    }
    std::uint64_t v = 0;
    std::string_view text(env);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
    {
        throw UsageError("EDGEAVAIL_SEED must be an unsigned integer, got '" + std::string(text) + "'");
    }
    return v;
}

void emit(const Report& report, bool json)
{
    if (json)
    {
        std::cout << report.dump(2) << '\n';
        return;
    }
    for (const auto& [key, value] : report.items())
    {
        if (value.is_number_float())
        {
            std::cout << key << '=' << format_real(value.get<double>()) << '\n';
        }
        else if (value.is_string())
        {
            std::cout << key << '=' << value.get<std::string>() << '\n';
        }
        else if (value.is_primitive())
        {
            std::cout << key << '=' << value.dump() << '\n';
        }
    }
}

// ---------------------------------------------------------------------------

struct SolveArgs
{
    std::string path;
    std::string reward{up_reward};
    std::string method = "gth";
    double tol = 1e-12;
    std::size_t max_iter = 1000000;
    std::size_t max_states = 100000;
    std::vector<std::string> sets;
    bool dump = false;
};

Report cmd_solve(const SolveArgs& a)
{
    SanModel model = load_with_overrides(a.path, a.sets);
    if (model.reward(a.reward) == nullptr)
    {
        throw InputError("model has no reward named '" + a.reward + "'");
    }
    StateGraph graph = explore(model, a.max_states);
    if (a.dump)
    {
        std::cerr << dump(model, graph);
    }
    StateGraph folded = eliminate_vanishing(graph);
    Ctmc chain = to_ctmc(model, folded, a.reward);
    SteadyState s = a.method == "gth" ? steady_state_gth(chain) : steady_state_iterative(chain, a.tol, a.max_iter);
    double u = unavailability(chain, s);

    Report r;
    r["model"] = a.path;
    r["reward"] = a.reward;
    r["tangible_states"] = graph.tangible_count();
    r["vanishing_states"] = graph.vanishing_count();
    r["transitions"] = folded.transitions.size();
    r["method"] = to_string(s.method);
    r["iterations"] = s.iterations;
    r["residual"] = s.residual;
    r["availability"] = 1.0 - u;
    r["unavailability"] = u;
    return r;
}

struct SimulateArgs
{
    std::string path;
    std::string reward{up_reward};
    double horizon = 1e7;
    std::optional<double> warmup;
    std::size_t batches = 20;
    std::size_t replications = 0;
    std::size_t jobs = 1;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> sets;
};

Report cmd_simulate(const SimulateArgs& a)
{
    if (a.batches < 2)
    {
        throw UsageError("--batches must be at least 2");
    }
    if (a.replications == 1)
    {
        throw UsageError("--replications must be 0 (batch means) or at least 2");
    }
    if (!(a.horizon > 0.0))
    {
        throw UsageError("--horizon must be > 0");
    }
    const double warmup = a.warmup.value_or(0.01 * a.horizon);
    if (!(warmup >= 0.0) || !(warmup < a.horizon))
    {
        throw UsageError("--warmup must lie in [0, horizon)");
    }
    const std::uint64_t seed = a.seed ? *a.seed : default_seed();

    SanModel model = load_with_overrides(a.path, a.sets);
    if (model.reward(a.reward) == nullptr)
    {
        throw InputError("model has no reward named '" + a.reward + "'");
    }
    SimEstimate e = a.replications >= 2
                        ? simulate_replicated(model, a.reward, a.horizon, warmup, a.replications, seed, a.jobs)
                        : simulate(model, a.reward, a.horizon, warmup, a.batches, seed);

    Report r;
    r["model"] = a.path;
    r["reward"] = a.reward;
    r["mode"] = a.replications >= 2 ? "replications" : "batch-means";
    r["seed"] = e.seed;
    r["horizon"] = e.horizon;
    r["warmup"] = warmup;
    r["batches"] = e.batches;
    r["events"] = e.events;
    r["availability"] = e.point;
    r["availability_ci_low"] = e.lower();
    r["availability_ci_high"] = e.upper();
    r["unavailability"] = 1.0 - e.point;
    r["unavailability_ci_low"] = 1.0 - e.upper();
    r["unavailability_ci_high"] = 1.0 - e.lower();
    r["ci_halfwidth"] = e.ci_halfwidth;
    return r;
}

struct FtArgs
{
    std::string path;
    bool paper = false;
    std::map<std::string, double> us;
    RedundancyConfig cfg;
    std::vector<std::string> sets;
};

Report cmd_ft(const FtArgs& a)
{
    Report r;
    if (!a.paper)
    {
        if (a.path.empty())
        {
            throw UsageError("ft needs a tree file or --paper");
        }
        std::ifstream in(a.path, std::ios::binary);
        if (!in)
        {
            throw InputError("cannot open '" + a.path + "'");
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        FtNode tree = parse_ft(buf.str());
        r["tree"] = a.path;
        r["u_sys"] = eval_ft(tree);
        return r;
    }
    try
    {
        a.cfg.validate();
    }
    catch (const PreconditionError& e)
    {
        throw UsageError(e.what());
    }
    ElementUnavailabilities us;
    std::optional<ElementCache> cache;
    for (ElementKind kind : all_element_kinds)
    {
        std::string name = to_string(kind);
        if (auto it = a.us.find(name); it != a.us.end())
        {
            if (!(it->second >= 0.0 && it->second <= 1.0))
            {
                throw UsageError("unavailability of " + name + " must lie in [0,1]");
            }
            us[name] = it->second;
            continue;
        }
        // Missing values come from the element models.
        if (!cache)
        {
            cache.emplace(intensity_table(a.sets));
        }
        us[name] = cache->element(kind);
    }
    double ran = u_ran(us["RU"], us["DU"], us["CU"], a.cfg);
    r["N_C"] = a.cfg.n_cu;
    r["N_D"] = a.cfg.n_du;
    r["N_R"] = a.cfg.n_ru;
    r["N_H"] = a.cfg.n_meh;
    for (const auto& [name, u] : us)
    {
        r["u_" + name] = u;
    }
    r["u_ran"] = ran;
    r["u_sys"] = u_sys(ran, us["5GC"], us["MANO"], us["MEH"], a.cfg.n_meh);
    return r;
}

struct PaperArgs
{
    std::string experiment;
    std::string out;
    std::vector<std::string> sets;
    std::size_t jobs = 0;
    std::string target = "5GC";
};

int cmd_paper(const PaperArgs& a, bool json)
{
    IntensityTable t = intensity_table(a.sets);
    SweepOptions options{a.jobs};
    SweepResult result;
    if (a.experiment == "table3")
    {
        result = run_table3(t, options);
    }
    else if (a.experiment == "fig6")
    {
        result = run_cluster_sweep(t, default_cluster_grid(), options);
    }
    else if (a.experiment == "fig7")
    {
        result = run_redundancy_configs(t, options);
    }
    else if (a.experiment == "fig8")
    {
        result = run_alpha_sweep(t, AlphaTarget::both, default_alpha_grid(), options);
    }
    else
    {
        result = run_alpha_sweep(t, a.target == "MANO" ? AlphaTarget::mano_only : AlphaTarget::core_only,
                                 default_alpha_grid(), options);
    }

    if (!a.out.empty())
    {
        std::ofstream f(a.out, std::ios::binary);
        if (!f || !(f << result.to_csv()))
        {
            throw InputError("cannot write '" + a.out + "'");
        }
    }

    Report r;
    r["experiment"] = result.experiment;
    r["rows"] = result.rows.size();
    r["table_hash"] = result.table_hash;
    r["method"] = result.method;
    r["timestamp"] = result.timestamp;
    if (!a.out.empty())
    {
        r["out"] = a.out;
    }
    if (json)
    {
        Report rows = Report::array();
        for (const auto& row : result.rows)
        {
            const auto& c = row.config;
            rows.push_back({{"config", c.name},
                            {"N_C", c.ran.n_cu},
                            {"N_D", c.ran.n_du},
                            {"N_R", c.ran.n_ru},
                            {"N_H", c.ran.n_meh},
                            {"M_5gc", c.core.m},
                            {"K_5gc", c.core.k},
                            {"M_mano", c.mano.m},
                            {"K_mano", c.mano.k},
                            {"alpha_H", c.alpha_h},
                            {"alpha_O", c.alpha_o},
                            {"alpha_S", c.alpha_s},
                            {"alpha_target", to_string(c.alpha_target)},
                            {"unavailability", row.unavailability}});
        }
        r["data"] = std::move(rows);
        emit(r, true);
    }
    else if (a.out.empty())
    {
        std::cout << result.to_csv();
    }
    else
    {
        emit(r, false);
    }
    return exit_ok;
}

Report cmd_export(const std::string& dir, const std::vector<std::string>& sets)
{
    IntensityTable t = intensity_table(sets);
    std::error_code ec;
    fs::create_directories(dir, ec);
    const std::pair<const char*, SanModel> models[] = {
        {"ru.san", build_ru(t)},   {"du.san", build_du(t)},          {"cu.san", build_cu(t)},
        {"meh.san", build_meh(t)}, {"cluster.san", build_cluster(t)},
    };
    Report r;
    r["directory"] = dir;
    std::size_t written = 0;
    for (const auto& [file, model] : models)
    {
        fs::path p = fs::path(dir) / file;
        std::ofstream f(p, std::ios::binary);
        if (!f || !(f << serialize_model(model)))
        {
            throw InputError("cannot write '" + p.string() + "'");
        }
        ++written;
    }
    r["files"] = written;
    return r;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Steady-state availability of SAN models and 5G-MEC systems", "edgeavail"};
    app.require_subcommand(1);
    bool json = false;
    app.add_flag("--json", json, "Print one JSON object instead of key=value lines");

    SolveArgs solve;
    auto* solve_cmd = app.add_subcommand("solve", "Exact steady-state solution of a .san model");
    solve_cmd->add_option("model", solve.path, "Model document")->required();
    solve_cmd->add_option("--reward", solve.reward, "Reward predicate defining 'up'");
    solve_cmd->add_option("--method", solve.method, "gth or iter")->check(CLI::IsMember({"gth", "iter"}));
    solve_cmd->add_option("--tol", solve.tol, "Iterative convergence tolerance")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--max-iter", solve.max_iter, "Iterative sweep limit")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--max-states", solve.max_states, "Reachability bound")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--set", solve.sets, "Override a model parameter, name=value");
    solve_cmd->add_flag("--dump", solve.dump, "Write the reachability graph to stderr");

    SimulateArgs sim;
    std::uint64_t seed_value = 0;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo estimate with a 95% confidence interval");
    sim_cmd->add_option("model", sim.path, "Model document")->required();
    sim_cmd->add_option("--reward", sim.reward, "Reward predicate defining 'up'");
    sim_cmd->add_option("--horizon", sim.horizon, "Simulated hours");
    sim_cmd->add_option("--warmup", sim.warmup, "Discarded initial hours (default: 1% of the horizon)");
    sim_cmd->add_option("--batches", sim.batches, "Batch count for batch means");
    sim_cmd->add_option("--replications", sim.replications, "Independent replications instead of batch means");
    sim_cmd->add_option("--jobs", sim.jobs, "Worker threads for replications (0 = all cores)");
    auto* seed_opt = sim_cmd->add_option("--seed", seed_value, "Random seed (default: $EDGEAVAIL_SEED or 1)");
    sim_cmd->add_option("--set", sim.sets, "Override a model parameter, name=value");

    FtArgs ft;
    auto* ft_cmd = app.add_subcommand("ft", "Evaluate a fault tree");
    ft_cmd->add_option("tree", ft.path, "Fault-tree document");
    ft_cmd->add_flag("--paper", ft.paper, "Use the 5G-MEC system tree");
    std::map<std::string, double> u_flags;
    for (ElementKind kind : all_element_kinds)
    {
        std::string name = to_string(kind);
        std::string flag = "--u-" + name;
        for (auto& ch : flag)
        {
            ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        }
        ft_cmd->add_option_function<double>(
            flag, [&ft, name](double v) { ft.us[name] = v; },
            "Unavailability of " + name + " (default: solved from its model)");
    }
    ft_cmd->add_option("--nc", ft.cfg.n_cu, "N_C, gNodeBs in parallel");
    ft_cmd->add_option("--nd", ft.cfg.n_du, "N_D, DUs per CU");
    ft_cmd->add_option("--nr", ft.cfg.n_ru, "N_R, RUs per DU");
    ft_cmd->add_option("--nh", ft.cfg.n_meh, "N_H, MEC hosts");
    ft_cmd->add_option("--set", ft.sets, "Override an intensity, name=value");

    PaperArgs paper;
    auto* paper_cmd = app.add_subcommand("paper", "Run a reproduction experiment and write its CSV");
    paper_cmd->add_option("experiment", paper.experiment, "table3, fig6, fig7, fig8 or fig9")
        ->required()
        ->check(CLI::IsMember({"table3", "fig6", "fig7", "fig8", "fig9"}));
    paper_cmd->add_option("--out", paper.out, "CSV destination (default: stdout)");
    paper_cmd->add_option("--set", paper.sets, "Override an intensity, name=value");
    paper_cmd->add_option("--jobs", paper.jobs, "Worker threads (0 = all cores)");
    paper_cmd->add_option("--target", paper.target, "Cluster whose intensities fig9 scales")
        ->check(CLI::IsMember({"5GC", "MANO"}));

    std::string export_dir = "models";
    std::vector<std::string> export_sets;
    auto* export_cmd = app.add_subcommand("export", "Write the built-in element models as .san documents");
    export_cmd->add_option("directory", export_dir, "Destination directory");
    export_cmd->add_option("--set", export_sets, "Override an intensity, name=value");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return exit_usage;
    }

    try
    {
        if (*solve_cmd)
        {
            emit(cmd_solve(solve), json);
        }
        else if (*sim_cmd)
        {
            if (seed_opt->count() > 0)
            {
                sim.seed = seed_value;
            }
            emit(cmd_simulate(sim), json);
        }
        else if (*ft_cmd)
        {
            emit(cmd_ft(ft), json);
        }
        else if (*paper_cmd)
        {
            return cmd_paper(paper, json);
        }
        else if (*export_cmd)
        {
            emit(cmd_export(export_dir, export_sets), json);
        }
        return exit_ok;
    }
    catch (const UsageError& e)
    {
        std::cerr << "edgeavail: usage error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const InputError& e)
    {
        std::cerr << "edgeavail: " << e.what() << '\n';
        return exit_input;
    }
    catch (const SyntaxError& e)
    {
        std::cerr << "edgeavail: syntax error: " << e.what() << '\n';
        return exit_input;
    }
    catch (const SemanticError& e)
    {
        std::cerr << "edgeavail: invalid model: " << e.what() << '\n';
        return exit_input;
    }
    catch (const UnknownReward& e)
    {
        std::cerr << "edgeavail: " << e.what() << '\n';
        return exit_input;
    }
    catch (const Error& e)
    {
        // Everything else raised by the library is a failure of the analysis
        // itself (state-space bound, reducible chain, no convergence, ...),
        // except unreadable files, which load_model reports as a plain Error.
        std::cerr << "edgeavail: " << e.what() << '\n';
        bool plain = typeid(e) == typeid(Error);
        return plain ? exit_input : exit_compute;
    }
    catch (const std::exception& e)
    {
        std::cerr << "edgeavail: " << e.what() << '\n';
        return exit_compute;
    }
}
