#include "edgeavail/models.hpp"

#include "edgeavail/error.hpp"
#include "edgeavail/solver.hpp"
#include "edgeavail/statespace.hpp"

#include <cmath>
#include <utility>

namespace edgeavail {

namespace {

struct Field
{
    const char* name;
    double IntensityTable::*member;
};

// Rates and probabilities; M and K are handled separately.
constexpr Field fields[] = {
    {"lambda_RH", &IntensityTable::lambda_RH},   {"mu_RH", &IntensityTable::mu_RH},
    {"lambda_HW", &IntensityTable::lambda_HW},   {"mu_cov", &IntensityTable::mu_cov},
    {"mu_HW", &IntensityTable::mu_HW},           {"mu_HW_fo", &IntensityTable::mu_HW_fo},
    {"lambda_A", &IntensityTable::lambda_A},     {"mu_A", &IntensityTable::mu_A},
    {"lambda_FW", &IntensityTable::lambda_FW},   {"mu_FW", &IntensityTable::mu_FW},
    {"lambda_OS", &IntensityTable::lambda_OS},   {"mu_OS", &IntensityTable::mu_OS},
    {"mu_OS_r", &IntensityTable::mu_OS_r},       {"mu_HYP_rs", &IntensityTable::mu_HYP_rs},
    {"lambda_HYP", &IntensityTable::lambda_HYP}, {"mu_HYP", &IntensityTable::mu_HYP},
    {"mu_HYP_r", &IntensityTable::mu_HYP_r},     {"mu_VM_rs", &IntensityTable::mu_VM_rs},
    {"lambda_VM", &IntensityTable::lambda_VM},   {"mu_VM", &IntensityTable::mu_VM},
    {"mu_VM_r", &IntensityTable::mu_VM_r},       {"lambda_APP", &IntensityTable::lambda_APP},
    {"mu_APP", &IntensityTable::mu_APP},         {"mu_APP_r", &IntensityTable::mu_APP_r},
    {"lambda_SW", &IntensityTable::lambda_SW},   {"mu_SW", &IntensityTable::mu_SW},
    {"mu_SW_r", &IntensityTable::mu_SW_r},       {"C_HW", &IntensityTable::C_HW},
    {"C_OS", &IntensityTable::C_OS},             {"C_HYP", &IntensityTable::C_HYP},
    {"C_SW", &IntensityTable::C_SW},             {"C_VM", &IntensityTable::C_VM},
    {"C_APP", &IntensityTable::C_APP},           {"alpha_H", &IntensityTable::alpha_H},
    {"alpha_O", &IntensityTable::alpha_O},       {"alpha_S", &IntensityTable::alpha_S},
};

bool is_coverage(std::string_view name) { return name.starts_with("C_"); }

} // namespace

IntensityTable IntensityTable::defaults()
{
    using namespace units;
    IntensityTable t;
    t.lambda_RH = 1.0 / (17 * year);
    t.mu_RH = 1.0 / (6 * hour);
    t.lambda_HW = 1.0 / (6 * month);
    t.mu_cov = 1.0 / (30 * minute);
    t.mu_HW = 1.0 / (2 * hour);
    t.mu_HW_fo = 1.0 / (3 * minute);
    t.lambda_A = 1.0 / (104 * month);
    t.mu_A = 1.0 / (6 * hour);
    t.lambda_FW = 1.0 / (75 * day);
    t.mu_FW = 1.0 / (65 * minute);
    t.lambda_OS = 1.0 / (2 * month);
    t.mu_OS = 1.0 / (1 * hour);
    t.mu_OS_r = 1.0 / (1 * minute);
    t.mu_HYP_rs = 1.0 / (2.5 * minute);
    t.lambda_HYP = 1.0 / (4 * month);
    t.mu_HYP = 1.0 / (1 * hour);
    t.mu_HYP_r = 1.0 / (1 * minute);
    t.mu_VM_rs = 1.0 / (1.5 * minute);
    t.lambda_VM = 1.0 / (3 * month);
    t.mu_VM = 1.0 / (1 * hour);
    t.mu_VM_r = 1.0 / (1 * minute);
    t.lambda_APP = 1.0 / (2 * week);
    t.mu_APP = 1.0 / (30 * minute);
    t.mu_APP_r = 1.0 / (15 * second);
    t.lambda_SW = 1.0 / (1 * month);
    t.mu_SW = 1.0 / (30 * minute);
    t.mu_SW_r = 1.0 / (30 * second);
    t.C_HW = 0.97;
    t.C_OS = 0.9;
    t.C_HYP = 0.9;
    t.C_SW = 0.85;
    t.C_VM = 0.9;
    t.C_APP = 0.8;
    t.M = 10;
    t.K = 9;
    return t;
}

const std::vector<std::string>& IntensityTable::names()
{
    static const std::vector<std::string> all = [] {
        std::vector<std::string> out;
        for (const auto& f : fields)
        {
            out.emplace_back(f.name);
        }
        out.emplace_back("M");
        out.emplace_back("K");
        return out;
    }();
    return all;
}

std::optional<double> IntensityTable::get(std::string_view name) const
{
    if (name == "M")
    {
        return static_cast<double>(M);
    }
    if (name == "K")
    {
        return static_cast<double>(K);
    }
    for (const auto& f : fields)
    {
        if (name == f.name)
        {
            return this->*f.member;
        }
    }
    return std::nullopt;
}

void IntensityTable::set(std::string_view name, double value)
{
    if (name == "M" || name == "K")
    {
        if (!(value >= 0.0) || std::floor(value) != value)
        {
            throw PreconditionError(std::string(name) + " must be a non-negative integer");
        }
        (name == "M" ? M : K) = static_cast<std::size_t>(value);
        return;
    }
    for (const auto& f : fields)
    {
        if (name == f.name)
        {
            this->*f.member = value;
            return;
        }
    }
    throw PreconditionError("unknown intensity parameter '" + std::string(name) + "'");
}

std::vector<std::string> IntensityTable::validate() const
{
    std::vector<std::string> out;
    for (const auto& f : fields)
    {
        double v = this->*f.member;
        if (is_coverage(f.name))
        {
            if (!(v >= 0.0 && v <= 1.0))
            {
                out.push_back(std::string(f.name) + " must lie in [0,1]");
            }
        }
        else if (!(v > 0.0) || !std::isfinite(v))
        {
            out.push_back(std::string(f.name) + " must be > 0 and finite");
        }
    }
    if (K < 1 || K > M)
    {
        out.push_back("cluster settings need 1 <= K <= M");
    }
    return out;
}

void IntensityTable::require_valid() const
{
    auto problems = validate();
    if (problems.empty())
    {
        return;
    }
    std::string msg = "invalid intensity table:";
    for (const auto& p : problems)
    {
        msg += "\n  " + p;
    }
    throw PreconditionError(msg);
}

std::string to_string(ElementKind kind)
{
    switch (kind)
    {
    case ElementKind::RU: return "RU";
    case ElementKind::DU: return "DU";
    case ElementKind::CU: return "CU";
    case ElementKind::MEH: return "MEH";
    case ElementKind::Cluster5GC: return "5GC";
    case ElementKind::ClusterMANO: return "MANO";
    }
    return "?";
}

std::optional<ElementKind> parse_element_kind(std::string_view name)
{
    for (ElementKind k : all_element_kinds)
    {
        if (to_string(k) == name)
        {
            return k;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

/// Small DSL over SanModel for token-moving activities.
class Net
{
public:
    Net(const IntensityTable& t, std::string description)
    : table_(t)
    {
        model_.set_description(std::move(description));
    }

    Net& param(const char* name)
    {
        model_.set_parameter(name, *table_.get(name));
        return *this;
    }

    Net& param(const char* name, double value)
    {
        model_.set_parameter(name, value);
        return *this;
    }

    Net& place(const char* name, std::int64_t tokens = 0)
    {
        model_.add_place(name, tokens);
        return *this;
    }

    /// Timed activity moving one token from `from` to the case target.
    Net& timed(const char* name, const char* rate, const char* from,
               std::vector<std::pair<const char*, const char*>> cases)
    {
        return move(name, Activity::Kind::timed, rate, from, std::move(cases));
    }

    Net& instant(const char* name, const char* from, std::vector<std::pair<const char*, const char*>> cases)
    {
        return move(name, Activity::Kind::instantaneous, nullptr, from, std::move(cases));
    }

    Net& activity(Activity a)
    {
        model_.add_activity(std::move(a));
        return *this;
    }

    Net& reward(const char* predicate)
    {
        model_.add_reward(std::string(up_reward), parse_expression(predicate));
        return *this;
    }

    SanModel done() { return std::move(model_); }

private:
    Net& move(const char* name, Activity::Kind kind, const char* rate, const char* from,
              std::vector<std::pair<const char*, const char*>> cases)
    {
        Activity a;
        a.name = name;
        a.kind = kind;
        if (rate != nullptr)
        {
            a.rate = parse_expression(rate);
        }
        a.input.predicate = parse_expression(std::string("#") + from + " >= 1");
        a.input.effects.push_back(Effect{from, Effect::Op::subtract, Expr::literal(1.0)});
        for (const auto& [probability, to] : cases)
        {
            a.cases.push_back(
                CaseSpec{parse_expression(probability), {Effect{to, Effect::Op::add, Expr::literal(1.0)}}});
        }
        model_.add_activity(std::move(a));
        return *this;
    }

    const IntensityTable& table_;
    SanModel model_;
};

Effect effect(const char* place, Effect::Op op, const char* value)
{
    return Effect{place, op, parse_expression(value)};
}

} // namespace

SanModel build_ru(const IntensityTable& t)
{
    return Net(t, "Radio unit: hardware, antenna and firmware failure modes")
        .param("lambda_RH").param("mu_RH")
        .param("lambda_A").param("mu_A")
        .param("lambda_FW").param("mu_FW")
        .place("RU_OK", 1).place("RH_failed").place("Ant_failed").place("FW_failed")
        .timed("RH_F", "lambda_RH", "RU_OK", {{"1", "RH_failed"}})
        .timed("RH_R", "mu_RH", "RH_failed", {{"1", "RU_OK"}})
        .timed("Ant_F", "lambda_A", "RU_OK", {{"1", "Ant_failed"}})
        .timed("Ant_R", "mu_A", "Ant_failed", {{"1", "RU_OK"}})
        .timed("FW_F", "lambda_FW", "RU_OK", {{"1", "FW_failed"}})
        .timed("FW_R", "mu_FW", "FW_failed", {{"1", "RU_OK"}})
        .reward("#RU_OK >= 1")
        .done();
}

SanModel build_du(const IntensityTable& t)
{
    // OS reboot and OS hard repair both end in a software restart; a
    // hardware repair returns straight to DU_OK.
    return Net(t, "Distributed unit on non-redundant COTS hardware")
        .param("lambda_HW").param("mu_HW")
        .param("lambda_OS").param("mu_OS").param("mu_OS_r").param("C_OS")
        .param("lambda_SW").param("mu_SW").param("mu_SW_r").param("C_SW")
        .place("DU_OK", 1).place("HW_failed").place("OS_failed").place("OS_Urep")
        .place("SW_failed").place("SW_Urep").place("SW_Ures")
        .timed("HW_F", "lambda_HW", "DU_OK", {{"1", "HW_failed"}})
        .timed("HW_R", "mu_HW", "HW_failed", {{"1", "DU_OK"}})
        .timed("OS_F", "lambda_OS", "DU_OK", {{"1", "OS_failed"}})
        .timed("OS_rec", "mu_OS_r", "OS_failed", {{"C_OS", "SW_Ures"}, {"1 - C_OS", "OS_Urep"}})
        .timed("OS_R", "mu_OS", "OS_Urep", {{"1", "SW_Ures"}})
        .timed("SW_F", "lambda_SW", "DU_OK", {{"1", "SW_failed"}})
        .instant("SW_rec", "SW_failed", {{"C_SW", "SW_Ures"}, {"1 - C_SW", "SW_Urep"}})
        .timed("SW_R", "mu_SW", "SW_Urep", {{"1", "DU_OK"}})
        .timed("SW_res", "mu_SW_r", "SW_Ures", {{"1", "DU_OK"}})
        .reward("#DU_OK >= 1")
        .done();
}

SanModel build_cu(const IntensityTable& t)
{
    Net net(t, "Central unit with 1+1 active-standby hardware");
    net.param("lambda_HW").param("mu_HW").param("mu_HW_fo").param("C_HW").param("mu_cov")
        .param("lambda_OS").param("mu_OS").param("mu_OS_r").param("C_OS")
        .param("lambda_SW").param("mu_SW").param("mu_SW_r").param("C_SW")
        .place("CU_OK", 1).place("OS_failed").place("OS_Urep")
        .place("SW_failed").place("SW_Urep").place("SW_Ures")
        .place("CHW2", 1).place("CHW1_failed").place("CHW_rep").place("CHW_cov")
        .timed("OS_F", "lambda_OS", "CU_OK", {{"1", "OS_failed"}})
        .timed("OS_rec", "mu_OS_r", "OS_failed", {{"C_OS", "SW_Ures"}, {"1 - C_OS", "OS_Urep"}})
        .timed("OS_R", "mu_OS", "OS_Urep", {{"1", "SW_Ures"}})
        .timed("SW_F", "lambda_SW", "CU_OK", {{"1", "SW_failed"}})
        .instant("SW_rec", "SW_failed", {{"C_SW", "SW_Ures"}, {"1 - C_SW", "SW_Urep"}})
        .timed("SW_R", "mu_SW", "SW_Urep", {{"1", "CU_OK"}})
        .timed("SW_res", "mu_SW_r", "SW_Ures", {{"1", "CU_OK"}})
        .timed("CHW1_F", "lambda_HW", "CU_OK", {{"1", "CHW1_failed"}});

    // Failover needs the standby unit: the failed unit goes to repair and the
    // standby either takes over or waits for manual intervention.
    Activity failover;
    failover.name = "CHW_rec";
    failover.rate = parse_expression("mu_HW_fo");
    failover.input.predicate = parse_expression("#CHW1_failed >= 1 and #CHW2 >= 1");
    failover.input.effects = {effect("CHW1_failed", Effect::Op::subtract, "1"),
                              effect("CHW2", Effect::Op::subtract, "1")};
    failover.cases = {
        CaseSpec{parse_expression("C_HW"),
                 {effect("CHW_rep", Effect::Op::add, "1"), effect("CU_OK", Effect::Op::add, "1")}},
        CaseSpec{parse_expression("1 - C_HW"),
                 {effect("CHW_rep", Effect::Op::add, "1"), effect("CHW_cov", Effect::Op::add, "1")}}};
    net.activity(std::move(failover));

    return net.timed("man_cov", "mu_cov", "CHW_cov", {{"1", "CU_OK"}})
        .timed("CHW2_F", "lambda_HW", "CHW2", {{"1", "CHW_rep"}})
        .timed("CHW_R", "mu_HW", "CHW_rep", {{"1", "CHW2"}})
        .reward("#CU_OK >= 1")
        .done();
}

SanModel build_meh(const IntensityTable& t)
{
    // Restarts of the hypervisor (after hard repair) and of the VMs bring the
    // whole host back; VM hard repairs end in a restart of the hosted software.
    return Net(t, "MEC host: hypervisor, MEP and application VMs, MEP and application software")
        .param("lambda_HYP").param("mu_HYP").param("mu_HYP_r").param("mu_HYP_rs").param("C_HYP")
        .param("lambda_VM").param("mu_VM").param("mu_VM_r").param("mu_VM_rs").param("C_VM")
        .param("lambda_SW").param("mu_SW").param("mu_SW_r")
        .param("lambda_APP").param("mu_APP").param("mu_APP_r").param("C_APP")
        .place("MEH_OK", 1).place("Hyp_failed").place("Hyp_Ures").place("Hyp_Urep").place("VM_Ures")
        .place("MVM_failed").place("MVM_Urep").place("MEP_failed").place("MEP_Urep").place("MEP_Ures")
        .place("AVM_failed").place("AVM_Urep").place("APP_failed").place("APP_Urep").place("APP_Ures")
        .timed("HYP_F", "lambda_HYP", "MEH_OK", {{"1", "Hyp_failed"}})
        .timed("HYP_rec", "mu_HYP_r", "Hyp_failed", {{"C_HYP", "VM_Ures"}, {"1 - C_HYP", "Hyp_Urep"}})
        .timed("HYP_R", "mu_HYP", "Hyp_Urep", {{"1", "Hyp_Ures"}})
        .timed("HYP_res", "mu_HYP_rs", "Hyp_Ures", {{"1", "MEH_OK"}})
        .timed("VM_res", "mu_VM_rs", "VM_Ures", {{"1", "MEH_OK"}})
        .timed("MVM_F", "lambda_VM", "MEH_OK", {{"1", "MVM_failed"}})
        .timed("MVM_rec", "mu_VM_r", "MVM_failed", {{"C_VM", "MEP_Ures"}, {"1 - C_VM", "MVM_Urep"}})
        .timed("MVM_R", "mu_VM", "MVM_Urep", {{"1", "MEP_Ures"}})
        .timed("MEP_F", "lambda_SW", "MEH_OK", {{"1", "MEP_failed"}})
        .instant("MEP_rec", "MEP_failed", {{"C_APP", "MEP_Ures"}, {"1 - C_APP", "MEP_Urep"}})
        .timed("MEP_R", "mu_SW", "MEP_Urep", {{"1", "MEH_OK"}})
        .timed("MEP_VMres", "mu_SW_r", "MEP_Ures", {{"1", "MEH_OK"}})
        .timed("AVM_F", "lambda_VM", "MEH_OK", {{"1", "AVM_failed"}})
        .timed("AVM_rec", "mu_VM_r", "AVM_failed", {{"C_VM", "APP_Ures"}, {"1 - C_VM", "AVM_Urep"}})
        .timed("AVM_R", "mu_VM", "AVM_Urep", {{"1", "APP_Ures"}})
        .timed("APP_F", "lambda_APP", "MEH_OK", {{"1", "APP_failed"}})
        .instant("APP_rec", "APP_failed", {{"C_APP", "APP_Ures"}, {"1 - C_APP", "APP_Urep"}})
        .timed("APP_R", "mu_APP", "APP_Urep", {{"1", "MEH_OK"}})
        .timed("APP_VMres", "mu_APP_r", "APP_Ures", {{"1", "MEH_OK"}})
        .reward("#MEH_OK >= 1")
        .done();
}

SanModel build_cluster(const IntensityTable& t, std::size_t m, std::size_t k, double alpha_h, double alpha_o,
                       double alpha_s)
{
    if (k < 1 || k > m)
    {
        throw PreconditionError("cluster needs 1 <= K <= M, got M=" + std::to_string(m) + " K=" + std::to_string(k));
    }
    const double md = static_cast<double>(m);
    const double kd = static_cast<double>(k);

    Net net(t, "K-of-M cluster hosting the 5GC or the MANO");
    net.param("M", md).param("K", kd)
        .param("alpha_H", alpha_h).param("alpha_O", alpha_o).param("alpha_S", alpha_s)
        .param("lambda_HW").param("lambda_OS").param("lambda_SW")
        .param("mu_HW").param("mu_OS").param("mu_SW")
        .param("mu_cov").param("mu_OS_r").param("mu_SW_r")
        .param("C_HW").param("C_OS").param("C_SW")
        .param("lambda_Hi", alpha_h * t.lambda_HW * md / kd)
        .param("lambda_Oi", alpha_o * t.lambda_OS * md / kd)
        .place("Working", static_cast<std::int64_t>(m))
        .place("HW_Fail").place("HW_Down").place("OS_Fail").place("OS_Down").place("SW_Fail").place("SW_Down");

    // While any Down token is present the cluster has crashed and no
    // further failure of any kind happens.
    const std::string no_down = "#HW_Down = 0 and #OS_Down = 0 and #SW_Down = 0";

    auto failure = [&](const char* name, const char* rate, const char* from,
                       std::vector<std::pair<const char*, const char*>> cases) {
        Activity a;
        a.name = name;
        a.rate = parse_expression(rate);
        a.input.predicate = parse_expression(std::string("#") + from + " > 0 and " + no_down);
        a.input.effects = {effect(from, Effect::Op::subtract, "1")};
        for (const auto& [p, to] : cases)
        {
            a.cases.push_back(CaseSpec{parse_expression(p), {effect(to, Effect::Op::add, "1")}});
        }
        net.activity(std::move(a));
    };
    failure("HW_F1", "#Working * lambda_Hi", "Working", {{"C_HW", "HW_Fail"}, {"1 - C_HW", "HW_Down"}});
    failure("HW_F2", "#OS_Fail * lambda_Hi", "OS_Fail", {{"1", "HW_Fail"}});
    failure("HW_F3", "#SW_Fail * lambda_Hi", "SW_Fail", {{"1", "HW_Fail"}});
    failure("OS_F1", "#Working * lambda_Oi", "Working", {{"C_OS", "OS_Fail"}, {"1 - C_OS", "OS_Down"}});
    failure("OS_F2", "#SW_Fail * lambda_Oi", "SW_Fail", {{"1", "OS_Fail"}});
    failure("SW_F",
            "#Working * (if #Working >= K then alpha_S * lambda_SW * M / #Working else alpha_S * lambda_SW * M)",
            "Working", {{"C_SW", "SW_Fail"}, {"1 - C_SW", "SW_Down"}});

    // One repair facility per failure class.
    net.timed("HW_R", "mu_HW", "HW_Fail", {{"1", "Working"}})
        .timed("OS_R", "mu_OS", "OS_Fail", {{"1", "Working"}})
        .timed("SW_R", "mu_SW", "SW_Fail", {{"1", "Working"}});

    // Crash recoveries: every failed OS/SW instance comes back with the cluster.
    auto crash_recovery = [&](const char* name, const char* rate, const char* down, bool hardware) {
        Activity a;
        a.name = name;
        a.rate = parse_expression(rate);
        a.input.predicate = parse_expression(std::string("#") + down + " > 0");
        a.input.effects = {effect(down, Effect::Op::subtract, "1")};
        CaseSpec c;
        if (hardware)
        {
            c.effects.push_back(effect("HW_Fail", Effect::Op::add, "1"));
        }
        c.effects.push_back(effect("OS_Fail", Effect::Op::assign, "0"));
        c.effects.push_back(effect("SW_Fail", Effect::Op::assign, "0"));
        c.effects.push_back(effect("Working", Effect::Op::assign, "M - #HW_Fail"));
        a.cases.push_back(std::move(c));
        net.activity(std::move(a));
    };
    crash_recovery("UHW_R", "mu_cov", "HW_Down", true);
    crash_recovery("UOS_R", "mu_OS_r", "OS_Down", false);
    crash_recovery("USW_R", "mu_SW_r", "SW_Down", false);

    return net.reward(("#Working >= K and " + no_down).c_str()).done();
}

SanModel build_cluster(const IntensityTable& t)
{
    return build_cluster(t, t.M, t.K, t.alpha_H, t.alpha_O, t.alpha_S);
}

SanModel build_element(ElementKind kind, const IntensityTable& t)
{
    t.require_valid();
    switch (kind)
    {
    case ElementKind::RU: return build_ru(t);
    case ElementKind::DU: return build_du(t);
    case ElementKind::CU: return build_cu(t);
    case ElementKind::MEH: return build_meh(t);
    case ElementKind::Cluster5GC:
    case ElementKind::ClusterMANO: return build_cluster(t);
    }
    throw PreconditionError("unknown element kind");
}

double model_unavailability(const SanModel& model, std::string_view reward)
{
    Ctmc c = build_ctmc(model, reward);
    return unavailability(c, steady_state_gth(c));
}

double element_unavailability(ElementKind kind, const IntensityTable& t)
{
    return model_unavailability(build_element(kind, t));
}

} // namespace edgeavail
