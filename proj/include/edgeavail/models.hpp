#ifndef EDGEAVAIL_MODELS_HPP
#define EDGEAVAIL_MODELS_HPP

#include "edgeavail/san.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace edgeavail {

/// Time units in hours. One month is 730 h and one year 8760 h.
namespace units {
inline constexpr double second = 1.0 / 3600.0;
inline constexpr double minute = 1.0 / 60.0;
inline constexpr double hour = 1.0;
inline constexpr double day = 24.0;
inline constexpr double week = 168.0;
inline constexpr double month = 730.0;
inline constexpr double year = 8760.0;
} // namespace units

/// Failure/repair intensities (h^-1), coverage factors, cluster sizing and
/// the failure-rate multipliers of the 5GC/MANO cluster.
struct IntensityTable
{
    double lambda_RH = 0.0;
    double mu_RH = 0.0;
    double lambda_HW = 0.0;
    double mu_cov = 0.0;
    double mu_HW = 0.0;
    double mu_HW_fo = 0.0;
    double lambda_A = 0.0;
    double mu_A = 0.0;
    double lambda_FW = 0.0;
    double mu_FW = 0.0;
    double lambda_OS = 0.0;
    double mu_OS = 0.0;
    double mu_OS_r = 0.0;
    double mu_HYP_rs = 0.0;
    double lambda_HYP = 0.0;
    double mu_HYP = 0.0;
    double mu_HYP_r = 0.0;
    double mu_VM_rs = 0.0;
    double lambda_VM = 0.0;
    double mu_VM = 0.0;
    double mu_VM_r = 0.0;
    double lambda_APP = 0.0;
    double mu_APP = 0.0;
    double mu_APP_r = 0.0;
    double lambda_SW = 0.0;
    double mu_SW = 0.0;
    double mu_SW_r = 0.0;

    double C_HW = 0.0;
    double C_OS = 0.0;
    double C_HYP = 0.0;
    double C_SW = 0.0;
    double C_VM = 0.0;
    double C_APP = 0.0;

    std::size_t M = 10;
    std::size_t K = 9;
    double alpha_H = 1.0;
    double alpha_O = 1.0;
    double alpha_S = 1.0;

    /// The reference intensities: mean times converted to hourly rates.
    static IntensityTable defaults();

    /// Every settable field name, in declaration order.
    static const std::vector<std::string>& names();

    std::optional<double> get(std::string_view name) const;
    /// Assigns a field by name. Throws PreconditionError for an unknown name
    /// or a non-integral M/K; range checks are left to validate().
    void set(std::string_view name, double value);

    /// Violations of: rates > 0 and finite, coverages in [0,1],
    /// 1 <= K <= M, multipliers > 0. Empty means valid.
    std::vector<std::string> validate() const;
    void require_valid() const;

    friend bool operator==(const IntensityTable&, const IntensityTable&) = default;
};

enum class ElementKind
{
    RU,
    DU,
    CU,
    MEH,
    Cluster5GC,
    ClusterMANO
};

inline constexpr std::array<ElementKind, 6> all_element_kinds = {
    ElementKind::RU, ElementKind::DU, ElementKind::CU, ElementKind::MEH, ElementKind::Cluster5GC,
    ElementKind::ClusterMANO};

/// "RU", "DU", "CU", "MEH", "5GC", "MANO".
std::string to_string(ElementKind kind);
std::optional<ElementKind> parse_element_kind(std::string_view name);

/// Name of the availability reward every built-in model declares.
inline constexpr std::string_view up_reward = "up";

/// Radio unit: one token cycling between RU_OK and one failed place per
/// failure mode (hardware, antenna, firmware).
SanModel build_ru(const IntensityTable& t);

/// Distributed unit on non-redundant COTS hardware with OS reboot and
/// software restart paths. SW_rec is instantaneous.
SanModel build_du(const IntensityTable& t);

/// Central unit: the DU structure plus 1+1 active-standby hardware.
SanModel build_cu(const IntensityTable& t);

/// MEC host: hypervisor, two VMs (MEP and application) and the software on
/// each. MEP_rec and APP_rec are instantaneous.
SanModel build_meh(const IntensityTable& t);

/// K-of-M cluster hosting the 5GC or the MANO.
SanModel build_cluster(const IntensityTable& t, std::size_t m, std::size_t k, double alpha_h, double alpha_o,
                       double alpha_s);

/// Cluster with t.M, t.K and t's multipliers.
SanModel build_cluster(const IntensityTable& t);

SanModel build_element(ElementKind kind, const IntensityTable& t);

/// Builds, explores, folds vanishing markings, solves with GTH and returns
/// the steady-state probability that the "up" reward does not hold.
double element_unavailability(ElementKind kind, const IntensityTable& t);

/// Unavailability of any model through the exact pipeline.
double model_unavailability(const SanModel& model, std::string_view reward = up_reward);

} // namespace edgeavail

#endif // EDGEAVAIL_MODELS_HPP
