#ifndef EDGEAVAIL_EXPERIMENTS_HPP
#define EDGEAVAIL_EXPERIMENTS_HPP

#include "edgeavail/fault_tree.hpp"
#include "edgeavail/models.hpp"

#include <cstddef>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

namespace edgeavail {

struct ClusterSetting
{
    std::size_t m = 10;
    std::size_t k = 9;

    friend bool operator==(const ClusterSetting&, const ClusterSetting&) = default;
};

/// Which cluster(s) the α multipliers of a configuration act on. The other
/// cluster keeps α = 1.
enum class AlphaTarget
{
    both,
    core_only, // 5GC
    mano_only
};

std::string to_string(AlphaTarget target);

/// One point of a sweep: redundancy counts, both cluster settings and the
/// failure-rate multipliers.
struct SystemConfig
{
    std::string name;
    RedundancyConfig ran;
    ClusterSetting core;
    ClusterSetting mano;
    double alpha_h = 1.0;
    double alpha_o = 1.0;
    double alpha_s = 1.0;
    AlphaTarget alpha_target = AlphaTarget::both;
};

struct SweepRow
{
    SystemConfig config;
    double unavailability = 0.0;
};

struct SweepResult
{
    std::string experiment;
    std::vector<SweepRow> rows;
    /// FNV-1a digest of the intensity table, hex.
    std::string table_hash;
    std::string method = "gth";
    /// UTC, ISO 8601.
    std::string timestamp;

    /// Header `config,N_C,N_D,N_R,N_H,M_5gc,K_5gc,M_mano,K_mano,alpha_H,alpha_O,alpha_S,unavailability`
    /// followed by one line per row; reals with 10 significant digits.
    std::string to_csv() const;
    const SweepRow* find(std::string_view config_name) const;
};

inline constexpr const char* csv_header =
    "config,N_C,N_D,N_R,N_H,M_5gc,K_5gc,M_mano,K_mano,alpha_H,alpha_O,alpha_S,unavailability";

/// Stable digest of every field of the table.
std::string table_digest(const IntensityTable& t);

/// Memoises element unavailabilities for one intensity table. RU, DU, CU and
/// MEH do not depend on the configuration; clusters are keyed by
/// (M, K, α_H, α_O, α_S). Safe to share between threads.
class ElementCache
{
public:
    explicit ElementCache(IntensityTable t);

    const IntensityTable& table() const noexcept { return table_; }
    double element(ElementKind kind);
    double cluster(ClusterSetting setting, double alpha_h, double alpha_o, double alpha_s);

    /// Element unavailabilities of a configuration, keyed as the fault tree expects.
    ElementUnavailabilities inputs(const SystemConfig& config);

    /// u_sys(u_ran(...)) for the configuration.
    double system_unavailability(const SystemConfig& config);

    /// Number of cluster chains solved so far.
    std::size_t cluster_solves() const;

private:
    IntensityTable table_;
    mutable std::mutex mutex_;
    std::map<ElementKind, double> elements_;
    std::map<std::tuple<std::size_t, std::size_t, double, double, double>, double> clusters_;
};

struct SweepOptions
{
    /// Worker threads; 0 means hardware concurrency. Row order never depends on it.
    std::size_t jobs = 1;
};

/// Evaluates arbitrary configurations in order.
SweepResult run_configs(const IntensityTable& t, std::string experiment, const std::vector<SystemConfig>& configs,
                        const SweepOptions& options = {});

/// The 36 (N_C, N_D, N_R, N_H) rows: four blocks, one per varied count, each
/// with the other counts at 1, 2, 3 and the varied count at 1, 2, 3.
/// Clusters use t.(M, K).
std::vector<SystemConfig> table3_configs(const IntensityTable& t);
SweepResult run_table3(const IntensityTable& t, const SweepOptions& options = {});

/// (M, K) pairs used by default for the cluster sweep: M = 10, K = 10..5.
std::vector<ClusterSetting> default_cluster_grid();

/// N_C = N_D = N_R = N_H = 2. For each pair three rows: applied to both
/// clusters, to the 5GC only and to the MANO only (the other at t.(M, K)).
std::vector<SystemConfig> cluster_sweep_configs(const IntensityTable& t, const std::vector<ClusterSetting>& grid);
SweepResult run_cluster_sweep(const IntensityTable& t, const std::vector<ClusterSetting>& grid,
                              const SweepOptions& options = {});

/// No-Redun, RAN, MEH, 5GC-and-MANO, 5GC-or-MANO, 5G, MEC, FULL.
/// "5GC-or-MANO" makes the 5GC redundant, "5G" is RAN + 5GC, "MEC" is
/// N_H = 2 + MANO; a redundant cluster is (10, 9), otherwise (10, 10).
std::vector<SystemConfig> redundancy_configs();
SweepResult run_redundancy_configs(const IntensityTable& t, const SweepOptions& options = {});

/// {0.01, 0.1, 1, 10, 100}.
std::vector<double> default_alpha_grid();

/// Three curves (α_H, α_O, α_S varied one at a time, the others at 1) on the
/// fully redundant system. Throws PreconditionError on a value <= 0.
std::vector<SystemConfig> alpha_sweep_configs(AlphaTarget target, const std::vector<double>& values);
SweepResult run_alpha_sweep(const IntensityTable& t, AlphaTarget target, const std::vector<double>& values,
                            const SweepOptions& options = {});

} // namespace edgeavail

#endif // EDGEAVAIL_EXPERIMENTS_HPP
