#ifndef EDGEAVAIL_FAULT_TREE_HPP
#define EDGEAVAIL_FAULT_TREE_HPP

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace edgeavail {

/// Fault-tree node. Events are assumed statistically independent, which is
/// the decomposition assumption behind the product-form system formulas.
class FtNode
{
public:
    enum class Kind
    {
        basic,
        all_fail, // AND gate: fails only if every child fails
        any_fail, // OR gate: fails if any child fails
        k_of_n    // works while at least k children work
    };

    static FtNode basic(std::string name, double unavailability);
    static FtNode all_of(std::vector<FtNode> children);
    static FtNode any_of(std::vector<FtNode> children);
    static FtNode k_of_n(std::size_t k, std::vector<FtNode> children);
    /// `count` copies of the same node under an AND gate.
    static FtNode redundant(const FtNode& node, std::size_t count);

    Kind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    double unavailability() const noexcept { return unavailability_; }
    std::size_t k() const noexcept { return k_; }
    const std::vector<FtNode>& children() const noexcept { return children_; }

private:
    FtNode() = default;

    Kind kind_ = Kind::basic;
    std::string name_;
    double unavailability_ = 0.0;
    std::size_t k_ = 0;
    std::vector<FtNode> children_;
};

/// Bottom-up probability of the top event. Throws PreconditionError on an
/// empty gate, k outside [1, n], or a basic event outside [0, 1].
double eval_ft(const FtNode& node);

/// Text form: `basic(name, u)`, `and(...)`, `or(...)`, `kofn(k, ...)`,
/// with `#` line comments. Throws SyntaxError.
FtNode parse_ft(std::string_view text);
std::string to_string(const FtNode& node);

struct RedundancyConfig
{
    std::size_t n_cu = 1;  // N_C
    std::size_t n_du = 1;  // N_D
    std::size_t n_ru = 1;  // N_R
    std::size_t n_meh = 1; // N_H

    /// Throws PreconditionError unless every count is >= 1.
    void validate() const;

    friend bool operator==(const RedundancyConfig&, const RedundancyConfig&) = default;
};

/// RAN unavailability with N_C gNodeBs, N_D DUs per CU and N_R RUs per DU:
/// [1 - (1 - (1 - (1 - U_RU^N_R)(1 - U_DU))^N_D)(1 - U_CU)]^N_C.
double u_ran(double u_ru, double u_du, double u_cu, const RedundancyConfig& cfg);

/// System unavailability: 1 - (1 - U_RAN)(1 - U_5GC)(1 - U_MANO)(1 - U_MEH^N_H).
double u_sys(double u_ran, double u_5gc, double u_mano, double u_meh, std::size_t n_meh);

/// Element unavailabilities keyed "RU", "DU", "CU", "MEH", "5GC", "MANO".
using ElementUnavailabilities = std::map<std::string, double, std::less<>>;

/// Explicit tree whose evaluation equals u_sys(u_ran(...)):
/// OR(5GC, MANO, AND^N_H(MEH), AND^N_C(OR(CU, AND^N_D(OR(DU, AND^N_R(RU)))))).
/// Throws PreconditionError when an element is missing.
FtNode build_5gmec_ft(const RedundancyConfig& cfg, const ElementUnavailabilities& us);

} // namespace edgeavail

#endif // EDGEAVAIL_FAULT_TREE_HPP
