#ifndef EDGEAVAIL_EXPR_HPP
#define EDGEAVAIL_EXPR_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace edgeavail {

/// Immutable expression tree over parameters and place markings.
///
/// One type serves rates, predicates and marking effects: booleans are the
/// reals 0 and 1, and any nonzero value is true. Nodes are shared, so copies
/// are cheap and a parsed expression can be handed to many workers.
class Expr
{
public:
    enum class Kind
    {
        literal,
        parameter,   // bare identifier
        place,       // #Name, the token count of a place
        negate,
        logical_not,
        add,
        subtract,
        multiply,
        divide,
        less,
        less_equal,
        greater,
        greater_equal,
        equal,
        not_equal,
        logical_and,
        logical_or,
        conditional, // if c then a else b
        minimum,
        maximum
    };

    /// The literal 0.
    Expr();

    static Expr literal(double value);
    static Expr parameter(std::string name);
    static Expr place(std::string name);
    /// Negating a literal folds into a negative literal.
    static Expr negate(Expr operand);
    static Expr logical_not(Expr operand);
    static Expr binary(Kind kind, Expr lhs, Expr rhs);
    static Expr conditional(Expr condition, Expr then_value, Expr else_value);
    static Expr minimum(std::vector<Expr> operands);
    static Expr maximum(std::vector<Expr> operands);

    Kind kind() const noexcept;
    /// Value of a literal node.
    double value() const noexcept;
    /// Identifier of a parameter or place node.
    const std::string& name() const noexcept;
    std::span<const Expr> operands() const noexcept;

    /// True when the tree holds no place references.
    bool is_marking_independent() const;

    void collect_parameters(std::set<std::string>& out) const;
    void collect_places(std::set<std::string>& out) const;

    friend bool operator==(const Expr& lhs, const Expr& rhs);

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node);

    std::shared_ptr<const Node> node_;
};

Expr operator+(Expr lhs, Expr rhs);
Expr operator-(Expr lhs, Expr rhs);
Expr operator*(Expr lhs, Expr rhs);
Expr operator/(Expr lhs, Expr rhs);

/// Name lookup used during evaluation.
class Scope
{
public:
    virtual ~Scope() = default;
    virtual std::optional<double> parameter(std::string_view name) const = 0;
    virtual std::optional<double> tokens(std::string_view place) const = 0;
};

/// Scope backed by two plain maps.
class MapScope : public Scope
{
public:
    MapScope() = default;
    MapScope(std::map<std::string, std::int64_t, std::less<>> marking,
             std::map<std::string, double, std::less<>> parameters);

    std::optional<double> parameter(std::string_view name) const override;
    std::optional<double> tokens(std::string_view place) const override;

    std::map<std::string, std::int64_t, std::less<>> marking;
    std::map<std::string, double, std::less<>> parameters;
};

/// Parses an expression.
///
/// Precedence from loosest to tightest: if-then-else, or, and, not,
/// comparisons, additive, multiplicative, unary minus. Throws SyntaxError
/// carrying the 1-based line/column and the expected tokens.
Expr parse_expression(std::string_view text);

/// Evaluates with short-circuit and/or and a lazy conditional.
/// Throws UnknownIdentifier or DivisionByZero; never returns infinity or NaN.
double eval(const Expr& e, const Scope& scope);

/// Prints with the minimal parentheses needed to parse back to the same tree.
std::string to_string(const Expr& e);

/// Shortest decimal text that reads back as exactly the same double.
std::string format_real(double value);

} // namespace edgeavail

#endif // EDGEAVAIL_EXPR_HPP
