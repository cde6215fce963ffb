#include "edgeavail/expr.hpp"

#include "edgeavail/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <utility>

namespace edgeavail {

struct Expr::Node
{
    Kind kind = Kind::literal;
    double value = 0.0;
    std::string name;
    std::vector<Expr> operands;
};

Expr::Expr()
: node_(std::make_shared<Node>())
{
}

Expr::Expr(std::shared_ptr<const Node> node)
: node_(std::move(node))
{
}

Expr Expr::literal(double value)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::literal;
    n->value = value;
    return Expr(std::move(n));
}

Expr Expr::parameter(std::string name)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::parameter;
    n->name = std::move(name);
    return Expr(std::move(n));
}

Expr Expr::place(std::string name)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::place;
    n->name = std::move(name);
    return Expr(std::move(n));
}

Expr Expr::negate(Expr operand)
{
    if (operand.kind() == Kind::literal)
    {
        return literal(-operand.value());
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::negate;
    n->operands.push_back(std::move(operand));
    return Expr(std::move(n));
}

Expr Expr::logical_not(Expr operand)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::logical_not;
    n->operands.push_back(std::move(operand));
    return Expr(std::move(n));
}

Expr Expr::binary(Kind kind, Expr lhs, Expr rhs)
{
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->operands.push_back(std::move(lhs));
    n->operands.push_back(std::move(rhs));
    return Expr(std::move(n));
}

Expr Expr::conditional(Expr condition, Expr then_value, Expr else_value)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::conditional;
    n->operands = {std::move(condition), std::move(then_value), std::move(else_value)};
    return Expr(std::move(n));
}

Expr Expr::minimum(std::vector<Expr> operands)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::minimum;
    n->operands = std::move(operands);
    return Expr(std::move(n));
}

Expr Expr::maximum(std::vector<Expr> operands)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::maximum;
    n->operands = std::move(operands);
    return Expr(std::move(n));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }
double Expr::value() const noexcept { return node_->value; }
const std::string& Expr::name() const noexcept { return node_->name; }
std::span<const Expr> Expr::operands() const noexcept { return node_->operands; }

bool Expr::is_marking_independent() const
{
    std::set<std::string> places;
    collect_places(places);
    return places.empty();
}

void Expr::collect_parameters(std::set<std::string>& out) const
{
    if (kind() == Kind::parameter)
    {
        out.insert(name());
    }
    for (const auto& op : operands())
    {
        op.collect_parameters(out);
    }
}

void Expr::collect_places(std::set<std::string>& out) const
{
    if (kind() == Kind::place)
    {
        out.insert(name());
    }
    for (const auto& op : operands())
    {
        op.collect_places(out);
    }
}

bool operator==(const Expr& lhs, const Expr& rhs)
{
    if (lhs.node_ == rhs.node_)
    {
        return true;
    }
    if (lhs.kind() != rhs.kind())
    {
        return false;
    }
    switch (lhs.kind())
    {
    case Expr::Kind::literal:
        return lhs.value() == rhs.value();
    case Expr::Kind::parameter:
    case Expr::Kind::place:
        return lhs.name() == rhs.name();
    default:
        return std::ranges::equal(lhs.operands(), rhs.operands());
    }
}

Expr operator+(Expr lhs, Expr rhs) { return Expr::binary(Expr::Kind::add, std::move(lhs), std::move(rhs)); }
Expr operator-(Expr lhs, Expr rhs) { return Expr::binary(Expr::Kind::subtract, std::move(lhs), std::move(rhs)); }
Expr operator*(Expr lhs, Expr rhs) { return Expr::binary(Expr::Kind::multiply, std::move(lhs), std::move(rhs)); }
Expr operator/(Expr lhs, Expr rhs) { return Expr::binary(Expr::Kind::divide, std::move(lhs), std::move(rhs)); }

MapScope::MapScope(std::map<std::string, std::int64_t, std::less<>> marking,
                   std::map<std::string, double, std::less<>> parameters)
: marking(std::move(marking)),
  parameters(std::move(parameters))
{
}

std::optional<double> MapScope::parameter(std::string_view name) const
{
    auto it = parameters.find(name);
    if (it == parameters.end())
    {
        return std::nullopt;
    }
    return it->second;
}

std::optional<double> MapScope::tokens(std::string_view place) const
{
    auto it = marking.find(place);
    if (it == marking.end())
    {
        return std::nullopt;
    }
    return static_cast<double>(it->second);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok
{
    end,
    number,
    identifier,
    place_ref,
    lparen,
    rparen,
    comma,
    plus,
    minus,
    star,
    slash,
    less,
    less_equal,
    greater,
    greater_equal,
    equal,
    not_equal,
    kw_if,
    kw_then,
    kw_else,
    kw_and,
    kw_or,
    kw_not,
    kw_min,
    kw_max,
    kw_true,
    kw_false
};

struct Token
{
    Tok type = Tok::end;
    std::string text;
    double number = 0.0;
    std::size_t line = 1;
    std::size_t column = 1;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer
{
public:
    explicit Lexer(std::string_view text)
    : text_(text)
    {
    }

    std::vector<Token> run()
    {
        std::vector<Token> out;
        for (;;)
        {
            skip_space();
            Token t;
            t.line = line_;
            t.column = column_;
            if (pos_ >= text_.size())
            {
                t.type = Tok::end;
                out.push_back(std::move(t));
                return out;
            }
            char c = text_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))
                || (c == '.' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))))
            {
                lex_number(t);
            }
            else if (is_ident_start(c))
            {
                std::size_t start = pos_;
                while (pos_ < text_.size() && is_ident_char(text_[pos_]))
                {
                    advance();
                }
                t.text = std::string(text_.substr(start, pos_ - start));
                t.type = keyword(t.text);
            }
            else if (c == '#')
            {
                advance();
                if (pos_ >= text_.size() || !is_ident_start(text_[pos_]))
                {
                    throw SyntaxError(line_, column_, "expected place name after '#'");
                }
                std::size_t start = pos_;
                while (pos_ < text_.size() && is_ident_char(text_[pos_]))
                {
                    advance();
                }
                t.type = Tok::place_ref;
                t.text = std::string(text_.substr(start, pos_ - start));
            }
            else
            {
                lex_symbol(t);
            }
            out.push_back(std::move(t));
        }
    }

private:
    static Tok keyword(const std::string& s)
    {
        if (s == "if") return Tok::kw_if;
        if (s == "then") return Tok::kw_then;
        if (s == "else") return Tok::kw_else;
        if (s == "and") return Tok::kw_and;
        if (s == "or") return Tok::kw_or;
        if (s == "not") return Tok::kw_not;
        if (s == "min") return Tok::kw_min;
        if (s == "max") return Tok::kw_max;
        if (s == "true") return Tok::kw_true;
        if (s == "false") return Tok::kw_false;
        return Tok::identifier;
    }

    void advance()
    {
        if (text_[pos_] == '\n')
        {
            ++line_;
            column_ = 1;
        }
        else
        {
            ++column_;
        }
        ++pos_;
    }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
        {
            advance();
        }
    }

    void lex_number(Token& t)
    {
        std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
        {
            advance();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E'))
        {
            std::size_t save = pos_;
            std::size_t save_col = column_;
            advance();
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
            {
                advance();
            }
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                {
                    advance();
                }
            }
            else
            {
                pos_ = save;
                column_ = save_col;
            }
        }
        t.text = std::string(text_.substr(start, pos_ - start));
        const char* first = t.text.data();
        const char* last = first + t.text.size();
        auto [ptr, ec] = std::from_chars(first, last, t.number);
        if (ec != std::errc() || ptr != last)
        {
            throw SyntaxError(t.line, t.column, "malformed number '" + t.text + "'");
        }
        t.type = Tok::number;
    }

    void lex_symbol(Token& t)
    {
        char c = text_[pos_];
        char next = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';
        auto one = [&](Tok type) {
            t.type = type;
            t.text = std::string(1, c);
            advance();
        };
        auto two = [&](Tok type) {
            t.type = type;
            t.text = std::string{c, next};
            advance();
            advance();
        };
        switch (c)
        {
        case '(': one(Tok::lparen); return;
        case ')': one(Tok::rparen); return;
        case ',': one(Tok::comma); return;
        case '+': one(Tok::plus); return;
        case '-': one(Tok::minus); return;
        case '*': one(Tok::star); return;
        case '/': one(Tok::slash); return;
        case '<':
            if (next == '=') two(Tok::less_equal);
            else if (next == '>') two(Tok::not_equal);
            else one(Tok::less);
            return;
        case '>':
            if (next == '=') two(Tok::greater_equal);
            else one(Tok::greater);
            return;
        case '=':
            if (next == '=') two(Tok::equal);
            else one(Tok::equal);
            return;
        case '!':
            if (next == '=')
            {
                two(Tok::not_equal);
                return;
            }
            break;
        default:
            break;
        }
        throw SyntaxError(line_, column_, std::string("unexpected character '") + c + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

class Parser
{
public:
    explicit Parser(std::vector<Token> tokens)
    : tokens_(std::move(tokens))
    {
    }

    Expr parse_all()
    {
        Expr e = parse_expr();
        if (peek().type != Tok::end)
        {
            fail({"operator", "end of expression"});
        }
        return e;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }

    bool accept(Tok type)
    {
        if (peek().type == type)
        {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(Tok type, const char* what)
    {
        if (!accept(type))
        {
            fail({what});
        }
    }

    [[noreturn]] void fail(std::initializer_list<const char*> expected) const
    {
        const Token& t = peek();
        std::string msg = "unexpected ";
        msg += t.type == Tok::end ? std::string("end of input") : "'" + t.text + "'";
        msg += "; expected ";
        bool first = true;
        for (const char* e : expected)
        {
            if (!first)
            {
                msg += " or ";
            }
            msg += e;
            first = false;
        }
        throw SyntaxError(t.line, t.column, msg);
    }

    Expr parse_expr()
    {
        if (accept(Tok::kw_if))
        {
            Expr c = parse_expr();
            expect(Tok::kw_then, "'then'");
            Expr a = parse_expr();
            expect(Tok::kw_else, "'else'");
            Expr b = parse_expr();
            return Expr::conditional(std::move(c), std::move(a), std::move(b));
        }
        return parse_or();
    }

    Expr parse_or()
    {
        Expr lhs = parse_and();
        while (accept(Tok::kw_or))
        {
            lhs = Expr::binary(Expr::Kind::logical_or, std::move(lhs), parse_and());
        }
        return lhs;
    }

    Expr parse_and()
    {
        Expr lhs = parse_not();
        while (accept(Tok::kw_and))
        {
            lhs = Expr::binary(Expr::Kind::logical_and, std::move(lhs), parse_not());
        }
        return lhs;
    }

    Expr parse_not()
    {
        if (accept(Tok::kw_not))
        {
            return Expr::logical_not(parse_not());
        }
        return parse_comparison();
    }

    Expr parse_comparison()
    {
        Expr lhs = parse_additive();
        for (;;)
        {
            Expr::Kind kind;
            switch (peek().type)
            {
            case Tok::less: kind = Expr::Kind::less; break;
            case Tok::less_equal: kind = Expr::Kind::less_equal; break;
            case Tok::greater: kind = Expr::Kind::greater; break;
            case Tok::greater_equal: kind = Expr::Kind::greater_equal; break;
            case Tok::equal: kind = Expr::Kind::equal; break;
            case Tok::not_equal: kind = Expr::Kind::not_equal; break;
            default: return lhs;
            }
            ++pos_;
            lhs = Expr::binary(kind, std::move(lhs), parse_additive());
        }
    }

    Expr parse_additive()
    {
        Expr lhs = parse_multiplicative();
        for (;;)
        {
            if (accept(Tok::plus))
            {
                lhs = Expr::binary(Expr::Kind::add, std::move(lhs), parse_multiplicative());
            }
            else if (accept(Tok::minus))
            {
                lhs = Expr::binary(Expr::Kind::subtract, std::move(lhs), parse_multiplicative());
            }
            else
            {
                return lhs;
            }
        }
    }

    Expr parse_multiplicative()
    {
        Expr lhs = parse_unary();
        for (;;)
        {
            if (accept(Tok::star))
            {
                lhs = Expr::binary(Expr::Kind::multiply, std::move(lhs), parse_unary());
            }
            else if (accept(Tok::slash))
            {
                lhs = Expr::binary(Expr::Kind::divide, std::move(lhs), parse_unary());
            }
            else
            {
                return lhs;
            }
        }
    }

    Expr parse_unary()
    {
        if (accept(Tok::minus))
        {
            return Expr::negate(parse_unary());
        }
        return parse_primary();
    }

    Expr parse_primary()
    {
        const Token& t = peek();
        switch (t.type)
        {
        case Tok::number:
            ++pos_;
            return Expr::literal(t.number);
        case Tok::kw_true:
            ++pos_;
            return Expr::literal(1.0);
        case Tok::kw_false:
            ++pos_;
            return Expr::literal(0.0);
        case Tok::identifier:
            ++pos_;
            return Expr::parameter(t.text);
        case Tok::place_ref:
            ++pos_;
            return Expr::place(t.text);
        case Tok::lparen: {
            ++pos_;
            Expr e = parse_expr();
            expect(Tok::rparen, "')'");
            return e;
        }
        case Tok::kw_min:
        case Tok::kw_max: {
            bool is_min = t.type == Tok::kw_min;
            ++pos_;
            expect(Tok::lparen, "'('");
            std::vector<Expr> args;
            args.push_back(parse_expr());
            while (accept(Tok::comma))
            {
                args.push_back(parse_expr());
            }
            expect(Tok::rparen, "',' or ')'");
            return is_min ? Expr::minimum(std::move(args)) : Expr::maximum(std::move(args));
        }
        default:
            fail({"number", "identifier", "#place", "'('", "'-'", "'not'", "'if'", "'min'", "'max'"});
        }
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

} // namespace

Expr parse_expression(std::string_view text)
{
    Parser parser(Lexer(text).run());
    return parser.parse_all();
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double checked(double v, const char* what)
{
    if (!std::isfinite(v))
    {
        throw EvaluationError(std::string("non-finite result in ") + what);
    }
    return v;
}

double truth(bool b) { return b ? 1.0 : 0.0; }

} // namespace

double eval(const Expr& e, const Scope& scope)
{
    using K = Expr::Kind;
    auto ops = e.operands();
    switch (e.kind())
    {
    case K::literal:
        return e.value();
    case K::parameter: {
        auto v = scope.parameter(e.name());
        if (!v)
        {
            throw UnknownIdentifier("unknown parameter '" + e.name() + "'");
        }
        return *v;
    }
    case K::place: {
        auto v = scope.tokens(e.name());
        if (!v)
        {
            throw UnknownIdentifier("unknown place '#" + e.name() + "'");
        }
        return *v;
    }
    case K::negate:
        return -eval(ops[0], scope);
    case K::logical_not:
        return truth(eval(ops[0], scope) == 0.0);
    case K::add:
        return checked(eval(ops[0], scope) + eval(ops[1], scope), "addition");
    case K::subtract:
        return checked(eval(ops[0], scope) - eval(ops[1], scope), "subtraction");
    case K::multiply:
        return checked(eval(ops[0], scope) * eval(ops[1], scope), "multiplication");
    case K::divide: {
        double num = eval(ops[0], scope);
        double den = eval(ops[1], scope);
        if (den == 0.0)
        {
            throw DivisionByZero("division by zero in '" + to_string(e) + "'");
        }
        return checked(num / den, "division");
    }
    case K::less: return truth(eval(ops[0], scope) < eval(ops[1], scope));
    case K::less_equal: return truth(eval(ops[0], scope) <= eval(ops[1], scope));
    case K::greater: return truth(eval(ops[0], scope) > eval(ops[1], scope));
    case K::greater_equal: return truth(eval(ops[0], scope) >= eval(ops[1], scope));
    case K::equal: return truth(eval(ops[0], scope) == eval(ops[1], scope));
    case K::not_equal: return truth(eval(ops[0], scope) != eval(ops[1], scope));
    case K::logical_and:
        return truth(eval(ops[0], scope) != 0.0 && eval(ops[1], scope) != 0.0);
    case K::logical_or:
        return truth(eval(ops[0], scope) != 0.0 || eval(ops[1], scope) != 0.0);
    case K::conditional:
        return eval(ops[0], scope) != 0.0 ? eval(ops[1], scope) : eval(ops[2], scope);
    case K::minimum:
    case K::maximum: {
        double best = eval(ops[0], scope);
        for (std::size_t i = 1; i < ops.size(); ++i)
        {
            double v = eval(ops[i], scope);
            best = e.kind() == K::minimum ? std::min(best, v) : std::max(best, v);
        }
        return best;
    }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Printing

std::string format_real(double value)
{
    // Shortest representation that round-trips exactly.
    char buf[32];
    auto result = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, result.ptr);
}

namespace {

// Binding strength, loosest first; matches the parser's grammar levels.
enum Level : int
{
    lvl_if = 0,
    lvl_or,
    lvl_and,
    lvl_not,
    lvl_cmp,
    lvl_add,
    lvl_mul,
    lvl_unary,
    lvl_atom
};

int level_of(const Expr& e)
{
    using K = Expr::Kind;
    switch (e.kind())
    {
    case K::conditional: return lvl_if;
    case K::logical_or: return lvl_or;
    case K::logical_and: return lvl_and;
    case K::logical_not: return lvl_not;
    case K::less:
    case K::less_equal:
    case K::greater:
    case K::greater_equal:
    case K::equal:
    case K::not_equal: return lvl_cmp;
    case K::add:
    case K::subtract: return lvl_add;
    case K::multiply:
    case K::divide: return lvl_mul;
    case K::negate: return lvl_unary;
    case K::literal: return e.value() < 0.0 || std::signbit(e.value()) ? lvl_unary : lvl_atom;
    default: return lvl_atom;
    }
}

const char* symbol_of(Expr::Kind kind)
{
    using K = Expr::Kind;
    switch (kind)
    {
    case K::add: return " + ";
    case K::subtract: return " - ";
    case K::multiply: return " * ";
    case K::divide: return " / ";
    case K::less: return " < ";
    case K::less_equal: return " <= ";
    case K::greater: return " > ";
    case K::greater_equal: return " >= ";
    case K::equal: return " = ";
    case K::not_equal: return " != ";
    case K::logical_and: return " and ";
    case K::logical_or: return " or ";
    default: return " ? ";
    }
}

void print(const Expr& e, int required, std::string& out);

void print_child(const Expr& e, int required, std::string& out)
{
    print(e, required, out);
}

void print(const Expr& e, int required, std::string& out)
{
    using K = Expr::Kind;
    int own = level_of(e);
    bool parens = own < required;
    if (parens)
    {
        out += '(';
    }
    auto ops = e.operands();
    switch (e.kind())
    {
    case K::literal:
        out += format_real(e.value());
        break;
    case K::parameter:
        out += e.name();
        break;
    case K::place:
        out += '#';
        out += e.name();
        break;
    case K::negate:
        out += '-';
        print_child(ops[0], lvl_unary, out);
        break;
    case K::logical_not:
        out += "not ";
        print_child(ops[0], lvl_not, out);
        break;
    case K::conditional:
        out += "if ";
        print_child(ops[0], lvl_if, out);
        out += " then ";
        print_child(ops[1], lvl_if, out);
        out += " else ";
        print_child(ops[2], lvl_if, out);
        break;
    case K::minimum:
    case K::maximum:
        out += e.kind() == K::minimum ? "min(" : "max(";
        for (std::size_t i = 0; i < ops.size(); ++i)
        {
            if (i > 0)
            {
                out += ", ";
            }
            print_child(ops[i], lvl_if, out);
        }
        out += ')';
        break;
    default:
        // Left-associative binary operators.
        print_child(ops[0], own, out);
        out += symbol_of(e.kind());
        print_child(ops[1], own + 1, out);
        break;
    }
    if (parens)
    {
        out += ')';
    }
}

} // namespace

std::string to_string(const Expr& e)
{
    std::string out;
    print(e, lvl_if, out);
    return out;
}

} // namespace edgeavail
