#include "edgeavail/fault_tree.hpp"

#include "edgeavail/error.hpp"
#include "edgeavail/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace edgeavail {

FtNode FtNode::basic(std::string name, double unavailability)
{
    FtNode n;
    n.kind_ = Kind::basic;
    n.name_ = std::move(name);
    n.unavailability_ = unavailability;
    return n;
}

FtNode FtNode::all_of(std::vector<FtNode> children)
{
    FtNode n;
    n.kind_ = Kind::all_fail;
    n.children_ = std::move(children);
    return n;
}

FtNode FtNode::any_of(std::vector<FtNode> children)
{
    FtNode n;
    n.kind_ = Kind::any_fail;
    n.children_ = std::move(children);
    return n;
}

FtNode FtNode::k_of_n(std::size_t k, std::vector<FtNode> children)
{
    FtNode n;
    n.kind_ = Kind::k_of_n;
    n.k_ = k;
    n.children_ = std::move(children);
    return n;
}

FtNode FtNode::redundant(const FtNode& node, std::size_t count)
{
    return all_of(std::vector<FtNode>(count, node));
}

double eval_ft(const FtNode& node)
{
    using K = FtNode::Kind;
    if (node.kind() == K::basic)
    {
        double u = node.unavailability();
        if (!(u >= 0.0 && u <= 1.0))
        {
            throw PreconditionError("basic event '" + node.name() + "' has unavailability outside [0,1]");
        }
        return u;
    }
    const auto& children = node.children();
    if (children.empty())
    {
        throw PreconditionError("fault-tree gate without children");
    }
    switch (node.kind())
    {
    case K::all_fail: {
        double p = 1.0;
        for (const auto& c : children)
        {
            p *= eval_ft(c);
        }
        return p;
    }
    case K::any_fail: {
        double up = 1.0;
        for (const auto& c : children)
        {
            up *= 1.0 - eval_ft(c);
        }
        return 1.0 - up;
    }
    case K::k_of_n: {
        const std::size_t n = children.size();
        if (node.k() < 1 || node.k() > n)
        {
            throw PreconditionError("k-of-n gate needs 1 <= k <= n, got k=" + std::to_string(node.k())
                                    + " n=" + std::to_string(n));
        }
        // working[j] = P(exactly j children work), built one child at a time.
        std::vector<double> working(n + 1, 0.0);
        working[0] = 1.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            double u = eval_ft(children[i]);
            for (std::size_t j = i + 1; j > 0; --j)
            {
                working[j] = working[j] * u + working[j - 1] * (1.0 - u);
            }
            working[0] *= u;
        }
        double fail = 0.0;
        for (std::size_t j = 0; j < node.k(); ++j)
        {
            fail += working[j];
        }
        return std::clamp(fail, 0.0, 1.0);
    }
    case K::basic:
        break;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------

namespace {

class FtParser
{
public:
    explicit FtParser(std::string_view text)
    : text_(text)
    {
    }

    FtNode run()
    {
        FtNode n = node();
        skip();
        if (pos_ < text_.size())
        {
            fail("end of input");
        }
        return n;
    }

private:
    void skip()
    {
        while (pos_ < text_.size())
        {
            char c = text_[pos_];
            if (c == '#')
            {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                {
                    bump();
                }
            }
            else if (std::isspace(static_cast<unsigned char>(c)))
            {
                bump();
            }
            else
            {
                break;
            }
        }
    }

    void bump()
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

    [[noreturn]] void fail(const std::string& expected) const
    {
        std::string got = pos_ < text_.size() ? std::string("'") + text_[pos_] + "'" : "end of input";
        throw SyntaxError(line_, column_, "unexpected " + got + "; expected " + expected);
    }

    void expect(char c)
    {
        skip();
        if (pos_ >= text_.size() || text_[pos_] != c)
        {
            fail(std::string("'") + c + "'");
        }
        bump();
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c)
        {
            bump();
            return true;
        }
        return false;
    }

    std::string word()
    {
        skip();
        std::size_t start = pos_;
        while (pos_ < text_.size()
               && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '-'
                   || text_[pos_] == '.'))
        {
            bump();
        }
        if (start == pos_)
        {
            fail("name");
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    double number()
    {
        skip();
        std::size_t start = pos_;
        while (pos_ < text_.size()
               && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' || text_[pos_] == 'e'
                   || text_[pos_] == 'E' || text_[pos_] == '-' || text_[pos_] == '+'))
        {
            bump();
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (start == pos_ || ec != std::errc() || ptr != text_.data() + pos_)
        {
            pos_ = start;
            fail("number");
        }
        return v;
    }

    std::vector<FtNode> children()
    {
        std::vector<FtNode> out;
        out.push_back(node());
        while (accept(','))
        {
            out.push_back(node());
        }
        expect(')');
        return out;
    }

    FtNode node()
    {
        skip();
        std::size_t line = line_;
        std::size_t column = column_;
        std::string kw = word();
        expect('(');
        if (kw == "basic")
        {
            std::string name = word();
            expect(',');
            double u = number();
            expect(')');
            if (!(u >= 0.0 && u <= 1.0))
            {
                throw SyntaxError(line, column, "unavailability of '" + name + "' outside [0,1]");
            }
            return FtNode::basic(name, u);
        }
        if (kw == "and")
        {
            return FtNode::all_of(children());
        }
        if (kw == "or")
        {
            return FtNode::any_of(children());
        }
        if (kw == "kofn")
        {
            double k = number();
            if (k < 1 || std::floor(k) != k)
            {
                throw SyntaxError(line, column, "kofn needs a positive integer k");
            }
            expect(',');
            auto kids = children();
            if (static_cast<std::size_t>(k) > kids.size())
            {
                throw SyntaxError(line, column, "kofn k exceeds number of children");
            }
            return FtNode::k_of_n(static_cast<std::size_t>(k), std::move(kids));
        }
        throw SyntaxError(line, column, "unknown node '" + kw + "'; expected basic, and, or, kofn");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

} // namespace

FtNode parse_ft(std::string_view text)
{
    return FtParser(text).run();
}

std::string to_string(const FtNode& node)
{
    using K = FtNode::Kind;
    if (node.kind() == K::basic)
    {
        return "basic(" + node.name() + ", " + format_real(node.unavailability()) + ")";
    }
    std::string out;
    switch (node.kind())
    {
    case K::all_fail: out = "and("; break;
    case K::any_fail: out = "or("; break;
    case K::k_of_n: out = "kofn(" + std::to_string(node.k()) + ", "; break;
    case K::basic: break;
    }
    for (std::size_t i = 0; i < node.children().size(); ++i)
    {
        if (i > 0)
        {
            out += ", ";
        }
        out += to_string(node.children()[i]);
    }
    return out + ")";
}

// ---------------------------------------------------------------------------

void RedundancyConfig::validate() const
{
    if (n_cu < 1 || n_du < 1 || n_ru < 1 || n_meh < 1)
    {
        throw PreconditionError("redundancy counts N_C, N_D, N_R, N_H must all be >= 1");
    }
}

double u_ran(double u_ru, double u_du, double u_cu, const RedundancyConfig& cfg)
{
    cfg.validate();
    const double du_branch = 1.0 - (1.0 - std::pow(u_ru, static_cast<double>(cfg.n_ru))) * (1.0 - u_du);
    const double cu_branch = 1.0 - (1.0 - std::pow(du_branch, static_cast<double>(cfg.n_du))) * (1.0 - u_cu);
    return std::pow(cu_branch, static_cast<double>(cfg.n_cu));
}

double u_sys(double u_ran, double u_5gc, double u_mano, double u_meh, std::size_t n_meh)
{
    if (n_meh < 1)
    {
        throw PreconditionError("N_H must be >= 1");
    }
    return 1.0
           - (1.0 - u_ran) * (1.0 - u_5gc) * (1.0 - u_mano)
                 * (1.0 - std::pow(u_meh, static_cast<double>(n_meh)));
}

FtNode build_5gmec_ft(const RedundancyConfig& cfg, const ElementUnavailabilities& us)
{
    cfg.validate();
    auto get = [&](const char* name) {
        auto it = us.find(name);
        if (it == us.end())
        {
            throw PreconditionError(std::string("missing unavailability for element ") + name);
        }
        return FtNode::basic(name, it->second);
    };
    FtNode ru = FtNode::redundant(get("RU"), cfg.n_ru);
    FtNode du = FtNode::redundant(FtNode::any_of({get("DU"), ru}), cfg.n_du);
    FtNode ran = FtNode::redundant(FtNode::any_of({get("CU"), du}), cfg.n_cu);
    FtNode meh = FtNode::redundant(get("MEH"), cfg.n_meh);
    return FtNode::any_of({get("5GC"), get("MANO"), meh, ran});
}

} // namespace edgeavail
