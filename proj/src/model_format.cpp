#include "edgeavail/model_format.hpp"

#include "edgeavail/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace edgeavail {

namespace {

enum class DTok
{
    end,
    identifier,
    number,
    string,
    lbrace,
    rbrace,
    equals,
    plus_equals,
    minus_equals,
    semicolon
};

struct DToken
{
    DTok type = DTok::end;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

const char* describe(DTok t)
{
    switch (t)
    {
    case DTok::end: return "end of document";
    case DTok::identifier: return "identifier";
    case DTok::number: return "number";
    case DTok::string: return "quoted string";
    case DTok::lbrace: return "'{'";
    case DTok::rbrace: return "'}'";
    case DTok::equals: return "'='";
    case DTok::plus_equals: return "'+='";
    case DTok::minus_equals: return "'-='";
    case DTok::semicolon: return "';'";
    }
    return "?";
}

class DocLexer
{
public:
    explicit DocLexer(std::string_view text)
    : text_(text)
    {
    }

    std::vector<DToken> run()
    {
        std::vector<DToken> out;
        for (;;)
        {
            skip();
            DToken t;
            t.line = line_;
            t.column = column_;
            if (pos_ >= text_.size())
            {
                out.push_back(std::move(t));
                return out;
            }
            char c = text_[pos_];
            char next = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            {
                std::size_t start = pos_;
                while (pos_ < text_.size()
                       && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'
                           || (text_[pos_] == '-' && pos_ + 1 < text_.size()
                               && std::isalpha(static_cast<unsigned char>(text_[pos_ + 1])))))
                {
                    advance();
                }
                t.type = DTok::identifier;
                t.text = std::string(text_.substr(start, pos_ - start));
            }
            else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.'
                     || ((c == '-' || c == '+') && (std::isdigit(static_cast<unsigned char>(next)) || next == '.')))
            {
                std::size_t start = pos_;
                advance();
                while (pos_ < text_.size())
                {
                    char d = text_[pos_];
                    char prev = text_[pos_ - 1];
                    if (std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == 'e' || d == 'E'
                        || ((d == '-' || d == '+') && (prev == 'e' || prev == 'E')))
                    {
                        advance();
                    }
                    else
                    {
                        break;
                    }
                }
                t.type = DTok::number;
                t.text = std::string(text_.substr(start, pos_ - start));
            }
            else if (c == '"')
            {
                t.type = DTok::string;
                advance();
                for (;;)
                {
                    if (pos_ >= text_.size() || text_[pos_] == '\n')
                    {
                        throw SyntaxError(t.line, t.column, "unterminated string");
                    }
                    char d = text_[pos_];
                    if (d == '"')
                    {
                        advance();
                        break;
                    }
                    if (d == '\\')
                    {
                        advance();
                        if (pos_ >= text_.size())
                        {
                            throw SyntaxError(line_, column_, "unterminated escape");
                        }
                        char e = text_[pos_];
                        t.text += e == 'n' ? '\n' : e;
                        advance();
                        continue;
                    }
                    t.text += d;
                    advance();
                }
            }
            else
            {
                switch (c)
                {
                case '{': t.type = DTok::lbrace; break;
                case '}': t.type = DTok::rbrace; break;
                case ';': t.type = DTok::semicolon; break;
                case '=': t.type = DTok::equals; break;
                case '+':
                case '-':
                    if (next != '=')
                    {
                        throw SyntaxError(line_, column_, std::string("unexpected '") + c + "'");
                    }
                    t.type = c == '+' ? DTok::plus_equals : DTok::minus_equals;
                    t.text = std::string{c, '='};
                    advance();
                    advance();
                    out.push_back(std::move(t));
                    continue;
                default:
                    throw SyntaxError(line_, column_, std::string("unexpected character '") + c + "'");
                }
                t.text = std::string(1, c);
                advance();
            }
            out.push_back(std::move(t));
        }
    }

private:
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

    void skip()
    {
        while (pos_ < text_.size())
        {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c)))
            {
                advance();
            }
            else if (c == '#')
            {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                {
                    advance();
                }
            }
            else
            {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

class DocParser
{
public:
    explicit DocParser(std::vector<DToken> tokens)
    : tokens_(std::move(tokens))
    {
    }

    SanModel run()
    {
        const DToken& head = expect(DTok::identifier, "'san-format'");
        if (head.text != "san-format")
        {
            throw SyntaxError(head.line, head.column, "document must start with 'san-format 1'");
        }
        const DToken& version = expect(DTok::number, "format version");
        if (version.text != "1")
        {
            throw SemanticError("unsupported san-format version " + version.text);
        }
        while (peek().type != DTok::end)
        {
            if (accept(DTok::semicolon))
            {
                continue;
            }
            const DToken& kw = expect(DTok::identifier, "statement keyword");
            if (kw.text == "param")
            {
                parse_param();
            }
            else if (kw.text == "place")
            {
                parse_place();
            }
            else if (kw.text == "activity")
            {
                parse_activity();
            }
            else if (kw.text == "reward")
            {
                parse_reward();
            }
            else if (kw.text == "description")
            {
                model_.set_description(expect(DTok::string, "quoted description").text);
            }
            else
            {
                throw SyntaxError(kw.line, kw.column,
                                  "unknown statement '" + kw.text
                                      + "'; expected param, place, activity, reward or description");
            }
        }
        require_valid(model_);
        return std::move(model_);
    }

private:
    const DToken& peek() const { return tokens_[pos_]; }

    bool accept(DTok type)
    {
        if (peek().type == type)
        {
            ++pos_;
            return true;
        }
        return false;
    }

    const DToken& expect(DTok type, const std::string& what)
    {
        const DToken& t = peek();
        if (t.type != type)
        {
            fail(what);
        }
        ++pos_;
        return t;
    }

    [[noreturn]] void fail(const std::string& expected) const
    {
        const DToken& t = peek();
        std::string got = t.type == DTok::end ? std::string(describe(t.type)) : "'" + t.text + "'";
        if (t.type == DTok::string)
        {
            got = "\"" + t.text + "\"";
        }
        throw SyntaxError(t.line, t.column, "unexpected " + got + "; expected " + expected);
    }

    std::string expect_name(const char* what)
    {
        const DToken& t = expect(DTok::identifier, what);
        if (t.text.find('-') != std::string::npos)
        {
            throw SyntaxError(t.line, t.column, "invalid name '" + t.text + "'");
        }
        return t.text;
    }

    Expr expression_from(const DToken& t) const
    {
        if (t.type == DTok::number)
        {
            double v = 0.0;
            const char* first = t.text.data();
            const char* last = first + t.text.size();
            if (*first == '+')
            {
                ++first;
            }
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc() || ptr != last)
            {
                throw SyntaxError(t.line, t.column, "malformed number '" + t.text + "'");
            }
            return Expr::literal(v);
        }
        try
        {
            return parse_expression(t.text);
        }
        catch (const SyntaxError& ex)
        {
            // Re-anchor the position inside the quoted text to the document.
            std::string msg = ex.what();
            auto colon = msg.find(": ");
            std::string detail = colon == std::string::npos ? msg : msg.substr(colon + 2);
            std::size_t line = t.line + ex.line() - 1;
            std::size_t column = ex.line() == 1 ? t.column + ex.column() : ex.column();
            throw SyntaxError(line, column, detail);
        }
    }

    Expr expect_expression(const std::string& what)
    {
        const DToken& t = peek();
        if (t.type != DTok::string && t.type != DTok::number)
        {
            fail(what);
        }
        ++pos_;
        return expression_from(t);
    }

    void parse_param()
    {
        std::string name = expect_name("parameter name");
        expect(DTok::equals, "'='");
        const DToken& where = peek();
        Expr e = expect_expression("number or quoted expression");
        if (!e.is_marking_independent())
        {
            throw SemanticError("line " + std::to_string(where.line) + ": parameter '" + name
                                + "' must not reference places");
        }
        if (model_.parameter(name))
        {
            throw SemanticError("line " + std::to_string(where.line) + ": duplicate parameter name '" + name + "'");
        }
        double value = 0.0;
        try
        {
            value = eval(e, ParameterScope(model_));
        }
        catch (const EvaluationError& ex)
        {
            throw SemanticError("line " + std::to_string(where.line) + ": parameter '" + name + "': " + ex.what());
        }
        model_.set_parameter(name, value);
    }

    void parse_place()
    {
        std::string name = expect_name("place name");
        std::int64_t tokens = 0;
        if (accept(DTok::equals))
        {
            const DToken& t = expect(DTok::number, "initial token count");
            const char* first = t.text.data();
            const char* last = first + t.text.size();
            auto [ptr, ec] = std::from_chars(first, last, tokens);
            if (ec != std::errc() || ptr != last)
            {
                throw SyntaxError(t.line, t.column, "initial tokens must be an integer, got '" + t.text + "'");
            }
        }
        model_.add_place(name, tokens);
    }

    std::vector<Effect> parse_effects()
    {
        std::vector<Effect> effects;
        expect(DTok::lbrace, "'{'");
        while (!accept(DTok::rbrace))
        {
            if (accept(DTok::semicolon))
            {
                continue;
            }
            Effect eff;
            eff.place = expect_name("place name or '}'");
            if (accept(DTok::plus_equals))
            {
                eff.op = Effect::Op::add;
            }
            else if (accept(DTok::minus_equals))
            {
                eff.op = Effect::Op::subtract;
            }
            else if (accept(DTok::equals))
            {
                eff.op = Effect::Op::assign;
            }
            else
            {
                fail("'+=', '-=' or '='");
            }
            eff.value = expect_expression("number or quoted expression");
            effects.push_back(std::move(eff));
        }
        return effects;
    }

    void parse_activity()
    {
        const DToken& kind = expect(DTok::identifier, "'timed' or 'instant'");
        Activity a;
        if (kind.text == "timed")
        {
            a.kind = Activity::Kind::timed;
        }
        else if (kind.text == "instant")
        {
            a.kind = Activity::Kind::instantaneous;
        }
        else
        {
            throw SyntaxError(kind.line, kind.column, "expected 'timed' or 'instant', got '" + kind.text + "'");
        }
        a.name = expect_name("activity name");
        if (a.is_timed())
        {
            const DToken& kw = expect(DTok::identifier, "'rate'");
            if (kw.text != "rate")
            {
                throw SyntaxError(kw.line, kw.column, "expected 'rate', got '" + kw.text + "'");
            }
            a.rate = expect_expression("number or quoted rate expression");
        }
        expect(DTok::lbrace, "'{'");
        bool seen_input = false;
        while (!accept(DTok::rbrace))
        {
            if (accept(DTok::semicolon))
            {
                continue;
            }
            const DToken& kw = expect(DTok::identifier, "'input', 'case' or '}'");
            if (kw.text == "input")
            {
                if (seen_input)
                {
                    throw SyntaxError(kw.line, kw.column, "activity '" + a.name + "' has two input clauses");
                }
                seen_input = true;
                a.input.predicate = expect_expression("quoted predicate");
                if (peek().type == DTok::lbrace)
                {
                    a.input.effects = parse_effects();
                }
            }
            else if (kw.text == "case")
            {
                CaseSpec c;
                c.probability = expect_expression("case probability");
                if (peek().type == DTok::lbrace)
                {
                    c.effects = parse_effects();
                }
                a.cases.push_back(std::move(c));
            }
            else
            {
                throw SyntaxError(kw.line, kw.column, "expected 'input' or 'case', got '" + kw.text + "'");
            }
        }
        model_.add_activity(std::move(a));
    }

    void parse_reward()
    {
        std::string name = expect_name("reward name");
        expect(DTok::equals, "'='");
        model_.add_reward(name, expect_expression("quoted predicate"));
    }

    std::vector<DToken> tokens_;
    std::size_t pos_ = 0;
    SanModel model_;
};

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"' || c == '\\')
        {
            out += '\\';
            out += c;
        }
        else if (c == '\n')
        {
            out += "\\n";
        }
        else
        {
            out += c;
        }
    }
    return out + "\"";
}

// Bare numbers for non-negative literals, quoted text otherwise.
std::string expression_text(const Expr& e)
{
    if (e.kind() == Expr::Kind::literal && !std::signbit(e.value()))
    {
        return format_real(e.value());
    }
    return quote(to_string(e));
}

void write_effects(std::ostringstream& out, const std::vector<Effect>& effects)
{
    out << " {";
    for (std::size_t i = 0; i < effects.size(); ++i)
    {
        const Effect& eff = effects[i];
        out << (i == 0 ? " " : "; ") << eff.place;
        switch (eff.op)
        {
        case Effect::Op::add: out << " += "; break;
        case Effect::Op::subtract: out << " -= "; break;
        case Effect::Op::assign: out << " = "; break;
        }
        out << expression_text(eff.value);
    }
    out << (effects.empty() ? "}" : " }");
}

} // namespace

SanModel parse_model(std::string_view document)
{
    DocParser parser(DocLexer(document).run());
    return parser.run();
}

SanModel load_model(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw Error("cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

std::string serialize_model(const SanModel& model)
{
    std::ostringstream out;
    out << "san-format 1\n";
    if (!model.description().empty())
    {
        out << "description " << quote(model.description()) << "\n";
    }
    if (!model.parameters().empty())
    {
        out << "\n";
    }
    for (const auto& [name, value] : model.parameters())
    {
        out << "param " << name << " = " << format_real(value) << "\n";
    }
    out << "\n";
    for (const auto& p : model.places())
    {
        out << "place " << p.name << " = " << p.initial_tokens << "\n";
    }
    for (const auto& a : model.activities())
    {
        out << "\nactivity " << (a.is_timed() ? "timed " : "instant ") << a.name;
        if (a.is_timed())
        {
            out << " rate " << expression_text(a.rate);
        }
        out << " {\n";
        bool trivial_input = a.input.effects.empty() && a.input.predicate.kind() == Expr::Kind::literal
                             && a.input.predicate.value() == 1.0;
        if (!trivial_input)
        {
            out << "  input " << quote(to_string(a.input.predicate));
            if (!a.input.effects.empty())
            {
                write_effects(out, a.input.effects);
            }
            out << "\n";
        }
        for (const auto& c : a.cases)
        {
            out << "  case " << expression_text(c.probability);
            write_effects(out, c.effects);
            out << "\n";
        }
        out << "}\n";
    }
    if (!model.rewards().empty())
    {
        out << "\n";
    }
    for (const auto& r : model.rewards())
    {
        out << "reward " << r.name << " = " << quote(to_string(r.predicate)) << "\n";
    }
    return out.str();
}

} // namespace edgeavail
