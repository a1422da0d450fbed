#ifndef JETCALC_EXPR_HPP
#define JETCALC_EXPR_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <jetcalc/bigness.hpp>
#include <jetcalc/polyring.hpp>
#include <jetcalc/towerchow.hpp>

// Grammar (whitespace insensitive):
//   expr   := term (('+' | '-') term)*
//   term   := factor ('*' factor)*
//   factor := atom ('^' uint)?
//   atom   := 'u(' uint ')' | 'h' | 's(' uint ',' uint ')' | 'l(' uint ')'
//           | 'd' uint | uint | '(' expr ')' | 'integrate(' uint ',' expr ')'

namespace jetcalc
{

struct SourcePos {
    int line = 1;
    int column = 1;
};

enum class ExprKind { add, sub, mul, pow, u, h, s, l, d, integer, integrate };

struct Expr {
    ExprKind kind = ExprKind::integer;
    std::vector<Expr> children;
    Integer value = 0; // integer literal
    int first = 0;     // u/l level, s level, d index, pow exponent, integrate level
    int second = 0;    // s index
    SourcePos pos;

    // Structural equality; source positions are ignored.
    friend bool operator==(const Expr &a, const Expr &b)
    {
        return a.kind == b.kind && a.value == b.value && a.first == b.first && a.second == b.second
               && a.children == b.children;
    }
};

class ParseError : public std::runtime_error
{
public:
    ParseError(std::string kind, SourcePos pos, std::vector<std::string> expected, const std::string &message)
        : std::runtime_error(message), kind_(std::move(kind)), pos_(pos), expected_(std::move(expected))
    {
    }

    // "syntax", "level-out-of-range" or "variable-out-of-range"
    const std::string &kind() const { return kind_; }
    SourcePos pos() const { return pos_; }
    const std::vector<std::string> &expected() const { return expected_; }

private:
    std::string kind_;
    SourcePos pos_;
    std::vector<std::string> expected_;
};

namespace detail
{

enum class Tok { end, lparen, rparen, comma, plus, minus, star, caret, number, ident, bad };

struct Token {
    Tok kind = Tok::end;
    std::string text;
    SourcePos pos;
};

inline std::string describe(const Token &t)
{
    switch (t.kind) {
        case Tok::end:
            return "end of input";
        case Tok::bad:
            return "invalid character '" + t.text + "'";
        default:
            return "'" + t.text + "'";
    }
}

inline std::vector<Token> tokenize(std::string_view src)
{
    std::vector<Token> out;
    SourcePos pos;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++pos.line;
                pos.column = 1;
            } else {
                ++pos.column;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        const char ch = src[i];
        if (std::isspace(static_cast<unsigned char>(ch))) {
            advance(1);
            continue;
        }
        Token t;
        t.pos = pos;
        std::size_t len = 1;
        switch (ch) {
            case '(':
                t.kind = Tok::lparen;
                break;
            case ')':
                t.kind = Tok::rparen;
                break;
            case ',':
                t.kind = Tok::comma;
                break;
            case '+':
                t.kind = Tok::plus;
                break;
            case '-':
                t.kind = Tok::minus;
                break;
            case '*':
                t.kind = Tok::star;
                break;
            case '^':
                t.kind = Tok::caret;
                break;
            default:
                if (std::isdigit(static_cast<unsigned char>(ch))) {
                    t.kind = Tok::number;
                    while (i + len < src.size() && std::isdigit(static_cast<unsigned char>(src[i + len]))) {
                        ++len;
                    }
                } else if (std::isalpha(static_cast<unsigned char>(ch))) {
                    t.kind = Tok::ident;
                    while (i + len < src.size() && std::isalnum(static_cast<unsigned char>(src[i + len]))) {
                        ++len;
                    }
                } else {
                    t.kind = Tok::bad;
                }
        }
        t.text = std::string(src.substr(i, len));
        out.push_back(std::move(t));
        advance(len);
    }
    Token end;
    end.pos = pos;
    out.push_back(end);
    return out;
}

class Parser
{
public:
    Parser(std::string_view src, const TowerGeometry &g, int level) : toks_(tokenize(src)), geom_(g), level_(level) {}

    Expr parse()
    {
        Expr e = expr(level_);
        if (peek().kind != Tok::end) {
            fail({"+", "-", "*", "^", "end of input"});
        }
        return e;
    }

private:
    const Token &peek() const { return toks_[pos_]; }
    Token take() { return toks_[pos_++]; }

    [[noreturn]] void fail(std::vector<std::string> expected) const
    {
        const Token &t = peek();
        std::string msg = "syntax error at " + std::to_string(t.pos.line) + ":" + std::to_string(t.pos.column)
                          + ": unexpected " + describe(t) + ", expected one of";
        for (const auto &e : expected) {
            msg += " " + e;
        }
        throw ParseError("syntax", t.pos, std::move(expected), msg);
    }

    Token expect(Tok kind, const char *what)
    {
        if (peek().kind != kind) {
            fail({what});
        }
        return take();
    }

    int uint_value(const Token &t)
    {
        if (t.text.size() > 6) {
            throw ParseError("syntax", t.pos, {"integer below 10^6"},
                             "syntax error at " + std::to_string(t.pos.line) + ":" + std::to_string(t.pos.column)
                                 + ": integer " + t.text + " too large here");
        }
        return std::stoi(t.text);
    }

    int uint_arg()
    {
        if (peek().kind != Tok::number) {
            fail({"unsigned integer"});
        }
        return uint_value(take());
    }

    [[noreturn]] void out_of_range(const Token &at, const std::string &atom, const std::string &why) const
    {
        throw ParseError("level-out-of-range", at.pos, {},
                         "level out of range at " + std::to_string(at.pos.line) + ":" + std::to_string(at.pos.column)
                             + ": " + atom + " " + why);
    }

    Expr expr(int level)
    {
        Expr lhs = term(level);
        while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
            const Token op = take();
            Expr node;
            node.kind = op.kind == Tok::plus ? ExprKind::add : ExprKind::sub;
            node.pos = op.pos;
            node.children.push_back(std::move(lhs));
            node.children.push_back(term(level));
            lhs = std::move(node);
        }
        return lhs;
    }

    Expr term(int level)
    {
        Expr lhs = factor(level);
        while (peek().kind == Tok::star) {
            const Token op = take();
            Expr node;
            node.kind = ExprKind::mul;
            node.pos = op.pos;
            node.children.push_back(std::move(lhs));
            node.children.push_back(factor(level));
            lhs = std::move(node);
        }
        return lhs;
    }

    Expr factor(int level)
    {
        Expr base = atom(level);
        if (peek().kind == Tok::caret) {
            const Token op = take();
            Expr node;
            node.kind = ExprKind::pow;
            node.pos = op.pos;
            node.first = uint_arg();
            node.children.push_back(std::move(base));
            return node;
        }
        return base;
    }

    Expr atom(int level)
    {
        static const std::vector<std::string> atom_starts{"u(", "h", "s(", "l(", "d<index>", "unsigned integer", "(",
                                                          "integrate("};
        const Token t = peek();
        Expr e;
        e.pos = t.pos;
        if (t.kind == Tok::number) {
            take();
            e.kind = ExprKind::integer;
            e.value = Integer(t.text);
            return e;
        }
        if (t.kind == Tok::lparen) {
            take();
            Expr inner = expr(level);
            expect(Tok::rparen, "')'");
            return inner;
        }
        if (t.kind != Tok::ident) {
            fail(atom_starts);
        }
        if (t.text == "h") {
            take();
            e.kind = ExprKind::h;
            return e;
        }
        if (t.text.size() > 1 && t.text[0] == 'd'
            && std::all_of(t.text.begin() + 1, t.text.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
            take();
            e.kind = ExprKind::d;
            Token digits = t;
            digits.text = t.text.substr(1);
            e.first = uint_value(digits);
            if (e.first < 1 || e.first > geom_.c()) {
                throw ParseError("variable-out-of-range", t.pos, {},
                                 "variable out of range at " + std::to_string(t.pos.line) + ":"
                                     + std::to_string(t.pos.column) + ": " + t.text + " but c="
                                     + std::to_string(geom_.c()));
            }
            return e;
        }
        if (t.text == "u" || t.text == "l") {
            take();
            expect(Tok::lparen, "'('");
            e.kind = t.text == "u" ? ExprKind::u : ExprKind::l;
            e.first = uint_arg();
            expect(Tok::rparen, "')'");
            if (e.first < 1 || e.first > level) {
                out_of_range(t, t.text + "(" + std::to_string(e.first) + ")",
                             "is not defined on tower level " + std::to_string(level));
            }
            return e;
        }
        if (t.text == "s") {
            take();
            expect(Tok::lparen, "'('");
            e.kind = ExprKind::s;
            e.first = uint_arg();
            expect(Tok::comma, "','");
            e.second = uint_arg();
            expect(Tok::rparen, "')'");
            if (e.first > level) {
                out_of_range(t, "s(" + std::to_string(e.first) + "," + std::to_string(e.second) + ")",
                             "is not defined on tower level " + std::to_string(level));
            }
            return e;
        }
        if (t.text == "integrate") {
            take();
            expect(Tok::lparen, "'('");
            e.kind = ExprKind::integrate;
            const Token lt = peek();
            e.first = uint_arg();
            if (e.first > level) {
                out_of_range(lt, "integrate(" + std::to_string(e.first) + ", ...)",
                             "exceeds tower level " + std::to_string(level));
            }
            expect(Tok::comma, "','");
            e.children.push_back(expr(e.first));
            expect(Tok::rparen, "')'");
            return e;
        }
        fail(atom_starts);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    TowerGeometry geom_;
    int level_;
};

inline int precedence(ExprKind k)
{
    switch (k) {
        case ExprKind::add:
        case ExprKind::sub:
            return 1;
        case ExprKind::mul:
            return 2;
        case ExprKind::pow:
            return 3;
        default:
            return 4;
    }
}

} // namespace detail

// Parses src as an expression on tower level `level` of g.
inline Expr parse(std::string_view src, const TowerGeometry &g, int level)
{
    g.check_level(level);
    return detail::Parser(src, g, level).parse();
}

// Canonical text; parse(print(e)) == e.
inline std::string print(const Expr &e)
{
    auto wrap = [](const Expr &child, bool parens) { return parens ? "(" + print(child) + ")" : print(child); };
    const int prec = detail::precedence(e.kind);
    switch (e.kind) {
        case ExprKind::add:
        case ExprKind::sub:
        case ExprKind::mul: {
            const std::string op = e.kind == ExprKind::add ? " + " : e.kind == ExprKind::sub ? " - " : "*";
            return wrap(e.children[0], detail::precedence(e.children[0].kind) < prec) + op
                   + wrap(e.children[1], detail::precedence(e.children[1].kind) <= prec);
        }
        case ExprKind::pow:
            return wrap(e.children[0], detail::precedence(e.children[0].kind) < 4) + "^" + std::to_string(e.first);
        case ExprKind::u:
            return "u(" + std::to_string(e.first) + ")";
        case ExprKind::l:
            return "l(" + std::to_string(e.first) + ")";
        case ExprKind::h:
            return "h";
        case ExprKind::s:
            return "s(" + std::to_string(e.first) + "," + std::to_string(e.second) + ")";
        case ExprKind::d:
            return "d" + std::to_string(e.first);
        case ExprKind::integer:
            return e.value.str();
        case ExprKind::integrate:
            return "integrate(" + std::to_string(e.first) + ", " + print(e.children[0]) + ")";
    }
    return "";
}

// Value of e as a class on tower level `level`; integrate(...) nodes become
// scalars.
inline ChowClass evaluate(const Expr &e, const TowerGeometry &g, int level)
{
    const std::size_t nv = static_cast<std::size_t>(g.c());
    switch (e.kind) {
        case ExprKind::add:
            return evaluate(e.children[0], g, level) + evaluate(e.children[1], g, level);
        case ExprKind::sub:
            return evaluate(e.children[0], g, level) - evaluate(e.children[1], g, level);
        case ExprKind::mul:
            return evaluate(e.children[0], g, level) * evaluate(e.children[1], g, level);
        case ExprKind::pow:
            return evaluate(e.children[0], g, level).pow(static_cast<unsigned>(e.first));
        case ExprKind::u:
            return ChowClass::u(g, level, e.first);
        case ExprKind::h:
            return ChowClass::h(g, level);
        case ExprKind::s:
            return expand_tower_segre(g, e.first, e.second).pullback(level);
        case ExprKind::l:
            return linear_class(g, level, l_form(e.first));
        case ExprKind::d:
            return ChowClass::scalar(g, level, MultiPoly::variable(nv, static_cast<std::size_t>(e.first - 1)));
        case ExprKind::integer:
            return ChowClass::scalar(g, level, MultiPoly::constant(nv, e.value));
        case ExprKind::integrate: {
            Integrator integrator(g);
            return ChowClass::scalar(g, level, integrator.integrate(evaluate(e.children[0], g, e.first)));
        }
    }
    throw std::logic_error("evaluate: unknown node");
}

// Degree polynomial of an expression: the root's value when it is an
// integrate(...) call, otherwise the integral of the class over X_level.
inline MultiPoly evaluate_integral(const Expr &e, const TowerGeometry &g, int level)
{
    if (e.kind == ExprKind::integrate) {
        const ChowClass v = evaluate(e, g, level);
        return v.is_zero() ? MultiPoly(static_cast<std::size_t>(g.c())) : v.terms().begin()->second;
    }
    Integrator integrator(g);
    return integrator.integrate(evaluate(e, g, level));
}

} // namespace jetcalc

#endif // JETCALC_EXPR_HPP
