#include <gtest/gtest.h>

#include <string>
#include <vector>

#include <jetcalc/expr.hpp>

#include "expr_corpus.hpp"

using namespace jetcalc;

namespace
{

MultiPoly d(std::size_t nv, std::size_t i) { return MultiPoly::variable(nv, i - 1); }
MultiPoly k(std::size_t nv, long v) { return MultiPoly::constant(nv, v); }

} // namespace

TEST(Parser, RoundTripCorpus)
{
    const TowerGeometry g(5, 2);
    ASSERT_EQ(expr_corpus().size(), 50U);
    for (const auto &src : expr_corpus()) {
        const Expr e = parse(src, g, 3);
        const std::string printed = print(e);
        const Expr again = parse(printed, g, 3);
        EXPECT_EQ(again, e) << src << " -> " << printed;
        EXPECT_EQ(print(again), printed) << src;
    }
}

TEST(Parser, Associativity)
{
    const TowerGeometry g(5, 2);
    EXPECT_EQ(print(parse("1 - (2 - 3)", g, 0)), "1 - (2 - 3)");
    EXPECT_EQ(print(parse("(1 - 2) - 3", g, 0)), "1 - 2 - 3");
    EXPECT_EQ(print(parse("(h^2)^3", g, 0)), "(h^2)^3");
    EXPECT_EQ(print(parse("2*(d1 + d2)", g, 0)), "2*(d1 + d2)");
    EXPECT_FALSE(parse("1 - (2 - 3)", g, 0) == parse("1 - 2 - 3", g, 0));
}

TEST(Evaluate, Examples)
{
    const TowerGeometry curve(3, 2);
    const Expr e = parse("integrate(1, (u(1)+2*h)^1)", curve, 1);
    EXPECT_EQ(e.kind, ExprKind::integrate);
    EXPECT_EQ(evaluate_integral(e, curve, 1), d(2, 1) * d(2, 2) * (d(2, 1) + d(2, 2) - k(2, 2)));

    const TowerGeometry g(4, 2);
    EXPECT_EQ(evaluate(parse("h^0", g, 2), g, 2), ChowClass::one(g, 2));
    EXPECT_EQ(evaluate(parse("l(1)", g, 1), g, 1), ChowClass::u(g, 1, 1) + ChowClass::h(g, 1) * k(2, 2));
    EXPECT_EQ(evaluate(parse("s(1,1)", g, 2), g, 2), expand_tower_segre(g, 1, 1).pullback(2));
    EXPECT_EQ(evaluate_integral(parse("u(1)*h^2", g, 1), g, 1), d(2, 1) * d(2, 2));
}

TEST(Evaluate, MatchesMorseLhs)
{
    const TowerGeometry g(3, 1);
    const MultiPoly v = evaluate_integral(parse("(l(1) + l(2))^4", g, 2), g, 2);
    EXPECT_EQ(v, morse_criterion(g, 0, 0).lhs);
}

TEST(Parser, LevelOutOfRange)
{
    const TowerGeometry g(5, 2);
    try {
        parse("h + u(3)", g, 2);
        FAIL() << "expected a level error";
    } catch (const ParseError &e) {
        EXPECT_EQ(e.kind(), "level-out-of-range");
        EXPECT_EQ(e.pos().column, 5);
        EXPECT_NE(std::string(e.what()).find("u(3)"), std::string::npos);
    }
    EXPECT_THROW(parse("integrate(1, u(2))", g, 2), ParseError);
    EXPECT_THROW(parse("integrate(3, h)", g, 2), ParseError);
    EXPECT_THROW(parse("l(0)", g, 2), ParseError);
    EXPECT_THROW(parse("s(3,1)", g, 2), ParseError);
    EXPECT_THROW(parse("d3", g, 2), ParseError);
    EXPECT_NO_THROW(parse("integrate(1, u(1)^5) * u(2)", g, 2));
}

TEST(Parser, SyntaxErrorsArePositioned)
{
    const TowerGeometry g(5, 2);
    struct Case {
        std::string src;
        int line;
        int column;
    };
    const std::vector<Case> cases{
        {"", 1, 1},          {"u(1) +", 1, 7},        {"u 1", 1, 3},       {"-h", 1, 1},
        {"h h", 1, 3},       {"h^", 1, 3},            {"h^-1", 1, 3},      {"(h", 1, 3},
        {"s(1 2)", 1, 5},    {"q(1)", 1, 1},          {"h $ 2", 1, 3},     {"h +\n  * u(1)", 2, 3},
        {"integrate(h)", 1, 11}, {"u(1))", 1, 5},     {"d", 1, 1},         {"u(99999999)", 1, 3},
    };
    for (const auto &c : cases) {
        try {
            parse(c.src, g, 2);
            ADD_FAILURE() << "accepted: " << c.src;
        } catch (const ParseError &e) {
            EXPECT_EQ(e.kind(), "syntax") << c.src;
            EXPECT_EQ(e.pos().line, c.line) << c.src;
            EXPECT_EQ(e.pos().column, c.column) << c.src;
            EXPECT_FALSE(e.expected().empty()) << c.src;
        }
    }
}

TEST(Parser, CurveTowerHasOneLevel)
{
    EXPECT_THROW(parse("h", TowerGeometry(3, 2), 2), std::out_of_range);
}
