#include <gtest/gtest.h>

#include <cmath>

#include "expr_corpus.hpp"
#include "phibvp/expr.hpp"

using namespace phibvp;
using namespace phibvp::expr;

namespace {
double ev(std::string_view src, double t = 0.0, double x = 0.0, double v = 0.0) {
    return parse(src).eval(t, x, v);
}
}  // namespace

TEST(Parse, Examples) {
    EXPECT_EQ(ev("1+2*3"), 7.0);
    const Ast a = parse("x - sin(3.14159*t)");
    EXPECT_TRUE(a.uses(Var::X));
    EXPECT_TRUE(a.uses(Var::T));
    EXPECT_FALSE(a.uses(Var::V));
    try {
        parse("x ** y");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position(), 5u);
        EXPECT_EQ(e.found(), "y");
    }
}

TEST(Parse, Precedence) {
    EXPECT_EQ(ev("2+3*4"), 14.0);
    EXPECT_EQ(ev("(2+3)*4"), 20.0);
    EXPECT_EQ(ev("-2^2"), -4.0);
    EXPECT_EQ(ev("2^3^2"), 512.0);
    EXPECT_EQ(ev("2^-1"), 0.5);
    EXPECT_EQ(ev("x/2/3", 0, 12), 2.0);
    EXPECT_EQ(ev("x-1-2", 0, 10), 7.0);
    EXPECT_EQ(ev("1 - -1"), 2.0);
    EXPECT_EQ(ev("x ** 2", 0, 3), 9.0);
}

TEST(Eval, Examples) {
    EXPECT_EQ(ev("x*v", 0, 2, 3), 6.0);
    EXPECT_EQ(ev("sin(0)"), 0.0);
    EXPECT_THROW(ev("1/(t-0.5)", 0.5), DomainError);
    EXPECT_DOUBLE_EQ(ev("-9.8696*sin(3.14159*t) + x - sin(3.14159*t)", 0.5, 1.0),
                     -9.8696 * std::sin(3.14159 * 0.5) + 1.0 - std::sin(3.14159 * 0.5));
}

TEST(Eval, DomainErrorsCarryNodePosition) {
    try {
        ev("1 + log(x)", 0, -1);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_EQ(e.position(), 4u);
    }
    EXPECT_THROW(ev("sqrt(x)", 0, -1), DomainError);
    EXPECT_THROW(ev("x^0.5", 0, -4), DomainError);
    EXPECT_EQ(ev("x^2", 0, -4), 16.0);
    EXPECT_THROW(ev("t^(-1)", 0), DomainError);
    EXPECT_THROW(ev("exp(1000)"), DomainError);
}

TEST(Parse, MalformedPositions) {
    for (const auto& c : phibvp::testkit::kMalformedExpressions) {
        try {
            parse(c.src);
            ADD_FAILURE() << "accepted '" << c.src << "'";
        } catch (const ParseError& e) {
            EXPECT_EQ(e.position(), c.position) << "'" << c.src << "': " << e.what();
            EXPECT_LE(e.position(), c.src.size());
        }
    }
}

TEST(Parse, ErrorsAreDeterministic) {
    std::string first;
    for (int i = 0; i < 3; ++i) {
        try {
            parse("x +* v");
        } catch (const ParseError& e) {
            if (i == 0) first = e.what();
            EXPECT_EQ(first, e.what());
        }
    }
    EXPECT_NE(first.find("position 3"), std::string::npos);
}

TEST(Parse, DeepNestingIsRejected) {
    std::string deep(1000, '(');
    deep += "x";
    deep += std::string(1000, ')');
    EXPECT_THROW(parse(deep), ParseError);
}

TEST(Print, RoundTripsGoldenCorpus) {
    for (auto src : phibvp::testkit::kGoldenExpressions) {
        const Ast a = parse(src);
        const std::string printed = to_string(a);
        const Ast b = parse(printed);
        EXPECT_TRUE(a == b) << src << " -> " << printed;
        EXPECT_EQ(printed, to_string(b));
    }
}

TEST(Ast, EqualityIgnoresPositionsButNotStructure) {
    EXPECT_TRUE(parse("x+1") == parse("  x  +  1"));
    EXPECT_FALSE(parse("x+1") == parse("1+x"));
    EXPECT_FALSE(parse("-2^2") == parse("(-2)^2"));
}
