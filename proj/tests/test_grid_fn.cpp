#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "phibvp/grid_fn.hpp"
#include "test_support.hpp"

using namespace phibvp;
using phibvp::testkit::kPi;

TEST(Cumtrapz, Examples) {
    const auto V = cumtrapz(GridFunction::constant(10, 1.0));
    for (int j = 0; j <= 10; ++j) EXPECT_DOUBLE_EQ(V[j], V.t(j));

    const auto W = cumtrapz(GridFunction::sample(2, [](double s) { return s; }));
    EXPECT_EQ(W.back(), 0.5);

    // Closed form: int_0^1 sin(pi s) ds = 2/pi.
    const auto S = cumtrapz(GridFunction::sample(100, [](double s) { return std::sin(kPi * s); }));
    EXPECT_NEAR(S.back(), 2.0 / kPi, 1e-3);
    EXPECT_EQ(S.front(), 0.0);
}

TEST(Cumtrapz, ExactOnAffine) {
    const auto V = cumtrapz(GridFunction::sample(64, [](double s) { return 3.0 - 2.0 * s; }));
    for (int j = 0; j <= 64; ++j) {
        const double t = V.t(j);
        EXPECT_NEAR(V[j], 3.0 * t - t * t, 1e-14);
    }
}

TEST(Cumtrapz, LinearityAndMonotonicity) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto v = testkit::random_grid_function(rng, 50);
        const auto w = testkit::random_grid_function(rng, 50);
        const auto lhs = cumtrapz(v.combine(2.5, w, -0.75));
        const auto rhs = cumtrapz(v).combine(2.5, cumtrapz(w), -0.75);
        EXPECT_LE(sup_distance(lhs, rhs), 1e-12);

        auto pos = v;
        for (double& x : pos.values()) x = std::abs(x);
        const auto P = cumtrapz(pos);
        for (int j = 1; j <= 50; ++j) EXPECT_GE(P[j], P[j - 1]);
    }
}

TEST(Cumtrapz, SecondOrderConvergence) {
    auto err = [](int n) {
        return std::abs(cumtrapz(GridFunction::sample(n, [](double s) { return std::exp(s); })).back() -
                        (std::exp(1.0) - 1.0));
    };
    const double ratio = err(50) / err(100);
    EXPECT_NEAR(ratio, 4.0, 0.05);
}

TEST(SupNorm, Examples) {
    EXPECT_EQ(sup_norm(GridFunction::zeros(8)), 0.0);
    EXPECT_EQ(sup_norm(GridFunction({1.0, -3.0, 2.0})), 3.0);
    const auto s = GridFunction::sample(100, [](double t) { return std::sinh(t) / std::sinh(1.0); });
    EXPECT_NEAR(sup_norm(s), 1.0, 1e-15);
}

TEST(C1Norm, Examples) {
    EXPECT_EQ(c1_norm({GridFunction::zeros(4), GridFunction::zeros(4)}), 0.0);
    EXPECT_EQ(c1_norm({GridFunction::sample(4, [](double t) { return t; }), GridFunction::constant(4, 1.0)}), 1.0);
    const C1GridFunction q(GridFunction::sample(10, [](double t) { return (t * t - t) / 2; }),
                           GridFunction::sample(10, [](double t) { return t - 0.5; }));
    EXPECT_DOUBLE_EQ(c1_norm(q), 0.5);
}

TEST(Norms, TriangleInequalityAndDefiniteness) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = testkit::random_grid_function(rng, 20);
        const auto b = testkit::random_grid_function(rng, 20);
        EXPECT_LE(sup_norm(a.combine(1.0, b, 1.0)), sup_norm(a) + sup_norm(b) + 1e-15);
        EXPECT_GT(sup_norm(a), 0.0);
    }
}

TEST(Lerp, Examples) {
    const auto g = GridFunction::sample(16, [](double t) { return std::cos(t); });
    for (int j = 0; j <= 16; ++j) EXPECT_EQ(lerp(g, g.t(j)), g[j]);
    EXPECT_EQ(lerp(GridFunction({0.0, 1.0}), 0.5), 0.5);
    const auto sq = GridFunction::sample(100, [](double s) { return s * s; });
    EXPECT_NEAR(lerp(sq, 0.505), 0.255025, 1e-4);
}

TEST(Csv, HeaderPrecisionAndReadBack) {
    const C1GridFunction g(GridFunction::sample(16, [](double t) { return std::exp(t) / 3.0; }),
                           GridFunction::sample(16, [](double t) { return std::exp(t) / 3.0; }));
    std::stringstream ss;
    write_csv(ss, g);
    const std::string text = ss.str();
    EXPECT_EQ(text.rfind("t,u,du\n", 0), 0u);
    EXPECT_EQ(text.find('\r'), std::string::npos);
    const auto back = read_csv(ss);
    // 17 significant digits reproduce every double exactly.
    EXPECT_EQ(sup_distance(back.u, g.u), 0.0);
    EXPECT_EQ(sup_distance(back.du, g.du), 0.0);
}

TEST(GridFunction, RejectsMismatchedGrids) {
    EXPECT_THROW(sup_distance(GridFunction::zeros(4), GridFunction::zeros(8)), GridMismatch);
    EXPECT_THROW(C1GridFunction(GridFunction::zeros(4), GridFunction::zeros(8)), GridMismatch);
}
