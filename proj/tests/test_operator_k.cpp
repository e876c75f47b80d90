#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "phibvp/operator_k.hpp"
#include "test_support.hpp"

using namespace phibvp;
using phibvp::testkit::quadratic_phi;

namespace {

std::vector<PhiModel> models() {
    return {quadratic_phi(), PhiModel::power_sum({1.5}), PhiModel::power_sum({2.0, 1.5}),
            PhiModel::power_sum({1.2})};
}

const SturmLiouville kUnitSL{1, 1, 0, 1, 1, 0};

}  // namespace

TEST(Khat, Examples) {
    for (const auto& phi : models()) {
        const auto k = khat(phi, GridFunction::zeros(20), 0.0, phi.prime(1.0));
        for (int j = 0; j <= 20; ++j) {
            EXPECT_NEAR(k.u[j], k.u.t(j), 1e-11);
            EXPECT_NEAR(k.du[j], 1.0, 1e-11);
        }
        const auto c = khat(phi, GridFunction::zeros(20), 5.0, 0.0);
        EXPECT_EQ(sup_distance(c.u, GridFunction::constant(20, 5.0)), 0.0);
        EXPECT_EQ(sup_norm(c.du), 0.0);
    }
    // psi = id, V(t) = t: du = t - 1/2 and u = (t^2 - t)/2, the latter exact up
    // to the trapezoid error h^2/12 per unit of u'' (= 1 here) times t.
    const int n = 10;
    const auto k = khat(quadratic_phi(), GridFunction::constant(n, 1.0), 0.0, -0.5);
    for (int j = 0; j <= n; ++j) {
        const double t = k.u.t(j);
        EXPECT_NEAR(k.du[j], t - 0.5, 1e-15);
        EXPECT_NEAR(k.u[j], (t * t - t) / 2, 1.0 / (12.0 * n * n) * t + 1e-15);
    }
    EXPECT_EQ(k.u[0], 0.0);
    EXPECT_EQ(k.du[0], -0.5);
}

TEST(GDirichlet, Examples) {
    const auto phi = quadratic_phi();
    EXPECT_NEAR(g_dirichlet(phi, GridFunction::zeros(16), 0.0, 1.0), 1.0, 1e-15);
    // int_0^1 (tau - 1/2) dtau = 0, trapezoid is exact on affine integrands.
    EXPECT_NEAR(g_dirichlet(phi, GridFunction::constant(16, 1.0), 0.0, -0.5), 0.0, 1e-15);
    for (const auto& m : models()) EXPECT_EQ(g_dirichlet(m, GridFunction::zeros(16), 3.0, 0.0), 3.0);
}

TEST(GSturmLiouville, Examples) {
    const auto phi = quadratic_phi();
    EXPECT_EQ(g_sturm_liouville(phi, GridFunction::zeros(16), kUnitSL, 0.0), 0.0);
    // 1 * [1 + 1] + 1 = 3
    EXPECT_NEAR(g_sturm_liouville(phi, GridFunction::zeros(16), kUnitSL, 1.0), 3.0, 1e-15);
    // 1 * [-2/2 + 0 + 0] + 0 = -1
    const SturmLiouville s{2, 1, 2, 1, 1, 0};
    EXPECT_NEAR(g_sturm_liouville(phi, GridFunction::zeros(16), s, 0.0), -1.0, 1e-15);
}

TEST(SolveConstants, Examples) {
    const auto phi = quadratic_phi();
    const auto a = solve_constants(phi, GridFunction::zeros(32), BoundaryConditions::dirichlet(0, 1));
    EXPECT_EQ(a.c1, 0.0);
    EXPECT_NEAR(a.c2, 1.0, 1e-12);
    const auto b = solve_constants(phi, GridFunction::constant(32, 1.0), BoundaryConditions::dirichlet(0, 0));
    EXPECT_NEAR(b.c2, -0.5, 1e-12);
    for (const auto& m : models()) {
        const auto c = solve_constants(m, GridFunction::zeros(32), BoundaryConditions::sturm_liouville(kUnitSL));
        EXPECT_NEAR(c.c1, 0.0, 1e-12);
        EXPECT_NEAR(c.c2, 0.0, 1e-12);
        EXPECT_LE(c.residual, 1e-12);
    }
}

TEST(SolveConstants, BrokenModelHitsIterationCap) {
    // A map that never reaches the target: solve_increasing must give up.
    EXPECT_THROW(solve_increasing([](double c) { return std::atan(c); }, 5.0, 1e-12), IterationCap);
}

TEST(ApplyK, Examples) {
    for (const auto& phi : models()) {
        const auto u = apply_K(phi, GridFunction::zeros(40), BoundaryConditions::dirichlet(0, 1));
        for (int j = 0; j <= 40; ++j) EXPECT_NEAR(u.u[j], u.u.t(j), 1e-11);
    }
    const int n = 40;
    const auto q = apply_K(quadratic_phi(), GridFunction::constant(n, 1.0), BoundaryConditions::dirichlet(0, 0));
    for (int j = 0; j <= n; ++j) {
        const double t = q.u.t(j);
        EXPECT_NEAR(q.u[j], (t * t - t) / 2, 1.0 / (12.0 * n * n));
    }

    // Oracle: independent bisection for the slope m of the affine solution,
    // 1*[1 + m + m] + m = 1 with c1 = 1 + m, then check both conditions.
    const auto bc = BoundaryConditions::sturm_liouville(1, 1, -1, 1, 1, 1);
    const double m = testkit::reference_inverse([](double s) { return 1 + 3 * s; }, 1.0, 10.0);
    const auto s = apply_K(quadratic_phi(), GridFunction::zeros(n), bc);
    EXPECT_NEAR(s.du[0], m, 1e-10);
    EXPECT_NEAR(s.u[0], 1 + m, 1e-10);
    const auto r = bc_residuals(bc, s);
    EXPECT_LT(r.left, 1e-10);
    EXPECT_LT(r.right, 1e-10);
}

TEST(OperatorK, MonotoneInC) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> C(-20, 20);
    const SturmLiouville s{0.5, 2, 1, 3, 0.25, -2};
    for (const auto& phi : models()) {
        const auto v = testkit::random_grid_function(rng, 32);
        for (int i = 0; i < 40; ++i) {
            double c = C(rng), d = C(rng);
            if (c > d) std::swap(c, d);
            if (d - c < 1e-6) continue;
            EXPECT_LT(g_dirichlet(phi, v, 0.3, c), g_dirichlet(phi, v, 0.3, d));
            EXPECT_LT(g_sturm_liouville(phi, v, s, c), g_sturm_liouville(phi, v, s, d));
        }
    }
}

TEST(OperatorK, ConstantsAreContinuousInV) {
    std::mt19937_64 rng(9);
    for (const auto& phi : models()) {
        const auto v = testkit::random_grid_function(rng, 64);
        const auto dir = testkit::random_grid_function(rng, 64, 1.0);
        const auto bc = BoundaryConditions::sturm_liouville(1, 2, 0.5, 1, 1, -1);
        const double c0 = solve_constants(phi, v, bc).c2;
        double prev = HUGE_VAL;
        for (double h : {1e-2, 1e-3, 1e-4}) {
            const double d = std::abs(solve_constants(phi, v.combine(1, dir, h), bc).c2 - c0);
            EXPECT_LT(d, prev);
            prev = d;
        }
    }
}

TEST(OperatorK, BcResidualsAndCompactnessBoundOnRandomV) {
    std::mt19937_64 rng(13);
    const std::vector<BoundaryConditions> bcs{BoundaryConditions::dirichlet(-2, 3),
                                              BoundaryConditions::sturm_liouville(2, 0.5, 1, 1, 3, -4)};
    for (const auto& phi : models()) {
        for (const auto& bc : bcs) {
            for (int i = 0; i < 5; ++i) {
                const auto v = testkit::random_grid_function(rng, 48);
                const auto c = solve_constants(phi, v, bc);
                const auto u = khat(phi, v, c.c1, c.c2);
                EXPECT_LE(bc_residuals(bc, u).max(), 1e-10);
                const double bound = phi.psi(sup_norm(cumtrapz(v)) + std::abs(c.c2));
                EXPECT_LE(sup_norm(u.du), bound * (1 + 1e-12));
            }
        }
    }
}

TEST(OperatorK, LeftInverseAtMidpoints) {
    std::mt19937_64 rng(21);
    for (const auto& phi : models()) {
        const auto f = testkit::RandomSmooth::draw(rng);
        auto err = [&](int n) {
            const auto v = GridFunction::sample(n, f);
            const auto u = apply_K(phi, v, BoundaryConditions::dirichlet(0.5, -1));
            double e = 0;
            for (int j = 0; j < n; ++j) {
                const double lphi = (phi.prime(u.du[j + 1]) - phi.prime(u.du[j])) * n;
                e = std::max(e, std::abs(lphi - f((j + 0.5) / n)));
            }
            return e;
        };
        const double e1 = err(100), e2 = err(200);
        EXPECT_LE(e1 * 100 * 100, f.d2_bound() / 8 * 1.001);
        EXPECT_NEAR(e1 / e2, 4.0, 0.5);
    }
}
