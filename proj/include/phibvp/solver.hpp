#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "phibvp/apriori.hpp"
#include "phibvp/errors.hpp"
#include "phibvp/grid_fn.hpp"
#include "phibvp/operator_k.hpp"
#include "phibvp/problem.hpp"

namespace phibvp {

struct SolverConfig {
    double theta = 0.7;                   // damping, (0, 1]
    double fixpoint_tol = 1e-10;          // on ||K(lambda N(u)) - u||_C1
    int max_picard_iters = 200;           // per continuation stage
    double lambda_step0 = 0.25;
    double lambda_step_min = 1.0 / 1024;  // 2^-10
    double lambda_end = 1.0;
    double constants_tol = kDefaultConstantsTolerance;

    void validate() const {
        if (!(theta > 0.0 && theta <= 1.0)) throw InvalidProblem("solver.theta", "must lie in (0, 1]");
        if (!(fixpoint_tol > 0.0)) throw InvalidProblem("solver.fixpoint_tol", "must be positive");
        if (max_picard_iters < 1) throw InvalidProblem("solver.max_picard_iters", "must be positive");
        if (!(lambda_step0 > 0.0 && lambda_step0 <= 1.0)) {
            throw InvalidProblem("solver.lambda_step0", "must lie in (0, 1]");
        }
        if (!(lambda_step_min > 0.0 && lambda_step_min <= lambda_step0)) {
            throw InvalidProblem("solver.lambda_step_min", "must lie in (0, lambda_step0]");
        }
        if (!(lambda_end >= 0.0 && lambda_end <= 1.0)) {
            throw InvalidProblem("solver.lambda_end", "must lie in [0, 1]");
        }
    }
};

struct Solution {
    C1GridFunction u;
    double lambda_reached = 0.0;
    double fixpoint_residual = 0.0;
    double strong_residual = 0.0;
    int picard_iters_total = 0;
    int stages = 0;
    int step_halvings = 0;
    BcResiduals bc;
    std::optional<BoundCertificate> certificate;
};

/// Nemytskii operator: N(u)(t_j) = f(t_j, u_j, du_j).
inline GridFunction apply_N(const ProblemInstance& p, const C1GridFunction& u) {
    const int n = u.intervals();
    std::vector<double> out(n + 1);
    const int first = p.singular_at_zero ? 1 : 0;
    for (int j = first; j <= n; ++j) out[j] = eval_f(p, u.u.t(j), u.u[j], u.du[j]);
    if (p.singular_at_zero) out[0] = 2.0 * out[1] - out[2];
    return GridFunction(std::move(out));
}

// (1 - theta) u + theta K(lambda N(u))
inline C1GridFunction picard_step(const ProblemInstance& p, const C1GridFunction& u, double lambda,
                                  double theta, double constants_tol = kDefaultConstantsTolerance) {
    const C1GridFunction Ku = apply_K(p.phi, apply_N(p, u).scaled(lambda), p.bc, constants_tol);
    return u.blend(Ku, theta);
}

/**
 * Max over cell midpoints of |n (phi(du_{j+1}) - phi(du_j)) - lambda f(mid)|,
 * with u and du averaged at the midpoint.
 */
inline double strong_residual(const ProblemInstance& p, const C1GridFunction& u, double lambda) {
    const int n = u.intervals();
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        const double tm = 0.5 * (u.u.t(j) + u.u.t(j + 1));
        const double um = 0.5 * (u.u[j] + u.u[j + 1]);
        const double dm = 0.5 * (u.du[j] + u.du[j + 1]);
        const double flux = (p.phi.prime(u.du[j + 1]) - p.phi.prime(u.du[j])) * n;
        const double rhs = lambda == 0.0 ? 0.0 : lambda * eval_f(p, tm, um, dm);
        worst = std::max(worst, std::abs(flux - rhs));
    }
    return worst;
}

/**
 * Damped Picard iteration on u -> K(lambda N(u)) with lambda marched from 0
 * (where the fixed point is the affine interpolant K(0)) up to lambda_end.
 *
 * Each stage warm-starts from the last converged iterate. A stage that does
 * not converge within max_picard_iters, or whose iterate leaves the domain
 * of f, is retried with half the lambda step; below lambda_step_min the
 * solve gives up with NonConvergence.
 */
inline Solution solve(const ProblemInstance& p, const SolverConfig& cfg = {}) {
    cfg.validate();
    Solution sol;
    const int n = p.grid_n;
    // The constants solve must sit well below the fixed-point tolerance, or
    // its noise alone keeps the residual from settling.
    const double ctol = std::min(cfg.constants_tol, 0.01 * cfg.fixpoint_tol);

    C1GridFunction u = apply_K(p.phi, GridFunction::zeros(n), p.bc, ctol);
    double lambda = 0.0;
    double step = cfg.lambda_step0;
    double last_residual = 0.0;

    while (lambda < cfg.lambda_end) {
        const double target = std::min(cfg.lambda_end, lambda + step);
        C1GridFunction w = u;
        bool converged = false;
        double residual = HUGE_VAL;
        try {
            for (int k = 0; k < cfg.max_picard_iters; ++k) {
                const C1GridFunction Kw =
                    apply_K(p.phi, apply_N(p, w).scaled(target), p.bc, ctol);
                ++sol.picard_iters_total;
                residual = c1_distance(Kw, w);
                if (!std::isfinite(residual)) break;
                if (residual <= cfg.fixpoint_tol) {
                    converged = true;
                    break;
                }
                w = w.blend(Kw, cfg.theta);
            }
        } catch (const DomainError&) {
            converged = false;
        } catch (const IterationCap&) {
            converged = false;
        }
        if (std::isfinite(residual)) last_residual = residual;

        if (converged) {
            lambda = target;
            u = std::move(w);
            sol.fixpoint_residual = residual;
            ++sol.stages;
            continue;
        }
        step *= 0.5;
        ++sol.step_halvings;
        if (step < cfg.lambda_step_min) throw NonConvergence(lambda, last_residual);
    }

    sol.lambda_reached = lambda;
    // With lambda_end = 0 no stage runs: u is K(0) itself, so the residual is 0.
    sol.strong_residual = strong_residual(p, u, lambda);
    sol.bc = bc_residuals(p.bc, u);
    sol.certificate = compute_certificate(p);
    sol.u = std::move(u);
    return sol;
}

}  // namespace phibvp
