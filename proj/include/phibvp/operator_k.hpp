#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "phibvp/grid_fn.hpp"
#include "phibvp/phi_model.hpp"
#include "phibvp/problem.hpp"
#include "phibvp/root_finding.hpp"

// Inverse of the Phi-Laplacian under boundary conditions:
//
//   Khat(v, c1, c2)(t) = c1 + int_0^t psi( int_0^tau v(s) ds + c2 ) dtau
//   K(v)               = Khat(v, c1(v), c2(v))
//
// where (c1, c2) are the unique constants that put Khat(v, ., .) into the
// boundary conditions. c2 solves a scalar equation that is increasing in c2
// but whose derivative may vanish, so it is found by bracketing bisection.

namespace phibvp {

inline constexpr double kDefaultConstantsTolerance = 1e-12;

struct ConstantsSolution {
    double c1 = 0.0;
    double c2 = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

struct BcResiduals {
    double left = 0.0;
    double right = 0.0;
    double max() const { return std::max(left, right); }
};

namespace detail {

struct SlopeTrace {
    double integral = 0.0;  // trapezoid of psi(V + c) over [0,1]
    double at_one = 0.0;    // psi(V(1) + c)
    double at_zero = 0.0;   // psi(c)
};

inline SlopeTrace slope_trace(const PhiModel& phi, const GridFunction& V, double c) {
    const int n = V.intervals();
    SlopeTrace s;
    s.at_zero = phi.psi(V[0] + c);
    s.at_one = phi.psi(V[n] + c);
    double interior = 0.0;
    for (int j = 1; j < n; ++j) interior += phi.psi(V[j] + c);
    s.integral = (interior + 0.5 * (s.at_zero + s.at_one)) / n;
    return s;
}

inline double g_dirichlet_cum(const PhiModel& phi, const GridFunction& V, double A, double c) {
    return A + slope_trace(phi, V, c).integral;
}

inline double g_sturm_liouville_cum(const PhiModel& phi, const GridFunction& V,
                                    const SturmLiouville& s, double c) {
    const SlopeTrace tr = slope_trace(phi, V, c);
    return s.a * (-s.A / s.alpha + (s.beta / s.alpha) * tr.at_zero + tr.integral) +
           s.b * tr.at_one;
}

}  // namespace detail

/// du = psi(cumtrapz(v) + c2), u = c1 + cumtrapz(du).
inline C1GridFunction khat(const PhiModel& phi, const GridFunction& v, double c1, double c2) {
    const GridFunction V = cumtrapz(v);
    std::vector<double> du(V.size());
    for (std::size_t j = 0; j < du.size(); ++j) du[j] = phi.psi(V[j] + c2);
    GridFunction slope(std::move(du));
    GridFunction u = cumtrapz(slope);
    for (double& x : u.values()) x += c1;
    u[0] = c1;
    return {std::move(u), std::move(slope)};
}

// u(1) of Khat(v, A, c): the Dirichlet shooting map in c.
inline double g_dirichlet(const PhiModel& phi, const GridFunction& v, double A, double c) {
    return detail::g_dirichlet_cum(phi, cumtrapz(v), A, c);
}

// a u(1) + b u'(1) of Khat(v, c1(c), c) with c1 taken from the left condition.
inline double g_sturm_liouville(const PhiModel& phi, const GridFunction& v,
                                const SturmLiouville& bc, double c) {
    return detail::g_sturm_liouville_cum(phi, cumtrapz(v), bc, c);
}

inline ConstantsSolution solve_constants(const PhiModel& phi, const GridFunction& v,
                                         const BoundaryConditions& bc,
                                         double tolerance = kDefaultConstantsTolerance) {
    const GridFunction V = cumtrapz(v);
    ConstantsSolution out;
    if (bc.is_dirichlet()) {
        const Dirichlet& d = bc.as_dirichlet();
        const auto root = solve_increasing(
            [&](double c) { return detail::g_dirichlet_cum(phi, V, d.A, c); }, d.B,
            tolerance * std::max(1.0, std::abs(d.B)));
        out.c1 = d.A;
        out.c2 = root.x;
        out.residual = root.residual;
        out.iterations = root.iterations;
    } else {
        const SturmLiouville& s = bc.as_sturm_liouville();
        const auto root = solve_increasing(
            [&](double c) { return detail::g_sturm_liouville_cum(phi, V, s, c); }, s.B,
            tolerance * std::max(1.0, std::abs(s.B)));
        out.c2 = root.x;
        out.c1 = -s.A / s.alpha + (s.beta / s.alpha) * phi.psi(root.x);
        out.residual = root.residual;
        out.iterations = root.iterations;
    }
    return out;
}

inline BcResiduals bc_residuals(const BoundaryConditions& bc, const C1GridFunction& u) {
    const int n = u.intervals();
    if (bc.is_dirichlet()) {
        const Dirichlet& d = bc.as_dirichlet();
        return {std::abs(u.u[0] - d.A), std::abs(u.u[n] - d.B)};
    }
    const SturmLiouville& s = bc.as_sturm_liouville();
    return {std::abs(-s.alpha * u.u[0] + s.beta * u.du[0] - s.A),
            std::abs(s.a * u.u[n] + s.b * u.du[n] - s.B)};
}

inline C1GridFunction apply_K(const PhiModel& phi, const GridFunction& v,
                              const BoundaryConditions& bc,
                              double tolerance = kDefaultConstantsTolerance) {
    const ConstantsSolution c = solve_constants(phi, v, bc, tolerance);
    return khat(phi, v, c.c1, c.c2);
}

}  // namespace phibvp
