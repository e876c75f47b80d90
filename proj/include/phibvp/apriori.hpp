#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "phibvp/grid_fn.hpp"
#include "phibvp/phi_model.hpp"
#include "phibvp/problem.hpp"
#include "phibvp/root_finding.hpp"

namespace phibvp {

enum class BoundBranch { Exponential, Direct };

inline const char* to_string(BoundBranch b) {
    return b == BoundBranch::Exponential ? "exponential" : "direct";
}

/**
 * Lambda-independent radii with |u| <= r0 and |u'| <= r1 for every solution
 * of the continuation family, together with the constants of the chain:
 *
 *   C  = 2 r0                          slope bound at some point (mean value)
 *   C0 = S0 (phi(C) C - Phi(C)) + T0
 *   E  = ((T0 + C0) exp(2 S0 r0) - T0) / S0,   (k_phi - 1) Phi(r1) = E
 *
 * With S0 = 0 the chain degenerates; integrating |d/dt phi(u')| <= T0 directly
 * gives E = phi(C) + T0 and r1 = psi(E) instead.
 */
struct BoundCertificate {
    double r0 = 0.0;
    double r1 = 0.0;
    double C = 0.0;
    double C0 = 0.0;
    double E = 0.0;
    double s0_used = 0.0;
    double t0_used = 0.0;
    double k_phi = 0.0;
    BoundBranch branch = BoundBranch::Direct;
    bool degenerate = false;  // r1 collapsed to C = 0
};

inline double r0_bound(const ProblemInstance& p) {
    const double R = p.f.R;
    if (p.bc.is_dirichlet()) {
        const Dirichlet& d = p.bc.as_dirichlet();
        return std::max({R, std::abs(d.A), std::abs(d.B)});
    }
    const SturmLiouville& s = p.bc.as_sturm_liouville();
    return std::max({R, std::abs(s.A / s.alpha), std::abs(s.B / s.a)});
}

inline BoundCertificate r1_bound(const PhiModel& phi, double r0, double S0, double T0) {
    if (!(phi.k_phi() > 1.0)) throw InvalidProblem("phi.k_phi", "k_phi must be greater than 1");
    if (!(r0 >= 0.0) || !(S0 >= 0.0) || !(T0 >= 0.0)) {
        throw InvalidProblem("", "r0, S0 and T0 must be non-negative");
    }
    BoundCertificate cert;
    cert.r0 = r0;
    cert.s0_used = S0;
    cert.t0_used = T0;
    cert.k_phi = phi.k_phi();
    cert.C = 2.0 * r0;
    cert.C0 = S0 * (phi.prime(cert.C) * cert.C - phi.value(cert.C)) + T0;

    if (S0 > 0.0) {
        cert.branch = BoundBranch::Exponential;
        cert.E = ((T0 + cert.C0) * std::exp(2.0 * S0 * r0) - T0) / S0;
        if (!std::isfinite(cert.E)) {
            cert.r1 = HUGE_VAL;
            return cert;
        }
        if (cert.E == 0.0) {
            cert.degenerate = true;
            cert.r1 = cert.C;
            return cert;
        }
        const double km1 = phi.k_phi() - 1.0;
        // (k-1) Phi is even; its odd extension is increasing and onto.
        const auto root = solve_increasing(
            [&](double x) {
                const double y = km1 * phi.value(x);
                return x < 0.0 ? -y : y;
            },
            cert.E, 1e-14 * std::max(1.0, cert.E), 200, 1e-14);
        cert.r1 = std::abs(root.x);
    } else {
        cert.branch = BoundBranch::Direct;
        cert.E = phi.prime(cert.C) + T0;
        cert.r1 = phi.psi(cert.E);
    }
    if (cert.r1 == 0.0) {
        cert.degenerate = true;
        cert.r1 = cert.C;
    }
    return cert;
}

inline BoundCertificate compute_certificate(const ProblemInstance& p) {
    return r1_bound(p.phi, r0_bound(p), p.f.S0, p.f.T0);
}

struct CertReport {
    static constexpr double kSlack = 1e-9;

    double sup_u = 0.0;
    double sup_du = 0.0;
    double r0 = 0.0;
    double r1 = 0.0;
    bool u_ok = true;
    bool du_ok = true;
    double witness_t_u = 0.0;  // node where |u| is largest
    double witness_t_du = 0.0;

    bool passed() const { return u_ok && du_ok; }
};

inline CertReport certify(const C1GridFunction& g, const BoundCertificate& cert) {
    CertReport rep;
    rep.r0 = cert.r0;
    rep.r1 = cert.r1;
    for (int j = 0; j <= g.intervals(); ++j) {
        if (std::abs(g.u[j]) > rep.sup_u) {
            rep.sup_u = std::abs(g.u[j]);
            rep.witness_t_u = g.u.t(j);
        }
        if (std::abs(g.du[j]) > rep.sup_du) {
            rep.sup_du = std::abs(g.du[j]);
            rep.witness_t_du = g.u.t(j);
        }
    }
    rep.u_ok = rep.sup_u <= cert.r0 + CertReport::kSlack;
    rep.du_ok = rep.sup_du <= cert.r1 + CertReport::kSlack;
    return rep;
}

}  // namespace phibvp
