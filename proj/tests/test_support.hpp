#pragma once

// Shared helpers for the unit and acceptance suites. Everything named
// `reference_*` is an independent oracle: it does not call the code path it
// is used to check.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "phibvp/grid_fn.hpp"
#include "phibvp/phi_model.hpp"
#include "phibvp/problem.hpp"

namespace phibvp::testkit {

inline constexpr double kPi = 3.14159265358979323846;

inline PhiModel quadratic_phi() { return PhiModel::power_sum({2.0}, {0.5}); }

inline ProblemInstance make_problem(const std::string& f, PhiModel phi, BoundaryConditions bc,
                                    double R = 1.0, double S0 = 0.0, double T0 = 1.0,
                                    int n = 200) {
    return ProblemInstance(std::move(phi), bc, RhsFunction::from_source(f, R, S0, T0), n);
}

// phi for a power sum evaluated term by term, without PhiModel.
inline double reference_phi_prime(const std::vector<double>& p, const std::vector<double>& w,
                                  double x) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += w[i] * p[i] * std::pow(std::abs(x), p[i] - 1);
    return x < 0 ? -s : s;
}

// Inverse of an increasing function by 200 fixed bisection steps on [-lim, lim].
template <typename Fn>
double reference_inverse(Fn&& fn, double y, double lim = 1e6) {
    double lo = -lim, hi = lim;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (fn(mid) < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Affine u = c + m t satisfying the boundary conditions (psi-independent).
struct Affine {
    double c = 0.0;
    double m = 0.0;
};

inline Affine reference_affine(const BoundaryConditions& bc) {
    if (bc.is_dirichlet()) {
        const auto& d = bc.as_dirichlet();
        return {d.A, d.B - d.A};
    }
    const auto& s = bc.as_sturm_liouville();
    // -alpha c + beta m = A,  a (c + m) + b m = B
    const double det = -s.alpha * (s.a + s.b) - s.beta * s.a;
    const double c = (s.A * (s.a + s.b) - s.beta * s.B) / det;
    const double m = (-s.alpha * s.B - s.a * s.A) / det;
    return {c, m};
}

// Random smooth function: sum of a few sines and cosines with random coefficients.
struct RandomSmooth {
    std::vector<double> a, b;

    static RandomSmooth draw(std::mt19937_64& rng, int modes = 4, double scale = 3.0) {
        std::uniform_real_distribution<double> U(-scale, scale);
        RandomSmooth r;
        for (int k = 0; k < modes; ++k) {
            r.a.push_back(U(rng));
            r.b.push_back(U(rng));
        }
        return r;
    }

    double operator()(double t) const {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            s += a[k] * std::sin((k + 1) * kPi * t) + b[k] * std::cos(k * kPi * t);
        }
        return s;
    }

    // Upper bound on |second derivative|.
    double d2_bound() const {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            s += std::abs(a[k]) * std::pow((k + 1) * kPi, 2) + std::abs(b[k]) * std::pow(k * kPi, 2);
        }
        return s;
    }
};

inline GridFunction random_grid_function(std::mt19937_64& rng, int n, double scale = 5.0) {
    std::uniform_real_distribution<double> U(-scale, scale);
    std::vector<double> v(n + 1);
    for (double& x : v) x = U(rng);
    return GridFunction(std::move(v));
}

}  // namespace phibvp::testkit
