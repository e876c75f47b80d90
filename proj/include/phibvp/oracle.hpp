#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phibvp/apriori.hpp"
#include "phibvp/errors.hpp"
#include "phibvp/grid_fn.hpp"
#include "phibvp/phi_model.hpp"
#include "phibvp/problem.hpp"

// Verification harness: an initial-value shooting solver that shares no code
// path with the fixed-point operator, and manufactured problems with known
// exact solutions.

namespace phibvp::oracle {

inline constexpr double kShootingTolerance = 1e-10;

struct ShootingResult {
    C1GridFunction u;
    double free_param = 0.0;  // w(0) = phi(u'(0))
    double bc_residual = 0.0;
    int rk4_steps = 0;
};

namespace detail {

struct State {
    double u = 0.0;
    double w = 0.0;  // phi(u')
};

struct Trajectory {
    std::vector<State> states;
    bool finite = true;
};

// Classical RK4 on u' = psi(w), w' = lambda f(t, u, psi(w)).
inline Trajectory integrate(const ProblemInstance& p, double lambda, State s0, int steps,
                            bool keep) {
    Trajectory tr;
    if (keep) tr.states.reserve(steps + 1);
    if (keep) tr.states.push_back(s0);
    const double h = 1.0 / steps;
    auto rhs = [&](double t, const State& s) {
        const double du = p.phi.psi(s.w);
        const double dw = lambda == 0.0 ? 0.0 : lambda * eval_f(p, t, s.u, du);
        return State{du, dw};
    };
    State s = s0;
    try {
        for (int i = 0; i < steps; ++i) {
            const double t = static_cast<double>(i) / steps;
            const State k1 = rhs(t, s);
            const State k2 = rhs(t + 0.5 * h, {s.u + 0.5 * h * k1.u, s.w + 0.5 * h * k1.w});
            const State k3 = rhs(t + 0.5 * h, {s.u + 0.5 * h * k2.u, s.w + 0.5 * h * k2.w});
            const State k4 = rhs(t + h, {s.u + h * k3.u, s.w + h * k3.w});
            s.u += h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
            s.w += h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
            if (!std::isfinite(s.u) || !std::isfinite(s.w)) {
                tr.finite = false;
                break;
            }
            if (keep) tr.states.push_back(s);
        }
    } catch (const DomainError&) {
        tr.finite = false;
    }
    if (!keep) tr.states.push_back(s);
    return tr;
}

inline State initial_state(const ProblemInstance& p, double w0) {
    if (p.bc.is_dirichlet()) return {p.bc.as_dirichlet().A, w0};
    const SturmLiouville& s = p.bc.as_sturm_liouville();
    return {(s.beta * p.phi.psi(w0) - s.A) / s.alpha, w0};
}

inline double right_mismatch(const ProblemInstance& p, const State& end) {
    if (p.bc.is_dirichlet()) return end.u - p.bc.as_dirichlet().B;
    const SturmLiouville& s = p.bc.as_sturm_liouville();
    return s.a * end.u + s.b * p.phi.psi(end.w) - s.B;
}

}  // namespace detail

/**
 * Solves the lambda-scaled problem by shooting on w(0) = phi(u'(0)).
 *
 * The search interval starts at +-phi(2 r0 + 1) from the a priori radius and
 * is doubled until the right-end mismatch changes sign (NoBracket after 60
 * doublings). Bisection narrows the bracket, then a safeguarded secant step
 * finishes. A diverging trajectory counts as a mismatch with the sign of w(0).
 */
inline ShootingResult shooting_solve(const ProblemInstance& p, double lambda, int substeps = 4) {
    const int steps = substeps * p.grid_n;
    const double scale = std::max(1.0, p.bc.is_dirichlet() ? std::abs(p.bc.as_dirichlet().B)
                                                          : std::abs(p.bc.as_sturm_liouville().B));
    auto shot = [&](double w0) {
        const auto tr = detail::integrate(p, lambda, detail::initial_state(p, w0), steps, false);
        if (!tr.finite) return w0 < 0.0 ? -HUGE_VAL : HUGE_VAL;
        return detail::right_mismatch(p, tr.states.back());
    };

    const double r0 = r0_bound(p);
    double lo = -p.phi.prime(2.0 * r0 + 1.0);
    double hi = -lo;
    double f_lo = shot(lo);
    double f_hi = shot(hi);
    int expansions = 0;
    while (!((f_lo <= 0.0 && f_hi >= 0.0) || (f_lo >= 0.0 && f_hi <= 0.0))) {
        if (++expansions > 60) {
            throw NoBracket("shooting map shows no sign change on [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
        }
        lo *= 2.0;
        hi *= 2.0;
        f_lo = shot(lo);
        f_hi = shot(hi);
    }

    const double tol = kShootingTolerance * scale;
    double best = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
    double f_best = std::min(std::abs(f_lo), std::abs(f_hi));

    auto narrow = [&](double mid, double f_mid) {
        if (std::abs(f_mid) < f_best) {
            best = mid;
            f_best = std::abs(f_mid);
        }
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    };

    // Bisect while the trajectory is far from the target or the bracket is wide.
    for (int it = 0; it < 200 && f_best > tol; ++it) {
        if (std::isfinite(f_lo) && std::isfinite(f_hi) &&
            (hi - lo) <= 1e-6 * std::max(1.0, std::abs(best))) {
            break;
        }
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        narrow(mid, shot(mid));
    }
    // Secant refinement, kept inside the bracket.
    for (int it = 0; it < 100 && f_best > tol; ++it) {
        double next = 0.5 * (lo + hi);
        if (std::isfinite(f_lo) && std::isfinite(f_hi) && f_hi != f_lo) {
            const double s = hi - f_hi * (hi - lo) / (f_hi - f_lo);
            if (s > std::min(lo, hi) && s < std::max(lo, hi)) next = s;
        }
        if (next == lo || next == hi) break;
        narrow(next, shot(next));
    }

    if (!(f_best <= tol)) {
        throw NoBracket("shooting stalled with right-end mismatch " + std::to_string(f_best));
    }
    const auto tr = detail::integrate(p, lambda, detail::initial_state(p, best), steps, true);
    if (!tr.finite) throw NoBracket("shooting trajectory diverged at the matched parameter");
    const int n = p.grid_n;
    std::vector<double> u(n + 1);
    std::vector<double> du(n + 1);
    for (int j = 0; j <= n; ++j) {
        const auto& s = tr.states[static_cast<std::size_t>(j) * substeps];
        u[j] = s.u;
        du[j] = p.phi.psi(s.w);
    }
    ShootingResult out;
    out.u = C1GridFunction(GridFunction(std::move(u)), GridFunction(std::move(du)));
    out.free_param = best;
    out.bc_residual = f_best;
    out.rk4_steps = steps;
    return out;
}

struct Comparison {
    double sup_err_u = 0.0;
    double sup_err_du = 0.0;
};

inline Comparison compare(const C1GridFunction& num, const C1GridFunction& ref) {
    if (num.intervals() != ref.intervals()) {
        throw GridMismatch("compare: n=" + std::to_string(num.intervals()) + " vs n=" +
                           std::to_string(ref.intervals()));
    }
    return {sup_distance(num.u, ref.u), sup_distance(num.du, ref.du)};
}

/**
 * Analytic test profiles u*(t) with first and second derivatives, each also
 * rendered in the right-hand-side expression language.
 */
class Profile {
public:
    enum class Kind { Polynomial, Sine, Sinh };

    // u = sum_k coeffs[k] t^k, degree <= 4
    static Profile polynomial(std::vector<double> coeffs, std::string name = "polynomial") {
        if (coeffs.empty() || coeffs.size() > 5) {
            throw InvalidProblem("profile", "polynomial profiles have degree 0..4");
        }
        Profile p;
        p.kind_ = Kind::Polynomial;
        p.coeffs_ = std::move(coeffs);
        p.name_ = std::move(name);
        return p;
    }

    // u = amplitude sin(k pi t)
    static Profile sine(double k = 1.0, double amplitude = 1.0) {
        Profile p;
        p.kind_ = Kind::Sine;
        p.k_ = k;
        p.amplitude_ = amplitude;
        p.name_ = "sin";
        return p;
    }

    // u = amplitude sinh(t) / sinh(1)
    static Profile sinh_scaled(double amplitude = 1.0) {
        Profile p;
        p.kind_ = Kind::Sinh;
        p.amplitude_ = amplitude;
        p.name_ = "sinh";
        return p;
    }

    // linear, quadratic, cubic, quartic, sin, sinh
    static std::optional<Profile> by_name(const std::string& name) {
        if (name == "linear") return polynomial({0.0, 1.0}, name);
        if (name == "quadratic") return polynomial({0.0, 0.0, 0.5}, name);
        if (name == "cubic") return polynomial({0.0, 1.0, 0.0, 1.0 / 3.0}, name);
        if (name == "quartic") return polynomial({0.0, 0.5, 0.0, 0.0, 0.25}, name);
        if (name == "sin") return sine();
        if (name == "sinh") return sinh_scaled();
        return std::nullopt;
    }

    static constexpr std::array<const char*, 6> kNames = {"linear", "quadratic", "cubic",
                                                          "quartic", "sin", "sinh"};

    const std::string& name() const { return name_; }
    Kind kind() const { return kind_; }

    double value(double t) const { return eval(t, 0); }
    double d1(double t) const { return eval(t, 1); }
    double d2(double t) const { return eval(t, 2); }

    bool second_derivative_vanishes() const {
        return kind_ == Kind::Polynomial && coeffs_.size() <= 2;
    }

    std::string value_expr() const { return render(0); }
    std::string d1_expr() const { return render(1); }
    std::string d2_expr() const { return render(2); }

private:
    static constexpr double kPi = 3.14159265358979323846;

    static std::string num(double x) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    }

    double eval(double t, int order) const {
        switch (kind_) {
            case Kind::Polynomial: {
                double sum = 0.0;
                for (std::size_t k = order; k < coeffs_.size(); ++k) {
                    double c = coeffs_[k];
                    for (int m = 0; m < order; ++m) c *= static_cast<double>(k - m);
                    sum += c * std::pow(t, static_cast<double>(k - order));
                }
                return sum;
            }
            case Kind::Sine: {
                const double w = k_ * kPi;
                if (order == 0) return amplitude_ * std::sin(w * t);
                if (order == 1) return amplitude_ * w * std::cos(w * t);
                return -amplitude_ * w * w * std::sin(w * t);
            }
            case Kind::Sinh: {
                const double s = amplitude_ / std::sinh(1.0);
                return order == 1 ? s * std::cosh(t) : s * std::sinh(t);
            }
        }
        return 0.0;
    }

    std::string render(int order) const {
        switch (kind_) {
            case Kind::Polynomial: {
                std::string out;
                for (std::size_t k = order; k < coeffs_.size(); ++k) {
                    double c = coeffs_[k];
                    for (int m = 0; m < order; ++m) c *= static_cast<double>(k - m);
                    if (c == 0.0) continue;
                    if (!out.empty()) out += " + ";
                    const std::size_t power = k - order;
                    out += "(" + num(c) + ")";
                    if (power >= 1) out += "*t";
                    if (power >= 2) out += "^" + std::to_string(power);
                }
                return out.empty() ? "0" : out;
            }
            case Kind::Sine: {
                const double w = k_ * kPi;
                if (order == 0) return num(amplitude_) + "*sin(" + num(w) + "*t)";
                if (order == 1) return num(amplitude_ * w) + "*cos(" + num(w) + "*t)";
                return "(" + num(-amplitude_ * w * w) + ")*sin(" + num(w) + "*t)";
            }
            case Kind::Sinh: {
                const double s = 0.5 * amplitude_ / std::sinh(1.0);
                if (order == 1) return num(s) + "*(exp(t) + exp(-t))";
                return num(s) + "*(exp(t) - exp(-t))";
            }
        }
        return "0";
    }

    Kind kind_ = Kind::Polynomial;
    std::vector<double> coeffs_;
    double k_ = 1.0;
    double amplitude_ = 1.0;
    std::string name_;
};

enum class BcKind { Dirichlet, SturmLiouville };

struct ManufacturedProblem {
    ProblemInstance problem;
    C1GridFunction exact;
    Profile profile;
};

/**
 * Builds f(t, x, v) = g(t) + (x - u*(t)) with g = d/dt phi(u*'(t)) =
 * Phi''(u*') u*'', so u* is an exact solution. The x-coupling gives the sign
 * condition with R = 1 + max |g - u*|; f does not depend on v, so S0 = 0 and
 * T0 = max |f| over the r0-box.
 *
 * For exponents below 2, Phi'' is singular where u*' = 0. Profiles whose
 * slope vanishes inside (0, 1] are rejected; a zero slope at t = 0 only is
 * accepted and marks the problem singular at the left end.
 */
inline ManufacturedProblem manufactured_problem(const PhiModel& phi, const Profile& profile,
                                                BcKind bc_kind, int grid_n = 200) {
    const PhiSpec& spec = phi.spec();
    const bool quadratic = phi.is_quadratic();
    const bool flat = profile.second_derivative_vanishes();

    constexpr int kScan = 4000;
    bool singular = false;
    if (!quadratic && !flat) {
        for (int i = 0; i <= kScan; ++i) {
            const double t = static_cast<double>(i) / kScan;
            const double d = profile.d1(t);
            const double d_next = i < kScan ? profile.d1(static_cast<double>(i + 1) / kScan) : d;
            const bool zero_here = std::abs(d) < 1e-12;
            if (i == 0 && zero_here) {
                singular = true;
                continue;
            }
            if (zero_here || (i < kScan && d * d_next < 0.0)) {
                throw InvalidProblem("profile", "'" + profile.name() +
                                                    "' has a vanishing slope inside (0,1]; "
                                                    "not admissible with exponents below 2");
            }
        }
    }

    // Phi''(y) = sum_i w_i p_i (p_i - 1) |y|^{p_i - 2}
    auto phi2 = [&](double y) {
        double s = 0.0;
        for (std::size_t i = 0; i < spec.terms(); ++i) {
            const double p = spec.exponents()[i];
            const double c = spec.weights()[i] * p * (p - 1.0);
            s += p == 2.0 ? c : c * std::pow(std::abs(y), p - 2.0);
        }
        return s;
    };
    auto g = [&](double t) { return flat ? 0.0 : phi2(profile.d1(t)) * profile.d2(t); };

    std::string g_src = "0";
    if (!flat) {
        std::string terms;
        for (std::size_t i = 0; i < spec.terms(); ++i) {
            const double p = spec.exponents()[i];
            char c[40];
            std::snprintf(c, sizeof c, "%.17g", spec.weights()[i] * p * (p - 1.0));
            if (!terms.empty()) terms += " + ";
            if (p == 2.0) {
                terms += c;
            } else {
                char e[40];
                std::snprintf(e, sizeof e, "%.17g", p - 2.0);
                terms += std::string(c) + "*abs(" + profile.d1_expr() + ")^(" + e + ")";
            }
        }
        g_src = "(" + terms + ")*(" + profile.d2_expr() + ")";
    }
    const std::string f_src = g_src + " + x - (" + profile.value_expr() + ")";

    const double t_lo = singular ? 1.0 / grid_n : 0.0;
    double gap = 0.0;
    for (int i = 0; i <= kScan; ++i) {
        const double t = t_lo + (1.0 - t_lo) * i / kScan;
        gap = std::max(gap, std::abs(g(t) - profile.value(t)));
    }
    const double R = 1.0 + gap;

    std::optional<BoundaryConditions> bc;
    if (bc_kind == BcKind::Dirichlet) {
        bc = BoundaryConditions::dirichlet(profile.value(0.0), profile.value(1.0));
    } else {
        bc = BoundaryConditions::sturm_liouville(1.0, 1.0, -profile.value(0.0) + profile.d1(0.0),
                                                 1.0, 1.0, profile.value(1.0) + profile.d1(1.0));
    }

    // T0 needs r0, which needs only R and the boundary data.
    RhsFunction f = RhsFunction::from_source(f_src, R, 0.0, 0.0);
    ProblemInstance problem(phi, *bc, f, grid_n, singular);
    problem.f.T0 = 1.01 * gap + r0_bound(problem);

    C1GridFunction exact(GridFunction::sample(grid_n, [&](double t) { return profile.value(t); }),
                         GridFunction::sample(grid_n, [&](double t) { return profile.d1(t); }));
    return {std::move(problem), std::move(exact), profile};
}

}  // namespace phibvp::oracle
