#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <variant>

#include "phibvp/errors.hpp"
#include "phibvp/expr.hpp"
#include "phibvp/phi_model.hpp"

namespace phibvp {

// u(0) = A, u(1) = B
struct Dirichlet {
    double A = 0.0;
    double B = 0.0;
};

// -alpha u(0) + beta u'(0) = A,  a u(1) + b u'(1) = B,  alpha, beta, a, b > 0
struct SturmLiouville {
    double alpha = 1.0;
    double beta = 1.0;
    double A = 0.0;
    double a = 1.0;
    double b = 1.0;
    double B = 0.0;
};

class BoundaryConditions {
public:
    static BoundaryConditions dirichlet(double A, double B) {
        require_finite("bc.A", A);
        require_finite("bc.B", B);
        return BoundaryConditions(Dirichlet{A, B});
    }

    static BoundaryConditions sturm_liouville(double alpha, double beta, double A, double a,
                                              double b, double B) {
        require_positive("bc.alpha", alpha);
        require_positive("bc.beta", beta);
        require_positive("bc.a", a);
        require_positive("bc.b", b);
        require_finite("bc.A", A);
        require_finite("bc.B", B);
        return BoundaryConditions(SturmLiouville{alpha, beta, A, a, b, B});
    }

    static BoundaryConditions sturm_liouville(const SturmLiouville& s) {
        return sturm_liouville(s.alpha, s.beta, s.A, s.a, s.b, s.B);
    }

    bool is_dirichlet() const { return std::holds_alternative<Dirichlet>(variant_); }
    const Dirichlet& as_dirichlet() const { return std::get<Dirichlet>(variant_); }
    const SturmLiouville& as_sturm_liouville() const { return std::get<SturmLiouville>(variant_); }
    const std::variant<Dirichlet, SturmLiouville>& variant() const { return variant_; }

    const char* kind() const { return is_dirichlet() ? "dirichlet" : "sturm_liouville"; }

private:
    explicit BoundaryConditions(std::variant<Dirichlet, SturmLiouville> v) : variant_(v) {}

    static void require_finite(const char* field, double x) {
        if (!std::isfinite(x)) throw InvalidProblem(field, "must be finite");
    }
    static void require_positive(const char* field, double x) {
        if (!std::isfinite(x) || !(x > 0.0)) throw InvalidProblem(field, "must be positive");
    }

    std::variant<Dirichlet, SturmLiouville> variant_;
};

/**
 * Right-hand side f(t, x, v) with the growth data the a priori bounds need:
 * the sign radius R and scalar bounds S0, T0 valid on the certified box.
 */
struct RhsFunction {
    expr::Ast expr;
    std::string source;
    double R = 1.0;
    double S0 = 0.0;
    double T0 = 0.0;
    std::optional<double> v_box;

    static RhsFunction from_source(std::string src, double R, double S0, double T0,
                                   std::optional<double> v_box = std::nullopt) {
        RhsFunction f;
        f.expr = expr::parse(src);
        f.source = std::move(src);
        f.R = R;
        f.S0 = S0;
        f.T0 = T0;
        f.v_box = v_box;
        f.validate();
        return f;
    }

    void validate() const {
        if (!std::isfinite(R) || !(R > 0.0)) throw InvalidProblem("f.R", "must be positive");
        if (!std::isfinite(S0) || S0 < 0.0) throw InvalidProblem("f.S0", "must be non-negative");
        if (!std::isfinite(T0) || T0 < 0.0) throw InvalidProblem("f.T0", "must be non-negative");
        if (v_box && (!std::isfinite(*v_box) || !(*v_box > 0.0))) {
            throw InvalidProblem("f.v_box", "must be positive");
        }
    }
};

struct ProblemInstance {
    static constexpr int kDefaultGridN = 200;

    PhiModel phi;
    BoundaryConditions bc;
    RhsFunction f;
    int grid_n = kDefaultGridN;
    // f may be undefined at t = 0 (integrable singularity). Evaluation at the
    // left node then uses one-sided extrapolation and validation samples stay
    // in [1/grid_n, 1].
    bool singular_at_zero = false;

    ProblemInstance(PhiModel phi_, BoundaryConditions bc_, RhsFunction f_,
                    int grid_n_ = kDefaultGridN, bool singular_at_zero_ = false)
        : phi(std::move(phi_)), bc(std::move(bc_)), f(std::move(f_)), grid_n(grid_n_),
          singular_at_zero(singular_at_zero_) {
        f.validate();
        validate_grid(grid_n);
    }

    static void validate_grid(int n) {
        if (n < 16 || n % 2 != 0) throw InvalidProblem("grid_n", "must be even and at least 16");
    }

    ProblemInstance with_grid(int n) const {
        ProblemInstance copy = *this;
        validate_grid(n);
        copy.grid_n = n;
        return copy;
    }

    // Lower end of the t-range used for sampled validation.
    double t_min() const { return singular_at_zero ? 1.0 / grid_n : 0.0; }
};

inline double eval_f(const ProblemInstance& p, double t, double x, double v) {
    const double r = p.f.expr.eval(t, x, v);
    if (!std::isfinite(r)) {
        throw DomainError("non-finite value of f", p.f.expr.nodes()[p.f.expr.root()].position);
    }
    return r;
}

struct SignCheck {
    bool ok = true;
    double witness_t = 0.0;
    double witness_x = 0.0;
    std::string error;  // set when f could not be evaluated
    explicit operator bool() const { return ok; }
};

/**
 * Samples x f(t, x, 0) > 0 on n_t times in [0,1] and |x| in (R, 2R] (n_x
 * points per sign). Only (R, 2R] is sampled, so a pass is not a proof.
 */
inline SignCheck check_sign_condition(const ProblemInstance& p, int n_t, int n_x) {
    SignCheck out;
    const double R = p.f.R;
    const double t0 = p.t_min();
    for (int i = 0; i < n_t; ++i) {
        const double t = i == n_t - 1 ? 1.0 : t0 + (1.0 - t0) * i / (n_t - 1);
        for (int k = 1; k <= n_x; ++k) {
            const double mag = R + R * k / n_x;
            for (double x : {mag, -mag}) {
                try {
                    if (!(x * eval_f(p, t, x, 0.0) > 0.0)) {
                        return {false, t, x, {}};
                    }
                } catch (const DomainError& e) {
                    return {false, t, x, e.what()};
                }
            }
        }
    }
    return out;
}

namespace detail {

// Van der Corput radical inverse in the given prime base.
inline double radical_inverse(unsigned long long i, unsigned base) {
    double inv = 1.0 / base;
    double f = inv;
    double r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

}  // namespace detail

struct GrowthCheck {
    bool ok = true;
    double S0 = 0.0;
    double T0 = 0.0;
    double r = 0.0;
    double v_box = 0.0;
    int samples = 0;
    // Worst sample: largest |f| - (S0 (phi(v)v - Phi(v)) + T0).
    double witness_t = 0.0;
    double witness_x = 0.0;
    double witness_v = 0.0;
    double witness_excess = 0.0;
    // Smallest T0 that passes every sample with the declared S0.
    double min_T0 = 0.0;
    // Smallest value of S0 (phi(v)v - Phi(v)) seen; never negative.
    double min_s_term = 0.0;
    std::string error;
};

/**
 * Checks the declared growth bound |f| <= S0 (phi(v)v - Phi(v)) + T0 on
 * [0,1] x [-r,r] x [-v_box,v_box]. Box corners and face centres come first,
 * then a Halton sequence (bases 2, 3, 5) fills the rest; the sample set is
 * fixed, so repeated calls give identical reports.
 */
inline GrowthCheck estimate_growth_constants(const ProblemInstance& p, double r, int samples,
                                             std::optional<double> v_box = std::nullopt) {
    constexpr unsigned long long kHaltonSeed = 1;

    GrowthCheck out;
    out.S0 = p.f.S0;
    out.T0 = p.f.T0;
    out.r = r;
    out.v_box = v_box.value_or(p.f.v_box.value_or(10.0 * (1.0 + p.f.R)));
    out.witness_excess = -HUGE_VAL;
    out.min_s_term = HUGE_VAL;

    const double t0 = p.t_min();
    double worst_abs_minus_s = 0.0;

    auto visit = [&](double t, double x, double v) {
        ++out.samples;
        double fv = 0.0;
        try {
            fv = std::abs(eval_f(p, t, x, v));
        } catch (const DomainError& e) {
            if (out.error.empty()) {
                out.ok = false;
                out.error = e.what();
                out.witness_t = t;
                out.witness_x = x;
                out.witness_v = v;
                out.witness_excess = HUGE_VAL;
            }
            return;
        }
        const double s_term = out.S0 * (p.phi.prime(v) * v - p.phi.value(v));
        out.min_s_term = std::min(out.min_s_term, s_term);
        const double bound = s_term + out.T0;
        const double excess = fv - bound;
        worst_abs_minus_s = std::max(worst_abs_minus_s, fv - s_term);
        if (excess > out.witness_excess) {
            out.witness_excess = excess;
            out.witness_t = t;
            out.witness_x = x;
            out.witness_v = v;
        }
        if (excess > 1e-12 * std::max(1.0, bound)) out.ok = false;
    };

    const double ts[] = {t0, 1.0, 0.5 * (t0 + 1.0)};
    const double xs[] = {r, -r, 0.0};
    const double vs[] = {out.v_box, -out.v_box, 0.0};
    for (double x : xs) {
        for (double t : ts) {
            for (double v : vs) visit(t, x, v);
        }
    }
    for (unsigned long long i = kHaltonSeed; out.samples < samples; ++i) {
        const double t = t0 + (1.0 - t0) * detail::radical_inverse(i, 2);
        const double x = -r + 2.0 * r * detail::radical_inverse(i, 3);
        const double v = -out.v_box + 2.0 * out.v_box * detail::radical_inverse(i, 5);
        visit(t, x, v);
    }
    out.min_T0 = worst_abs_minus_s;
    if (out.min_s_term == HUGE_VAL) out.min_s_term = 0.0;
    return out;
}

}  // namespace phibvp
