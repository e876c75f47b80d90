#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phibvp/errors.hpp"
#include "phibvp/root_finding.hpp"

namespace phibvp {

/**
 * Power-sum convex function Phi(x) = sum_i w_i |x|^{p_i} with 1 < p_i <= 2.
 *
 * The exponent cap keeps psi = (Phi')^{-1} continuously differentiable at the
 * origin. Weights default to 1/p_i, which gives phi(x) = sum_i |x|^{p_i-1} sign(x).
 */
class PhiSpec {
public:
    static PhiSpec power_sum(std::vector<double> exponents, std::vector<double> weights = {}) {
        if (exponents.empty()) {
            throw InvalidProblem("phi.exponents", "at least one exponent is required");
        }
        if (weights.empty()) {
            weights.reserve(exponents.size());
            for (double p : exponents) weights.push_back(1.0 / p);
        }
        if (weights.size() != exponents.size()) {
            throw InvalidProblem("phi.weights", "expected " + std::to_string(exponents.size()) +
                                                    " weights, got " +
                                                    std::to_string(weights.size()));
        }
        for (std::size_t i = 0; i < exponents.size(); ++i) {
            const double p = exponents[i];
            if (!std::isfinite(p) || !(p > 1.0) || p > 2.0) {
                throw InvalidProblem("phi.exponents[" + std::to_string(i) + "]",
                                     "exponent must satisfy 1 < p <= 2");
            }
            if (!std::isfinite(weights[i]) || !(weights[i] > 0.0)) {
                throw InvalidProblem("phi.weights[" + std::to_string(i) + "]",
                                     "weight must be positive");
            }
        }
        return PhiSpec(std::move(exponents), std::move(weights));
    }

    std::span<const double> exponents() const { return exponents_; }
    std::span<const double> weights() const { return weights_; }
    std::size_t terms() const { return exponents_.size(); }

private:
    PhiSpec(std::vector<double> p, std::vector<double> w)
        : exponents_(std::move(p)), weights_(std::move(w)) {}

    std::vector<double> exponents_;
    std::vector<double> weights_;
};

// Termwise: phi(x) x = sum w_i p_i |x|^{p_i} >= (min p_i) Phi(x).
inline double k_phi_of(const PhiSpec& spec) {
    return *std::min_element(spec.exponents().begin(), spec.exponents().end());
}

class PhiModel {
public:
    static constexpr double kDefaultPsiTolerance = 1e-12;

    explicit PhiModel(PhiSpec spec, std::optional<double> k_phi = std::nullopt,
                      double psi_tolerance = kDefaultPsiTolerance)
        : spec_(std::move(spec)),
          k_phi_(k_phi.value_or(k_phi_of(spec_))),
          psi_tolerance_(psi_tolerance) {
        if (!std::isfinite(k_phi_) || !(k_phi_ > 1.0)) {
            throw InvalidProblem("phi.k_phi", "k_phi must be greater than 1");
        }
        if (!(psi_tolerance_ > 0.0)) {
            throw InvalidProblem("phi.psi_tolerance", "tolerance must be positive");
        }
    }

    static PhiModel power_sum(std::vector<double> exponents, std::vector<double> weights = {}) {
        return PhiModel(PhiSpec::power_sum(std::move(exponents), std::move(weights)));
    }

    // Phi(x)
    double value(double x) const {
        const double ax = std::abs(x);
        double sum = 0.0;
        for (std::size_t i = 0; i < spec_.terms(); ++i) {
            sum += spec_.weights()[i] * std::pow(ax, spec_.exponents()[i]);
        }
        return sum;
    }

    // phi(x) = Phi'(x)
    double prime(double x) const {
        const double ax = std::abs(x);
        double sum = 0.0;
        for (std::size_t i = 0; i < spec_.terms(); ++i) {
            const double p = spec_.exponents()[i];
            sum += spec_.weights()[i] * p * std::pow(ax, p - 1.0);
        }
        return x < 0.0 ? -sum : sum;
    }

    // psi = phi^{-1}. Closed form for a single term, bisection otherwise.
    double psi(double w) const {
        if (spec_.terms() == 1) {
            const double p = spec_.exponents()[0];
            const double scale = spec_.weights()[0] * p;
            if (p == 2.0) return w / scale;
            const double x = std::pow(std::abs(w) / scale, 1.0 / (p - 1.0));
            return w < 0.0 ? -x : x;
        }
        if (w == 0.0) return 0.0;
        // phi is odd, so solve on |w| and restore the sign. The bracket is
        // narrowed a thousand times below the advertised tolerance: psi feeds
        // every quadrature node of the constants solve, whose own target is
        // of the same order.
        const double aw = std::abs(w);
        const auto root = solve_increasing([this](double x) { return prime(x); }, aw,
                                           1e-3 * psi_tolerance_ * std::max(1.0, aw), 200,
                                           1e-3 * psi_tolerance_);
        return w < 0.0 ? -root.x : root.x;
    }

    double k_phi() const { return k_phi_; }
    double psi_tolerance() const { return psi_tolerance_; }
    const PhiSpec& spec() const { return spec_; }

    // True when every exponent equals 2, i.e. Phi is a multiple of x^2 and psi is linear.
    bool is_quadratic() const {
        return std::all_of(spec_.exponents().begin(), spec_.exponents().end(),
                           [](double p) { return p == 2.0; });
    }

private:
    PhiSpec spec_;
    double k_phi_;
    double psi_tolerance_;
};

struct NamedPhi {
    const char* name;
    PhiModel model;
};

// The built-in power sums: single exponents across (1, 2] and a few mixtures.
inline std::vector<NamedPhi> builtin_power_sums() {
    return {{"x^2/2", PhiModel::power_sum({2.0})},
            {"p=1.75", PhiModel::power_sum({1.75})},
            {"p=1.5", PhiModel::power_sum({1.5})},
            {"p=1.25", PhiModel::power_sum({1.25})},
            {"p=1.1", PhiModel::power_sum({1.1})},
            {"p=2,1.5", PhiModel::power_sum({2.0, 1.5})},
            {"p=2,1.5 unit weights", PhiModel::power_sum({2.0, 1.5}, {1.0, 1.0})},
            {"p=2,1.5,1.2", PhiModel::power_sum({2.0, 1.5, 1.2})}};
}

inline double phi_value(const PhiModel& m, double x) { return m.value(x); }
inline double phi_prime(const PhiModel& m, double x) { return m.prime(x); }
inline double psi(const PhiModel& m, double w) { return m.psi(w); }

struct AssumptionReport {
    bool zero_conditions = true;    // Phi(0) = phi(0) = 0
    bool monotone = true;           // phi strictly increasing on the samples
    bool nabla2 = true;             // k_phi Phi(x) <= phi(x) x on the samples
    bool psi_roundtrip = true;      // |psi(phi(x)) - x| <= tol max(1,|x|)
    bool superlinear = true;        // Phi(x)/|x| -> inf; symbolic for power sums
    bool superlinear_assumed = true;

    double nabla2_worst_gap = 0.0;  // max of k Phi(x) - phi(x) x
    double nabla2_witness = 0.0;
    double psi_roundtrip_max_error = 0.0;
    double monotone_witness = 0.0;

    bool all_pass() const { return zero_conditions && monotone && nabla2 && psi_roundtrip; }
};

/**
 * Checks the convexity-family assumptions on a set of sample points.
 * Failures are reported, never thrown.
 */
inline AssumptionReport check_assumptions(const PhiModel& m, std::span<const double> sample_xs) {
    AssumptionReport report;
    report.zero_conditions = m.value(0.0) == 0.0 && m.prime(0.0) == 0.0;
    report.nabla2_worst_gap = -HUGE_VAL;

    std::vector<double> xs(sample_xs.begin(), sample_xs.end());
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (xs[i] == xs[i - 1]) continue;
        if (!(m.prime(xs[i - 1]) < m.prime(xs[i]))) {
            if (report.monotone) report.monotone_witness = xs[i];
            report.monotone = false;
        }
    }

    for (double x : sample_xs) {
        const double lhs = m.k_phi() * m.value(x);
        const double rhs = m.prime(x) * x;
        const double gap = lhs - rhs;
        if (gap > report.nabla2_worst_gap) {
            report.nabla2_worst_gap = gap;
            report.nabla2_witness = x;
        }
        if (gap > 1e-12 * std::max(1.0, std::abs(rhs))) report.nabla2 = false;

        const double err = std::abs(m.psi(m.prime(x)) - x);
        report.psi_roundtrip_max_error = std::max(report.psi_roundtrip_max_error, err);
        if (err > m.psi_tolerance() * std::max(1.0, std::abs(x))) report.psi_roundtrip = false;
    }
    if (sample_xs.empty()) report.nabla2_worst_gap = 0.0;
    return report;
}

}  // namespace phibvp
