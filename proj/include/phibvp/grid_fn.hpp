#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "phibvp/errors.hpp"

namespace phibvp {

/**
 * Samples of a function on the uniform grid t_j = j/n, j = 0..n.
 *
 * Norms and comparisons are node-wise; nothing is maximized between nodes.
 */
class GridFunction {
public:
    GridFunction() = default;

    explicit GridFunction(std::vector<double> values) : values_(std::move(values)) {
        if (values_.size() < 2) throw GridMismatch("grid function needs at least two nodes");
    }

    static GridFunction zeros(int n) { return GridFunction(std::vector<double>(n + 1, 0.0)); }

    static GridFunction constant(int n, double c) {
        return GridFunction(std::vector<double>(n + 1, c));
    }

    template <typename Fn>
    static GridFunction sample(int n, Fn&& fn) {
        std::vector<double> v(n + 1);
        for (int j = 0; j <= n; ++j) v[j] = fn(node(n, j));
        return GridFunction(std::move(v));
    }

    static double node(int n, int j) { return j == n ? 1.0 : static_cast<double>(j) / n; }

    int intervals() const { return static_cast<int>(values_.size()) - 1; }
    double t(int j) const { return node(intervals(), j); }
    double step() const { return 1.0 / intervals(); }

    double operator[](std::size_t j) const { return values_[j]; }
    double& operator[](std::size_t j) { return values_[j]; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double front() const { return values_.front(); }
    double back() const { return values_.back(); }

    bool all_finite() const {
        return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
    }

    // a*this + b*other
    GridFunction combine(double a, const GridFunction& other, double b) const {
        require_same_grid(other);
        std::vector<double> out(values_.size());
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = a * values_[j] + b * other.values_[j];
        return GridFunction(std::move(out));
    }

    GridFunction scaled(double a) const {
        std::vector<double> out(values_);
        for (double& x : out) x *= a;
        return GridFunction(std::move(out));
    }

    void require_same_grid(const GridFunction& other) const {
        if (other.size() != size()) {
            throw GridMismatch("grid sizes differ: n=" + std::to_string(intervals()) + " vs n=" +
                               std::to_string(other.intervals()));
        }
    }

private:
    std::vector<double> values_;
};

// Discrete C^1 function: values u and the derivative du delivered alongside
// them (not a finite difference of u).
struct C1GridFunction {
    GridFunction u;
    GridFunction du;

    C1GridFunction() = default;
    C1GridFunction(GridFunction u_, GridFunction du_) : u(std::move(u_)), du(std::move(du_)) {
        u.require_same_grid(du);
    }

    int intervals() const { return u.intervals(); }

    // (1-theta)*this + theta*other, componentwise.
    C1GridFunction blend(const C1GridFunction& other, double theta) const {
        return {u.combine(1.0 - theta, other.u, theta), du.combine(1.0 - theta, other.du, theta)};
    }
};

// Composite trapezoid running integral, V(t_0) = 0.
inline GridFunction cumtrapz(const GridFunction& v) {
    const int n = v.intervals();
    const double half_h = 0.5 / n;
    std::vector<double> out(v.size());
    out[0] = 0.0;
    double acc = 0.0;
    for (int j = 1; j <= n; ++j) {
        acc += half_h * (v[j - 1] + v[j]);
        out[j] = acc;
    }
    return GridFunction(std::move(out));
}

inline double sup_norm(const GridFunction& g) {
    double m = 0.0;
    for (double x : g.values()) m = std::max(m, std::abs(x));
    return m;
}

inline double c1_norm(const C1GridFunction& g) { return std::max(sup_norm(g.u), sup_norm(g.du)); }

// max_j |a_j - b_j|
inline double sup_distance(const GridFunction& a, const GridFunction& b) {
    a.require_same_grid(b);
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

inline double c1_distance(const C1GridFunction& a, const C1GridFunction& b) {
    return std::max(sup_distance(a.u, b.u), sup_distance(a.du, b.du));
}

// Piecewise-linear interpolation; t is clamped to [0, 1].
inline double lerp(const GridFunction& g, double t) {
    const int n = g.intervals();
    t = std::clamp(t, 0.0, 1.0);
    const double s = t * n;
    int j = static_cast<int>(std::floor(s));
    if (j >= n) return g.back();
    const double frac = s - j;
    if (frac == 0.0) return g[j];
    return (1.0 - frac) * g[j] + frac * g[j + 1];
}

/// Writes `t,u,du` rows with 17 significant digits and LF line endings.
inline void write_csv(std::ostream& os, const C1GridFunction& g) {
    os << "t,u,du\n";
    char buf[96];
    for (int j = 0; j <= g.intervals(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.u.t(j), g.u[j], g.du[j]);
        os << buf;
    }
}

inline C1GridFunction read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "t,u,du") {
        throw GridMismatch("csv: expected header 't,u,du'");
    }
    std::vector<double> u;
    std::vector<double> du;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        double t = 0.0, a = 0.0, b = 0.0;
        char c1 = 0, c2 = 0;
        if (!(row >> t >> c1 >> a >> c2 >> b) || c1 != ',' || c2 != ',') {
            throw GridMismatch("csv: malformed row '" + line + "'");
        }
        u.push_back(a);
        du.push_back(b);
    }
    return {GridFunction(std::move(u)), GridFunction(std::move(du))};
}

}  // namespace phibvp
