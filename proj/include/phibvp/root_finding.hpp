#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "phibvp/errors.hpp"

namespace phibvp {

struct MonotoneRoot {
    double x = 0.0;
    double residual = 0.0;  // |g(x) - target|
    int iterations = 0;
};

/**
 * Solves g(x) = target for a nondecreasing, surjective g.
 *
 * The bracket starts at [-1, 1] and each end is doubled until it straddles the
 * target, then plain bisection runs until |g(x) - target| <= tolerance or the
 * bracket cannot be split any further in double precision. Only monotonicity
 * is required, so g may be flat in places (g' >= 0).
 *
 * With a finite `x_rel_tolerance` the search additionally keeps halving until
 * the bracket width is below x_rel_tolerance * max(1, |x|).
 *
 * Throws IterationCap after `max_doublings` expansions; for the maps used in
 * this library that only happens when g is not surjective.
 */
template <typename Fn>
MonotoneRoot solve_increasing(Fn&& g, double target, double tolerance, int max_doublings = 200,
                              double x_rel_tolerance = HUGE_VAL) {
    double lo = -1.0;
    double hi = 1.0;
    double g_lo = g(lo) - target;
    double g_hi = g(hi) - target;
    int doublings = 0;
    while (g_hi < 0.0) {
        if (++doublings > max_doublings) {
            throw IterationCap("bracket expansion exceeded " + std::to_string(max_doublings) +
                               " doublings");
        }
        lo = hi;
        g_lo = g_hi;
        hi *= 2.0;
        g_hi = g(hi) - target;
    }
    while (g_lo > 0.0) {
        if (++doublings > max_doublings) {
            throw IterationCap("bracket expansion exceeded " + std::to_string(max_doublings) +
                               " doublings");
        }
        hi = lo;
        g_hi = g_lo;
        lo *= 2.0;
        g_lo = g(lo) - target;
    }
    if (!std::isfinite(g_lo) || !std::isfinite(g_hi)) {
        throw IterationCap("monotone map is not finite on the bracket");
    }

    MonotoneRoot best{std::abs(g_lo) <= std::abs(g_hi) ? lo : hi,
                      std::min(std::abs(g_lo), std::abs(g_hi)), doublings};
    if (best.residual <= tolerance && x_rel_tolerance == HUGE_VAL) return best;

    // Cap is generous: a bracket of width 2^200 around a root near zero can
    // need roughly a thousand halvings to reach subnormal resolution.
    for (int it = 0; it < 2000; ++it) {
        const double mid = std::midpoint(lo, hi);
        if (mid == lo || mid == hi) break;
        const double g_mid = g(mid) - target;
        ++best.iterations;
        if (std::abs(g_mid) < best.residual) {
            best.x = mid;
            best.residual = std::abs(g_mid);
        }
        if (g_mid < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (std::abs(g_mid) <= tolerance &&
            (hi - lo) <= x_rel_tolerance * std::max(1.0, std::abs(mid))) {
            return {mid, std::abs(g_mid), best.iterations};
        }
    }
    return best;
}

}  // namespace phibvp
