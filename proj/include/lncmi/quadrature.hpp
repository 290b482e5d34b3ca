#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

namespace lncmi {

struct QuadResult {
    double value = 0.0;
    double est_error = 0.0;
};

namespace detail {

inline double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline void adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                          double fb, double m, double fm, double whole, double tol, int depth,
                          int forced, QuadResult& out) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    // The forced levels guard against spuriously small deltas when the early
    // sample points all miss the integrand's mass.
    if (depth <= 0 || (forced <= 0 && std::abs(delta) <= 15.0 * tol)) {
        out.value += left + right + delta / 15.0;
        out.est_error += std::abs(delta) / 15.0;
        return;
    }
    adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, forced - 1, out);
    adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, forced - 1, out);
}

}  // namespace detail

// Adaptive Simpson on [a, b]. The integrand must be finite on the closed
// interval; callers split at known kinks or singular endpoints first.
inline QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                            double tol = 1e-10, int max_depth = 48, int min_depth = 6) {
    QuadResult out;
    if (!(b > a)) return out;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(m);
    const double whole = detail::simpson(a, fa, b, fb, fm);
    detail::adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth, min_depth, out);
    return out;
}

}  // namespace lncmi
