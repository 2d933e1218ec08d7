#pragma once

// Test-only adaptive Simpson quadrature, independent of the library's
// analytic routes. Used as the oracle for CDFs, normalizations and tail
// moments.

#include <cmath>
#include <functional>

namespace testsupport {

namespace detail {

template <typename F>
double simpson(F&& f, double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adapt(F&& f, double a, double b, double fa, double fm, double fb,
             double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(f, a, m, fa, flm, fm);
    const double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

}  // namespace detail

// Start from several fixed panels: a single coarse panel can match its own
// refinement to within tolerance by coincidence and stop immediately.
template <typename F>
double integrate(F&& f, double a, double b, double tol = 1e-11) {
    constexpr int kPanels = 8;
    double total = 0.0;
    for (int i = 0; i < kPanels; ++i) {
        const double pa = a + (b - a) * i / kPanels;
        const double pb = a + (b - a) * (i + 1) / kPanels;
        const double m = 0.5 * (pa + pb);
        const double fa = f(pa);
        const double fm = f(m);
        const double fb = f(pb);
        total += detail::adapt(f, pa, pb, fa, fm, fb,
                               detail::simpson(f, pa, pb, fa, fm, fb),
                               tol / kPanels, 56);
    }
    return total;
}

// Integral over (a, inf) via x = a + t/(1-t).
template <typename F>
double integrate_to_inf(F&& f, double a, double tol = 1e-11) {
    auto g = [&](double t) {
        if (t >= 1.0) return 0.0;
        const double omt = 1.0 - t;
        return f(a + t / omt) / (omt * omt);
    };
    return integrate(g, 0.0, 1.0 - 1e-14, tol);
}

}  // namespace testsupport
