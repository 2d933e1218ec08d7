#pragma once

// Special-function kernel: log-gamma, beta, regularized incomplete beta and
// its inverse, Kummer 1F1, Gauss 2F1, modified Bessel I_nu, and regularized
// incomplete gamma. Everything here is a pure function of its arguments.

#include <cmath>
#include <cstddef>
#include <limits>

#include "riskagg/common.hpp"

namespace riskagg {

// Truncation policy shared by all series evaluations. A series stops once a
// term's magnitude falls below rel_tol * |partial sum| + abs_tol, or fails
// with convergence_error after max_terms.
struct SeriesPolicy {
    std::size_t max_terms = 200;
    double rel_tol = 1e-14;
    double abs_tol = 1e-300;
};

inline double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw domain_error("log_gamma: argument must be positive and finite");
    return std::lgamma(x);
}

inline double log_beta(double p, double q) {
    if (!(p > 0.0) || !(q > 0.0))
        throw domain_error("log_beta: shapes must be positive");
    return log_gamma(p) + log_gamma(q) - log_gamma(p + q);
}

namespace detail {

// Continued fraction for the incomplete beta, modified Lentz method.
inline double beta_cont_frac(double p, double q, double z) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    constexpr double kTiny = 1e-300;

    const double qab = p + q;
    const double qap = p + 1.0;
    const double qam = p - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * z / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (q - m) * z / ((qam + m2) * (p + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(p + m) * (qab + m) * z / ((p + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw convergence_error("reg_inc_beta: continued fraction did not converge", h, 0.0);
}

}  // namespace detail

// Regularized incomplete beta ratio I_z(p, q): CDF of a Beta(p, q) at z.
inline double reg_inc_beta(double z, double p, double q) {
    if (!(p > 0.0) || !(q > 0.0))
        throw domain_error("reg_inc_beta: shapes must be positive");
    if (!(z >= 0.0) || !(z <= 1.0))
        throw domain_error("reg_inc_beta: z must lie in [0,1]");
    if (z == 0.0) return 0.0;
    if (z == 1.0) return 1.0;

    const double front =
        std::exp(p * std::log(z) + q * std::log1p(-z) - log_beta(p, q));
    if (z < (p + 1.0) / (p + q + 2.0))
        return front * detail::beta_cont_frac(p, q, z) / p;
    return 1.0 - front * detail::beta_cont_frac(q, p, 1.0 - z) / q;
}

// Inverse of I_z(p, q) in z: safeguarded Newton with bisection fallback.
inline double inv_reg_inc_beta(double u, double p, double q) {
    if (!(p > 0.0) || !(q > 0.0))
        throw domain_error("inv_reg_inc_beta: shapes must be positive");
    if (!(u > 0.0) || !(u < 1.0))
        throw domain_error("inv_reg_inc_beta: u must lie in (0,1)");

    const double lbeta = log_beta(p, q);
    double lo = 0.0;
    double hi = 1.0;
    double z = p / (p + q);  // mean of Beta(p,q) as the starting point

    for (int it = 0; it < 200; ++it) {
        const double f = reg_inc_beta(z, p, q) - u;
        if (f > 0.0)
            hi = z;
        else
            lo = z;
        if (std::fabs(f) <= 1e-14) return z;

        const double logpdf =
            (p - 1.0) * std::log(z) + (q - 1.0) * std::log1p(-z) - lbeta;
        double step = f * std::exp(-logpdf);
        double znew = z - step;
        if (!(znew > lo) || !(znew < hi)) znew = 0.5 * (lo + hi);
        if (std::fabs(znew - z) < 1e-16 * std::max(z, 1e-300)) return znew;
        z = znew;
    }
    return z;
}

// Kummer confluent hypergeometric 1F1(a; b; z), rising-factorial series.
inline double kummer_1f1(double a, double b, double z,
                         const SeriesPolicy& policy = {}) {
    if (b <= 0.0 && b == std::floor(b))
        throw domain_error("kummer_1f1: b must not be a non-positive integer");
    if (!std::isfinite(z)) throw domain_error("kummer_1f1: z must be finite");

    double term = 1.0;
    double sum = 1.0;
    for (std::size_t n = 0; n < policy.max_terms; ++n) {
        term *= (a + static_cast<double>(n)) /
                (b + static_cast<double>(n)) * z / static_cast<double>(n + 1);
        sum += term;
        if (std::fabs(term) <= policy.rel_tol * std::fabs(sum) + policy.abs_tol)
            return sum;
    }
    throw convergence_error("kummer_1f1: series did not converge", sum,
                            std::fabs(term));
}

// Gauss hypergeometric 2F1(a, b; c; z) for |z| < 1.
inline double gauss_2f1(double a, double b, double c, double z,
                        const SeriesPolicy& policy = {}) {
    if (c <= 0.0 && c == std::floor(c))
        throw domain_error("gauss_2f1: c must not be a non-positive integer");
    if (!(std::fabs(z) < 1.0))
        throw domain_error("gauss_2f1: requires |z| < 1");

    double term = 1.0;
    double sum = 1.0;
    for (std::size_t n = 0; n < policy.max_terms; ++n) {
        const double dn = static_cast<double>(n);
        term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * z;
        sum += term;
        if (std::fabs(term) <= policy.rel_tol * std::fabs(sum) + policy.abs_tol)
            return sum;
    }
    throw convergence_error("gauss_2f1: series did not converge", sum,
                            std::fabs(term));
}

// Modified Bessel function of the first kind, ascending series.
inline double bessel_i(double nu, double z, const SeriesPolicy& policy = {}) {
    if (!(z >= 0.0) || !(nu >= 0.0))
        throw domain_error("bessel_i: requires z >= 0 and nu >= 0");
    if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;

    const double half = 0.5 * z;
    double term = std::exp(nu * std::log(half) - log_gamma(nu + 1.0));
    double sum = term;
    const double hsq = half * half;
    for (std::size_t k = 0; k < policy.max_terms; ++k) {
        const double dk = static_cast<double>(k);
        term *= hsq / ((dk + 1.0) * (nu + dk + 1.0));
        sum += term;
        if (std::fabs(term) <= policy.rel_tol * std::fabs(sum) + policy.abs_tol)
            return sum;
    }
    throw convergence_error("bessel_i: series did not converge", sum,
                            std::fabs(term));
}

// log I_nu(z), switching to the large-argument asymptotic expansion where the
// direct series would overflow. Used by the exponential-secondary compound
// log-densities, where z = 2 sqrt(lambda alpha x) can be large.
inline double log_bessel_i(double nu, double z) {
    if (!(z >= 0.0) || !(nu >= 0.0))
        throw domain_error("log_bessel_i: requires z >= 0 and nu >= 0");
    if (z == 0.0) {
        if (nu == 0.0) return 0.0;
        return -std::numeric_limits<double>::infinity();
    }
    if (z < 60.0) return std::log(bessel_i(nu, z, {500, 1e-15, 1e-300}));

    // I_nu(z) ~ e^z / sqrt(2 pi z) * sum_k (-1)^k a_k(nu) / z^k
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 10; ++k) {
        const double dk = static_cast<double>(k);
        term *= -(mu - (2.0 * dk - 1.0) * (2.0 * dk - 1.0)) / (8.0 * dk * z);
        sum += term;
        if (std::fabs(term) < 1e-16 * std::fabs(sum)) break;
    }
    return z - 0.5 * std::log(2.0 * M_PI * z) + std::log(sum);
}

namespace detail {

// Regularized lower incomplete gamma P(a, x), series branch.
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < 1000; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
    }
    throw convergence_error("gamma_p: series did not converge", sum, term);
}

// Regularized upper incomplete gamma Q(a, x), continued fraction branch.
inline double gamma_q_cont_frac(double a, double x) {
    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16)
            return h * std::exp(-x + a * std::log(x) - log_gamma(a));
    }
    throw convergence_error("gamma_q: continued fraction did not converge", h, 0.0);
}

}  // namespace detail

// Regularized incomplete gamma P(a, x) = Pr(Ga(a) <= x) and Q = 1 - P.
inline double gamma_p(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0))
        throw domain_error("gamma_p: requires a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_cont_frac(a, x);
}

inline double gamma_q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0))
        throw domain_error("gamma_q: requires a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cont_frac(a, x);
}

}  // namespace riskagg
