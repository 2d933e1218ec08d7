#pragma once

// Collective risk model: S_N = X_1 + ... + X_N with a random claim count N
// (primary law) and either dependent Pareto or iid exponential claims
// (secondary law). S_N is a mixed law: an atom at zero of mass Pr(N = 0)
// plus a continuous density on x > 0. Closed forms are provided for the
// seven named combinations; every combination also has the generic
// convolution-series route, which doubles as the cross-check of the
// closed forms.

#include <cmath>
#include <cstddef>
#include <limits>
#include <variant>

#include "riskagg/common.hpp"
#include "riskagg/rng.hpp"
#include "riskagg/specfun.hpp"
#include "riskagg/univariate.hpp"

namespace riskagg {

// ---------------------------------------------------------------------------
// Laws

struct Poisson {
    double lambda;
    explicit Poisson(double lambda_) : lambda(lambda_) {
        if (!(lambda > 0.0)) throw domain_error("Poisson: lambda must be positive");
    }
};

struct NegBinomial {
    double r;
    double p;
    NegBinomial(double r_, double p_) : r(r_), p(p_) {
        if (!(r > 0.0) || !(p > 0.0) || !(p < 1.0))
            throw domain_error("NegBinomial: requires r > 0 and p in (0,1)");
    }
};

struct Geometric {
    double p;
    explicit Geometric(double p_) : p(p_) {
        if (!(p > 0.0) || !(p < 1.0))
            throw domain_error("Geometric: p must lie in (0,1)");
    }
};

// Support starts at n = 1: no atom at zero.
struct Logarithmic {
    double theta;
    explicit Logarithmic(double theta_) : theta(theta_) {
        if (!(theta > 0.0) || !(theta < 1.0))
            throw domain_error("Logarithmic: theta must lie in (0,1)");
    }
};

using PrimaryLaw = std::variant<Poisson, NegBinomial, Geometric, Logarithmic>;

struct DependentPareto {
    double alpha;
    double beta;
    DependentPareto(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
        if (!(alpha > 0.0) || !(beta > 0.0))
            throw domain_error("DependentPareto: alpha and beta must be positive");
    }
};

struct ExponentialClaims {
    double rate;
    explicit ExponentialClaims(double rate_) : rate(rate_) {
        if (!(rate > 0.0)) throw domain_error("ExponentialClaims: rate must be positive");
    }
};

using SecondaryLaw = std::variant<DependentPareto, ExponentialClaims>;

struct CompoundModel {
    PrimaryLaw primary;
    SecondaryLaw secondary;
};

// ---------------------------------------------------------------------------
// Primary PMF

inline double primary_pmf(const PrimaryLaw& law, std::size_t n) {
    const double dn = static_cast<double>(n);
    return std::visit(
        [&](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, Poisson>) {
                return std::exp(dn * std::log(l.lambda) - l.lambda - log_gamma(dn + 1.0));
            } else if constexpr (std::is_same_v<T, NegBinomial>) {
                return std::exp(log_gamma(dn + l.r) - log_gamma(dn + 1.0) - log_gamma(l.r) +
                                l.r * std::log(l.p) + dn * std::log1p(-l.p));
            } else if constexpr (std::is_same_v<T, Geometric>) {
                return std::exp(std::log(l.p) + dn * std::log1p(-l.p));
            } else {
                if (n == 0) return 0.0;
                return -std::exp(dn * std::log(l.theta) - std::log(dn)) /
                       std::log1p(-l.theta);
            }
        },
        law);
}

inline double compound_atom0(const CompoundModel& model) {
    return primary_pmf(model.primary, 0);
}

namespace detail {

// Walks the primary pmf by its term ratio, tracking cumulative mass so that
// series over n can stop once the neglected tail is below kTailEps.
struct PmfWalker {
    explicit PmfWalker(const PrimaryLaw& law_) : law(law_) {
        pmf = primary_pmf(law, 0);
        cum = pmf;
    }

    // Advance to n+1 and return the new pmf.
    double next() {
        ++n;
        const double dn = static_cast<double>(n);
        std::visit(
            [&](const auto& l) {
                using T = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<T, Poisson>) {
                    pmf *= l.lambda / dn;
                } else if constexpr (std::is_same_v<T, NegBinomial>) {
                    pmf *= (dn - 1.0 + l.r) / dn * (1.0 - l.p);
                } else if constexpr (std::is_same_v<T, Geometric>) {
                    pmf *= 1.0 - l.p;
                } else {
                    if (n == 1)
                        pmf = -l.theta / std::log1p(-l.theta);
                    else
                        pmf *= l.theta * (dn - 1.0) / dn;
                }
            },
            law);
        cum += pmf;
        return pmf;
    }

    bool tail_negligible() const { return cum >= 1.0 - kTailEps; }

    static constexpr double kTailEps = 1e-12;
    static constexpr std::size_t kMaxTerms = 100000;

    const PrimaryLaw& law;
    std::size_t n = 0;
    double pmf = 0.0;
    double cum = 0.0;
};

// log 1F1(a; b; z) for z >= 0, switching to the large-z asymptotic expansion
// where the direct series would overflow.
inline double log_kummer_1f1_pos(double a, double b, double z,
                                 const SeriesPolicy& policy) {
    if (z < 150.0) {
        SeriesPolicy p = policy;
        if (p.max_terms < 500) p.max_terms = 500;
        return std::log(kummer_1f1(a, b, z, p));
    }
    // 1F1(a;b;z) ~ Gamma(b)/Gamma(a) e^z z^{a-b} sum_k (b-a)_k (1-a)_k / (k! z^k)
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < 30; ++k) {
        const double dk = static_cast<double>(k);
        term *= (b - a + dk) * (1.0 - a + dk) / ((dk + 1.0) * z);
        sum += term;
        if (std::fabs(term) < 1e-15 * std::fabs(sum)) break;
    }
    return z + (a - b) * std::log(z) + log_gamma(b) - log_gamma(a) + std::log(sum);
}

// log-density of the n-fold convolution at x > 0.
// Dependent Pareto: B2(n, alpha, beta). Exponential: Ga(n) scaled by 1/rate.
inline double convolution_log_pdf(const SecondaryLaw& sec, std::size_t n, double x) {
    const double dn = static_cast<double>(n);
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, DependentPareto>) {
                return (dn - 1.0) * std::log(x) - dn * std::log(s.beta) -
                       log_beta(dn, s.alpha) - (dn + s.alpha) * std::log1p(x / s.beta);
            } else {
                return dn * std::log(s.rate * x) - std::log(x) - s.rate * x -
                       log_gamma(dn);
            }
        },
        sec);
}

// CDF of the n-fold convolution at x > 0.
inline double convolution_cdf(const SecondaryLaw& sec, std::size_t n, double x) {
    const double dn = static_cast<double>(n);
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, DependentPareto>)
                return reg_inc_beta(x / (x + s.beta), dn, s.alpha);
            else
                return gamma_p(dn, s.rate * x);
        },
        sec);
}

// Survival of the n-fold convolution, computed tail-first (no 1 - cdf).
inline double convolution_sf(const SecondaryLaw& sec, std::size_t n, double x) {
    const double dn = static_cast<double>(n);
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, DependentPareto>)
                return reg_inc_beta(s.beta / (x + s.beta), s.alpha, dn);
            else
                return gamma_q(dn, s.rate * x);
        },
        sec);
}

struct LawMoments {
    double mean;
    double var;
    double fact2;  // E[N(N-1)]
};

inline LawMoments primary_moments(const PrimaryLaw& law) {
    return std::visit(
        [](const auto& l) -> LawMoments {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, Poisson>) {
                return {l.lambda, l.lambda, l.lambda * l.lambda};
            } else if constexpr (std::is_same_v<T, NegBinomial>) {
                const double q = 1.0 - l.p;
                return {l.r * q / l.p, l.r * q / (l.p * l.p),
                        l.r * (l.r + 1.0) * q * q / (l.p * l.p)};
            } else if constexpr (std::is_same_v<T, Geometric>) {
                const double q = 1.0 - l.p;
                return {q / l.p, q / (l.p * l.p), 2.0 * q * q / (l.p * l.p)};
            } else {
                const double a = -1.0 / std::log1p(-l.theta);
                const double omt = 1.0 - l.theta;
                const double mean = a * l.theta / omt;
                const double fact2 = a * l.theta * l.theta / (omt * omt);
                return {mean, fact2 + mean - mean * mean, fact2};
            }
        },
        law);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Density

// Generic convolution route: sum_{n>=1} Pr(N=n) f^{(n)}(x), truncated when the
// remaining primary mass is below 1e-12, terms assembled in log space.
inline double compound_pdf_series(const CompoundModel& model, double x) {
    if (!(x > 0.0))
        throw domain_error("compound_pdf_series: x must be positive; "
                           "the mass at zero is compound_atom0");
    detail::PmfWalker walker(model.primary);
    double sum = 0.0;
    while (walker.n < detail::PmfWalker::kMaxTerms) {
        const double pmf = walker.next();
        const double term =
            pmf > 0.0 ? pmf * std::exp(detail::convolution_log_pdf(model.secondary,
                                                                   walker.n, x))
                      : 0.0;
        sum += term;
        // Past the pmf bulk, keep going until the terms themselves are
        // negligible relative to the sum: the bulk criterion alone is only
        // absolute and loses relative accuracy deep in the tail.
        if (walker.tail_negligible() && term <= 1e-16 * sum) break;
    }
    return sum;
}

// log-density of the continuous part at x > 0, closed form where one exists.
inline double compound_log_pdf(const CompoundModel& model, double x,
                               const SeriesPolicy& policy = {}) {
    if (!(x > 0.0))
        throw domain_error("compound_log_pdf: x must be positive; "
                           "the mass at zero is compound_atom0");

    const auto* pareto = std::get_if<DependentPareto>(&model.secondary);
    const auto* expo = std::get_if<ExponentialClaims>(&model.secondary);

    if (const auto* pois = std::get_if<Poisson>(&model.primary)) {
        if (pareto) {
            const double z = (x / pareto->beta) / (1.0 + x / pareto->beta);
            return std::log(pareto->alpha * pois->lambda) - pois->lambda -
                   std::log(pareto->beta) -
                   (pareto->alpha + 1.0) * std::log1p(x / pareto->beta) +
                   detail::log_kummer_1f1_pos(1.0 + pareto->alpha, 2.0,
                                              pois->lambda * z, policy);
        }
        const double a = expo->rate;
        return 0.5 * std::log(pois->lambda * a / x) - pois->lambda - a * x +
               log_bessel_i(1.0, 2.0 * std::sqrt(pois->lambda * a * x));
    }
    if (const auto* nb = std::get_if<NegBinomial>(&model.primary)) {
        if (pareto) {
            const double z = (1.0 - nb->p) * (x / pareto->beta) / (1.0 + x / pareto->beta);
            return std::log(nb->r * pareto->alpha * (1.0 - nb->p)) +
                   nb->r * std::log(nb->p) - std::log(pareto->beta) -
                   (pareto->alpha + 1.0) * std::log1p(x / pareto->beta) +
                   std::log(gauss_2f1(1.0 + nb->r, 1.0 + pareto->alpha, 2.0, z, policy));
        }
        const double a = expo->rate;
        return std::log(a * nb->r * (1.0 - nb->p)) + nb->r * std::log(nb->p) - a * x +
               detail::log_kummer_1f1_pos(1.0 + nb->r, 2.0, a * (1.0 - nb->p) * x,
                                          policy);
    }
    if (const auto* geom = std::get_if<Geometric>(&model.primary)) {
        if (pareto) {
            return std::log(pareto->alpha * geom->p * (1.0 - geom->p)) -
                   std::log(pareto->beta) -
                   (pareto->alpha + 1.0) * std::log1p(geom->p * x / pareto->beta);
        }
        const double a = expo->rate;
        return std::log(a * geom->p * (1.0 - geom->p)) - a * geom->p * x;
    }
    const auto& lg = std::get<Logarithmic>(model.primary);
    if (pareto) {
        const double a = -1.0 / std::log1p(-lg.theta);
        const double lhs =
            std::exp(-pareto->alpha * std::log1p((1.0 - lg.theta) * x / pareto->beta));
        const double rhs = std::exp(-pareto->alpha * std::log1p(x / pareto->beta));
        return std::log(a * (lhs - rhs) / x);
    }
    // Logarithmic x Exponential has no closed form; generic series route.
    return std::log(compound_pdf_series(model, x));
}

inline double compound_pdf(const CompoundModel& model, double x,
                           const SeriesPolicy& policy = {}) {
    return std::exp(compound_log_pdf(model, x, policy));
}

// ---------------------------------------------------------------------------
// CDF / survival

inline double compound_cdf(const CompoundModel& model, double x) {
    if (x < 0.0) throw domain_error("compound_cdf: x must be >= 0");
    double sum = compound_atom0(model);
    if (x == 0.0) return sum;
    detail::PmfWalker walker(model.primary);
    while (walker.n < detail::PmfWalker::kMaxTerms) {
        const double pmf = walker.next();
        const double term =
            pmf > 0.0 ? pmf * detail::convolution_cdf(model.secondary, walker.n, x)
                      : 0.0;
        sum += term;
        if (walker.tail_negligible() && term <= 1e-16 * sum) break;
    }
    return std::min(sum, 1.0);
}

// Tail-first summation: sf = sum_{n>=1} Pr(N=n) (1 - F^{(n)}(x)), each tail
// factor evaluated directly so entries down to 1e-9 keep full precision.
inline double compound_sf(const CompoundModel& model, double x) {
    if (x < 0.0) throw domain_error("compound_sf: x must be >= 0");
    if (x == 0.0) return 1.0 - compound_atom0(model);
    detail::PmfWalker walker(model.primary);
    double sum = 0.0;
    while (walker.n < detail::PmfWalker::kMaxTerms) {
        const double pmf = walker.next();
        const double term =
            pmf > 0.0 ? pmf * detail::convolution_sf(model.secondary, walker.n, x)
                      : 0.0;
        sum += term;
        if (walker.tail_negligible() && term <= 1e-16 * sum) break;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Moments (generic route of the compound mean/variance identities)

inline double compound_mean(const CompoundModel& model) {
    const auto nm = detail::primary_moments(model.primary);
    const double ex = std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, DependentPareto>) {
                if (!(s.alpha > 1.0))
                    throw moment_error("compound_mean: requires alpha > 1");
                return s.beta / (s.alpha - 1.0);
            } else {
                return 1.0 / s.rate;
            }
        },
        model.secondary);
    return nm.mean * ex;
}

// var(S_N) = E(N) var(X) + var(N) E(X)^2 + E[N(N-1)] cov(X_i, X_j).
inline double compound_variance(const CompoundModel& model) {
    const auto nm = detail::primary_moments(model.primary);
    double ex;
    double vx;
    double cov;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, DependentPareto>) {
                if (!(s.alpha > 2.0))
                    throw moment_error("compound_variance: requires alpha > 2");
                const double am1 = s.alpha - 1.0;
                ex = s.beta / am1;
                vx = s.alpha * s.beta * s.beta / (am1 * am1 * (s.alpha - 2.0));
                cov = s.beta * s.beta / (am1 * am1 * (s.alpha - 2.0));
            } else {
                ex = 1.0 / s.rate;
                vx = 1.0 / (s.rate * s.rate);
                cov = 0.0;
            }
        },
        model.secondary);
    return nm.mean * vx + nm.var * ex * ex + nm.fact2 * cov;
}

// ---------------------------------------------------------------------------
// Sampling

namespace detail {

inline std::size_t sample_poisson(double lambda, Rng& rng) {
    // Split large means so the sequential inversion never underflows.
    std::size_t n = 0;
    while (lambda > 50.0) {
        n += sample_poisson(lambda * 0.5, rng);
        lambda *= 0.5;
    }
    const double u = rng.uniform();
    double pmf = std::exp(-lambda);
    double cum = pmf;
    std::size_t k = 0;
    while (u > cum && k < 10000) {
        ++k;
        pmf *= lambda / static_cast<double>(k);
        cum += pmf;
    }
    return n + k;
}

inline std::size_t sample_primary(const PrimaryLaw& law, Rng& rng) {
    return std::visit(
        [&](const auto& l) -> std::size_t {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, Poisson>) {
                return sample_poisson(l.lambda, rng);
            } else if constexpr (std::is_same_v<T, NegBinomial>) {
                const double mix = rng.gamma(l.r) * (1.0 - l.p) / l.p;
                return sample_poisson(mix, rng);
            } else if constexpr (std::is_same_v<T, Geometric>) {
                return static_cast<std::size_t>(
                    std::floor(std::log(rng.uniform()) / std::log1p(-l.p)));
            } else {
                const double u = rng.uniform();
                double pmf = -l.theta / std::log1p(-l.theta);
                double cum = pmf;
                std::size_t k = 1;
                while (u > cum && k < 100000) {
                    pmf *= l.theta * static_cast<double>(k) / static_cast<double>(k + 1);
                    ++k;
                    cum += pmf;
                }
                return k;
            }
        },
        law);
}

}  // namespace detail

// One draw of S_N: N from the primary law, then the dependent claim vector
// (or iid exponentials) summed.
inline double sample_compound(const CompoundModel& model, Rng& rng) {
    const std::size_t n = detail::sample_primary(model.primary, rng);
    if (n == 0) return 0.0;
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) sum += rng.exponential();
            if constexpr (std::is_same_v<T, DependentPareto>)
                return s.beta * sum / rng.gamma(s.alpha);
            else
                return sum / s.rate;
        },
        model.secondary);
}

}  // namespace riskagg
