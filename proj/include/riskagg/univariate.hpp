#pragma once

// Univariate building blocks: Pareto (Lomax), unit-scale gamma, and the
// second kind beta (Pearson VI) which generalizes the Pareto (p = 1 case).

#include <cmath>
#include <limits>

#include "riskagg/common.hpp"
#include "riskagg/rng.hpp"
#include "riskagg/specfun.hpp"

namespace riskagg {

struct ParetoParams {
    double alpha;  // shape
    double beta;   // scale, monetary units

    ParetoParams(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
        if (!(alpha > 0.0) || !(beta > 0.0))
            throw domain_error("ParetoParams: alpha and beta must be positive");
    }
};

struct GammaShape {
    double alpha;  // shape, unit scale

    explicit GammaShape(double alpha_) : alpha(alpha_) {
        if (!(alpha > 0.0)) throw domain_error("GammaShape: alpha must be positive");
    }
};

struct Beta2Params {
    double p;     // shape
    double q;     // shape (tail index)
    double beta;  // scale

    Beta2Params(double p_, double q_, double beta_) : p(p_), q(q_), beta(beta_) {
        if (!(p > 0.0) || !(q > 0.0) || !(beta > 0.0))
            throw domain_error("Beta2Params: p, q and beta must be positive");
    }
};

// ---------------------------------------------------------------------------
// Pareto

inline double pareto_pdf(double x, const ParetoParams& params) {
    if (x < 0.0) return 0.0;
    // Right-limit convention at x = 0.
    return std::exp(std::log(params.alpha / params.beta) -
                    (params.alpha + 1.0) * std::log1p(x / params.beta));
}

inline double pareto_sf(double x, const ParetoParams& params) {
    if (x <= 0.0) return 1.0;
    return std::exp(-params.alpha * std::log1p(x / params.beta));
}

inline double pareto_cdf(double x, const ParetoParams& params) {
    if (x <= 0.0) return 0.0;
    return -std::expm1(-params.alpha * std::log1p(x / params.beta));
}

inline double pareto_quantile(double u, const ParetoParams& params) {
    if (!(u > 0.0) || !(u < 1.0))
        throw domain_error("pareto_quantile: u must lie in (0,1)");
    // beta * ((1-u)^{-1/alpha} - 1)
    return params.beta * std::expm1(-std::log1p(-u) / params.alpha);
}

// ---------------------------------------------------------------------------
// Second kind beta

inline double beta2_pdf(double x, const Beta2Params& params) {
    if (x < 0.0) return 0.0;
    if (x == 0.0) {
        if (params.p > 1.0) return 0.0;
        if (params.p == 1.0) return params.q / params.beta;
        return std::numeric_limits<double>::infinity();
    }
    return std::exp((params.p - 1.0) * std::log(x) - params.p * std::log(params.beta) -
                    log_beta(params.p, params.q) -
                    (params.p + params.q) * std::log1p(x / params.beta));
}

inline double beta2_cdf(double x, const Beta2Params& params) {
    if (x <= 0.0) return 0.0;
    return reg_inc_beta(x / (x + params.beta), params.p, params.q);
}

inline double beta2_sf(double x, const Beta2Params& params) {
    if (x <= 0.0) return 1.0;
    // 1 - I_z(p,q) = I_{1-z}(q,p), computed directly to keep the far tail exact.
    return reg_inc_beta(params.beta / (x + params.beta), params.q, params.p);
}

inline double beta2_quantile(double u, const Beta2Params& params) {
    if (!(u > 0.0) || !(u < 1.0))
        throw domain_error("beta2_quantile: u must lie in (0,1)");
    const double w = inv_reg_inc_beta(u, params.p, params.q);
    return params.beta * w / (1.0 - w);
}

// E[X^r] = beta^r Gamma(p+r) Gamma(q-r) / (Gamma(p) Gamma(q)), requires r < q.
inline double beta2_raw_moment(double r, const Beta2Params& params) {
    if (!(r < params.q))
        throw moment_error("beta2_raw_moment: moment does not exist (r >= q)");
    if (!(params.p + r > 0.0))
        throw domain_error("beta2_raw_moment: requires p + r > 0");
    return std::exp(r * std::log(params.beta) + log_gamma(params.p + r) +
                    log_gamma(params.q - r) - log_gamma(params.p) -
                    log_gamma(params.q));
}

// ---------------------------------------------------------------------------
// Sampling

inline double sample_gamma(const GammaShape& shape, Rng& rng) {
    return rng.gamma(shape.alpha);
}

// Stochastic representation beta * Ga(1) / Ga(alpha); deliberately the same
// construction as the dependent vector sampler, not inverse-CDF.
inline double sample_pareto(const ParetoParams& params, Rng& rng) {
    const double u1 = rng.exponential();
    const double ua = rng.gamma(params.alpha);
    return params.beta * u1 / ua;
}

}  // namespace riskagg
