#pragma once

// Individual risk model under dependence: S_n = X_1 + ... + X_n of the
// dependent Pareto vector follows a second kind beta B2(n, alpha, beta).
// VaR, conditional tail moments and TVaR come in closed form.

#include <cmath>
#include <cstddef>

#include "riskagg/common.hpp"
#include "riskagg/specfun.hpp"
#include "riskagg/univariate.hpp"

namespace riskagg {

struct AggregateModel {
    std::size_t n;  // number of risks
    double alpha;   // shape
    double beta;    // scale

    AggregateModel(std::size_t n_, double alpha_, double beta_)
        : n(n_), alpha(alpha_), beta(beta_) {
        if (n < 1 || !(alpha > 0.0) || !(beta > 0.0))
            throw domain_error("AggregateModel: requires n >= 1 and alpha, beta > 0");
    }
};

inline Beta2Params aggregate_distribution(const AggregateModel& model) {
    return Beta2Params(static_cast<double>(model.n), model.alpha, model.beta);
}

// VaR[S_n; u] = beta * w / (1 - w) with w the Beta(n, alpha) quantile at u.
inline double value_at_risk(const AggregateModel& model, double u) {
    if (!(u > 0.0) || !(u < 1.0))
        throw domain_error("value_at_risk: u must lie in (0,1)");
    if (u > 1.0 - 1e-12)
        throw domain_error("value_at_risk: u too close to 1 for a stable quantile");
    return beta2_quantile(u, aggregate_distribution(model));
}

// E[S_n^r | S_n > VaR(u)]. The incomplete-beta factor is the regularized
// ratio I_z(p+r, q-r); with that reading the u -> 0 limit is exactly the
// unconditional moment E[S_n^r] (checked against a quadrature oracle).
inline double conditional_tail_moment(const AggregateModel& model, double r, double u) {
    if (!(r < model.alpha))
        throw moment_error("conditional_tail_moment: requires r < alpha");
    if (!(u > 0.0) || !(u < 1.0))
        throw domain_error("conditional_tail_moment: u must lie in (0,1)");

    const double p = static_cast<double>(model.n);
    const double q = model.alpha;
    const double xu = value_at_risk(model, u);
    // 1 - I_z(p+r, q-r) evaluated tail-first for accuracy at u near 1.
    const double tail =
        reg_inc_beta(model.beta / (xu + model.beta), q - r, p + r);
    const double raw = std::exp(r * std::log(model.beta) + log_gamma(p + r) +
                                log_gamma(q - r) - log_gamma(p) - log_gamma(q));
    return raw * tail / (1.0 - u);
}

inline double tail_value_at_risk(const AggregateModel& model, double u) {
    if (!(model.alpha > 1.0))
        throw moment_error("tail_value_at_risk: requires alpha > 1");
    return conditional_tail_moment(model, 1.0, u);
}

}  // namespace riskagg
