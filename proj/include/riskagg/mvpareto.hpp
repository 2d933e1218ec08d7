#pragma once

// Dependent multivariate Pareto (Arnold type II): the vector
// (beta Y_1 / Y_alpha, ..., beta Y_n / Y_alpha) with Y_i ~ Ga(1) iid and a
// single shared divisor Y_alpha ~ Ga(alpha), which induces the dependence.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "riskagg/common.hpp"
#include "riskagg/rng.hpp"
#include "riskagg/specfun.hpp"

namespace riskagg {

struct MvParetoModel {
    double alpha;    // shape
    double beta;     // scale
    std::size_t n;   // dimension

    MvParetoModel(double alpha_, double beta_, std::size_t n_)
        : alpha(alpha_), beta(beta_), n(n_) {
        if (!(alpha > 0.0) || !(beta > 0.0) || n < 1)
            throw domain_error("MvParetoModel: requires alpha, beta > 0 and n >= 1");
    }
};

// One draw of the dependent vector; each marginal is Pa(alpha, beta).
inline std::vector<double> sample_vector(const MvParetoModel& model, Rng& rng) {
    std::vector<double> x(model.n);
    for (std::size_t i = 0; i < model.n; ++i) x[i] = rng.exponential();
    const double ya = rng.gamma(model.alpha);
    for (std::size_t i = 0; i < model.n; ++i) x[i] *= model.beta / ya;
    return x;
}

inline double joint_pdf(std::span<const double> x, const MvParetoModel& model) {
    if (x.size() != model.n)
        throw std::invalid_argument("joint_pdf: dimension mismatch");
    double sum = 0.0;
    for (double xi : x) {
        if (xi < 0.0) return 0.0;
        sum += xi;
    }
    const double dn = static_cast<double>(model.n);
    return std::exp(log_gamma(model.alpha + dn) - log_gamma(model.alpha) -
                    dn * std::log(model.beta) -
                    (model.alpha + dn) * std::log1p(sum / model.beta));
}

inline double joint_survival(std::span<const double> x, const MvParetoModel& model) {
    if (x.size() != model.n)
        throw std::invalid_argument("joint_survival: dimension mismatch");
    double sum = 0.0;
    for (double xi : x) {
        if (xi < 0.0) throw domain_error("joint_survival: coordinates must be >= 0");
        sum += xi;
    }
    return std::exp(-model.alpha * std::log1p(sum / model.beta));
}

// Clayton copula as printed for this family:
// C(u; alpha) = (sum_i u_i^{-1/alpha} - n + 1)^{-alpha}.
inline double clayton_copula(std::span<const double> u, double alpha) {
    if (!(alpha > 0.0)) throw domain_error("clayton_copula: alpha must be positive");
    double s = 1.0 - static_cast<double>(u.size());
    for (double ui : u) {
        if (!(ui > 0.0) || !(ui <= 1.0))
            throw domain_error("clayton_copula: arguments must lie in (0,1]");
        s += std::pow(ui, -1.0 / alpha);
    }
    return std::pow(s, -alpha);
}

// E[X_1^{r_1} ... X_n^{r_n}] = Gamma(alpha - A)/Gamma(alpha) *
// prod_i beta^{r_i} Gamma(1 + r_i), with A = sum r_i < alpha.
inline double cross_moment(std::span<const double> r, const MvParetoModel& model) {
    if (r.size() != model.n)
        throw std::invalid_argument("cross_moment: dimension mismatch");
    double total = 0.0;
    double logprod = 0.0;
    for (double ri : r) {
        if (!(ri >= 0.0)) throw domain_error("cross_moment: exponents must be >= 0");
        total += ri;
        logprod += ri * std::log(model.beta) + log_gamma(1.0 + ri);
    }
    if (!(total < model.alpha))
        throw moment_error("cross_moment: moment does not exist (sum r_i >= alpha)");
    return std::exp(log_gamma(model.alpha - total) - log_gamma(model.alpha) + logprod);
}

inline double pair_covariance(const MvParetoModel& model) {
    if (!(model.alpha > 2.0))
        throw moment_error("pair_covariance: requires alpha > 2");
    const double am1 = model.alpha - 1.0;
    return model.beta * model.beta / (am1 * am1 * (model.alpha - 2.0));
}

inline double marginal_variance(const MvParetoModel& model) {
    if (!(model.alpha > 2.0))
        throw moment_error("marginal_variance: requires alpha > 2");
    const double am1 = model.alpha - 1.0;
    return model.alpha * model.beta * model.beta / (am1 * am1 * (model.alpha - 2.0));
}

inline double pair_correlation(const MvParetoModel& model) {
    if (!(model.alpha > 2.0))
        throw moment_error("pair_correlation: requires alpha > 2");
    return 1.0 / model.alpha;
}

}  // namespace riskagg
