#pragma once

// Portfolio ingestion, descriptive statistics, moment seeds, maximum
// likelihood fitting of the compound families, observed-information standard
// errors and AIC/CAIC ranking. Each policy's total_amount is one draw of
// S_N; the num_claims column feeds descriptive stats and seeds only.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "riskagg/collective.hpp"
#include "riskagg/common.hpp"
#include "riskagg/rng.hpp"

namespace riskagg {

// ---------------------------------------------------------------------------
// Data

struct PolicyRecord {
    long long policy_id;
    unsigned num_claims;
    double total_amount;
};

struct ClaimDataset {
    std::vector<PolicyRecord> records;
    std::vector<double> positive_amounts;  // cached for likelihood evaluation
    std::size_t n = 0;
    std::size_t n0 = 0;  // zero-amount records

    void push(PolicyRecord rec) {
        if (rec.total_amount == 0.0)
            ++n0;
        else
            positive_amounts.push_back(rec.total_amount);
        records.push_back(rec);
        ++n;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

inline ClaimDataset load_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw parse_error("load_csv: empty input");
    if (detail::trim(line) != "policy_id,num_claims,total_amount")
        throw parse_error("load_csv: expected header "
                          "'policy_id,num_claims,total_amount'");
    ClaimDataset ds;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        std::istringstream ls(t);
        std::string a, b, c;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') ||
            !std::getline(ls, c))
            throw parse_error("load_csv: malformed row " + std::to_string(row));
        PolicyRecord rec{};
        try {
            rec.policy_id = std::stoll(detail::trim(a));
            const long nc = std::stol(detail::trim(b));
            if (nc < 0) throw parse_error("");
            rec.num_claims = static_cast<unsigned>(nc);
            rec.total_amount = std::stod(detail::trim(c));
        } catch (const std::exception&) {
            throw parse_error("load_csv: malformed row " + std::to_string(row));
        }
        if (rec.total_amount < 0.0)
            throw parse_error("load_csv: negative amount at row " + std::to_string(row));
        if (rec.num_claims == 0 && rec.total_amount != 0.0)
            throw parse_error("load_csv: row " + std::to_string(row) +
                              " has zero claims but a nonzero amount");
        ds.push(rec);
    }
    if (ds.n == 0) throw parse_error("load_csv: no data rows");
    return ds;
}

inline ClaimDataset load_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw parse_error("load_csv: cannot open " + path);
    return load_csv(f);
}

// ---------------------------------------------------------------------------
// Descriptive statistics

struct DatasetSummary {
    std::size_t n;
    std::size_t n_with_claims;
    double mean_claims, sd_claims, min_claims, max_claims;
    double mean_amount, sd_amount, min_amount, max_amount;
    double cov_claims_amount;
};

inline DatasetSummary describe(const ClaimDataset& ds) {
    if (ds.n == 0) throw domain_error("describe: empty dataset");
    DatasetSummary s{};
    s.n = ds.n;
    s.min_claims = s.min_amount = std::numeric_limits<double>::infinity();
    s.max_claims = s.max_amount = -std::numeric_limits<double>::infinity();
    double sum_c = 0.0, sum_a = 0.0;
    for (const auto& r : ds.records) {
        const double c = static_cast<double>(r.num_claims);
        sum_c += c;
        sum_a += r.total_amount;
        s.min_claims = std::min(s.min_claims, c);
        s.max_claims = std::max(s.max_claims, c);
        s.min_amount = std::min(s.min_amount, r.total_amount);
        s.max_amount = std::max(s.max_amount, r.total_amount);
        if (r.num_claims > 0) ++s.n_with_claims;
    }
    const double dn = static_cast<double>(ds.n);
    s.mean_claims = sum_c / dn;
    s.mean_amount = sum_a / dn;
    double ssc = 0.0, ssa = 0.0, sca = 0.0;
    for (const auto& r : ds.records) {
        const double dc = static_cast<double>(r.num_claims) - s.mean_claims;
        const double da = r.total_amount - s.mean_amount;
        ssc += dc * dc;
        ssa += da * da;
        sca += dc * da;
    }
    if (ds.n > 1) {
        s.sd_claims = std::sqrt(ssc / (dn - 1.0));
        s.sd_amount = std::sqrt(ssa / (dn - 1.0));
        s.cov_claims_amount = sca / (dn - 1.0);
    } else {
        s.sd_claims = s.sd_amount = s.cov_claims_amount = 0.0;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Model families

enum class ModelFamily {
    PoissonExponential,
    GeometricExponential,
    NegBinomialExponential,
    PoissonPareto,
    GeometricPareto,
    NegBinomialPareto,
    LogarithmicPareto,
};

enum class ParamKind { Positive, Probability };

struct ParamSpec {
    const char* name;
    ParamKind kind;
};

inline const std::vector<ParamSpec>& family_params(ModelFamily f) {
    static const std::vector<ParamSpec> pe{{"lambda", ParamKind::Positive},
                                           {"alpha", ParamKind::Positive}};
    static const std::vector<ParamSpec> ge{{"p", ParamKind::Probability},
                                           {"alpha", ParamKind::Positive}};
    static const std::vector<ParamSpec> nbe{{"r", ParamKind::Positive},
                                            {"p", ParamKind::Probability},
                                            {"alpha", ParamKind::Positive}};
    static const std::vector<ParamSpec> pp{{"lambda", ParamKind::Positive},
                                           {"alpha", ParamKind::Positive},
                                           {"beta", ParamKind::Positive}};
    static const std::vector<ParamSpec> gp{{"p", ParamKind::Probability},
                                           {"alpha", ParamKind::Positive},
                                           {"beta", ParamKind::Positive}};
    static const std::vector<ParamSpec> nbp{{"r", ParamKind::Positive},
                                            {"p", ParamKind::Probability},
                                            {"alpha", ParamKind::Positive},
                                            {"beta", ParamKind::Positive}};
    static const std::vector<ParamSpec> lp{{"theta", ParamKind::Probability},
                                           {"alpha", ParamKind::Positive},
                                           {"beta", ParamKind::Positive}};
    switch (f) {
        case ModelFamily::PoissonExponential: return pe;
        case ModelFamily::GeometricExponential: return ge;
        case ModelFamily::NegBinomialExponential: return nbe;
        case ModelFamily::PoissonPareto: return pp;
        case ModelFamily::GeometricPareto: return gp;
        case ModelFamily::NegBinomialPareto: return nbp;
        case ModelFamily::LogarithmicPareto: return lp;
    }
    throw domain_error("family_params: unknown family");
}

inline std::string family_name(ModelFamily f) {
    switch (f) {
        case ModelFamily::PoissonExponential: return "poisson-exponential";
        case ModelFamily::GeometricExponential: return "geometric-exponential";
        case ModelFamily::NegBinomialExponential: return "nb-exponential";
        case ModelFamily::PoissonPareto: return "poisson-pareto";
        case ModelFamily::GeometricPareto: return "geometric-pareto";
        case ModelFamily::NegBinomialPareto: return "nb-pareto";
        case ModelFamily::LogarithmicPareto: return "logarithmic-pareto";
    }
    throw domain_error("family_name: unknown family");
}

inline std::optional<ModelFamily> family_from_name(const std::string& name) {
    static const std::vector<ModelFamily> all{
        ModelFamily::PoissonExponential,   ModelFamily::GeometricExponential,
        ModelFamily::NegBinomialExponential, ModelFamily::PoissonPareto,
        ModelFamily::GeometricPareto,      ModelFamily::NegBinomialPareto,
        ModelFamily::LogarithmicPareto};
    for (auto f : all)
        if (family_name(f) == name) return f;
    return std::nullopt;
}

// The six families of the comparison table (logarithmic-pareto assigns zero
// probability to claim-free policies, so it only fits all-claims data).
inline std::vector<ModelFamily> table_families() {
    return {ModelFamily::PoissonExponential,   ModelFamily::GeometricExponential,
            ModelFamily::NegBinomialExponential, ModelFamily::PoissonPareto,
            ModelFamily::GeometricPareto,      ModelFamily::NegBinomialPareto};
}

inline CompoundModel make_model(ModelFamily f, const std::vector<double>& v) {
    switch (f) {
        case ModelFamily::PoissonExponential:
            return {Poisson(v.at(0)), ExponentialClaims(v.at(1))};
        case ModelFamily::GeometricExponential:
            return {Geometric(v.at(0)), ExponentialClaims(v.at(1))};
        case ModelFamily::NegBinomialExponential:
            return {NegBinomial(v.at(0), v.at(1)), ExponentialClaims(v.at(2))};
        case ModelFamily::PoissonPareto:
            return {Poisson(v.at(0)), DependentPareto(v.at(1), v.at(2))};
        case ModelFamily::GeometricPareto:
            return {Geometric(v.at(0)), DependentPareto(v.at(1), v.at(2))};
        case ModelFamily::NegBinomialPareto:
            return {NegBinomial(v.at(0), v.at(1)), DependentPareto(v.at(2), v.at(3))};
        case ModelFamily::LogarithmicPareto:
            return {Logarithmic(v.at(0)), DependentPareto(v.at(1), v.at(2))};
    }
    throw domain_error("make_model: unknown family");
}

// ---------------------------------------------------------------------------
// Likelihood

// Generic atom/density log-likelihood. Out-of-domain or non-convergent
// parameter points give -inf (a rejected point, not an exception) so
// optimizers can probe freely.
inline double log_likelihood(const CompoundModel& model, const ClaimDataset& ds) {
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    try {
        double ll = 0.0;
        if (ds.n0 > 0) {
            const double a0 = compound_atom0(model);
            if (!(a0 > 0.0)) return kNegInf;
            ll += static_cast<double>(ds.n0) * std::log(a0);
        }
        for (double x : ds.positive_amounts) {
            ll += compound_log_pdf(model, x);
            if (!std::isfinite(ll)) return kNegInf;
        }
        return ll;
    } catch (const convergence_error&) {
        return kNegInf;
    } catch (const domain_error&) {
        return kNegInf;
    }
}

// The printed closed-form log-likelihood of the Pareto-geometric model;
// kept separate so tests can check it against the generic route.
inline double pareto_geometric_loglik(double alpha, double beta, double p,
                                      const ClaimDataset& ds) {
    const double n = static_cast<double>(ds.n);
    const double n0 = static_cast<double>(ds.n0);
    double sum = 0.0;
    for (double x : ds.positive_amounts) sum += std::log(beta + p * x);
    return n0 * std::log(p) +
           (n - n0) * (std::log(alpha) + std::log(p) + std::log1p(-p) +
                       alpha * std::log(beta)) -
           (alpha + 1.0) * sum;
}

// ---------------------------------------------------------------------------
// Moment seeds

// Matches the zero atom to the empirical zero fraction, then the compound
// mean/variance identities to the sample moments. Only used to seed the
// optimizer, so crude fallbacks are fine.
inline std::vector<double> moment_seed(ModelFamily family, const ClaimDataset& ds) {
    if (ds.positive_amounts.empty())
        throw domain_error("moment_seed: needs at least one positive amount");

    const double dn = static_cast<double>(ds.n);
    const double f0 = static_cast<double>(ds.n0) / dn;
    double m = 0.0;
    for (const auto& r : ds.records) m += r.total_amount;
    m /= dn;
    double v = 0.0;
    for (const auto& r : ds.records) {
        const double d = r.total_amount - m;
        v += d * d;
    }
    v /= std::max(dn - 1.0, 1.0);
    double mean_pos = 0.0;
    for (double x : ds.positive_amounts) mean_pos += x;
    mean_pos /= static_cast<double>(ds.positive_amounts.size());

    const bool atom_ok = f0 > 0.0 && f0 < 1.0;

    // Primary seed and its factorial moments.
    PrimaryLaw primary = Poisson(0.1);
    std::vector<double> primary_vals;
    switch (family) {
        case ModelFamily::PoissonExponential:
        case ModelFamily::PoissonPareto: {
            const double lambda = atom_ok ? -std::log(f0) : 0.1;
            primary = Poisson(lambda);
            primary_vals = {lambda};
            break;
        }
        case ModelFamily::GeometricExponential:
        case ModelFamily::GeometricPareto: {
            const double p = atom_ok ? f0 : 0.5;
            primary = Geometric(p);
            primary_vals = {p};
            break;
        }
        case ModelFamily::NegBinomialExponential:
        case ModelFamily::NegBinomialPareto: {
            const double p = atom_ok ? f0 : 0.5;  // p^r = f0 with r seeded at 1
            primary = NegBinomial(1.0, p);
            primary_vals = {1.0, p};
            break;
        }
        case ModelFamily::LogarithmicPareto: {
            // No zero atom; match the mean claim count of claim-bearing rows.
            double mean_counts = 0.0;
            std::size_t npos = 0;
            for (const auto& r : ds.records)
                if (r.num_claims > 0) {
                    mean_counts += r.num_claims;
                    ++npos;
                }
            double theta = 0.5;
            if (npos > 0 && (mean_counts /= static_cast<double>(npos)) > 1.0) {
                double lo = 1e-9, hi = 1.0 - 1e-9;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double mean = -mid / ((1.0 - mid) * std::log1p(-mid));
                    (mean < mean_counts ? lo : hi) = mid;
                }
                theta = 0.5 * (lo + hi);
            }
            primary = Logarithmic(theta);
            primary_vals = {theta};
            break;
        }
    }
    const auto nm = detail::primary_moments(primary);

    const bool exponential = family == ModelFamily::PoissonExponential ||
                             family == ModelFamily::GeometricExponential ||
                             family == ModelFamily::NegBinomialExponential;
    std::vector<double> seed = primary_vals;
    if (exponential) {
        const double alpha = (m > 0.0) ? nm.mean / m : 1.0;
        seed.push_back(alpha > 0.0 && std::isfinite(alpha) ? alpha : 1.0);
        return seed;
    }

    // Pareto secondary: with ex = m / E(N) fixed by the mean equation,
    // var(S) = ex^2 [ (E(N) alpha + E[N(N-1)]) / (alpha - 2) + var(N) ]
    // solves in closed form for alpha.
    const double ex = m / nm.mean;
    double alpha = 2.5;
    double beta = mean_pos;
    if (ex > 0.0 && v > 0.0) {
        const double g = v / (ex * ex) - nm.var;
        if (g > nm.mean) {
            const double cand = (nm.fact2 + 2.0 * g) / (g - nm.mean);
            if (std::isfinite(cand) && cand > 2.0) {
                alpha = cand;
                beta = (alpha - 1.0) * ex;
            }
        }
    }
    seed.push_back(alpha);
    seed.push_back(beta);
    return seed;
}

// ---------------------------------------------------------------------------
// Fitting

struct FitOptions {
    std::size_t max_iter = 2000;
    double diameter_tol = 1e-8;
    std::size_t restarts = 5;  // moment seed + perturbations
    double hessian_step = 1e-4;
};

struct FitResult {
    ModelFamily family;
    std::vector<std::string> param_names;
    std::vector<double> estimates;
    std::vector<std::optional<double>> std_errors;
    bool se_reliable = true;
    double loglik = 0.0;
    double aic = 0.0;
    double caic = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    double grad_norm = 0.0;
    std::size_t sample_size = 0;

    std::size_t k() const { return estimates.size(); }
};

namespace detail {

inline double to_natural(double t, ParamKind kind) {
    if (kind == ParamKind::Positive) return std::exp(t);
    return 1.0 / (1.0 + std::exp(-t));
}

inline double to_transformed(double x, ParamKind kind) {
    if (kind == ParamKind::Positive) return std::log(x);
    return std::log(x / (1.0 - x));
}

// d natural / d transformed, for the delta method.
inline double transform_jacobian(double natural, ParamKind kind) {
    if (kind == ParamKind::Positive) return natural;
    return natural * (1.0 - natural);
}

struct SimplexResult {
    std::vector<double> x;
    double fval = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

// Classic Nelder-Mead with standard coefficients.
template <typename F>
SimplexResult nelder_mead(F&& f, std::vector<double> x0,
                          std::size_t max_iter, double diameter_tol) {
    const std::size_t d = x0.size();
    std::vector<std::vector<double>> verts(d + 1, x0);
    for (std::size_t i = 0; i < d; ++i) verts[i + 1][i] += 0.25;
    std::vector<double> fv(d + 1);
    for (std::size_t i = 0; i <= d; ++i) fv[i] = f(verts[i]);

    auto diameter = [&]() {
        double dmax = 0.0;
        for (std::size_t i = 0; i <= d; ++i)
            for (std::size_t j = i + 1; j <= d; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < d; ++k) {
                    const double diff = verts[i][k] - verts[j][k];
                    s += diff * diff;
                }
                dmax = std::max(dmax, s);
            }
        return std::sqrt(dmax);
    };

    SimplexResult res;
    for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
        // Order vertices by objective value.
        std::vector<std::size_t> idx(d + 1);
        for (std::size_t i = 0; i <= d; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        {
            std::vector<std::vector<double>> nv(d + 1);
            std::vector<double> nf(d + 1);
            for (std::size_t i = 0; i <= d; ++i) {
                nv[i] = verts[idx[i]];
                nf[i] = fv[idx[i]];
            }
            verts = std::move(nv);
            fv = std::move(nf);
        }
        if (diameter() < diameter_tol) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t k = 0; k < d; ++k) centroid[k] += verts[i][k] / d;

        auto blend = [&](double coef) {
            std::vector<double> x(d);
            for (std::size_t k = 0; k < d; ++k)
                x[k] = centroid[k] + coef * (centroid[k] - verts[d][k]);
            return x;
        };

        const auto xr = blend(1.0);
        const double fr = f(xr);
        if (fr < fv[0]) {
            const auto xe = blend(2.0);
            const double fe = f(xe);
            if (fe < fr) {
                verts[d] = xe;
                fv[d] = fe;
            } else {
                verts[d] = xr;
                fv[d] = fr;
            }
        } else if (fr < fv[d - 1]) {
            verts[d] = xr;
            fv[d] = fr;
        } else {
            const auto xc = blend(fr < fv[d] ? 0.5 : -0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, fv[d])) {
                verts[d] = xc;
                fv[d] = fc;
            } else {
                for (std::size_t i = 1; i <= d; ++i) {
                    for (std::size_t k = 0; k < d; ++k)
                        verts[i][k] = verts[0][k] + 0.5 * (verts[i][k] - verts[0][k]);
                    fv[i] = f(verts[i]);
                }
            }
        }
    }
    res.x = verts[0];
    res.fval = fv[0];
    return res;
}

// Gauss-Jordan inverse with partial pivoting; false if singular.
inline bool invert_matrix(std::vector<std::vector<double>>& a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (std::fabs(a[piv][col]) < 1e-300) return false;
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        const double scale = a[col][col];
        for (std::size_t c = 0; c < n; ++c) {
            a[col][c] /= scale;
            inv[col][c] /= scale;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double factor = a[r][col];
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a[r][c] -= factor * a[col][c];
                inv[r][c] -= factor * inv[col][c];
            }
        }
    }
    a = std::move(inv);
    return true;
}

}  // namespace detail

inline FitResult fit_mle(ModelFamily family, const ClaimDataset& ds,
                         const FitOptions& options = {}) {
    const auto& specs = family_params(family);
    const std::size_t d = specs.size();

    auto objective = [&](const std::vector<double>& t) -> double {
        std::vector<double> nat(d);
        for (std::size_t i = 0; i < d; ++i) {
            nat[i] = detail::to_natural(t[i], specs[i].kind);
            const bool ok = specs[i].kind == ParamKind::Positive
                                ? (nat[i] > 0.0 && std::isfinite(nat[i]))
                                : (nat[i] > 0.0 && nat[i] < 1.0);
            if (!ok) return 1e300;
        }
        double ll;
        try {
            ll = log_likelihood(make_model(family, nat), ds);
        } catch (const domain_error&) {
            return 1e300;
        }
        return std::isfinite(ll) ? -ll : 1e300;
    };

    const std::vector<double> seed_nat = moment_seed(family, ds);
    std::vector<double> seed_t(d);
    for (std::size_t i = 0; i < d; ++i)
        seed_t[i] = detail::to_transformed(seed_nat[i], specs[i].kind);

    Rng perturb_rng(0x5eedULL);  // fixed stream: restarts are deterministic
    detail::SimplexResult best;
    best.fval = std::numeric_limits<double>::infinity();
    std::size_t total_iters = 0;
    for (std::size_t restart = 0; restart < std::max<std::size_t>(options.restarts, 1);
         ++restart) {
        std::vector<double> start = seed_t;
        if (restart > 0)
            for (auto& v : start) v += (perturb_rng.uniform() - 0.5) * 1.5;
        auto run = detail::nelder_mead(objective, start, options.max_iter,
                                       options.diameter_tol);
        total_iters += run.iterations;
        if (run.fval < best.fval) best = std::move(run);
    }

    FitResult fit;
    fit.family = family;
    fit.sample_size = ds.n;
    fit.converged = best.converged && best.fval < 1e300;
    fit.iterations = total_iters;
    fit.estimates.resize(d);
    fit.param_names.resize(d);
    fit.std_errors.assign(d, std::nullopt);
    for (std::size_t i = 0; i < d; ++i) {
        fit.param_names[i] = specs[i].name;
        fit.estimates[i] = detail::to_natural(best.x[i], specs[i].kind);
    }
    fit.loglik = -best.fval;
    const double k = static_cast<double>(d);
    fit.aic = -2.0 * fit.loglik + 2.0 * k;
    fit.caic = -2.0 * fit.loglik + (1.0 + std::log(static_cast<double>(ds.n))) * k;

    // Finite-difference gradient norm at the optimum.
    {
        double g2 = 0.0;
        const double h = 1e-5;
        for (std::size_t i = 0; i < d; ++i) {
            auto xp = best.x, xm = best.x;
            xp[i] += h;
            xm[i] -= h;
            const double gi = (objective(xp) - objective(xm)) / (2.0 * h);
            g2 += gi * gi;
        }
        fit.grad_norm = std::sqrt(g2);
    }

    // Observed-information standard errors: central-difference Hessian of
    // -loglik in transformed coordinates, inverted, delta-method mapped back.
    auto hessian_diag_ok = [&](double h, std::vector<std::vector<double>>& H) {
        H.assign(d, std::vector<double>(d, 0.0));
        const double f0 = objective(best.x);
        for (std::size_t i = 0; i < d; ++i) {
            auto xp = best.x, xm = best.x;
            xp[i] += h;
            xm[i] -= h;
            H[i][i] = (objective(xp) - 2.0 * f0 + objective(xm)) / (h * h);
        }
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) {
                auto xpp = best.x, xpm = best.x, xmp = best.x, xmm = best.x;
                xpp[i] += h; xpp[j] += h;
                xpm[i] += h; xpm[j] -= h;
                xmp[i] -= h; xmp[j] += h;
                xmm[i] -= h; xmm[j] -= h;
                H[i][j] = H[j][i] = (objective(xpp) - objective(xpm) -
                                     objective(xmp) + objective(xmm)) /
                                    (4.0 * h * h);
            }
        for (std::size_t i = 0; i < d; ++i)
            if (!std::isfinite(H[i][i])) return false;
        return true;
    };

    if (fit.converged) {
        std::vector<std::vector<double>> H, H2;
        if (hessian_diag_ok(options.hessian_step, H)) {
            // Two-point step sanity check on the diagonal.
            if (hessian_diag_ok(2.0 * options.hessian_step, H2)) {
                for (std::size_t i = 0; i < d; ++i) {
                    const double a = H[i][i], b = H2[i][i];
                    if (a <= 0.0 || b <= 0.0 ||
                        std::fabs(a - b) > 0.1 * std::fabs(a))
                        fit.se_reliable = false;
                }
            }
            auto cov = H;
            if (detail::invert_matrix(cov)) {
                for (std::size_t i = 0; i < d; ++i) {
                    if (cov[i][i] > 0.0) {
                        const double se_t = std::sqrt(cov[i][i]);
                        fit.std_errors[i] =
                            se_t * std::fabs(detail::transform_jacobian(
                                       fit.estimates[i], specs[i].kind));
                    } else {
                        fit.se_reliable = false;
                    }
                }
            } else {
                fit.se_reliable = false;
            }
        } else {
            fit.se_reliable = false;
        }
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Ranking and serialization

// Ascending CAIC; ties broken by AIC, then by parameter count.
inline std::vector<FitResult> rank_models(std::vector<FitResult> fits) {
    std::stable_sort(fits.begin(), fits.end(),
                     [](const FitResult& a, const FitResult& b) {
                         if (a.caic != b.caic) return a.caic < b.caic;
                         if (a.aic != b.aic) return a.aic < b.aic;
                         return a.k() < b.k();
                     });
    return fits;
}

inline std::string fit_to_kv(const FitResult& fit) {
    std::ostringstream os;
    os.precision(10);
    os << "model=" << family_name(fit.family) << "\n";
    for (std::size_t i = 0; i < fit.k(); ++i) {
        os << fit.param_names[i] << "=" << fit.estimates[i] << "\n";
        if (fit.std_errors[i])
            os << "se_" << fit.param_names[i] << "=" << *fit.std_errors[i] << "\n";
    }
    os << "loglik=" << fit.loglik << "\n"
       << "aic=" << fit.aic << "\n"
       << "caic=" << fit.caic << "\n"
       << "converged=" << (fit.converged ? 1 : 0) << "\n"
       << "se_reliable=" << (fit.se_reliable ? 1 : 0) << "\n";
    return os.str();
}

inline std::string fit_csv_header() {
    return "model,r,p,lambda,alpha,beta,aic,caic";
}

inline std::string fit_csv_row(const FitResult& fit) {
    auto cell = [&](const char* name) -> std::string {
        for (std::size_t i = 0; i < fit.k(); ++i)
            if (fit.param_names[i] == name) {
                std::ostringstream os;
                os.precision(10);
                os << fit.estimates[i];
                return os.str();
            }
        return "";
    };
    std::ostringstream os;
    os.precision(10);
    os << family_name(fit.family) << "," << cell("r") << "," << cell("p") << ","
       << cell("lambda") << "," << cell("alpha") << "," << cell("beta") << ","
       << fit.aic << "," << fit.caic;
    return os.str();
}

}  // namespace riskagg
