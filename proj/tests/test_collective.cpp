#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "riskagg/collective.hpp"
#include "support/quadrature.hpp"
#include "support/stats.hpp"

using namespace riskagg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<CompoundModel> all_models() {
    return {
        {Poisson(2.0), DependentPareto(3.0, 1.5)},
        {Poisson(2.0), ExponentialClaims(0.8)},
        {NegBinomial(1.7, 0.4), DependentPareto(2.5, 1.2)},
        {NegBinomial(1.7, 0.4), ExponentialClaims(1.3)},
        {Geometric(0.35), DependentPareto(3.2, 2.0)},
        {Geometric(0.35), ExponentialClaims(0.9)},
        {Logarithmic(0.6), DependentPareto(2.8, 1.4)},
    };
}

}  // namespace

TEST_CASE("law parameter validation") {
    CHECK_THROWS_AS(Poisson(0.0), domain_error);
    CHECK_THROWS_AS(NegBinomial(1.0, 1.0), domain_error);
    CHECK_THROWS_AS(NegBinomial(0.0, 0.5), domain_error);
    CHECK_THROWS_AS(Geometric(0.0), domain_error);
    CHECK_THROWS_AS(Logarithmic(1.0), domain_error);
    CHECK_THROWS_AS(DependentPareto(1.0, 0.0), domain_error);
    CHECK_THROWS_AS(ExponentialClaims(-1.0), domain_error);
}

TEST_CASE("primary pmf closed values") {
    CHECK_THAT(primary_pmf(Poisson(2.0), 0), WithinRel(std::exp(-2.0), 1e-13));
    CHECK_THAT(primary_pmf(Poisson(2.0), 3),
               WithinRel(std::exp(-2.0) * 8.0 / 6.0, 1e-13));
    CHECK_THAT(primary_pmf(Geometric(0.3), 0), WithinRel(0.3, 1e-14));
    CHECK_THAT(primary_pmf(Geometric(0.3), 2), WithinRel(0.3 * 0.49, 1e-13));
    // NB(r=2, p=0.4), n=1: r p^r (1-p) = 2 * 0.16 * 0.6
    CHECK_THAT(primary_pmf(NegBinomial(2.0, 0.4), 1),
               WithinRel(2.0 * 0.16 * 0.6, 1e-13));
    CHECK(primary_pmf(Logarithmic(0.5), 0) == 0.0);
    CHECK_THAT(primary_pmf(Logarithmic(0.5), 1),
               WithinRel(-0.5 / std::log(0.5), 1e-13));
    CHECK_THAT(primary_pmf(Logarithmic(0.5), 3),
               WithinRel(-0.5 * 0.5 * 0.5 / (3.0 * std::log(0.5)), 1e-13));
}

TEST_CASE("pmf walker ratio recurrence matches direct pmf") {
    for (const auto& model : all_models()) {
        detail::PmfWalker walker(model.primary);
        CHECK_THAT(walker.pmf, WithinAbs(primary_pmf(model.primary, 0), 1e-15));
        for (std::size_t n = 1; n <= 120; ++n) {
            const double p = walker.next();
            CHECK_THAT(p, WithinAbs(primary_pmf(model.primary, n), 1e-15));
        }
        CHECK(walker.tail_negligible());
    }
}

TEST_CASE("atom at zero") {
    CHECK_THAT(compound_atom0({Poisson(2.0), DependentPareto(3.0, 1.0)}),
               WithinRel(std::exp(-2.0), 1e-13));
    CHECK_THAT(compound_atom0({Geometric(0.35), ExponentialClaims(1.0)}),
               WithinRel(0.35, 1e-14));
    CHECK(compound_atom0({Logarithmic(0.6), DependentPareto(2.0, 1.0)}) == 0.0);
}

TEST_CASE("closed-form density agrees with the convolution series") {
    for (const auto& model : all_models()) {
        for (double x : {0.05, 0.3, 1.0, 3.0, 10.0, 40.0}) {
            const double series = compound_pdf_series(model, x);
            const double closed = compound_pdf(model, x);
            CHECK_THAT(closed, WithinRel(series, 1e-10));
        }
    }
}

TEST_CASE("density plus atom integrates to one") {
    for (const auto& model : all_models()) {
        const double cont = testsupport::integrate_to_inf(
            [&](double x) { return x <= 0.0 ? 0.0 : compound_pdf(model, x); }, 0.0,
            1e-11);
        CHECK_THAT(compound_atom0(model) + cont, WithinAbs(1.0, 1e-7));
    }
}

TEST_CASE("cdf equals atom plus integral of the density") {
    for (const auto& model : all_models()) {
        for (double x : {0.5, 2.0, 8.0}) {
            const double oracle =
                compound_atom0(model) +
                testsupport::integrate(
                    [&](double t) { return t <= 0.0 ? 0.0 : compound_pdf(model, t); },
                    0.0, x, 1e-12);
            CHECK_THAT(compound_cdf(model, x), WithinAbs(oracle, 1e-8));
            CHECK_THAT(compound_cdf(model, x) + compound_sf(model, x),
                       WithinAbs(1.0, 1e-10));
        }
        CHECK(compound_cdf(model, 0.0) == compound_atom0(model));
        CHECK_THAT(compound_sf(model, 0.0),
                   WithinAbs(1.0 - compound_atom0(model), 1e-14));
        CHECK_THROWS_AS(compound_cdf(model, -0.5), domain_error);
        CHECK_THROWS_AS(compound_sf(model, -0.5), domain_error);
    }
}

TEST_CASE("deep tail survival keeps relative accuracy") {
    // sf down near 1e-9: compare tail-first sum against the geometric-Pareto
    // closed form (1-p)(1 + p x / beta)^{-alpha}.
    CompoundModel gp{Geometric(0.93186), DependentPareto(2.04655, 2.05481)};
    const auto& g = std::get<Geometric>(gp.primary);
    const auto& s = std::get<DependentPareto>(gp.secondary);
    for (double x : {20.0, 200.0, 2e4, 2e6}) {
        const double closed =
            (1.0 - g.p) * std::exp(-s.alpha * std::log1p(g.p * x / s.beta));
        CHECK_THAT(compound_sf(gp, x), WithinRel(closed, 1e-10));
    }
}

TEST_CASE("geometric-exponential closed survival") {
    CompoundModel ge{Geometric(0.4), ExponentialClaims(1.1)};
    for (double x : {0.5, 3.0, 15.0}) {
        // sf = (1-p) e^{-a p x}
        CHECK_THAT(compound_sf(ge, x),
                   WithinRel(0.6 * std::exp(-1.1 * 0.4 * x), 1e-10));
    }
}

TEST_CASE("compound mean and variance against quadrature") {
    // Larger Pareto shapes than the shared list: the x^2-weighted integrand
    // decays like x^{1-alpha}, and shapes near 2 make the transformed
    // integrand endpoint-singular and the quadrature extremely slow.
    const std::vector<CompoundModel> models = {
        {Poisson(2.0), DependentPareto(5.0, 1.5)},
        {Poisson(2.0), ExponentialClaims(0.8)},
        {NegBinomial(1.7, 0.4), DependentPareto(6.0, 1.2)},
        {NegBinomial(1.7, 0.4), ExponentialClaims(1.3)},
        {Geometric(0.35), DependentPareto(5.5, 2.0)},
        {Geometric(0.35), ExponentialClaims(0.9)},
        {Logarithmic(0.6), DependentPareto(5.0, 1.4)},
    };
    for (const auto& model : models) {
        const double mean = compound_mean(model);
        const double var = compound_variance(model);
        const double m1 = testsupport::integrate_to_inf(
            [&](double x) { return x <= 0.0 ? 0.0 : x * compound_pdf(model, x); },
            0.0, 1e-11);
        const double m2 = testsupport::integrate_to_inf(
            [&](double x) { return x <= 0.0 ? 0.0 : x * x * compound_pdf(model, x); },
            0.0, 1e-11);
        CHECK_THAT(mean, WithinRel(m1, 1e-6));
        CHECK_THAT(var, WithinRel(m2 - m1 * m1, 1e-5));
    }
}

TEST_CASE("poisson-pareto closed moment formulas") {
    CompoundModel pp{Poisson(2.0), DependentPareto(3.0, 1.5)};
    // mean = lambda beta / (alpha - 1)
    CHECK_THAT(compound_mean(pp), WithinRel(2.0 * 1.5 / 2.0, 1e-13));
    // var = lambda beta^2 (lambda + 2 alpha - 2) / ((alpha-1)^2 (alpha-2))
    CHECK_THAT(compound_variance(pp),
               WithinRel(2.0 * 2.25 * (2.0 + 4.0) / (4.0 * 1.0), 1e-13));
    CHECK_THROWS_AS(
        compound_mean(CompoundModel{Poisson(1.0), DependentPareto(0.9, 1.0)}),
        moment_error);
    CHECK_THROWS_AS(
        compound_variance(CompoundModel{Poisson(1.0), DependentPareto(1.5, 1.0)}),
        moment_error);
}

TEST_CASE("compound sampler matches analytics") {
    Rng rng(60601);
    for (const auto& model : all_models()) {
        const int n = 100000;
        std::vector<double> xs(n);
        int zeros = 0;
        for (auto& x : xs) {
            x = sample_compound(model, rng);
            if (x == 0.0) ++zeros;
        }
        CHECK_THAT(static_cast<double>(zeros) / n,
                   WithinAbs(compound_atom0(model), 0.01));
        CHECK_THAT(testsupport::sample_mean(xs), WithinRel(compound_mean(model), 0.05));
        const double ks = testsupport::ks_distance(
            xs, [&](double x) { return compound_cdf(model, x); });
        CHECK(ks < 0.008);
    }
}

TEST_CASE("sampling is deterministic per seed") {
    CompoundModel pp{Poisson(2.0), DependentPareto(3.0, 1.5)};
    Rng a(11), b(11);
    for (int i = 0; i < 200; ++i) CHECK(sample_compound(pp, a) == sample_compound(pp, b));
}

TEST_CASE("density rejects non-positive evaluation points") {
    CompoundModel pp{Poisson(2.0), DependentPareto(3.0, 1.5)};
    CHECK_THROWS_AS(compound_pdf(pp, 0.0), domain_error);
    CHECK_THROWS_AS(compound_pdf(pp, -1.0), domain_error);
    CHECK_THROWS_AS(compound_pdf_series(pp, 0.0), domain_error);
}
