#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <vector>

#include "riskagg/mvpareto.hpp"
#include "riskagg/univariate.hpp"
#include "support/quadrature.hpp"
#include "support/stats.hpp"

using namespace riskagg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("model validation") {
    CHECK_THROWS_AS(MvParetoModel(0.0, 1.0, 2), domain_error);
    CHECK_THROWS_AS(MvParetoModel(1.0, 0.0, 2), domain_error);
    CHECK_THROWS_AS(MvParetoModel(1.0, 1.0, 0), domain_error);
}

TEST_CASE("joint pdf closed form and dimension checks") {
    MvParetoModel m(3.0, 2.0, 2);
    // n=2: f(x) = alpha(alpha+1)/beta^2 (1 + (x1+x2)/beta)^{-(alpha+2)}
    const std::array<double, 2> x{1.0, 0.5};
    const double expected =
        3.0 * 4.0 / 4.0 * std::pow(1.0 + 1.5 / 2.0, -5.0);
    CHECK_THAT(joint_pdf(x, m), WithinRel(expected, 1e-13));
    const std::array<double, 2> neg{-0.1, 0.5};
    CHECK(joint_pdf(neg, m) == 0.0);
    const std::array<double, 3> wrong{1.0, 1.0, 1.0};
    CHECK_THROWS_AS(joint_pdf(wrong, m), std::invalid_argument);
}

TEST_CASE("joint survival closed form") {
    MvParetoModel m(2.5, 1.5, 3);
    const std::array<double, 3> x{0.4, 0.7, 0.2};
    CHECK_THAT(joint_survival(x, m),
               WithinRel(std::pow(1.0 + 1.3 / 1.5, -2.5), 1e-13));
    const std::array<double, 3> zero{0.0, 0.0, 0.0};
    CHECK_THAT(joint_survival(zero, m), WithinAbs(1.0, 1e-15));
    const std::array<double, 3> neg{0.1, -0.2, 0.3};
    CHECK_THROWS_AS(joint_survival(neg, m), domain_error);
}

TEST_CASE("bivariate pdf integrates to the joint survival complement") {
    // Check marginalization: integrating x2 out of the joint pdf gives the
    // univariate Pareto density.
    MvParetoModel m(3.0, 2.0, 2);
    ParetoParams pa(3.0, 2.0);
    for (double x1 : {0.3, 1.0, 4.0}) {
        const double marg = testsupport::integrate_to_inf(
            [&](double x2) {
                const std::array<double, 2> x{x1, x2};
                return joint_pdf(x, m);
            },
            0.0, 1e-12);
        CHECK_THAT(marg, WithinRel(pareto_pdf(x1, pa), 1e-8));
    }
}

TEST_CASE("survival function consistent with copula of marginal survivals") {
    // S(x1,...,xn) = C(S1(x1),...,Sn(xn)) with the stated copula.
    MvParetoModel m(2.2, 1.3, 3);
    ParetoParams pa(2.2, 1.3);
    const std::array<double, 3> x{0.5, 1.7, 0.1};
    std::array<double, 3> u{};
    for (std::size_t i = 0; i < 3; ++i) u[i] = pareto_sf(x[i], pa);
    CHECK_THAT(clayton_copula(u, 2.2), WithinRel(joint_survival(x, m), 1e-12));
}

TEST_CASE("clayton copula boundary behavior") {
    const std::array<double, 2> ones{1.0, 1.0};
    CHECK_THAT(clayton_copula(ones, 3.0), WithinAbs(1.0, 1e-15));
    const std::array<double, 2> mixed{1.0, 0.37};
    CHECK_THAT(clayton_copula(mixed, 3.0), WithinAbs(0.37, 1e-13));
    const std::array<double, 2> bad{0.0, 0.5};
    CHECK_THROWS_AS(clayton_copula(bad, 3.0), domain_error);
    CHECK_THROWS_AS(clayton_copula(ones, -1.0), domain_error);
}

TEST_CASE("cross moments") {
    MvParetoModel m(5.0, 2.0, 2);
    // E[X1] = beta/(alpha-1)
    const std::array<double, 2> r10{1.0, 0.0};
    CHECK_THAT(cross_moment(r10, m), WithinRel(2.0 / 4.0, 1e-13));
    // E[X1 X2] = beta^2 Gamma(alpha-2)/Gamma(alpha) = beta^2/((a-1)(a-2))
    const std::array<double, 2> r11{1.0, 1.0};
    CHECK_THAT(cross_moment(r11, m), WithinRel(4.0 / (4.0 * 3.0), 1e-13));
    // E[X1^2] = 2 beta^2 / ((a-1)(a-2))
    const std::array<double, 2> r20{2.0, 0.0};
    CHECK_THAT(cross_moment(r20, m), WithinRel(2.0 * 4.0 / 12.0, 1e-13));
    const std::array<double, 2> r50{5.0, 0.0};
    CHECK_THROWS_AS(cross_moment(r50, m), moment_error);
    const std::array<double, 2> r41{4.0, 1.0};
    CHECK_THROWS_AS(cross_moment(r41, m), moment_error);
}

TEST_CASE("covariance, variance and correlation closed forms") {
    MvParetoModel m(4.0, 3.0, 2);
    // cov = beta^2/((a-1)^2(a-2)) = 9/(9*2) = 0.5
    CHECK_THAT(pair_covariance(m), WithinRel(0.5, 1e-13));
    // var = alpha beta^2/((a-1)^2(a-2)) = 2
    CHECK_THAT(marginal_variance(m), WithinRel(2.0, 1e-13));
    CHECK_THAT(pair_correlation(m), WithinRel(0.25, 1e-14));
    // consistency with cross moments
    const std::array<double, 2> r11{1.0, 1.0};
    const std::array<double, 2> r10{1.0, 0.0};
    const double mean = cross_moment(r10, m);
    CHECK_THAT(pair_covariance(m),
               WithinRel(cross_moment(r11, m) - mean * mean, 1e-12));
    MvParetoModel shallow(2.0, 1.0, 2);
    CHECK_THROWS_AS(pair_covariance(shallow), moment_error);
    CHECK_THROWS_AS(marginal_variance(shallow), moment_error);
    CHECK_THROWS_AS(pair_correlation(shallow), moment_error);
}

TEST_CASE("sampler marginals, correlation and determinism") {
    MvParetoModel m(3.0, 2.0, 2);
    ParetoParams pa(3.0, 2.0);
    Rng rng(2024);
    const int n = 200000;
    std::vector<double> x1(n), x2(n);
    for (int i = 0; i < n; ++i) {
        const auto v = sample_vector(m, rng);
        x1[i] = v[0];
        x2[i] = v[1];
    }
    CHECK_THAT(testsupport::sample_mean(x1), WithinRel(1.0, 0.02));
    CHECK_THAT(testsupport::sample_mean(x2), WithinRel(1.0, 0.02));
    CHECK_THAT(testsupport::sample_correlation(x1, x2),
               WithinAbs(pair_correlation(m), 0.02));
    const double ks =
        testsupport::ks_distance(x1, [&](double x) { return pareto_cdf(x, pa); });
    CHECK(ks < 0.005);

    Rng r1(5), r2(5);
    CHECK(sample_vector(m, r1) == sample_vector(m, r2));
}
