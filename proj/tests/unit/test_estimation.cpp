#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "eventstudy/error.hpp"
#include "eventstudy/estimation.hpp"
#include "oracles.hpp"

using namespace eventstudy;

namespace {

DesignMatrix design(const std::vector<std::vector<double>>& cols, bool intercept = true) {
    DesignMatrix d(cols.front().size());
    if (intercept) d.add_intercept();
    for (std::size_t j = 0; j < cols.size(); ++j) d.add_column("x" + std::to_string(j + 1), cols[j]);
    return d;
}

}  // namespace

TEST(Ols, ThreePointLine) {
    const auto fit = ols_fit(design({{1, 2, 3}}), std::vector<double>{2, 3, 5});
    EXPECT_NEAR(fit.coefficients(0), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(fit.coefficients(1), 1.5, 1e-12);
    EXPECT_EQ(fit.names, (std::vector<std::string>{"Constant", "x1"}));
    EXPECT_EQ(fit.df_resid(), 1u);
    // residuals 1/6, -1/3, 1/6
    EXPECT_NEAR(fit.ssr, 1.0 / 6.0, 1e-12);
    EXPECT_NEAR(fit.sigma2, 1.0 / 6.0, 1e-12);
}

TEST(Ols, MatchesNormalEquationOracle) {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> z;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 8 + rep % 12, k = 1 + rep % 4;
        std::vector<std::vector<double>> cols(k - 1, std::vector<double>(n));
        std::vector<std::vector<double>> rows(n, std::vector<double>(k, 1.0));
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j + 1 < k; ++j) rows[i][j + 1] = cols[j][i] = z(gen) * (j + 1) * 10;
            y[i] = z(gen);
        }
        DesignMatrix d(n);
        d.add_intercept();
        for (std::size_t j = 0; j + 1 < k; ++j) d.add_column("c" + std::to_string(j), cols[j]);
        const auto fit = ols_fit(d, y);
        const auto ref = oracle::ols(rows, y);
        for (std::size_t j = 0; j < k; ++j) {
            EXPECT_NEAR(fit.coefficients(Eigen::Index(j)), ref[j], 1e-10 * std::max(1.0, std::abs(ref[j])));
        }
    }
}

TEST(Ols, RankDeficiencyNamesTheColumns) {
    std::vector<double> a{1, 2, 3, 4, 5}, b{2, 4, 6, 8, 10};
    DesignMatrix d(5);
    d.add_intercept().add_column("a", a).add_column("b", b);
    try {
        ols_fit(d, std::vector<double>{1, 3, 2, 5, 4});
        FAIL() << "expected RankDeficientError";
    } catch (const RankDeficientError& e) {
        const std::string msg = e.what();
        EXPECT_TRUE(msg.find('a') != std::string::npos || msg.find('b') != std::string::npos) << msg;
    }
}

TEST(Ols, ZeroColumnIsRankDeficient) {
    std::vector<double> zero(5, 0.0), x{1, 2, 3, 4, 6};
    DesignMatrix d(5);
    d.add_intercept().add_column("x", x).add_column("zero", zero);
    EXPECT_THROW(ols_fit(d, std::vector<double>{1, 2, 3, 4, 5}), RankDeficientError);
}

TEST(Ols, TooFewObservations) {
    EXPECT_THROW(ols_fit(design({{1, 2}}), std::vector<double>{1, 2}), Error);
}

TEST(Ols, LengthMismatch) {
    DesignMatrix d(3);
    EXPECT_THROW(d.add_column("x", std::vector<double>{1, 2}), Error);
    d.add_intercept();
    EXPECT_THROW(d.add_intercept(), Error);
    EXPECT_THROW(ols_fit(d, std::vector<double>{1, 2}), Error);
}

TEST(Ols, HcOnThreePoints) {
    // y = (1, 2, 6) on x = (1, 2, 3): residuals (1/2, -1, 1/2), (X'X)^-1[1][1] = 1/2.
    DesignMatrix d = design({{1, 2, 3}});
    const std::vector<double> y{1, 2, 6};
    const auto fit = ols_fit(d, y, OlsOptions{HcVariant::HC0});
    EXPECT_NEAR(fit.coefficients(1), 2.5, 1e-12);
    const auto hc0 = hc_covariance(fit, d, HcVariant::HC0);
    const auto hc1 = hc_covariance(fit, d, HcVariant::HC1);
    EXPECT_NEAR(hc0(1, 1), 0.125, 1e-12);
    EXPECT_NEAR(hc1(1, 1), 0.375, 1e-12);
    const auto ref0 = oracle::hc({{1, 1}, {1, 2}, {1, 3}}, {0.5, -1, 0.5}, false);
    const auto ref1 = oracle::hc({{1, 1}, {1, 2}, {1, 3}}, {0.5, -1, 0.5}, true);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            EXPECT_NEAR(hc0(i, j), double(ref0[i][j]), 1e-12);
            EXPECT_NEAR(hc1(i, j), double(ref1[i][j]), 1e-12);
        }
    EXPECT_NEAR(hc0(0, 0), 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(hc1(0, 0), 2.0, 1e-12);
}

TEST(Ols, ClassicalCovariance) {
    const auto d = design({{1, 2, 3}});
    const auto fit = ols_fit(d, std::vector<double>{2, 3, 5});
    // (X'X)^-1 = [[14/6, -1], [-1, 1/2]]
    EXPECT_NEAR(fit.xtx_inverse(0, 0), 14.0 / 6.0, 1e-12);
    EXPECT_NEAR(fit.xtx_inverse(1, 1), 0.5, 1e-12);
    EXPECT_NEAR(fit.classical_cov(1, 1), fit.sigma2 * 0.5, 1e-14);
}

TEST(Ols, RSquaredCenteredWithIntercept) {
    const std::vector<double> x{1, 2, 3, 4}, y{1, 3, 2, 4};
    const auto fit = ols_fit(design({x}), y);
    // slope 0.8, centered R2 = 0.64
    EXPECT_NEAR(fit.r2, 0.64, 1e-12);
    EXPECT_NEAR(fit.adjusted_r2, 1 - (1 - 0.64) * 3 / 2, 1e-12);
}

TEST(Ols, RSquaredUncenteredWithoutIntercept) {
    const std::vector<double> x{1, 2, 3}, y{1, 2, 4};
    const auto fit = ols_fit(design({x}, false), y);
    const double b = 17.0 / 14.0;
    double ssr = 0;
    for (int i = 0; i < 3; ++i) ssr += (y[i] - b * x[i]) * (y[i] - b * x[i]);
    EXPECT_NEAR(fit.r2, 1 - ssr / 21.0, 1e-12);
}

TEST(Ols, ConstantResponseWarns) {
    const auto fit = ols_fit(design({{1, 2, 3, 4}}), std::vector<double>{2, 2, 2, 2});
    EXPECT_EQ(fit.r2, 0.0);
    EXPECT_FALSE(fit.warnings.empty());
}

TEST(Ols, ScaledColumnsAreFine) {
    // Columns of wildly different magnitude still solve.
    const std::vector<double> big{1e9, 2e9, 3.5e9, 4e9, 6e9}, small{1e-6, -2e-6, 3e-6, 1e-6, 0};
    std::vector<double> y(5);
    for (int i = 0; i < 5; ++i) y[i] = 1 + 2e-9 * big[i] + 3e5 * small[i];
    const auto fit = ols_fit(design({big, small}), y);
    EXPECT_NEAR(fit.coefficients(1), 2e-9, 1e-18);
    EXPECT_NEAR(fit.coefficients(2), 3e5, 1e-4);
}

TEST(StudentT, TwoSidedNormalLimit) {
    EXPECT_NEAR(student_t_two_sided_p(1.96, 1e6), 0.05, 1e-3);
    EXPECT_EQ(student_t_two_sided_p(0.0, 10), 1.0);
    EXPECT_EQ(student_t_two_sided_p(INFINITY, 10), 0.0);
    EXPECT_NEAR(student_t_two_sided_p(-2.0, 5), student_t_two_sided_p(2.0, 5), 1e-15);
}

TEST(StudentT, OneSided) {
    EXPECT_NEAR(student_t_upper_p(0.0, 7), 0.5, 1e-15);
    EXPECT_NEAR(student_t_upper_p(1.96, 1e6), 0.025, 1e-3);
    EXPECT_NEAR(student_t_upper_p(-1.0, 4) + student_t_upper_p(1.0, 4), 1.0, 1e-14);
    // df = 1 is Cauchy: P(T > 1) = 1/4.
    EXPECT_NEAR(student_t_upper_p(1.0, 1), 0.25, 1e-14);
}

TEST(CoefficientTests, UseTheGivenCovariance) {
    const auto d = design({{1, 2, 3, 4, 5}});
    const auto fit = ols_fit(d, std::vector<double>{1.1, 1.9, 3.2, 3.8, 5.1});
    const auto tests = coefficient_tests(fit, fit.hc_cov);
    ASSERT_EQ(tests.size(), 2u);
    EXPECT_NEAR(tests[1].std_error, std::sqrt(fit.hc_cov(1, 1)), 1e-15);
    EXPECT_NEAR(tests[1].t_stat, fit.coefficients(1) / tests[1].std_error, 1e-12);
    EXPECT_NEAR(tests[1].p_value, student_t_two_sided_p(tests[1].t_stat, 3), 1e-15);
}

TEST(HcVariantNames, ParseAndPrint) {
    EXPECT_EQ(parse_hc_variant("hc0"), HcVariant::HC0);
    EXPECT_EQ(parse_hc_variant("HC1"), HcVariant::HC1);
    EXPECT_THROW(parse_hc_variant("hc3"), Error);
    EXPECT_EQ(to_string(HcVariant::HC1), "hc1");
}
