#include <gtest/gtest.h>

#include <cmath>

#include "kldiv/moments.hpp"
#include "kldiv/verify.hpp"
#include "oracles.hpp"

using namespace kldiv;

TEST(Chi2Raw, Examples) {
    EXPECT_EQ(chi2_raw_moment(3, 2), 8.0);
    EXPECT_EQ(chi2_raw_moment(2, 2), 3.0);
    for (std::uint64_t k = 2; k <= 50; ++k) EXPECT_EQ(chi2_raw_moment(k, 1), static_cast<double>(k - 1));
}

TEST(Chi2Raw, NonIntegerOrderUsesGammaRatio) {
    // E[(chi^2_2)^{1/2}] = sqrt(2) Gamma(3/2) / Gamma(1) = sqrt(pi / 2)
    EXPECT_NEAR(chi2_raw_moment(3, 0.5), std::sqrt(std::acos(-1.0) / 2.0), 1e-14);
    // Continuity between the two branches.
    EXPECT_NEAR(chi2_raw_moment(5, 3.0 + 1e-12), chi2_raw_moment(5, 3.0), 1e-9);
}

TEST(Chi2Central, Examples) {
    EXPECT_EQ(chi2_central_moment(7, 1), 0.0);
    EXPECT_EQ(chi2_central_moment(3, 2), 4.0);
    EXPECT_NEAR(chi2_central_moment(2, 3), 8.0, 1e-12);
    for (std::uint64_t k = 2; k <= 50; ++k)
        EXPECT_NEAR(chi2_central_moment(k, 2), 2.0 * static_cast<double>(k - 1), 1e-12);
}

TEST(Chi2Quadrature, RawMomentsAgree) {
    for (std::uint64_t k : {2u, 3u, 5u, 11u})
        for (int m = 1; m <= 6; ++m) {
            const double want = oracle::chi2_moment_quadrature(static_cast<double>(k - 1), 0.0, m);
            EXPECT_NEAR(chi2_raw_moment(k, m), want, 1e-9 * want) << k << ' ' << m;
        }
}

TEST(Chi2Quadrature, CentralMomentsAgree) {
    for (std::uint64_t k : {2u, 3u, 5u, 11u})
        for (unsigned m = 1; m <= 6; ++m) {
            const double nu = static_cast<double>(k - 1);
            const double want = oracle::chi2_moment_quadrature(nu, nu, static_cast<int>(m));
            // Scale by the absolute-moment size so m = 1 (value 0) has a meaningful tolerance.
            const double scale = std::max(1.0, std::pow(std::sqrt(2.0 * nu), m));
            EXPECT_NEAR(chi2_central_moment(k, m), want, 1e-9 * scale) << k << ' ' << m;
        }
}

TEST(Chi2Mgf, ClosedForm) {
    EXPECT_NEAR(chi2_mgf(3, 0.25), 2.0, 1e-15);
    EXPECT_THROW(chi2_mgf(3, 0.5), DomainError);
}

TEST(GammaBound, MatchesMgfBoundAndMoments) {
    EXPECT_EQ(gamma_mgf_bound(10, 4, 5.0), mgf_bound(10, 4, 5.0));
    EXPECT_NEAR(gamma_mgf_bound(10, 2, 5.0), 2.0, 1e-15);
    EXPECT_EQ(gamma_raw_moment(1, 2, 1), 1.0);
    EXPECT_NEAR(gamma_raw_moment(4, 3, 2), 2.0 * 3.0 / 16.0, 1e-16);
}

TEST(GammaBound, DominatesExactMoments) {
    for (std::size_t k = 2; k <= 4; ++k)
        for (const auto& p : verify::simplex_grid(k, 4))
            for (std::uint64_t n = 1; n <= 10; ++n) {
                const auto d = enumerate_divergence_distribution(n, p);
                for (unsigned m = 1; m <= 6; ++m) {
                    const double scaled = exact_raw_moment(d, m) / std::pow(2.0, m);  // E[(nV)^m]
                    const double bound = gamma_raw_moment(n, k, m) * std::pow(static_cast<double>(n), m);
                    EXPECT_LE(scaled, bound + 1e-12 * bound) << n << ' ' << k << ' ' << m;
                }
            }
}

TEST(Psi1, Examples) {
    EXPECT_NEAR(psi1_check(2, CategoricalDist::uniform(2)), 1.5, 1e-12);
    EXPECT_NEAR(psi1_bound(2), 2.0, 1e-15);
    for (std::uint64_t k = 2; k <= 200; ++k) EXPECT_LE(psi1_bound(k), 2.0);
}

TEST(Psi1, AtMostTwoOnGrid) {
    const auto r = verify::check_psi1(12);
    EXPECT_TRUE(r.passed) << r.worst_slack;
    EXPECT_GT(r.cases, 0u);
}

TEST(ExactMoments, FairCoinTwoSamples) {
    const auto d = enumerate_divergence_distribution(2, CategoricalDist::uniform(2));
    EXPECT_NEAR(exact_raw_moment(d, 1), 2.0 * std::log(2.0), 1e-14);
    EXPECT_NEAR(exact_mean_divergence(d), 0.5 * std::log(2.0), 1e-15);
    // 2nV takes values 0 and 4 log 2 with probability 1/2 each.
    const double a = 2.0 * std::log(2.0);
    EXPECT_NEAR(exact_central_moment(d, 2), a * a, 1e-13);
    EXPECT_NEAR(exact_central_moment(d, 3), 0.0, 1e-13);
}

TEST(ExactMoments, MatchRecursiveOracle) {
    const std::vector<double> pv{0.1, 0.2, 0.3, 0.4};
    const auto d = enumerate_divergence_distribution(8, CategoricalDist(pv));
    const auto o = oracle::multinomial_outcomes(8, pv);
    for (int m = 1; m <= 5; ++m) {
        long double want = 0.0L;
        for (const auto& x : o) want += x.prob * std::pow(16.0L * x.divergence, static_cast<long double>(m));
        EXPECT_NEAR(exact_raw_moment(d, m), static_cast<double>(want), 1e-12 * static_cast<double>(want));
    }
}

TEST(Paninski, HoldsOnGrid) {
    const auto r = verify::check_paninski(12);
    EXPECT_TRUE(r.passed) << r.worst_slack;
}

TEST(Paninski, LargeUniform) {
    const std::uint64_t n = 300;
    EXPECT_LE(exact_raw_moment(n, CategoricalDist::uniform(3), 1), 2.0 * n * paninski_mean_bound(n, 3));
}

TEST(Convergence, FairCoinMeanApproachesOne) {
    double prev = INFINITY;
    for (std::uint64_t n : {10u, 40u, 160u}) {
        const double gap = std::abs(exact_raw_moment(n, CategoricalDist::uniform(2), 1) - 1.0);
        EXPECT_LT(gap, prev);
        prev = gap;
    }
}

TEST(Convergence, MgfWindowStaysBelowFiniteBound) {
    for (double s : {0.1, 0.25, 0.4})
        for (std::uint64_t n : {10u, 40u, 160u}) {
            const auto d = enumerate_divergence_distribution(n, CategoricalDist({0.3, 0.3, 0.4}));
            const double v = exact_mgf(d, 2.0 * n * s);
            EXPECT_LE(v, std::pow(1.0 - 2.0 * s, -2.0) * (1.0 + 1e-12));
        }
}

TEST(MomentReport, FieldsAndRange) {
    const auto d = enumerate_divergence_distribution(5, CategoricalDist::uniform(3));
    const auto r = moment_report(d, 2);
    EXPECT_EQ(r.n, 5u);
    EXPECT_EQ(r.k, 3u);
    EXPECT_EQ(r.chi2_target_raw, 8.0);
    EXPECT_EQ(r.chi2_target_central, 4.0);
    EXPECT_GE(r.raw_moment, 0.0);
    EXPECT_THROW(moment_report(d, 0), DomainError);
    EXPECT_THROW(moment_report(d, 21), DomainError);
    EXPECT_NO_THROW(moment_report(d, 20));
}
