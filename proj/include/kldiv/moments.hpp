#pragma once

// Moments of the likelihood-ratio statistic 2nV: exact finite-n values from
// the enumerated distribution, the gamma-distribution majorants implied by
// the MGF bound, and the chi-squared limits they converge to.

#include <cmath>
#include <cstdint>
#include <string>

#include "kldiv/bounds.hpp"
#include "kldiv/core.hpp"
#include "kldiv/errors.hpp"
#include "kldiv/exact.hpp"
#include "kldiv/numeric.hpp"

namespace kldiv {

inline constexpr unsigned kMaxMomentOrder = 20;

/// E[(chi^2_{k-1})^m] = 2^m Gamma(m + (k-1)/2) / Gamma((k-1)/2).
///
/// Integer orders use the product form prod_{j<m} (k - 1 + 2j), which is
/// exact in double while it stays below 2^53; other orders use log-gamma.
inline double chi2_raw_moment(std::uint64_t k, double m) {
    detail::require_alphabet(k);
    if (!(m >= 0.0)) throw DomainError("moment order must be non-negative");
    const double km1 = static_cast<double>(k - 1);
    if (m == std::floor(m) && m <= 170.0) {
        double prod = 1.0;
        for (int j = 0; j < static_cast<int>(m); ++j) prod *= km1 + 2.0 * j;
        return prod;
    }
    const double half = 0.5 * km1;
    return std::exp(m * std::log(2.0) + std::lgamma(m + half) - std::lgamma(half));
}

/// E[(chi^2_{k-1} - (k-1))^m] by binomial expansion of the raw moments.
inline double chi2_central_moment(std::uint64_t k, unsigned m) {
    detail::require_alphabet(k);
    const double mean = static_cast<double>(k - 1);
    numeric::CompensatedSum s;
    double binom = 1.0;  // C(m, j)
    for (unsigned j = 0; j <= m; ++j) {
        s.add(binom * chi2_raw_moment(k, j) * std::pow(-mean, static_cast<double>(m - j)));
        binom = binom * static_cast<double>(m - j) / static_cast<double>(j + 1);
    }
    return s.value();
}

/// E[exp(s chi^2_{k-1})] = (1 - 2s)^{-(k-1)/2} for 0 <= s < 1/2.
inline double chi2_mgf(std::uint64_t k, double s) {
    detail::require_alphabet(k);
    if (!(s >= 0.0 && s < 0.5)) throw DomainError("chi-squared MGF needs 0 <= s < 1/2");
    return std::exp(-0.5 * static_cast<double>(k - 1) * std::log1p(-2.0 * s));
}

/// MGF of Gamma(shape k-1, rate n). Same value as mgf_bound.
inline double gamma_mgf_bound(std::uint64_t n, std::uint64_t k, double t) { return mgf_bound(n, k, t); }

/// m-th raw moment of Gamma(shape k-1, rate n): prod_{j<m} (k-1+j) / n^m.
/// Dominates E[V^m] because the MGF bound holds term by term near t = 0.
inline double gamma_raw_moment(std::uint64_t n, std::uint64_t k, unsigned m) {
    detail::require_samples(n);
    detail::require_alphabet(k);
    const double dn = static_cast<double>(n);
    double prod = 1.0;
    for (unsigned j = 0; j < m; ++j) prod *= static_cast<double>(k - 1 + j) / dn;
    return prod;
}

/// E[exp(2nV / (4(k-1)))], the quantity whose value <= 2 certifies
/// ||2nV||_psi1 <= 4(k-1).
inline double psi1_check(const ExactDistribution& dist) {
    const double t = static_cast<double>(dist.n) / (2.0 * static_cast<double>(dist.k - 1));
    return exact_mgf(dist, t);
}

inline double psi1_check(std::uint64_t n, const CategoricalDist& p, std::uint64_t cap = kDefaultEnumerationCap) {
    return psi1_check(enumerate_divergence_distribution(n, p, cap));
}

/// Closed-form majorant (1 - 1/(2(k-1)))^{-(k-1)} of psi1_check; at most 2.
inline double psi1_bound(std::uint64_t k) {
    detail::require_alphabet(k);
    const double km1 = static_cast<double>(k - 1);
    return std::exp(-km1 * std::log1p(-0.5 / km1));
}

/// E[(2nV)^m] from the enumerated distribution.
inline double exact_raw_moment(const ExactDistribution& dist, double m) {
    const double scale = 2.0 * static_cast<double>(dist.n);
    return dist.expect([&](double v) { return std::pow(scale * v, m); });
}

inline double exact_raw_moment(std::uint64_t n, const CategoricalDist& p, double m,
                               std::uint64_t cap = kDefaultEnumerationCap) {
    return exact_raw_moment(enumerate_divergence_distribution(n, p, cap), m);
}

/// E[(2nV - E[2nV])^m], centred on the exact finite-n mean.
inline double exact_central_moment(const ExactDistribution& dist, unsigned m) {
    const double scale = 2.0 * static_cast<double>(dist.n);
    const double mean = exact_raw_moment(dist, 1.0);
    return dist.expect([&](double v) { return std::pow(scale * v - mean, static_cast<double>(m)); });
}

/// E[V]
inline double exact_mean_divergence(const ExactDistribution& dist) {
    return dist.expect([](double v) { return v; });
}

/// Paninski's bound on the expected divergence: E[V] <= log(1 + (k-1)/n).
inline double paninski_mean_bound(std::uint64_t n, std::uint64_t k) {
    return std::log1p(static_cast<double>(k - 1) / static_cast<double>(n));
}

/// Finite-n moments of 2nV next to their chi-squared limits.
struct MomentReport {
    std::uint64_t n = 0;
    std::uint64_t k = 0;
    unsigned m = 1;
    double raw_moment = 0.0;
    double central_moment = 0.0;
    double chi2_target_raw = 0.0;
    double chi2_target_central = 0.0;
};

inline MomentReport moment_report(const ExactDistribution& dist, unsigned m) {
    if (m < 1 || m > kMaxMomentOrder)
        throw DomainError("moment order must lie in [1, " + std::to_string(kMaxMomentOrder) + "], got " +
                          std::to_string(m));
    MomentReport r;
    r.n = dist.n;
    r.k = dist.k;
    r.m = m;
    r.raw_moment = exact_raw_moment(dist, m);
    r.central_moment = exact_central_moment(dist, m);
    r.chi2_target_raw = chi2_raw_moment(dist.k, m);
    r.chi2_target_central = chi2_central_moment(dist.k, m);
    return r;
}

}  // namespace kldiv
