#pragma once

// Domain types for categorical distributions and multinomial counts, and the
// empirical KL divergence V = KL(X/n || P). The likelihood-ratio statistic of
// the multinomial goodness-of-fit test is 2n * V.

#include <compare>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kldiv/errors.hpp"
#include "kldiv/numeric.hpp"

namespace kldiv {

inline constexpr double kNormalizationTolerance = 1e-12;

/// Probability vector P = (p_1, ..., p_k) with k >= 2.
///
/// Construction rejects vectors whose entries leave [0, 1] or whose sum is
/// more than 1e-12 away from one. Vectors inside the tolerance are rescaled
/// so the stored entries sum to one as closely as doubles allow.
class CategoricalDist {
public:
    explicit CategoricalDist(std::vector<double> probs) : probs_(std::move(probs)) {
        if (probs_.size() < 2)
            throw InvalidDistribution("categorical distribution needs k >= 2 entries, got " +
                                      std::to_string(probs_.size()));
        numeric::CompensatedSum total;
        for (std::size_t i = 0; i < probs_.size(); ++i) {
            const double p = probs_[i];
            if (!(p >= 0.0 && p <= 1.0))
                throw InvalidDistribution("probability at index " + std::to_string(i) +
                                          " is outside [0, 1]: " + std::to_string(p));
            total.add(p);
        }
        const double sum = total.value();
        if (std::abs(sum - 1.0) > kNormalizationTolerance)
            throw InvalidDistribution("probabilities sum to " + std::to_string(sum) +
                                      ", not 1 within 1e-12");
        if (sum != 1.0)
            for (double& p : probs_) p /= sum;
    }

    static CategoricalDist uniform(std::size_t k) {
        if (k < 2) throw InvalidDistribution("uniform distribution needs k >= 2");
        return CategoricalDist(std::vector<double>(k, 1.0 / static_cast<double>(k)));
    }

    // (p, 1 - p)
    static CategoricalDist binary(double p) { return CategoricalDist({p, 1.0 - p}); }

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    std::span<const double> probs() const noexcept { return probs_; }

    // Indices with p_i > 0.
    std::vector<std::size_t> support() const {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < probs_.size(); ++i)
            if (probs_[i] > 0.0) idx.push_back(i);
        return idx;
    }

    bool operator==(const CategoricalDist&) const = default;

private:
    std::vector<double> probs_;
};

/// Observed multinomial counts X = (X_1, ..., X_k); n = sum of counts >= 1.
class CountVector {
public:
    explicit CountVector(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
        if (counts_.empty()) throw DimensionError("count vector must be non-empty");
        n_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
        if (n_ == 0) throw DomainError("count vector must contain at least one sample");
    }

    std::size_t size() const noexcept { return counts_.size(); }
    std::uint64_t n() const noexcept { return n_; }
    std::uint64_t operator[](std::size_t i) const { return counts_[i]; }
    std::span<const std::uint64_t> counts() const noexcept { return counts_; }

    bool operator==(const CountVector&) const = default;

private:
    std::vector<std::uint64_t> counts_;
    std::uint64_t n_ = 0;
};

/// KL divergence in nats. +infinity is a regular value that compares greater
/// than every finite divergence.
struct DivergenceValue {
    double nats = 0.0;

    constexpr DivergenceValue() = default;
    constexpr explicit DivergenceValue(double v) : nats(v) {}

    static constexpr DivergenceValue infinite() {
        return DivergenceValue(std::numeric_limits<double>::infinity());
    }

    constexpr bool is_finite() const { return nats != std::numeric_limits<double>::infinity(); }
    constexpr double value() const { return nats; }

    constexpr auto operator<=>(const DivergenceValue&) const = default;
};

namespace detail {

// Sum of q_i * log(q_i / p_i) given q_i = num_i / den. Zero numerators are
// skipped; a positive numerator against p_i = 0 gives +inf.
// `terms` is scratch space, reused across calls by hot loops.
template <typename Num>
DivergenceValue kl_from_ratios(std::span<const Num> num, double den, std::span<const double> p,
                               std::vector<double>& terms) {
    terms.clear();
    for (std::size_t i = 0; i < num.size(); ++i) {
        const double qi = static_cast<double>(num[i]) / den;
        if (qi == 0.0) continue;
        if (p[i] == 0.0) return DivergenceValue::infinite();
        terms.push_back(qi * std::log(static_cast<double>(num[i]) / (den * p[i])));
    }
    const double total = numeric::sum_by_magnitude_inplace(terms);
    // Gibbs' inequality; negative results are roundoff.
    return DivergenceValue(total > 0.0 ? total : 0.0);
}

template <typename Num>
DivergenceValue kl_from_ratios(std::span<const Num> num, double den, std::span<const double> p) {
    std::vector<double> terms;
    terms.reserve(num.size());
    return kl_from_ratios(num, den, p, terms);
}

inline void require_same_length(std::size_t a, std::size_t b) {
    if (a != b)
        throw DimensionError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace detail

/// KL(q || p) = sum q_i log(q_i / p_i), with 0 log(0/p) = 0 and +inf when q
/// puts mass where p has none.
inline DivergenceValue kl_divergence(const CategoricalDist& q, const CategoricalDist& p) {
    detail::require_same_length(q.size(), p.size());
    return detail::kl_from_ratios(q.probs(), 1.0, p.probs());
}

/// V_{n,k,P} for one observation: KL(X/n || P).
inline DivergenceValue empirical_divergence(const CountVector& x, const CategoricalDist& p) {
    detail::require_same_length(x.size(), p.size());
    return detail::kl_from_ratios(x.counts(), static_cast<double>(x.n()), p.probs());
}

/// Likelihood-ratio statistic 2n * V.
inline double likelihood_ratio_statistic(const CountVector& x, const CategoricalDist& p) {
    return 2.0 * static_cast<double>(x.n()) * empirical_divergence(x, p).nats;
}

struct ChainRuleParts {
    DivergenceValue binary_part;       // KL((X_k/n, 1 - X_k/n) || (p_k, 1 - p_k))
    DivergenceValue conditional_part;  // V_{n - X_k, k - 1, P'}
    double weight = 0.0;               // (n - X_k) / n

    // binary_part + weight * conditional_part
    double recombined() const {
        if (weight == 0.0) return binary_part.nats;
        return binary_part.nats + weight * conditional_part.nats;
    }
};

/// Splits V_{n,k,P} on the last coordinate:
///   V = KL((X_k/n, 1 - X_k/n) || (p_k, 1 - p_k)) + (n - X_k)/n * V_{n - X_k, k - 1, P'}
/// where P' is P restricted to the first k - 1 coordinates and renormalized.
/// The conditional part is 0 when X_k = n.
inline ChainRuleParts chain_rule_decompose(const CountVector& x, const CategoricalDist& p) {
    detail::require_same_length(x.size(), p.size());
    const std::size_t k = p.size();
    if (k < 3) throw DomainError("chain-rule decomposition needs k >= 3");
    const double pk = p[k - 1];
    if (pk >= 1.0) throw DegenerateDistribution("chain-rule decomposition needs p_k < 1");

    const std::uint64_t n = x.n();
    const std::uint64_t xk = x[k - 1];
    const std::uint64_t rest = n - xk;

    ChainRuleParts parts;
    const std::uint64_t split[2] = {xk, rest};
    const double head[2] = {pk, 1.0 - pk};
    parts.binary_part = detail::kl_from_ratios(std::span<const std::uint64_t>(split),
                                               static_cast<double>(n), std::span<const double>(head));
    parts.weight = static_cast<double>(rest) / static_cast<double>(n);
    if (rest == 0) return parts;

    numeric::CompensatedSum mass;
    for (std::size_t i = 0; i + 1 < k; ++i) mass.add(p[i]);
    std::vector<double> conditional(k - 1);
    for (std::size_t i = 0; i + 1 < k; ++i) conditional[i] = p[i] / mass.value();
    parts.conditional_part = detail::kl_from_ratios(x.counts().first(k - 1), static_cast<double>(rest),
                                                    std::span<const double>(conditional));
    return parts;
}

}  // namespace kldiv
