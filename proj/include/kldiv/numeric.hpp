#pragma once

// Small numerical helpers shared by the exact, bound and moment code:
// compensated summation, streaming log-sum-exp, log-gamma based
// combinatorics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace kldiv::numeric {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Sums terms in descending order of magnitude with compensation.
// Mixed-sign sums whose result is near zero keep their accuracy.
// The _inplace variant reorders its argument.
inline double sum_by_magnitude_inplace(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end(),
              [](double a, double b) { return std::abs(a) > std::abs(b); });
    CompensatedSum acc;
    for (double t : terms) acc.add(t);
    return acc.value();
}

inline double sum_by_magnitude(std::vector<double> terms) { return sum_by_magnitude_inplace(terms); }

// Streaming log(sum(exp(x_i))). Rescales when a larger term arrives, so a
// single pass suffices. Terms equal to -inf contribute nothing.
class LogSumExp {
public:
    void add(double log_term) noexcept {
        if (log_term == -kInf) return;
        if (log_term == kInf) {
            max_ = kInf;
            return;
        }
        if (max_ == -kInf) {
            max_ = log_term;
            scaled_ = 1.0;
        } else if (log_term <= max_) {
            scaled_ += std::exp(log_term - max_);
        } else {
            scaled_ = scaled_ * std::exp(max_ - log_term) + 1.0;
            max_ = log_term;
        }
    }

    double log_value() const noexcept {
        if (max_ == -kInf || max_ == kInf) return max_;
        return max_ + std::log(scaled_);
    }

    double value() const noexcept { return std::exp(log_value()); }

private:
    double max_ = -kInf;
    double scaled_ = 0.0;
};

inline double log_factorial(std::uint64_t n) {
    return std::lgamma(static_cast<double>(n) + 1.0);
}

// log C(n, r); -inf when r > n.
inline double log_binomial(std::uint64_t n, std::uint64_t r) {
    if (r > n) return -kInf;
    if (r == 0 || r == n) return 0.0;
    return log_factorial(n) - log_factorial(r) - log_factorial(n - r);
}

// C(n, r) as a double through a running product. Every partial product is
// itself a binomial coefficient, so the result is exact below 2^53.
inline double binomial(std::uint64_t n, std::uint64_t r) {
    if (r > n) return 0.0;
    r = std::min(r, n - r);
    double c = 1.0;
    for (std::uint64_t j = 1; j <= r; ++j)
        c = c * static_cast<double>(n - r + j) / static_cast<double>(j);
    return c;
}

// Number of compositions of n into k non-negative parts: C(n+k-1, k-1).
inline double composition_count(std::uint64_t n, std::uint64_t k) {
    if (k == 0) return n == 0 ? 1.0 : 0.0;
    return binomial(n + k - 1, k - 1);
}

// log C(n+k-1, k-1). Exact up to the final rounding while the count stays
// below 2^53; log-gamma beyond that.
inline double log_composition_count(std::uint64_t n, std::uint64_t k) {
    if (k == 0) return n == 0 ? 0.0 : -kInf;
    const double approx = log_binomial(n + k - 1, k - 1);
    if (approx < 36.0) return std::log(binomial(n + k - 1, k - 1));
    return approx;
}

// log of the binomial pmf P[Binom(n, p) = i], with the 0^0 = 1 convention.
inline double log_binomial_pmf(std::uint64_t n, std::uint64_t i, double p) {
    if (i > n) return -kInf;
    const double succ = static_cast<double>(i);
    const double fail = static_cast<double>(n - i);
    double lp = log_binomial(n, i);
    if (i > 0) lp += p > 0.0 ? succ * std::log(p) : -kInf;
    if (i < n) lp += p < 1.0 ? fail * std::log1p(-p) : -kInf;
    return lp;
}

}  // namespace kldiv::numeric
