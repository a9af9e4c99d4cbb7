#pragma once

// Closed-form bounds on the MGF and upper tail of V_{n,k,P}, the classical
// method-of-types bound and a transcription of the "interpretable" bound used
// for comparison, plus inversions into critical values and sample sizes.
//
// Every bound is evaluated in log space; the log_* functions are the primary
// implementations and the plain versions exponentiate them. Tail bounds are
// never clamped to 1.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <string>

#include "kldiv/errors.hpp"
#include "kldiv/numeric.hpp"

namespace kldiv {

namespace detail {

inline void require_alphabet(std::uint64_t k) {
    if (k < 2) throw DomainError("alphabet size k must be at least 2, got " + std::to_string(k));
}

inline void require_samples(std::uint64_t n) {
    if (n == 0) throw DomainError("sample count n must be positive");
}

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// Left edge (k-1)/n of the region where the tail bound is valid.
inline double tail_region_boundary(std::uint64_t n, std::uint64_t k) {
    return static_cast<double>(k - 1) / static_cast<double>(n);
}

/// log of (1 - t/n)^-(k-1), the MGF of Gamma(shape k-1, rate n).
inline double log_mgf_bound(std::uint64_t n, std::uint64_t k, double t) {
    detail::require_samples(n);
    detail::require_alphabet(k);
    const double dn = static_cast<double>(n);
    if (!(t >= 0.0 && t < dn))
        throw DomainError("MGF bound needs 0 <= t < n = " + std::to_string(n) + ", got t = " +
                          detail::fmt17(t));
    return -static_cast<double>(k - 1) * std::log1p(-t / dn);
}

/// Upper bound (1 - t/n)^-(k-1) on E[exp(t V_{n,k,P})], valid for every P.
inline double mgf_bound(std::uint64_t n, std::uint64_t k, double t) {
    return std::exp(log_mgf_bound(n, k, t));
}

namespace detail {

inline void require_tail_region(std::uint64_t n, std::uint64_t k, double eps) {
    require_samples(n);
    require_alphabet(k);
    const double boundary = tail_region_boundary(n, k);
    if (!(eps > boundary))
        throw OutOfRegionError("tail bound needs eps > (k-1)/n = " + fmt17(boundary) + ", got eps = " +
                                   fmt17(eps),
                               boundary);
}

}  // namespace detail

/// log of e^{-n eps} (e eps n / (k-1))^{k-1}.
///
/// Written as (k-1) (log x - (x - 1)) with x = n eps / (k-1), which is never
/// positive; the log1p form keeps the value accurate next to x = 1.
inline double log_tail_bound(std::uint64_t n, std::uint64_t k, double eps) {
    detail::require_tail_region(n, k, eps);
    const double km1 = static_cast<double>(k - 1);
    const double u = static_cast<double>(n) * eps / km1 - 1.0;
    const double v = km1 * (std::log1p(u) - u);
    return v < 0.0 ? v : 0.0;
}

/// P[V_{n,k,P} >= eps] <= e^{-n eps} (e eps n / (k-1))^{k-1} for eps > (k-1)/n.
/// Throws OutOfRegionError (carrying (k-1)/n) otherwise.
inline double tail_bound(std::uint64_t n, std::uint64_t k, double eps) {
    return std::exp(log_tail_bound(n, k, eps));
}

/// Minimizer t* = n (1 - (k-1)/(eps n)) of exp(-t eps) * mgf_bound(n, k, t).
inline double chernoff_optimal_t(std::uint64_t n, std::uint64_t k, double eps) {
    detail::require_tail_region(n, k, eps);
    const double dn = static_cast<double>(n);
    return dn * (1.0 - static_cast<double>(k - 1) / (eps * dn));
}

/// log of e^{-n eps} C(n+k-1, k-1).
inline double log_method_of_types_bound(std::uint64_t n, std::uint64_t k, double eps) {
    detail::require_samples(n);
    detail::require_alphabet(k);
    if (!(eps >= 0.0)) throw DomainError("eps must be non-negative, got " + detail::fmt17(eps));
    return -static_cast<double>(n) * eps + numeric::log_composition_count(n, k);
}

inline double method_of_types_bound(std::uint64_t n, std::uint64_t k, double eps) {
    return std::exp(log_method_of_types_bound(n, k, eps));
}

/// Smallest eps at which the method-of-types bound drops below 1.
inline double method_of_types_threshold(std::uint64_t n, std::uint64_t k) {
    return numeric::log_composition_count(n, k) / static_cast<double>(n);
}

// log(6 e^2 / pi^{3/2})
inline double log_mardia_constant() {
    using std::numbers::pi;
    return std::log(6.0) + 2.0 - 1.5 * std::log(pi);
}

/// log of e^{-n eps} (6 e^2 / pi^{3/2}) (e^3 n / (2 pi k))^{k/2}, for 3 <= k <= n.
///
/// Reconstructed from the crossover inequality that compares it with the
/// tail bound, not from the original source. Comparison use only.
inline std::optional<double> log_interpretable_mardia_bound(std::uint64_t n, std::uint64_t k, double eps) {
    if (k < 3 || k > n) return std::nullopt;
    if (!(eps >= 0.0)) throw DomainError("eps must be non-negative, got " + detail::fmt17(eps));
    using std::numbers::pi;
    const double dn = static_cast<double>(n);
    const double dk = static_cast<double>(k);
    return -dn * eps + log_mardia_constant() + 0.5 * dk * (3.0 + std::log(dn / (2.0 * pi * dk)));
}

inline std::optional<double> interpretable_mardia_bound(std::uint64_t n, std::uint64_t k, double eps) {
    const auto lv = log_interpretable_mardia_bound(n, k, eps);
    if (!lv) return std::nullopt;
    return std::exp(*lv);
}

/// Range of eps where the tail bound beats the method-of-types bound.
struct CrossoverRegion {
    double eps_low = 0.0;
    double eps_high = 0.0;

    // No eps qualifies: C(n+k-1, k-1)^{1/(k-1)} <= e. eps_high is then set
    // equal to eps_low.
    bool empty() const { return !(eps_high > eps_low); }
    bool contains(double eps) const { return eps > eps_low && eps < eps_high; }
};

/// eps_low = (k-1)/n, eps_high = (k-1)/n * C(n+k-1, k-1)^{1/(k-1)} / e.
inline CrossoverRegion crossover_region(std::uint64_t n, std::uint64_t k) {
    detail::require_samples(n);
    detail::require_alphabet(k);
    const double low = tail_region_boundary(n, k);
    const double km1 = static_cast<double>(k - 1);
    const double high = low * std::exp(numeric::log_composition_count(n, k) / km1 - 1.0);
    return high > low ? CrossoverRegion{low, high} : CrossoverRegion{low, low};
}

inline constexpr double kBisectionRelTol = 1e-12;
inline constexpr int kBisectionMaxIter = 200;

/// Smallest eps certified by the tail bound at level alpha: the unique
/// eps > (k-1)/n with tail_bound(n, k, eps) = alpha.
///
/// log tail_bound is strictly decreasing in eps on the valid region, so the
/// root is bracketed and refined by bisection on eps to 1e-12 relative.
inline double critical_epsilon(std::uint64_t n, std::uint64_t k, double alpha) {
    detail::require_samples(n);
    detail::require_alphabet(k);
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("alpha must lie in (0, 1), got " + detail::fmt17(alpha));
    const double target = std::log(alpha);
    const double boundary = tail_region_boundary(n, k);

    double lo = boundary;
    double hi = 2.0 * boundary;
    int iter = 0;
    while (log_tail_bound(n, k, hi) > target) {
        lo = hi;
        hi *= 2.0;
        if (++iter > kBisectionMaxIter) throw ConvergenceError("critical_epsilon: failed to bracket root");
    }
    // Invariant: tail(lo) > alpha >= tail(hi); lo may be the open boundary.
    for (iter = 0; iter < kBisectionMaxIter; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (log_tail_bound(n, k, mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    if (hi - lo > kBisectionRelTol * hi)
        throw ConvergenceError("critical_epsilon: bisection did not reach 1e-12 relative tolerance");
    return hi;
}

/// Minimal n with n > (k-1)/eps and tail_bound(n, k, eps) <= alpha.
///
/// Exponential search followed by binary search; the bound is decreasing in
/// n on the valid region.
inline std::uint64_t sample_size(std::uint64_t k, double eps, double alpha) {
    detail::require_alphabet(k);
    if (!(eps > 0.0)) throw DomainError("eps must be positive, got " + detail::fmt17(eps));
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("alpha must lie in (0, 1), got " + detail::fmt17(alpha));
    const double target = std::log(alpha);

    // First n strictly inside the region: n eps > k - 1.
    auto in_region = [&](std::uint64_t n) { return static_cast<double>(n) * eps > static_cast<double>(k - 1); };
    std::uint64_t first = static_cast<std::uint64_t>(std::floor(static_cast<double>(k - 1) / eps));
    while (!in_region(first)) ++first;
    while (first > 1 && in_region(first - 1)) --first;

    auto ok = [&](std::uint64_t n) { return log_tail_bound(n, k, eps) <= target; };
    if (ok(first)) return first;

    std::uint64_t lo = first;  // fails
    std::uint64_t hi = first;
    do {
        lo = hi;
        if (hi > (std::uint64_t{1} << 62)) throw ConvergenceError("sample_size: search overflow");
        hi *= 2;
    } while (!ok(hi));
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (ok(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

enum class BoundKind { MgfTail, MethodOfTypes, InterpretableMardia };

inline const char* to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::MgfTail: return "this_paper";
        case BoundKind::MethodOfTypes: return "method_of_types";
        case BoundKind::InterpretableMardia: return "interpretable_mardia";
    }
    return "unknown";
}

/// All tail bounds evaluated at one (n, k, eps).
struct BoundReport {
    std::uint64_t n = 0;
    std::uint64_t k = 0;
    double eps = 0.0;
    double this_paper = 0.0;
    double method_of_types = 0.0;
    std::optional<double> interpretable_mardia;
    BoundKind tightest = BoundKind::MgfTail;
};

/// Evaluates every applicable bound. The tightest entry is chosen by
/// comparing logs, so it stays meaningful when all values underflow.
inline BoundReport bound_report(std::uint64_t n, std::uint64_t k, double eps) {
    BoundReport r;
    r.n = n;
    r.k = k;
    r.eps = eps;
    const double log_this = log_tail_bound(n, k, eps);
    const double log_mot = log_method_of_types_bound(n, k, eps);
    const auto log_mardia = log_interpretable_mardia_bound(n, k, eps);
    r.this_paper = std::exp(log_this);
    r.method_of_types = std::exp(log_mot);
    if (log_mardia) r.interpretable_mardia = std::exp(*log_mardia);

    double best = log_this;
    r.tightest = BoundKind::MgfTail;
    if (log_mot < best) {
        best = log_mot;
        r.tightest = BoundKind::MethodOfTypes;
    }
    if (log_mardia && *log_mardia < best) r.tightest = BoundKind::InterpretableMardia;
    return r;
}

}  // namespace kldiv
