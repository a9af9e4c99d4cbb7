#pragma once

// Numerical scans of two conjectured sample-independent MGF bounds for the
// binomial KL:
//
//   main:  E[exp(n x KL(B/n || p))]   <= 2 / sqrt(1 - x) - 1
//   half:  E[exp(n x D_>(B/n || p))]  <= 1 / sqrt(1 - x)
//
// where B ~ Binom(n, p) and D_> is the binary KL truncated to zero when the
// empirical frequency does not exceed p. A scan reports the smallest margin
// (bound - exact) over a grid and every point where it drops below -1e-12.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "kldiv/errors.hpp"
#include "kldiv/exact.hpp"
#include "kldiv/numeric.hpp"

namespace kldiv {

inline constexpr double kCounterexampleThreshold = -1e-12;
inline constexpr double kTightMarginThreshold = 1e-9;

/// D_>(p_hat || q): 0 when p_hat <= q, otherwise the binary KL, which is
/// +inf when q = 0.
inline double half_kl(double p_hat, double q) {
    if (p_hat <= q) return 0.0;
    return binary_kl(p_hat, q);
}

/// E[exp(n x D_>(B/n || p))] for B ~ Binom(n, p).
inline double exact_half_mgf(std::uint64_t n, double p, double x) {
    const double dn = static_cast<double>(n);
    numeric::LogSumExp acc;
    for (std::uint64_t i = 0; i <= n; ++i) {
        const double lp = numeric::log_binomial_pmf(n, i, p);
        if (lp == -numeric::kInf) continue;
        acc.add(lp + dn * x * half_kl(static_cast<double>(i) / dn, p));
    }
    return acc.value();
}

inline double conjectured_binomial_bound(double x) { return 2.0 / std::sqrt(1.0 - x) - 1.0; }

/// Limit of the binomial-KL MGF as n grows. Fails for small n.
inline double asymptotic_binomial_bound(double x) { return 1.0 / std::sqrt(1.0 - x); }

/// The proven bound 1 / (1 - x).
inline double proven_binomial_bound(double x) { return 1.0 / (1.0 - x); }

struct ScanGrid {
    std::vector<std::uint64_t> ns;
    std::vector<double> ps;
    std::vector<double> xs;

    /// n in 1..n_max, p in {0, p_step, ..., 1}, x in {0, 0.05, ..., 0.95, 0.99}.
    static ScanGrid standard(std::uint64_t n_max = 200, unsigned p_steps = 100) {
        ScanGrid g;
        for (std::uint64_t n = 1; n <= n_max; ++n) g.ns.push_back(n);
        for (unsigned i = 0; i <= p_steps; ++i) g.ps.push_back(static_cast<double>(i) / p_steps);
        for (unsigned i = 0; i <= 19; ++i) g.xs.push_back(static_cast<double>(i) / 20.0);
        g.xs.push_back(0.99);
        return g;
    }

    std::size_t size() const { return ns.size() * ps.size() * xs.size(); }

    std::string describe() const {
        std::ostringstream os;
        os << "n: " << ns.size() << " values";
        if (!ns.empty()) os << " in [" << ns.front() << ", " << ns.back() << "]";
        os << "; p: " << ps.size() << " values";
        if (!ps.empty()) os << " in [" << ps.front() << ", " << ps.back() << "]";
        os << "; x: " << xs.size() << " values";
        if (!xs.empty()) os << " in [" << xs.front() << ", " << xs.back() << "]";
        return os.str();
    }
};

struct ScanPoint {
    std::uint64_t n = 0;
    double p = 0.0;
    double x = 0.0;
    double exact = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // bound - exact
};

struct ScanResult {
    std::string conjecture;
    std::string grid_spec;
    std::size_t points = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    ScanPoint worst_point;
    std::vector<ScanPoint> counterexamples;  // margin < -1e-12
    std::vector<ScanPoint> tight_points;     // x > 0 and margin in [-1e-12, 1e-9]
    // Smallest margin over (p, x > 0) for each n, in grid order.
    std::vector<std::pair<std::uint64_t, double>> worst_by_n;

    bool falsified() const { return !counterexamples.empty(); }
};

using PointSink = std::function<void(const ScanPoint&)>;

/// Scans bound(x) against exact(n, p, x) over the grid, in (n, p, x) order.
/// Every evaluated point is passed to `sink` when one is given.
inline ScanResult scan_binomial_bound(const std::string& name, const ScanGrid& grid,
                                      const std::function<double(std::uint64_t, double, double)>& exact,
                                      const std::function<double(double)>& bound, const PointSink& sink = {}) {
    ScanResult r;
    r.conjecture = name;
    r.grid_spec = grid.describe();
    for (std::uint64_t n : grid.ns) {
        double worst_here = std::numeric_limits<double>::infinity();
        for (double p : grid.ps) {
            for (double x : grid.xs) {
                if (!(x >= 0.0 && x < 1.0)) throw DomainError("scan grid x values must lie in [0, 1)");
                ScanPoint pt{n, p, x, exact(n, p, x), bound(x), 0.0};
                pt.margin = pt.bound - pt.exact;
                ++r.points;
                if (pt.margin < r.worst_margin) {
                    r.worst_margin = pt.margin;
                    r.worst_point = pt;
                }
                if (pt.margin < kCounterexampleThreshold)
                    r.counterexamples.push_back(pt);
                else if (x > 0.0 && pt.margin <= kTightMarginThreshold)
                    r.tight_points.push_back(pt);
                if (x > 0.0 && pt.margin < worst_here) worst_here = pt.margin;
                if (sink) sink(pt);
            }
        }
        r.worst_by_n.emplace_back(n, worst_here);
    }
    return r;
}

/// Scan of E[exp(n x KL)] <= 2 / sqrt(1 - x) - 1.
inline ScanResult scan_conjecture_main(const ScanGrid& grid, const PointSink& sink = {}) {
    return scan_binomial_bound("main", grid, binomial_kl_mgf, conjectured_binomial_bound, sink);
}

/// Scan of E[exp(n x D_>)] <= 1 / sqrt(1 - x).
inline ScanResult scan_conjecture_half(const ScanGrid& grid, const PointSink& sink = {}) {
    return scan_binomial_bound("half", grid, exact_half_mgf, asymptotic_binomial_bound, sink);
}

/// Scan of the full binomial-KL MGF against 1 / sqrt(1 - x). This bound is
/// known to fail (e.g. at n = 2, p = 1/2, x = 1/2), so the scan must report
/// counterexamples.
inline ScanResult scan_naive_asymptotic(const ScanGrid& grid, const PointSink& sink = {}) {
    return scan_binomial_bound("naive", grid, binomial_kl_mgf, asymptotic_binomial_bound, sink);
}

struct ImplicationCheck {
    double lhs = 0.0;      // binomial-KL MGF
    double rhs_sum = 0.0;  // half MGF at p + half MGF at 1 - p - 1
};

/// Exactly one of the two half-divergence branches is non-zero at every
/// outcome, so the binomial-KL MGF equals the sum of the two half MGFs minus 1.
inline ImplicationCheck verify_conjecture_implication(std::uint64_t n, double p, double x) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
    if (!(x >= 0.0 && x < 1.0)) throw DomainError("x must lie in [0, 1)");
    return {binomial_kl_mgf(n, p, x), exact_half_mgf(n, p, x) + exact_half_mgf(n, 1.0 - p, x) - 1.0};
}

}  // namespace kldiv
