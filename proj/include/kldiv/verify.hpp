#pragma once

// Sweeps that compare exact oracle values with the closed-form bounds and
// identities over parameter grids. Used by the `verify` CLI subcommand.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "kldiv/bounds.hpp"
#include "kldiv/conjectures.hpp"
#include "kldiv/core.hpp"
#include "kldiv/exact.hpp"
#include "kldiv/moments.hpp"

namespace kldiv::verify {

/// All probability vectors of length k whose entries are multiples of
/// 1/steps, in lexicographic order of the numerators.
inline std::vector<CategoricalDist> simplex_grid(std::size_t k, unsigned steps) {
    std::vector<CategoricalDist> out;
    std::vector<std::uint64_t> comp(k, 0);
    comp.back() = steps;
    do {
        std::vector<double> probs(k);
        for (std::size_t i = 0; i < k; ++i) probs[i] = static_cast<double>(comp[i]) / steps;
        out.emplace_back(std::move(probs));
    } while (detail::next_composition(comp));
    return out;
}

struct CheckResult {
    std::string name;
    std::size_t cases = 0;
    // Smallest (allowed - observed) over all cases; negative means a failure.
    double worst_slack = std::numeric_limits<double>::infinity();
    bool passed = true;

    void record(double slack, double tolerance) {
        ++cases;
        worst_slack = std::min(worst_slack, slack);
        if (slack < -tolerance || std::isnan(slack)) passed = false;
    }
};

// x grid {0, 0.1, ..., 0.9, 0.99}
inline std::vector<double> unit_x_grid() {
    std::vector<double> xs;
    for (int i = 0; i <= 9; ++i) xs.push_back(i / 10.0);
    xs.push_back(0.99);
    return xs;
}

// p grid {0, 0.1, ..., 1}
inline std::vector<double> unit_p_grid() {
    std::vector<double> ps;
    for (int i = 0; i <= 10; ++i) ps.push_back(i / 10.0);
    return ps;
}

/// |G_n(p, x) - G_n(0, x)| <= 1e-10 max(1, |G_n(0, x)|).
inline CheckResult check_gn_p_independence(std::uint64_t n_max) {
    CheckResult r{"G_n(p,x) independent of p"};
    for (std::uint64_t n = 0; n <= n_max; ++n)
        for (double x : unit_x_grid()) {
            const double ref = gn_eval_direct(n, 0.0, x);
            for (double p : unit_p_grid()) {
                const double diff = std::abs(gn_eval_direct(n, p, x) - ref);
                r.record(1e-10 * std::max(1.0, std::abs(ref)) - diff, 0.0);
            }
        }
    return r;
}

/// Coefficient polynomial agrees with the direct sum and has the stated shape.
inline CheckResult check_gn_coefficients(std::uint64_t n_max) {
    CheckResult r{"G_n coefficient form"};
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        const GnPolynomial poly = gn_coefficients(n);
        r.record(poly.coeffs[0] == 1.0 && poly.coeffs[1] == 1.0 ? 0.0 : -1.0, 0.0);
        for (std::size_t i = 1; i < poly.coeffs.size(); ++i)
            r.record(poly.coeffs[i - 1] - poly.coeffs[i], 0.0);
        for (int i = 0; i <= 99; ++i) {
            const double x = i / 100.0;
            const double direct = gn_eval_direct(n, 0.0, x);
            r.record(1e-10 * std::abs(direct) - std::abs(poly.evaluate(x) - direct), 0.0);
        }
    }
    return r;
}

/// exact binomial MGF <= G_n(p, x) <= 1 / (1 - x).
inline CheckResult check_majorization_chain(std::uint64_t n_max) {
    CheckResult r{"binomial MGF <= G_n <= 1/(1-x)"};
    for (std::uint64_t n = 1; n <= n_max; ++n)
        for (double p : unit_p_grid())
            for (double x : unit_x_grid()) {
                const auto c = verify_logconcavity_majorization(n, p, x);
                r.record(c.gn - c.mgf, 1e-12 * std::max(1.0, c.gn));
                r.record(proven_binomial_bound(x) - c.gn, 1e-12 * std::max(1.0, c.gn));
            }
    return r;
}

// Runs f(n, k, p, dist) for n in 1..n_max, k in 2..k_max over the simplex grid.
template <typename F>
void for_each_enumerable(std::uint64_t n_max, std::size_t k_max, unsigned steps, std::uint64_t cap, F&& f) {
    for (std::size_t k = 2; k <= k_max; ++k)
        for (const CategoricalDist& p : simplex_grid(k, steps))
            for (std::uint64_t n = 1; n <= n_max; ++n) f(n, k, p, enumerate_divergence_distribution(n, p, cap));
}

inline CheckResult check_mgf_soundness(std::uint64_t n_max, std::size_t k_max = 4, unsigned steps = 4,
                                       std::uint64_t cap = kDefaultEnumerationCap) {
    CheckResult r{"exact MGF <= (1 - t/n)^-(k-1)"};
    const double fractions[] = {0.1, 0.3, 0.5, 0.7, 0.9};
    for_each_enumerable(n_max, k_max, steps, cap, [&](std::uint64_t n, std::size_t k, const auto&, const auto& dist) {
        for (double f : fractions) {
            const double t = f * static_cast<double>(n);
            const double bound = mgf_bound(n, k, t);
            r.record(bound - exact_mgf(dist, t), 1e-12 * std::max(1.0, bound));
        }
    });
    return r;
}

inline CheckResult check_tail_soundness(std::uint64_t n_max, std::size_t k_max = 4, unsigned steps = 4,
                                        std::uint64_t cap = kDefaultEnumerationCap) {
    CheckResult r{"exact tail <= tail bound and method of types"};
    const double factors[] = {1.01, 1.5, 2.0, 4.0, 8.0};
    for_each_enumerable(n_max, k_max, steps, cap, [&](std::uint64_t n, std::size_t k, const auto&, const auto& dist) {
        for (double f : factors) {
            const double eps = f * tail_region_boundary(n, k);
            const double exact = exact_tail(dist, eps);
            r.record(tail_bound(n, k, eps) - exact, 1e-12);
            r.record(method_of_types_bound(n, k, eps) - exact, 1e-12);
        }
    });
    return r;
}

inline CheckResult check_psi1(std::uint64_t n_max, std::size_t k_max = 4, unsigned steps = 4,
                              std::uint64_t cap = kDefaultEnumerationCap) {
    CheckResult r{"E[exp(2nV/(4(k-1)))] <= 2"};
    for_each_enumerable(n_max, k_max, steps, cap, [&](std::uint64_t, std::size_t, const auto&, const auto& dist) {
        r.record(2.0 - psi1_check(dist), 1e-12);
    });
    return r;
}

inline CheckResult check_paninski(std::uint64_t n_max, std::size_t k_max = 4, unsigned steps = 4,
                                  std::uint64_t cap = kDefaultEnumerationCap) {
    CheckResult r{"E[V] <= log(1 + (k-1)/n)"};
    for_each_enumerable(n_max, k_max, steps, cap, [&](std::uint64_t n, std::size_t k, const auto&, const auto& dist) {
        r.record(paninski_mean_bound(n, k) - exact_mean_divergence(dist), 1e-12);
    });
    return r;
}

inline CheckResult check_branch_identity(std::uint64_t n_max) {
    CheckResult r{"MGF = half MGF(p) + half MGF(1-p) - 1"};
    for (std::uint64_t n = 1; n <= n_max; ++n)
        for (double p : unit_p_grid())
            for (double x : unit_x_grid()) {
                const auto c = verify_conjecture_implication(n, p, x);
                r.record(1e-12 * std::abs(c.lhs) - std::abs(c.lhs - c.rhs_sum), 0.0);
            }
    return r;
}

inline std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t n_max,
                                          std::uint64_t cap = kDefaultEnumerationCap) {
    std::vector<CheckResult> out;
    const bool all = suite == "all";
    const std::uint64_t enum_n = std::min<std::uint64_t>(n_max, 12);
    if (all || suite == "lemmas") {
        out.push_back(check_gn_p_independence(n_max));
        out.push_back(check_gn_coefficients(n_max));
        out.push_back(check_majorization_chain(n_max));
    }
    if (all || suite == "bounds") {
        out.push_back(check_mgf_soundness(enum_n, 4, 4, cap));
        out.push_back(check_tail_soundness(enum_n, 4, 4, cap));
    }
    if (all || suite == "moments") {
        out.push_back(check_psi1(enum_n, 4, 4, cap));
        out.push_back(check_paninski(enum_n, 4, 4, cap));
    }
    if (all || suite == "conjectures") out.push_back(check_branch_identity(n_max));
    if (out.empty()) throw DomainError("unknown verify suite '" + suite + "'");
    return out;
}

}  // namespace kldiv::verify
