#pragma once

// Exact distribution of V_{n,k,P} by enumerating every composition of n, the
// exact binomial-KL moment generating function, and the polynomial majorant
// G_n(p, x) that bounds it.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kldiv/core.hpp"
#include "kldiv/errors.hpp"
#include "kldiv/numeric.hpp"

namespace kldiv {

inline constexpr std::uint64_t kDefaultEnumerationCap = 2'000'000;

// Slack applied when comparing atom values against a tail threshold, so that
// atoms sitting exactly on eps are counted despite roundoff.
inline constexpr double kTailBoundarySlack = 1e-14;

struct Atom {
    DivergenceValue value;
    double prob = 0.0;
    double log_prob = -numeric::kInf;
};

/// Full support of V_{n,k,P}: one atom per composition of n over the support
/// of P, in lexicographic order of the count vector. Atoms with equal value
/// are kept separate.
struct ExactDistribution {
    std::vector<Atom> atoms;
    std::uint64_t n = 0;
    std::size_t k = 0;

    double total_probability() const {
        numeric::CompensatedSum s;
        for (const Atom& a : atoms) s.add(a.prob);
        return s.value();
    }

    // E[f(V)] for a finite-valued f. Atoms of probability zero are skipped.
    template <typename F>
    double expect(F&& f) const {
        numeric::CompensatedSum s;
        for (const Atom& a : atoms)
            if (a.prob > 0.0) s.add(a.prob * f(a.value.nats));
        return s.value();
    }
};

namespace detail {

// Advances c to the next composition of the same total in lexicographic
// order. Returns false after the last composition (n, 0, ..., 0).
inline bool next_composition(std::vector<std::uint64_t>& c) {
    std::size_t r = c.size();
    while (r > 0 && c[r - 1] == 0) --r;
    if (r <= 1) return false;
    const std::size_t last_nonzero = r - 1;
    const std::uint64_t tail = c[last_nonzero];
    ++c[last_nonzero - 1];
    c[last_nonzero] = 0;
    c.back() = tail - 1;
    return true;
}

inline void check_enumeration_cap(std::uint64_t n, std::size_t parts, std::uint64_t cap) {
    const double needed = numeric::composition_count(n, parts);
    if (needed > static_cast<double>(cap))
        throw EnumerationTooLarge("enumeration needs " + std::to_string(needed) +
                                      " atoms, above the cap of " + std::to_string(cap) +
                                      "; raise the cap to at least " + std::to_string(needed),
                                  needed);
}

}  // namespace detail

/// Enumerates the exact distribution of V_{n,k,P}.
///
/// Coordinates with p_i = 0 always have count zero, so only the support of P
/// is enumerated; the atom count is C(n + s - 1, s - 1) for support size s,
/// which equals C(n + k - 1, k - 1) when every p_i > 0. Probabilities are the
/// multinomial pmf evaluated in log space.
///
/// Throws EnumerationTooLarge when the atom count exceeds cap.
inline ExactDistribution enumerate_divergence_distribution(std::uint64_t n, const CategoricalDist& p,
                                                           std::uint64_t cap = kDefaultEnumerationCap) {
    if (n == 0) throw DomainError("enumeration needs n >= 1");
    const std::vector<std::size_t> support = p.support();
    const std::size_t s = support.size();
    detail::check_enumeration_cap(n, s, cap);

    std::vector<double> log_fact(n + 1);
    for (std::uint64_t i = 0; i <= n; ++i) log_fact[i] = numeric::log_factorial(i);
    std::vector<double> log_p(s);
    for (std::size_t j = 0; j < s; ++j) log_p[j] = std::log(p[support[j]]);

    ExactDistribution dist;
    dist.n = n;
    dist.k = p.size();
    dist.atoms.reserve(static_cast<std::size_t>(numeric::composition_count(n, s)));

    std::vector<std::uint64_t> comp(s, 0);
    comp.back() = n;
    std::vector<std::uint64_t> full(p.size(), 0);
    const double dn = static_cast<double>(n);
    do {
        double lp = log_fact[n];
        for (std::size_t j = 0; j < s; ++j) {
            full[support[j]] = comp[j];
            lp -= log_fact[comp[j]];
            if (comp[j] > 0) lp += static_cast<double>(comp[j]) * log_p[j];
        }
        Atom atom;
        atom.value = detail::kl_from_ratios(std::span<const std::uint64_t>(full), dn, p.probs());
        atom.log_prob = lp;
        atom.prob = std::exp(lp);
        dist.atoms.push_back(atom);
    } while (detail::next_composition(comp));
    return dist;
}

/// E[exp(t V)] over an enumerated distribution, accumulated with log-sum-exp.
inline double exact_mgf(const ExactDistribution& dist, double t) {
    if (!(t >= 0.0 && t < static_cast<double>(dist.n)))
        throw DomainError("MGF argument t must lie in [0, n), got t = " + std::to_string(t));
    numeric::LogSumExp acc;
    for (const Atom& a : dist.atoms) acc.add(a.log_prob + t * a.value.nats);
    return acc.value();
}

inline double exact_mgf(std::uint64_t n, const CategoricalDist& p, double t,
                        std::uint64_t cap = kDefaultEnumerationCap) {
    if (!(t >= 0.0 && t < static_cast<double>(n)))
        throw DomainError("MGF argument t must lie in [0, n), got t = " + std::to_string(t));
    return exact_mgf(enumerate_divergence_distribution(n, p, cap), t);
}

/// P[V >= eps] over an enumerated distribution.
inline double exact_tail(const ExactDistribution& dist, double eps) {
    numeric::CompensatedSum s;
    for (const Atom& a : dist.atoms)
        if (a.value.nats >= eps - kTailBoundarySlack) s.add(a.prob);
    return s.value();
}

inline double exact_tail(std::uint64_t n, const CategoricalDist& p, double eps,
                         std::uint64_t cap = kDefaultEnumerationCap) {
    return exact_tail(enumerate_divergence_distribution(n, p, cap), eps);
}

/// Binary KL((a, 1 - a) || (b, 1 - b)) for scalars, with 0 log 0 = 0.
inline double binary_kl(double a, double b) {
    double total = 0.0;
    if (a > 0.0) {
        if (b <= 0.0) return numeric::kInf;
        total += a * std::log(a / b);
    }
    if (a < 1.0) {
        if (b >= 1.0) return numeric::kInf;
        total += (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
    }
    return total > 0.0 ? total : 0.0;
}

/// Exact binomial-KL MGF E[exp(n x KL((B/n, 1 - B/n) || (p, 1 - p)))] for
/// B ~ Binom(n, p), summed over the n + 1 outcomes in log space.
inline double binomial_kl_mgf(std::uint64_t n, double p, double x) {
    const double dn = static_cast<double>(n);
    numeric::LogSumExp acc;
    for (std::uint64_t i = 0; i <= n; ++i) {
        const double lp = numeric::log_binomial_pmf(n, i, p);
        if (lp == -numeric::kInf) continue;
        acc.add(lp + dn * x * binary_kl(static_cast<double>(i) / dn, p));
    }
    return acc.value();
}

/// R_n(q, x) = sum_i C(n, i) (q + i x / n)^i (1 - q - i x / n)^(n - i).
///
/// Evaluated as the algebraic expression for any real q and x, including
/// pseudo-probabilities outside [0, 1]. R_0 = 1 and 0^0 = 1.
inline double rn_eval(std::uint64_t n, double q, double x) {
    if (n == 0) return 1.0;
    const double dn = static_cast<double>(n);
    numeric::CompensatedSum s;
    double coeff = 1.0;  // C(n, i)
    for (std::uint64_t i = 0; i <= n; ++i) {
        const double qi = q + static_cast<double>(i) * x / dn;
        s.add(coeff * std::pow(qi, static_cast<double>(i)) * std::pow(1.0 - qi, static_cast<double>(n - i)));
        coeff = coeff * static_cast<double>(n - i) / static_cast<double>(i + 1);
    }
    return s.value();
}

/// G_n(p, x) = sum_i P[Binom(n, (1 - x) p + i x / n) = i] = R_n((1 - x) p, x).
inline double gn_eval_direct(std::uint64_t n, double p, double x) {
    return rn_eval(n, (1.0 - x) * p, x);
}

/// G_n as a polynomial in x: coeffs[i] = n! / (n^i (n - i)!) = prod_{j<i} (1 - j/n).
struct GnPolynomial {
    std::uint64_t n = 0;
    std::vector<double> coeffs;

    double evaluate(double x) const {
        double acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
        return acc;
    }
};

inline GnPolynomial gn_coefficients(std::uint64_t n) {
    GnPolynomial poly;
    poly.n = n;
    poly.coeffs.resize(n + 1);
    poly.coeffs[0] = 1.0;
    const double dn = static_cast<double>(n);
    for (std::uint64_t i = 1; i <= n; ++i)
        poly.coeffs[i] = poly.coeffs[i - 1] * (1.0 - static_cast<double>(i - 1) / dn);
    return poly;
}

struct MajorizationCheck {
    double mgf = 0.0;  // exact binomial-KL MGF at t = n x
    double gn = 0.0;   // G_n(p, x)
};

/// Exact binomial-KL MGF next to its log-concavity majorant G_n(p, x).
/// For x in [0, 1) the first never exceeds the second.
inline MajorizationCheck verify_logconcavity_majorization(std::uint64_t n, double p, double x) {
    if (!(x >= 0.0 && x < 1.0))
        throw DomainError("x must lie in [0, 1), got " + std::to_string(x));
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError("p must lie in [0, 1], got " + std::to_string(p));
    return {binomial_kl_mgf(n, p, x), gn_eval_direct(n, p, x)};
}

}  // namespace kldiv
