#pragma once

// Seeded Monte Carlo estimation of tails and moments of V_{n,k,P} for sizes
// beyond exhaustive enumeration.
//
// Random streams: draw block b of an estimate uses a std::mt19937_64 seeded
// with splitmix64(seed + (b + 1) * golden_gamma). Blocks have a fixed size,
// so the stream assigned to every draw depends only on (seed, draw index)
// and never on the number of worker threads. Per-block partial results are
// combined in block order, which makes estimates bit-reproducible for any
// thread count.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "kldiv/core.hpp"
#include "kldiv/errors.hpp"
#include "kldiv/moments.hpp"
#include "kldiv/numeric.hpp"

namespace kldiv::mc {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kBlockSize = 4096;
inline constexpr std::uint64_t kMinSamples = 100;
inline constexpr double kZ95 = 1.959963984540054;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += kGoldenGamma;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Engine for stream `stream` of a given seed.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(seed + (stream + 1) * kGoldenGamma));
}

struct McEstimate {
    double point = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;

    bool operator==(const McEstimate&) const = default;
};

/// Multinomial sampler by the conditional-binomial method: X_i ~
/// Binom(remaining count, p_i / remaining mass). O(k) per draw. Holds its own
/// buffers so repeated draws do not allocate.
class MultinomialSampler {
public:
    explicit MultinomialSampler(const CategoricalDist& p) : p_(p), cond_(p.size()), counts_(p.size()) {
        const std::size_t k = p.size();
        double suffix = 0.0;
        for (std::size_t i = k; i-- > 0;) {
            suffix += p[i];
            cond_[i] = suffix > 0.0 ? p[i] / suffix : 0.0;
        }
        terms_.reserve(k);
    }

    template <typename Engine>
    std::span<const std::uint64_t> draw(std::uint64_t n, Engine& engine) {
        const std::size_t k = counts_.size();
        std::fill(counts_.begin(), counts_.end(), 0);
        std::uint64_t remaining = n;
        for (std::size_t i = 0; i + 1 < k && remaining > 0; ++i) {
            const double q = cond_[i];
            std::uint64_t x = 0;
            if (q >= 1.0) {
                x = remaining;
            } else if (q > 0.0) {
                std::binomial_distribution<std::uint64_t> binom(remaining, q);
                x = binom(engine);
            }
            counts_[i] = x;
            remaining -= x;
        }
        counts_[k - 1] += remaining;
        return counts_;
    }

    // V for the most recent draw of size n.
    double divergence(std::uint64_t n) {
        return kldiv::detail::kl_from_ratios(std::span<const std::uint64_t>(counts_), static_cast<double>(n),
                                             p_.probs(), terms_)
            .nats;
    }

private:
    const CategoricalDist& p_;
    std::vector<double> cond_;
    std::vector<std::uint64_t> counts_;
    std::vector<double> terms_;
};

template <typename Engine>
CountVector sample_counts(std::uint64_t n, const CategoricalDist& p, Engine& engine) {
    MultinomialSampler s(p);
    const auto c = s.draw(n, engine);
    return CountVector(std::vector<std::uint64_t>(c.begin(), c.end()));
}

/// Single draw on stream 0 of `seed`.
inline CountVector sample_counts(std::uint64_t n, const CategoricalDist& p, std::uint64_t seed) {
    auto engine = make_stream(seed, 0);
    return sample_counts(n, p, engine);
}

/// 95% (by default) Wilson score interval for a binomial proportion.
struct Interval {
    double low = 0.0;
    double high = 0.0;
};

inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ95) {
    const double nt = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / nt;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nt;
    const double centre = (phat + z2 / (2.0 * nt)) / denom;
    const double half = z / denom * std::sqrt(phat * (1.0 - phat) / nt + z2 / (4.0 * nt * nt));
    Interval iv{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    iv.low = std::min(iv.low, phat);
    iv.high = std::max(iv.high, phat);
    return iv;
}

namespace detail {

inline unsigned resolve_threads(unsigned threads, std::size_t blocks) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, blocks)));
}

// Runs body(block, draws_in_block) for every block, spread over workers
// with a static stride. Each block writes only to its own result slot.
template <typename Body>
void for_each_block(std::uint64_t samples, unsigned threads, Body&& body) {
    const std::size_t blocks = static_cast<std::size_t>((samples + kBlockSize - 1) / kBlockSize);
    const unsigned workers = resolve_threads(threads, blocks);
    auto run = [&](unsigned w) {
        for (std::size_t b = w; b < blocks; b += workers) {
            const std::uint64_t begin = static_cast<std::uint64_t>(b) * kBlockSize;
            body(b, std::min(kBlockSize, samples - begin));
        }
    };
    if (workers == 1) {
        run(0);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
}

inline void require_samples(std::uint64_t samples) {
    if (samples < kMinSamples)
        throw DomainError("Monte Carlo estimates need at least " + std::to_string(kMinSamples) +
                          " samples, got " + std::to_string(samples));
}

// Welford accumulator; merge() is Chan's pairwise update.
struct RunningMoments {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double v) {
        count += 1.0;
        const double d = v - mean;
        mean += d / count;
        m2 += d * (v - mean);
    }

    void merge(const RunningMoments& o) {
        if (o.count == 0.0) return;
        const double total = count + o.count;
        const double d = o.mean - mean;
        mean += d * o.count / total;
        m2 += o.m2 + d * d * count * o.count / total;
        count = total;
    }

    double variance() const { return count > 1.0 ? m2 / (count - 1.0) : 0.0; }
};

}  // namespace detail

/// Fraction of draws with V >= eps, with a 95% Wilson interval.
inline McEstimate estimate_tail(std::uint64_t n, const CategoricalDist& p, double eps, std::uint64_t samples,
                                std::uint64_t seed, unsigned threads = 0) {
    detail::require_samples(samples);
    const std::size_t blocks = static_cast<std::size_t>((samples + kBlockSize - 1) / kBlockSize);
    std::vector<std::uint64_t> hits(blocks, 0);
    detail::for_each_block(samples, threads, [&](std::size_t b, std::uint64_t draws) {
        auto engine = make_stream(seed, b);
        MultinomialSampler sampler(p);
        std::uint64_t h = 0;
        for (std::uint64_t d = 0; d < draws; ++d) {
            sampler.draw(n, engine);
            if (sampler.divergence(n) >= eps) ++h;
        }
        hits[b] = h;
    });
    std::uint64_t total = 0;
    for (std::uint64_t h : hits) total += h;
    const Interval iv = wilson_interval(total, samples);
    return {static_cast<double>(total) / static_cast<double>(samples), iv.low, iv.high, samples, seed};
}

/// Sample mean of (2nV)^m with a normal-approximation 95% interval.
inline McEstimate estimate_moment(std::uint64_t n, const CategoricalDist& p, unsigned m, std::uint64_t samples,
                                  std::uint64_t seed, unsigned threads = 0) {
    detail::require_samples(samples);
    if (m < 1 || m > kMaxMomentOrder)
        throw DomainError("moment order must lie in [1, " + std::to_string(kMaxMomentOrder) + "]");
    const std::size_t blocks = static_cast<std::size_t>((samples + kBlockSize - 1) / kBlockSize);
    std::vector<detail::RunningMoments> partial(blocks);
    const double scale = 2.0 * static_cast<double>(n);
    detail::for_each_block(samples, threads, [&](std::size_t b, std::uint64_t draws) {
        auto engine = make_stream(seed, b);
        MultinomialSampler sampler(p);
        detail::RunningMoments acc;
        for (std::uint64_t d = 0; d < draws; ++d) {
            sampler.draw(n, engine);
            const double v = sampler.divergence(n);
            acc.add(std::pow(scale * v, static_cast<double>(m)));
        }
        partial[b] = acc;
    });
    detail::RunningMoments all;
    for (const auto& part : partial) all.merge(part);
    const double half = kZ95 * std::sqrt(all.variance() / all.count);
    return {all.mean, all.mean - half, all.mean + half, samples, seed};
}

}  // namespace kldiv::mc
