#include <gtest/gtest.h>

#include "kldiv/bounds.hpp"
#include "kldiv/montecarlo.hpp"

using namespace kldiv;

// Zero hits give a Wilson upper limit of about 3.84 / samples, so resolving a
// bound near 3e-7 needs more than 1.3e7 draws. Registered under the "slow" label.
TEST(McScale, TailBoundDominatesAtTenThousandFiftyCells) {
    constexpr std::uint64_t n = 10000, k = 50;
    const double eps = 2.0 * (k - 1) / n;
    const double bound = tail_bound(n, k, eps);
    ASSERT_GT(bound, 2.9e-7);
    ASSERT_LT(bound, 3.0e-7);

    const auto est = mc::estimate_tail(n, CategoricalDist::uniform(k), eps, 14'000'000, 20261016);
    EXPECT_LE(est.ci_low, est.point);
    EXPECT_LE(est.point, est.ci_high);
    EXPECT_LE(est.ci_high, bound) << "point " << est.point << ", ci_high " << est.ci_high;
}
