#include <gtest/gtest.h>

#include <cmath>

#include "sphavg/ball.hpp"
#include "test_support.hpp"

using namespace sphavg;

TEST(Ball, FreeGroupSizes) {
    auto f2 = make_free_group(2);
    auto ball = BallIndex::enumerate(f2, 2);
    EXPECT_EQ(ball.size(), 17u);
    EXPECT_EQ(ball.sphere_size(0), 1u);
    EXPECT_EQ(ball.sphere_size(1), 4u);
    EXPECT_EQ(ball.sphere_size(2), 12u);
    // closed form 2 * 3^R - 1 at larger radii
    auto big = BallIndex::enumerate(f2, 7);
    for (int r = 0; r <= 7; ++r)
        EXPECT_EQ(big.sphere_size(r), testsup::free_sphere_size(2, r));
}

TEST(Ball, LatticeSizes) {
    auto z2 = make_free_abelian(2);
    auto ball = BallIndex::enumerate(z2, 3);
    std::vector<std::size_t> expected{1, 4, 8, 12};
    for (int n = 0; n <= 3; ++n) {
        EXPECT_EQ(ball.sphere_size(n), expected[static_cast<std::size_t>(n)]);
        EXPECT_EQ(ball.sphere_size(n), testsup::lattice_sphere_size(n));
    }
}

TEST(Ball, RadiusZero) {
    auto ball = BallIndex::enumerate(make_free_product({2, 2}), 0);
    EXPECT_EQ(ball.size(), 1u);
    EXPECT_TRUE(ball[0].is_identity());
}

TEST(Ball, OrderIsShortlexAndLengthsMonotone) {
    auto ball = BallIndex::enumerate(make_free_group(2), 4);
    for (std::size_t i = 1; i < ball.size(); ++i) {
        EXPECT_TRUE(shortlex_less(ball[i - 1], ball[i]));
        EXPECT_LE(ball.length_of(i - 1), ball.length_of(i));
    }
    for (std::size_t i = 0; i < ball.size(); ++i) {
        auto idx = ball.index_of(ball[i]);
        ASSERT_TRUE(idx.has_value());
        EXPECT_EQ(*idx, i);
    }
}

TEST(Ball, SpherePartitionAndAnnulus) {
    auto ball = BallIndex::enumerate(make_free_product({2, 2, 2}), 6);
    std::size_t total = 0;
    for (int n = 0; n <= 6; ++n) total += ball.sphere_size(n);
    EXPECT_EQ(total, ball.size());
    auto ann = ball.annulus(4, 1);
    EXPECT_EQ(ann.size(), ball.sphere_size(3) + ball.sphere_size(4) + ball.sphere_size(5));
    for (const auto& g : ann.members()) {
        EXPECT_GE(g.length(), 3);
        EXPECT_LE(g.length(), 5);
    }
    EXPECT_THROW(ball.annulus(6, 1), input_error);
}

TEST(Ball, BudgetRaisesResourceError) {
    try {
        BallIndex::enumerate(make_free_group(2), 6, 100);
        FAIL() << "expected resource_error";
    } catch (const resource_error& e) {
        EXPECT_GE(e.completed_radius(), 1);
        EXPECT_LT(e.completed_radius(), 6);
    }
    auto partial = BallIndex::enumerate_up_to(make_free_group(2), 6, 100);
    EXPECT_LT(partial.radius(), 6);
    EXPECT_LE(partial.size(), 100u);
}

TEST(Distance, Examples) {
    auto f2 = make_free_group(2);
    EXPECT_EQ(distance(f2, f2.element("a"), f2.element("ab")), 1);
    EXPECT_EQ(distance(f2, f2.element("ab"), f2.element("ab")), 0);
    EXPECT_EQ(distance(f2, f2.element("a"), f2.element("B")), 2);
}

TEST(Distance, SymmetricAndMatchesDepth) {
    testsup::Rng rng(5);
    auto rs = make_free_product({2, 3});
    auto ball = BallIndex::enumerate(rs, 6);
    for (int trial = 0; trial < 500; ++trial) {
        Element x = rng.pick(ball), y = rng.pick(ball);
        EXPECT_EQ(distance(rs, x, y), distance(rs, y, x));
        EXPECT_EQ(distance(rs, x, rs.identity()), x.length());
    }
}

TEST(Median, TreeExamples) {
    auto f2 = make_free_group(2);
    auto ball = BallIndex::enumerate(f2, 3);
    auto res = rough_median(ball, f2.identity(), f2.element("ab"), f2.element("aB"));
    EXPECT_EQ(f2.format(res.median), "a");
    EXPECT_EQ(res.rho_achieved, 0);

    auto deg = rough_median(ball, f2.element("ab"), f2.element("ab"), f2.element("ab"));
    EXPECT_EQ(deg.median, f2.element("ab"));
    EXPECT_EQ(deg.rho_achieved, 0);
}

TEST(Median, ClosedFormMatchesScanOnTrees) {
    testsup::Rng rng(17);
    auto f2 = make_free_group(2);
    auto ball = BallIndex::enumerate(f2, 4);
    for (int trial = 0; trial < 120; ++trial) {
        Element x = rng.pick(ball), y = rng.pick(ball), z = rng.pick(ball);
        auto scan = rough_median(ball, x, y, z);
        EXPECT_EQ(scan.rho_achieved, 0);
        EXPECT_EQ(scan.median, tree_median(f2, x, y, z));
    }
}

TEST(Median, InvolutionFactorTriples) {
    // the standard generators of C2*C2*C2 span a tree, so triples have exact
    // medians; the scan must find defect 0 within 2*delta + 2 = 2
    testsup::Rng rng(23);
    auto rs = make_free_product({2, 2, 2});
    auto ball = BallIndex::enumerate(rs, 6);
    for (int trial = 0; trial < 60; ++trial) {
        Element x = rng.pick(ball), y = rng.pick(ball), z = rng.pick(ball);
        auto res = rough_median(ball, x, y, z);
        EXPECT_EQ(res.rho_achieved, 0);
        EXPECT_LE(res.rho_achieved, 2);
    }
}

TEST(SegmentCount, Examples) {
    auto f2 = make_free_group(2);
    auto ball = BallIndex::enumerate(f2, 3);
    EXPECT_EQ(rough_segment_count(ball, f2.identity(), f2.element("aab"), 0, 1).count, 1u);
    // at slack 2 every unit sphere point has defect <= 2 here
    EXPECT_EQ(rough_segment_count(ball, f2.identity(), f2.element("ab"), 2, 1).count, 4u);

    auto z2 = make_free_abelian(2);
    auto lattice = BallIndex::enumerate(z2, 4);
    EXPECT_EQ(rough_segment_count(lattice, z2.identity(), z2.element("aabb"), 0, 2).count, 3u);
}

TEST(SegmentCount, GeodesicsAreUniqueInTrees) {
    testsup::Rng rng(31);
    auto f2 = make_free_group(2);
    auto ball = BallIndex::enumerate(f2, 6);
    for (int trial = 0; trial < 60; ++trial) {
        Element x = rng.pick(ball), y = rng.pick(ball);
        int d = distance(f2, x, y);
        for (int n = 0; n <= d; ++n) {
            auto res = rough_segment_count(ball, x, y, 0, n);
            EXPECT_EQ(res.count, 1u);
        }
    }
}

TEST(SegmentCount, BoundaryWarning) {
    auto f2 = make_free_group(2);
    auto ball = BallIndex::enumerate(f2, 2);
    auto res = rough_segment_count(ball, f2.element("aa"), f2.element("a"), 3, 2);
    EXPECT_TRUE(res.boundary_warning);
}

TEST(Growth, FreeGroupSlope) {
    auto ball = BallIndex::enumerate(make_free_group(2), 8);
    auto stats = growth_stats(ball, 1, 8);
    EXPECT_NEAR(stats.delta_hat, std::log(3.0), 1e-6);
    EXPECT_FALSE(stats.non_exponential);
    // pure growth: |S(n)| 3^-n is constant 4/3 for n >= 1
    for (int n = 1; n <= 8; ++n)
        EXPECT_NEAR(stats.pure_growth_ratios[static_cast<std::size_t>(n)], 4.0 / 3.0, 1e-5);
}

TEST(Growth, InvolutionFactorsSlope) {
    auto ball = BallIndex::enumerate(make_free_product({2, 2, 2}), 10);
    for (int n = 1; n <= 10; ++n)
        EXPECT_EQ(ball.sphere_size(n), 3u * (1u << (n - 1)));
    auto stats = growth_stats(ball, 2, 10);
    EXPECT_NEAR(stats.delta_hat, std::log(2.0), 1e-3);
    EXPECT_FALSE(stats.non_exponential);
}

TEST(Growth, LatticeIsFlaggedNonExponential) {
    auto ball = BallIndex::enumerate(make_free_abelian(2), 10);
    auto stats = growth_stats(ball, 1, 10);
    // |S(n)| = 4n fits to slope ~0.2304 on this window
    EXPECT_NEAR(stats.delta_hat, 0.230407, 1e-4);
    EXPECT_TRUE(stats.non_exponential);
}

TEST(Growth, WindowValidation) {
    auto ball = BallIndex::enumerate(make_free_group(2), 5);
    EXPECT_THROW(growth_stats(ball, 0, 5), input_error);
    EXPECT_THROW(growth_stats(ball, 3, 4), input_error);
    EXPECT_THROW(growth_stats(ball, 1, 7), input_error);
}
