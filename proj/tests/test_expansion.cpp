#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "sphavg/expansion.hpp"
#include "test_support.hpp"

using namespace sphavg;

TEST(ProductSet, Examples) {
    auto f2 = make_free_group(2);
    auto ball = BallIndex::enumerate(f2, 2);
    auto s1 = ball.sphere(1).members();

    std::vector<Element> just_e{f2.identity()};
    auto se = product_set(f2, s1, just_e);
    EXPECT_EQ(se.size(), 4u);

    auto xe = product_set(f2, just_e, s1);
    EXPECT_EQ(xe.size(), 4u);

    std::vector<Element> x{f2.identity(), f2.element("a"), f2.element("A")};
    auto sx = product_set(f2, s1, x);
    EXPECT_EQ(sx.size(), 11u);
    EXPECT_EQ(sx.size(), testsup::product_count_by_set(f2, s1, x));
}

TEST(ProductSet, SizeFraming) {
    testsup::Rng rng(71);
    auto rs = make_free_product({2, 3});
    auto ball = BallIndex::enumerate(rs, 5);
    for (int trial = 0; trial < 100; ++trial) {
        std::set<Word> sw, xw;
        for (int i = 0; i < 4; ++i) sw.insert(rng.pick(ball).word);
        for (int i = 0; i < 5; ++i) xw.insert(rng.pick(ball).word);
        std::vector<Element> s, x;
        for (const auto& w : sw) s.push_back(Element{w});
        for (const auto& w : xw) x.push_back(Element{w});
        auto sx = product_set(rs, s, x);
        EXPECT_GE(sx.size(), x.size() > s.size() ? x.size() : s.size());
        EXPECT_LE(sx.size(), s.size() * x.size());
        EXPECT_EQ(sx.size(), testsup::product_count_by_set(rs, s, x));
    }
}

TEST(ExactSearch, SingletonSets) {
    auto f2 = make_free_group(2);
    auto ground = BallIndex::enumerate(f2, 1);
    std::vector<Element> just_e{f2.identity()};
    auto res = expansion_exact(f2, just_e, ground, 2);
    EXPECT_DOUBLE_EQ(res.min_ratio, 1.0);
    EXPECT_EQ(res.argmin.size(), 1u);

    auto s1 = BallIndex::enumerate(f2, 2).sphere(1);
    auto singletons = expansion_exact(f2, s1.members(), ground, 1);
    EXPECT_DOUBLE_EQ(singletons.min_ratio, 4.0); // translation invariance
}

TEST(ExactSearch, UnitSphereOverSmallGround) {
    auto f2 = make_free_group(2);
    auto big = BallIndex::enumerate(f2, 2);
    auto ground = BallIndex::enumerate(f2, 2);
    auto res = expansion_exact(f2, big.sphere(1).members(), ground, 4);
    EXPECT_GE(res.min_ratio, 3.0);
    EXPECT_LE(res.min_ratio, 4.0);
    EXPECT_DOUBLE_EQ(res.min_ratio, 3.25); // 13/4, found by exhausting C(17, <=4)
    EXPECT_EQ(res.argmin.size(), 4u);
    // argmin reproduces its ratio through an independent product count
    EXPECT_EQ(testsup::product_count_by_set(f2, big.sphere(1).members(), res.argmin), 13u);
}

TEST(ExactSearch, MatchesNaiveEnumerationOnTinyGround) {
    auto rs = make_free_product({2, 2});
    auto ground = BallIndex::enumerate(rs, 2); // 5 elements
    auto ball = BallIndex::enumerate(rs, 3);
    auto s1 = ball.sphere(1).members();
    auto res = expansion_exact(rs, s1, ground, 3);

    double naive = 1e300;
    std::vector<std::size_t> idx;
    std::size_t n = ground.size();
    for (std::size_t mask = 1; mask < (std::size_t(1) << n); ++mask) {
        if (std::popcount(mask) > 3) continue;
        std::vector<Element> x;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t(1) << i)) x.push_back(ground[i]);
        double r = static_cast<double>(testsup::product_count_by_set(rs, s1, x)) /
                   static_cast<double>(x.size());
        naive = std::min(naive, r);
    }
    EXPECT_DOUBLE_EQ(res.min_ratio, naive);
}

TEST(ExactSearch, BudgetExceeded) {
    auto f2 = make_free_group(2);
    auto ground = BallIndex::enumerate(f2, 3); // 53 elements
    auto s1 = BallIndex::enumerate(f2, 1).sphere(1);
    EXPECT_THROW(expansion_exact(f2, s1.members(), ground, 5, 1000), resource_error);
}

TEST(Witnesses, TreeBallRatios) {
    auto f2 = make_free_group(2);
    auto ground = BallIndex::enumerate(f2, 5);
    auto s1 = ground.sphere(1);
    auto report = expansion_witnesses(f2, s1.members(), ground,
                                      WitnessFamily{true, false, 0, 42});
    // |S(1) B(m)| = |B(m+1)| for m >= 1, so ratios decrease toward 3;
    // the m = 0 witness is the bare sphere
    for (const auto& row : report.rows) {
        if (row.kind != "ball") continue;
        double expected = row.param == 0
                              ? 4.0
                              : (2 * std::pow(3.0, row.param + 1) - 1) /
                                    (2 * std::pow(3.0, row.param) - 1);
        EXPECT_NEAR(row.ratio, expected, 1e-12);
    }
    EXPECT_NEAR(report.min_ratio, 1457.0 / 485.0, 1e-12); // m = 5
    double prev = 1e9;
    for (const auto& row : report.rows) {
        EXPECT_LT(row.ratio, prev);
        prev = row.ratio;
    }
}

TEST(Witnesses, BallAtRadiusTwo) {
    auto f2 = make_free_group(2);
    auto ground = BallIndex::enumerate(f2, 2);
    auto s1 = ground.sphere(1);
    auto report = expansion_witnesses(f2, s1.members(), ground,
                                      WitnessFamily{true, false, 0, 42});
    EXPECT_NEAR(report.min_ratio, 53.0 / 17.0, 1e-12);
    EXPECT_EQ(report.best_descriptor, "ball:2");
}

TEST(Witnesses, LatticeRatiosDriftToOne) {
    auto z2 = make_free_abelian(2);
    auto ground = BallIndex::enumerate(z2, 6);
    auto s1 = ground.sphere(1);
    auto report = expansion_witnesses(z2, s1.members(), ground,
                                      WitnessFamily{true, false, 0, 42});
    std::vector<double> ratios;
    for (const auto& row : report.rows) ratios.push_back(row.ratio);
    for (std::size_t i = 1; i < ratios.size(); ++i) EXPECT_LT(ratios[i], ratios[i - 1]);
    EXPECT_LT(ratios.back(), 1.4); // amenability: ratios sink toward 1
}

TEST(Witnesses, RandomFamilyIsDeterministic) {
    auto rs = make_free_product({2, 2, 2});
    auto ground = BallIndex::enumerate(rs, 3);
    auto s1 = ground.sphere(1);
    WitnessFamily family{false, false, 25, 7};
    auto a = expansion_witnesses(rs, s1.members(), ground, family);
    auto b = expansion_witnesses(rs, s1.members(), ground, family);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i)
        EXPECT_EQ(a.rows[i].ratio, b.rows[i].ratio);
    // every witness bounds the expansion from above by definition
    for (const auto& row : a.rows) EXPECT_LE(row.ratio, 3.0 + 1e-12);
}

TEST(LowerBound, Values) {
    EXPECT_DOUBLE_EQ(expansion_lower_bound(4, 1.7, 1.0), 1.0);
    EXPECT_NEAR(expansion_lower_bound(4, 1.5, 0.880582), 1.4646, 1e-4);
    EXPECT_NEAR(expansion_lower_bound(4, 2.0, std::sqrt(3.0) / 2.0), 4.0 / 3.0, 1e-12);
}

TEST(LowerBound, ClampsAboveOne) {
    bool clamped = false;
    double v = expansion_lower_bound(4, 1.5, 1.2, &clamped);
    EXPECT_TRUE(clamped);
    EXPECT_DOUBLE_EQ(v, 1.0);
    EXPECT_THROW(expansion_lower_bound(4, 1.5, 0.0), input_error);
    EXPECT_THROW(expansion_lower_bound(4, 1.0, 0.5), input_error);
}

TEST(Consistency, CertifiedIntervalNonEmpty) {
    // both the exact search and every witness upper-bound the expansion, so
    // the certified interval [lower, min(exact, witness)] must be non-empty;
    // exact(|X| <= 4) and witness minima are not mutually ordered
    auto f2 = make_free_group(2);
    auto ball = BallIndex::enumerate(f2, 2);
    auto ground = BallIndex::enumerate(f2, 2);
    auto s1 = ball.sphere(1).members();

    double lower = expansion_lower_bound(4, 2.0, std::sqrt(3.0) / 2.0);
    auto exact = expansion_exact(f2, s1, ground, 4);
    auto witness =
        expansion_witnesses(f2, s1, ground, WitnessFamily{true, true, 50, 42});
    double upper = std::min(exact.min_ratio, witness.min_ratio);
    EXPECT_LE(lower, upper + 1e-12);
    EXPECT_LE(exact.min_ratio, 4.0 + 1e-12);
    EXPECT_LE(witness.min_ratio, 4.0 + 1e-12);
}

TEST(Consistency, RightTranslationInvariance) {
    // |S (X g)| = |(S X) g| = |S X|; left translates change product sizes in
    // nonabelian groups
    testsup::Rng rng(83);
    auto rs = make_free_group(2);
    auto ball = BallIndex::enumerate(rs, 4);
    auto s2 = ball.sphere(2).members();
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Element> x;
        std::set<Word> seen;
        for (int i = 0; i < 4; ++i) {
            auto e = rng.pick(ball);
            if (seen.insert(e.word).second) x.push_back(e);
        }
        Element g = rng.pick(ball);
        std::vector<Element> xg;
        for (const auto& e : x) xg.push_back(rs.multiply(e, g));
        EXPECT_EQ(product_set(rs, s2, x).size(), product_set(rs, s2, xg).size());
    }
}
