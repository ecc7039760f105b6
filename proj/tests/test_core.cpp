#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "swarmlab/core.hpp"

using namespace swarmlab;

TEST(LimitSpeed, ZeroVectorPassesThrough) {
    EXPECT_EQ(limit_speed({0, 0}, 0.1), Vec2(0, 0));
}

TEST(LimitSpeed, ScalesDownFastVector) {
    const Vec2 v = limit_speed({0.3, 0.4}, 0.1);
    EXPECT_NEAR(v.x, 0.06, 1e-15);
    EXPECT_NEAR(v.y, 0.08, 1e-15);
    EXPECT_NEAR(v.norm(), 0.1, 1e-15);
}

TEST(LimitSpeed, SlowVectorUnchanged) {
    EXPECT_EQ(limit_speed({0.05, 0}, 0.1), Vec2(0.05, 0));
}

TEST(LimitSpeed, RejectsBadInput) {
    EXPECT_THROW(limit_speed({1, 0}, 0.0), ConfigError);
    EXPECT_THROW(limit_speed({std::nan(""), 0}, 0.1), NumericError);
    EXPECT_THROW(limit_speed({std::numeric_limits<double>::infinity(), 0}, 0.1), NumericError);
}

TEST(LimitSpeed, IdempotentAndNeverFaster) {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const Vec2 v{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const double m = rng.uniform(0.01, 1.0);
        const Vec2 once = limit_speed(v, m);
        EXPECT_EQ(limit_speed(once, m), once);
        EXPECT_LE(once.norm(), v.norm());
        EXPECT_LE(once.norm(), m * (1 + 1e-15));
        // direction is kept
        EXPECT_NEAR(once.x * v.y - once.y * v.x, 0.0, 1e-12);
    }
}

TEST(RescaleSpeed, AlwaysHitsLimit) {
    EXPECT_NEAR(rescale_speed({0.01, 0}, 0.1).x, 0.1, 1e-15);
    EXPECT_EQ(rescale_speed({0, 0}, 0.1), Vec2(0, 0));
}

TEST(Dist, Examples) {
    EXPECT_DOUBLE_EQ(dist({0, 0}, {3, 4}), 5.0);
    EXPECT_DOUBLE_EQ(dist({1, 1}, {1, 1}), 0.0);
    EXPECT_DOUBLE_EQ(dist({-1, 0}, {2, 0}), 3.0);
    EXPECT_THROW(dist({std::nan(""), 0}, {0, 0}), NumericError);
}

TEST(Dist, MetricProperties) {
    Rng rng(11);
    for (int i = 0; i < 10000; ++i) {
        const Vec2 a{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        const Vec2 b{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        const Vec2 c{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        EXPECT_EQ(dist(a, b), dist(b, a));
        EXPECT_GE(dist(a, b), 0.0);
        EXPECT_LE(dist(a, c), dist(a, b) + dist(b, c) + 1e-12);
    }
}

TEST(Rng, SameSeedSameSequence) {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const double x = a.uniform();
        EXPECT_EQ(x, b.uniform());
        differs |= x != c.uniform();
    }
    EXPECT_TRUE(differs);
}

TEST(Rng, UniformMatchesEngineTopBits) {
    std::mt19937_64 engine(5);
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const double expect = std::ldexp(static_cast<double>(engine() >> 11), -53);
        EXPECT_EQ(rng.uniform(), expect);
    }
}

TEST(Rng, UnitIntervalAndMean) {
    Rng rng(3);
    double sum = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    // standard error of the mean is sqrt(1/12/n)
    EXPECT_NEAR(sum / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
}

TEST(Mix64, KnownSplitmixOutput) {
    // first output of splitmix64 seeded with 0
    EXPECT_EQ(mix64(0), 0xe220a8397b1dcdafULL);
}
