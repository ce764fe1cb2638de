#include <gtest/gtest.h>

#include <random>

#include "locoscore/error.hpp"
#include "locoscore/trajectory.hpp"

using namespace locoscore;

namespace {

std::vector<TrajectorySample> samples(std::initializer_list<std::pair<double, double>> pts) {
    std::vector<TrajectorySample> out;
    for (const auto& [t, d] : pts) out.push_back({t, d});
    return out;
}

}  // namespace

TEST(StPathDev, Rectangle) { EXPECT_DOUBLE_EQ(st_path_dev(samples({{0, 2}, {10, 2}})), 20.0); }

TEST(StPathDev, Triangle) { EXPECT_DOUBLE_EQ(st_path_dev(samples({{0, 0}, {10, 2}})), 10.0); }

TEST(StPathDev, PiecewiseTrapezoid) { EXPECT_DOUBLE_EQ(st_path_dev(samples({{0, 1}, {1, 3}, {3, 0}})), 5.0); }

TEST(StPathDev, Errors) {
    EXPECT_THROW(st_path_dev(samples({{0, 1}})), Error);
    EXPECT_THROW(st_path_dev(samples({{0, 1}, {0, 2}})), Error);
    EXPECT_THROW(st_path_dev(samples({{0, 1}, {1, -2}})), Error);
}

TEST(StPathDev, AdditiveOverIntervals) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<TrajectorySample> all;
        double t = 0;
        for (int i = 0; i < 30; ++i) {
            all.push_back({t, u(rng)});
            t += 0.1 + u(rng) / 4;
        }
        const std::size_t cut = 1 + rep % 28;
        std::vector<TrajectorySample> a(all.begin(), all.begin() + static_cast<long>(cut) + 1);
        std::vector<TrajectorySample> b(all.begin() + static_cast<long>(cut), all.end());
        EXPECT_NEAR(st_path_dev(all), st_path_dev(a) + st_path_dev(b), 1e-9);
    }
}

TEST(StPathDev, ScalesWithDeviation) {
    auto s = samples({{0, 0.5}, {2, 1.5}, {3, 0.2}, {7, 3.0}});
    const double base = st_path_dev(s);
    const double nr = nr_st_path_dev(base, 5.0, 7.0);
    for (auto& x : s) x.path_dev *= 2.5;
    EXPECT_NEAR(st_path_dev(s), 2.5 * base, 1e-12);
    EXPECT_NEAR(nr_st_path_dev(st_path_dev(s), 5.0, 7.0), 2.5 * nr, 1e-12);
}

TEST(NrStPathDev, Examples) {
    EXPECT_DOUBLE_EQ(nr_st_path_dev(35, 7, 10), 0.5);
    EXPECT_DOUBLE_EQ(nr_st_path_dev(0, 7, 10), 0.0);
    EXPECT_DOUBLE_EQ(nr_st_path_dev(50, 5, 10), 1.0);
    EXPECT_THROW(nr_st_path_dev(1, 0, 10), Error);
    EXPECT_THROW(nr_st_path_dev(1, 5, 0), Error);
}

TEST(CompoundAccuracy, Examples) {
    EXPECT_DOUBLE_EQ(compound_accuracy(1, 0), 1.0);
    EXPECT_DOUBLE_EQ(compound_accuracy(0, 0.7), 0.0);
    EXPECT_DOUBLE_EQ(compound_accuracy(0.8, 0.25), 0.6);
    EXPECT_DOUBLE_EQ(compound_accuracy(0.8, 3.0), 0.0);
    EXPECT_THROW(compound_accuracy(1.2, 0), Error);
    EXPECT_THROW(compound_accuracy(0.5, -0.1), Error);
}

TEST(CompoundAccuracy, BoundsAndMonotonicity) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> rate(0.0, 1.0), dev(0.0, 1.5), step(0.0, 0.2);
    for (int i = 0; i < 1000; ++i) {
        const double r = rate(rng), d = dev(rng);
        const double a = compound_accuracy(r, d);
        EXPECT_GE(a, 0.0);
        EXPECT_LE(a, 1.0);
        const double r2 = std::min(1.0, r + step(rng));
        EXPECT_GE(compound_accuracy(r2, d), a);
        EXPECT_LE(compound_accuracy(r, d + step(rng)), a);
    }
}

TEST(ScoreRate, Examples) {
    EXPECT_DOUBLE_EQ(score_rate(50), 1.0);
    EXPECT_DOUBLE_EQ(score_rate(0), 0.0);
    EXPECT_DOUBLE_EQ(score_rate(25), 0.5);
    EXPECT_THROW(score_rate(51), Error);
    EXPECT_THROW(score_rate(-1), Error);
}

TEST(PhysicalEffort, Examples) {
    EXPECT_DOUBLE_EQ(physical_effort(70, 70), 0.0);
    EXPECT_NEAR(physical_effort(70, 93.667), 23.667, 1e-12);
    EXPECT_DOUBLE_EQ(physical_effort(80, 76), -4.0);
    EXPECT_THROW(physical_effort(0, 70), Error);
    EXPECT_THROW(physical_effort(70, -1), Error);
}

TEST(FlaggedRate, TimeWeighted) {
    std::vector<TrajectorySample> s{{0, 0, true}, {1, 0, false}, {4, 0, true}, {5, 0, false}};
    EXPECT_DOUBLE_EQ(flagged_rate(s, SampleFlag::LookingAtTarget), 2.0 / 5.0);
    EXPECT_DOUBLE_EQ(flagged_rate(s, SampleFlag::ArmsStretched), 0.0);
}

TEST(MaxDist, Table) {
    EXPECT_EQ(max_dist({Scenario::S2, 2}), 7.0);
    for (int t = 1; t <= 3; ++t) EXPECT_EQ(max_dist({Scenario::S3, t}), 5.0);
    EXPECT_FALSE(max_dist({Scenario::S1, 1}));
}
