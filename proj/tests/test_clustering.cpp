#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mixclust/clustering.hpp"
#include "mixclust/errors.hpp"
#include "mixclust/rng.hpp"

using namespace mixclust;

namespace {

Matrix random_points(Eigen::Index f, Eigen::Index n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::normal_distribution<double> normal;
    Matrix v(f, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < f; ++i) v(i, j) = normal(rng);
    return v;
}

Matrix blobs(int k, int per, double spread, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::normal_distribution<double> normal;
    Matrix v(2, k * per);
    for (int c = 0; c < k; ++c) {
        const double cx = 10.0 * c, cy = 7.0 * (c % 2);
        for (int i = 0; i < per; ++i) {
            v(0, c * per + i) = cx + spread * normal(rng);
            v(1, c * per + i) = cy + spread * normal(rng);
        }
    }
    return v;
}

Matrix two_pairs() {
    Matrix v(2, 4);
    v << 0, 0, 10, 10,
         0, 1, 0, 1;
    return v;
}

}  // namespace

TEST(ClusteringType, Validation) {
    EXPECT_THROW(Clustering({0, 2}, 2), ValidationError);
    EXPECT_THROW(Clustering({0, -1}, 2), ValidationError);
    EXPECT_THROW(Clustering({0}, 0), ValidationError);
    const Clustering c({0, 0, 2, 0}, 3);
    EXPECT_TRUE(c.has_empty_cluster());
    EXPECT_DOUBLE_EQ(c.p_max(), 0.75);
    EXPECT_DOUBLE_EQ(c.p_min(), 0.0);
}

TEST(Distortion, Singletons) {
    const Matrix v = random_points(3, 4, 1);
    EXPECT_EQ(distortion(v, Clustering({0, 1, 2, 3}, 4)), 0.0);
}

TEST(Distortion, OneCluster) {
    Matrix v(1, 2);
    v << 0, 2;
    EXPECT_DOUBLE_EQ(distortion(v, Clustering({0, 0}, 1)), 2.0);
}

TEST(Distortion, MembershipFormAgreesOnAllBipartitions) {
    const Matrix v = random_points(2, 6, 2);
    int count = 0;
    for_each_partition(6, 2, true, [&](std::span<const int> l) {
        const Clustering c(std::vector<int>(l.begin(), l.end()), 2);
        const double a = distortion(v, c), b = distortion_membership_form(v, c);
        EXPECT_NEAR(a, b, 1e-8 * std::max(a, 1e-12));
        ++count;
    });
    EXPECT_EQ(count, 31);
}

TEST(Distortion, EmptyClusterContributesZero) {
    Matrix v(1, 3);
    v << 0, 1, 5;
    EXPECT_DOUBLE_EQ(distortion(v, Clustering({0, 0, 2}, 3)), 0.5);
}

TEST(Distortion, SizeMismatch) {
    EXPECT_THROW(distortion(random_points(2, 4, 3), Clustering({0, 1, 0}, 2)), ValidationError);
}

TEST(Distortion, TranslationInvariant) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Matrix v = random_points(3, 12, 10 + s) + Matrix::Constant(3, 12, 4.0);
        std::vector<int> labels(12);
        for (int i = 0; i < 12; ++i) labels[static_cast<std::size_t>(i)] = (i * 7 + static_cast<int>(s)) % 3;
        const Clustering c(labels, 3);
        const double dv = distortion(v, c), dz = distortion(center(v).z, c);
        EXPECT_NEAR(dv, dz, 1e-8 * dv);
    }
}

TEST(LowerBound, NEqualsK) {
    EXPECT_NEAR(distortion_lower_bound(random_points(4, 3, 4), 3), 0.0, 1e-10);
}

TEST(LowerBound, OneDimensionalTwoClusters) {
    EXPECT_NEAR(distortion_lower_bound(random_points(1, 9, 5), 2), 0.0, 1e-10);
}

TEST(LowerBound, BelowEveryBipartition) {
    const Matrix v = random_points(2, 7, 6);
    const double lb = distortion_lower_bound(v, 2);
    double best = INFINITY;
    int count = 0;
    for_each_partition(7, 2, true, [&](std::span<const int> l) {
        best = std::min(best, distortion(v, Clustering(std::vector<int>(l.begin(), l.end()), 2)));
        ++count;
    });
    EXPECT_EQ(count, 63);
    EXPECT_LE(lb, best);
}

TEST(LowerBound, KOneIsTotalScatter) {
    const Matrix v = random_points(3, 8, 7);
    EXPECT_NEAR(distortion_lower_bound(v, 1), center(v).z.squaredNorm(), 1e-12);
}

TEST(LowerBound, Errors) {
    EXPECT_THROW(distortion_lower_bound(random_points(2, 3, 1), 4), ValidationError);
    EXPECT_THROW(distortion_lower_bound(random_points(2, 3, 1), 0), ValidationError);
}

TEST(LowerBound, ExhaustiveSmallInstances) {
    for (std::uint64_t s = 0; s < 60; ++s) {
        const int n = 4 + static_cast<int>(s % 5);
        const int f = 1 + static_cast<int>(s % 3);
        const int k = 2 + static_cast<int>(s % 2);
        const Matrix v = random_points(f, n, 100 + s);
        const double lb = distortion_lower_bound(v, k);
        for_each_partition(n, k, false, [&](std::span<const int> l) {
            EXPECT_GE(distortion(v, Clustering(std::vector<int>(l.begin(), l.end()), k)),
                      lb - 1e-12 * std::max(1.0, lb));
        });
    }
}

TEST(KMeans, TwoPairs) {
    const KMeansResult r = kmeans(two_pairs(), 2);
    EXPECT_NEAR(r.distortion, 1.0, 1e-12);
    EXPECT_EQ(r.clustering[0], r.clustering[1]);
    EXPECT_EQ(r.clustering[2], r.clustering[3]);
    EXPECT_NE(r.clustering[0], r.clustering[2]);
    EXPECT_NEAR(brute_force_optimal(two_pairs(), 2).distortion, r.distortion, 1e-12);
}

TEST(KMeans, IdenticalPoints) {
    const Matrix v = Matrix::Constant(2, 6, 3.0);
    EXPECT_EQ(kmeans(v, 2).distortion, 0.0);
}

TEST(KMeans, NEqualsK) {
    const KMeansResult r = kmeans(random_points(2, 4, 8), 4);
    EXPECT_EQ(r.distortion, 0.0);
    for (auto s : r.clustering.cluster_sizes()) EXPECT_EQ(s, 1u);
}

TEST(KMeans, Errors) {
    EXPECT_THROW(kmeans(random_points(2, 3, 1), 4), ValidationError);
    KMeansConfig bad;
    bad.restarts = 0;
    EXPECT_THROW(kmeans(random_points(2, 5, 1), 2, bad), ValidationError);
}

TEST(KMeans, DeterministicAndDistortionExact) {
    const Matrix v = blobs(3, 30, 1.5, 3);
    KMeansConfig cfg;
    cfg.seed = 12;
    const KMeansResult a = kmeans(v, 3, cfg), b = kmeans(v, 3, cfg);
    EXPECT_EQ(a.clustering, b.clustering);
    EXPECT_EQ(a.distortion, b.distortion);
    EXPECT_EQ(a.distortion, distortion(v, a.clustering));
}

TEST(KMeans, LloydMonotone) {
    for (std::uint64_t s = 0; s < 30; ++s) {
        KMeansConfig cfg;
        cfg.seed = s;
        cfg.restarts = 1;
        cfg.seeding = (s % 2) ? Seeding::UniformRandom : Seeding::KMeansPlusPlus;
        const KMeansResult r = kmeans(random_points(3, 60, 200 + s), 4, cfg);
        ASSERT_FALSE(r.history.empty());
        for (std::size_t i = 1; i < r.history.size(); ++i) {
            EXPECT_LE(r.history[i], r.history[i - 1] * (1 + 1e-12));
        }
    }
}

TEST(KMeans, NoEmptyClusters) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        KMeansConfig cfg;
        cfg.seed = s;
        cfg.seeding = Seeding::UniformRandom;
        const KMeansResult r = kmeans(random_points(2, 12, 300 + s), 6, cfg);
        EXPECT_FALSE(r.clustering.has_empty_cluster());
    }
}

TEST(KMeans, MatchesBruteForceOnSeparatedData) {
    int equal = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const int k = 2 + static_cast<int>(s % 2);
        const Matrix v = blobs(k, 3, 0.8, 400 + s);
        KMeansConfig cfg;
        cfg.seed = s;
        const double km = kmeans(v, k, cfg).distortion;
        const double bf = brute_force_optimal(v, k).distortion;
        EXPECT_GE(km, bf * (1 - 1e-12));
        if (std::abs(km - bf) <= 1e-9 * bf) ++equal;
    }
    EXPECT_GE(equal, 95);
}

TEST(BruteForce, CollinearThree) {
    Matrix v(1, 3);
    v << 0, 1, 5;
    const BruteForceResult r = brute_force_optimal(v, 2);
    EXPECT_DOUBLE_EQ(r.distortion, 0.5);
    EXPECT_EQ(r.clustering[0], r.clustering[1]);
    EXPECT_NE(r.clustering[0], r.clustering[2]);
}

TEST(BruteForce, KOne) {
    const Matrix v = random_points(2, 5, 9);
    EXPECT_NEAR(brute_force_optimal(v, 1).distortion, center(v).z.squaredNorm(), 1e-12);
}

TEST(BruteForce, RefusesHugeSearch) {
    EXPECT_THROW(brute_force_optimal(random_points(1, 30, 1), 4), UnsupportedError);
}

TEST(Partitions, Counts) {
    EXPECT_EQ(partition_count(4, 2), 8u);    // S(4,1) + S(4,2) = 1 + 7
    EXPECT_EQ(partition_count(8, 3), 1094u);
    EXPECT_EQ(partition_count(5, 5), 52u);   // Bell number
    std::uint64_t seen = 0;
    for_each_partition(8, 3, false, [&](std::span<const int>) { ++seen; });
    EXPECT_EQ(seen, 1094u);
    seen = 0;
    for_each_partition(8, 3, true, [&](std::span<const int>) { ++seen; });
    EXPECT_EQ(seen, 966u);  // S(8,3)
}
