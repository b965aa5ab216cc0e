#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "crus/cluster.hpp"
#include "crus/error.hpp"
#include "test_util.hpp"

using namespace crus;

namespace {

// two numeric blobs around (0,0) and (10,10)
Dataset two_blobs(std::uint64_t seed, std::size_t per_blob, double spread = 1.0) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-spread, spread);
    std::vector<Instance> rows;
    for (int b = 0; b < 2; ++b)
        for (std::size_t i = 0; i < per_blob; ++i) {
            auto x = testutil::inst({10.0 * b + u(rng), 10.0 * b + u(rng)}, i % 3 == 0);
            x.tag = b;
            rows.push_back(x);
        }
    return testutil::make(testutil::numeric_schema(2), rows);
}

}  // namespace

TEST(MixedDistance, Examples) {
    auto schema = testutil::mixed_schema(2, 1, 3);
    auto d = testutil::make(schema, {testutil::inst({0, 0, 0}, true), testutil::inst({4, 8, 1}, false),
                                     testutil::inst({4, 8, 0}, false)});
    auto sc = FeatureScaler::fit(d);
    EXPECT_DOUBLE_EQ(mixed_distance(d[0], d[0], sc), 0.0);
    EXPECT_DOUBLE_EQ(mixed_distance(d[1], d[2], sc), 1.0);
    EXPECT_NEAR(mixed_distance(d[0], d[2], sc), std::sqrt(2.0), 1e-12);
}

TEST(MixedDistance, ClampsUnseenValues) {
    auto d = testutil::make(testutil::numeric_schema(1), {testutil::inst({0}, true), testutil::inst({10}, false)});
    auto sc = FeatureScaler::fit(d);
    EXPECT_DOUBLE_EQ(sc.normalize(0, -5), 0.0);
    EXPECT_DOUBLE_EQ(sc.normalize(0, 50), 1.0);
    EXPECT_DOUBLE_EQ(sc.normalize(0, 5), 0.5);
    EXPECT_DOUBLE_EQ(mixed_distance(testutil::inst({100}, true), d[1], sc), 0.0);
}

TEST(MixedDistance, ConstantAttributeContributesZero) {
    auto d = testutil::make(testutil::numeric_schema(2), {testutil::inst({3, 1}, true), testutil::inst({3, 2}, false)});
    auto sc = FeatureScaler::fit(d);
    EXPECT_DOUBLE_EQ(mixed_distance(d[0], d[1], sc), 1.0);
}

TEST(MixedDistance, SchemaMismatchThrows) {
    auto d = testutil::make(testutil::numeric_schema(2), {testutil::inst({3, 1}, true)});
    auto sc = FeatureScaler::fit(d);
    EXPECT_THROW(mixed_distance(testutil::inst({1}, true), d[0], sc), Error);
}

TEST(MixedDistance, MetricProperties) {
    auto d = testutil::random_mixed(11, 80, 3, 2, 4);
    auto sc = FeatureScaler::fit(d);
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); j += 7) {
            const double a = mixed_distance(d[i], d[j], sc), b = mixed_distance(d[j], d[i], sc);
            EXPECT_DOUBLE_EQ(a, b);
            EXPECT_GE(a, 0.0);
            if (d[i].values == d[j].values) EXPECT_EQ(a, 0.0);
            if (a == 0.0) {
                for (std::size_t k = 0; k < d.attribute_count(); ++k)
                    EXPECT_DOUBLE_EQ(sc.transform(d[i])[k], sc.transform(d[j])[k]);
            }
        }
}

TEST(Kmeans, SingleClusterIsMeanAndMode) {
    auto d = testutil::make(testutil::mixed_schema(1, 1, 3),
                            {testutil::inst({0, 2}, true), testutil::inst({5, 2}, false), testutil::inst({10, 1}, false)});
    auto m = kmeans_fit(d, 1, 3);
    ASSERT_EQ(m.centroids.size(), 1u);
    EXPECT_NEAR(m.centroids[0].values[0], 0.5, 1e-12);
    EXPECT_DOUBLE_EQ(m.centroids[0].values[1], 2.0);
}

TEST(Kmeans, RecoversSeparatedBlobs) {
    auto d = two_blobs(4, 100);
    auto m = kmeans_fit(d, 2, 9);
    auto labels = assign_all(d, m);
    std::map<int, std::set<std::size_t>> by_tag;
    for (std::size_t i = 0; i < d.size(); ++i) by_tag[d[i].tag].insert(labels[i]);
    EXPECT_EQ(by_tag[0].size(), 1u);
    EXPECT_EQ(by_tag[1].size(), 1u);
    EXPECT_NE(*by_tag[0].begin(), *by_tag[1].begin());
    for (const auto& c : m.centroids) {
        // centroid inside one blob's normalized bounding box
        const bool low = c.values[0] < 0.2 && c.values[1] < 0.2;
        const bool high = c.values[0] > 0.8 && c.values[1] > 0.8;
        EXPECT_TRUE(low || high);
    }
    // brute force: each point is nearest to its own centroid
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::size_t best = 0;
        double bd = 1e300;
        for (std::size_t c = 0; c < m.centroids.size(); ++c) {
            const double dist = mixed_distance(d[i], m.centroids[c], m.scaler);
            if (dist < bd) bd = dist, best = c;
        }
        EXPECT_EQ(best, labels[i]);
    }
}

TEST(Kmeans, Deterministic) {
    auto d = testutil::random_mixed(3, 200, 3, 1, 3);
    auto a = kmeans_fit(d, 4, 17), b = kmeans_fit(d, 4, 17);
    ASSERT_EQ(a.centroids.size(), b.centroids.size());
    for (std::size_t c = 0; c < a.centroids.size(); ++c) EXPECT_EQ(a.centroids[c].values, b.centroids[c].values);
    EXPECT_EQ(a.objective_trace, b.objective_trace);
}

TEST(Kmeans, SerialAndParallelAgree) {
    auto d = testutil::random_mixed(8, 1500, 4, 2, 3);
    auto a = kmeans_fit(d, 5, 2, 100, Exec::serial), b = kmeans_fit(d, 5, 2, 100, Exec::parallel);
    for (std::size_t c = 0; c < a.centroids.size(); ++c) EXPECT_EQ(a.centroids[c].values, b.centroids[c].values);
    EXPECT_EQ(assign_all(d, a, Exec::serial), assign_all(d, b, Exec::parallel));
}

TEST(Kmeans, ObjectiveNonIncreasing) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto d = testutil::random_mixed(seed, 300, 3, 0, 2);
        auto m = kmeans_fit(d, 4, seed);
        for (std::size_t t = 1; t < m.objective_trace.size(); ++t)
            EXPECT_LE(m.objective_trace[t], m.objective_trace[t - 1] + 1e-9);
        EXPECT_LE(m.iterations, 100);
    }
}

TEST(Kmeans, NoEmptyClusters) {
    auto d = testutil::random_mixed(21, 60, 2, 1, 2);
    for (int k = 1; k <= 12; ++k) {
        auto m = kmeans_fit(d, k, 5);
        auto labels = assign_all(d, m);
        std::set<std::size_t> used(labels.begin(), labels.end());
        EXPECT_EQ(static_cast<int>(used.size()), k) << "k=" << k;
    }
}

TEST(Kmeans, RejectsBadK) {
    auto d = testutil::random_mixed(1, 5, 2, 0, 2);
    EXPECT_THROW(kmeans_fit(d, 6, 1), Error);
    EXPECT_THROW(kmeans_fit(d, 0, 1), Error);
}

TEST(Kmeans, AffineScalingLeavesAssignmentsUnchanged) {
    auto d = testutil::random_mixed(13, 200, 3, 0, 2);
    std::vector<Instance> scaled(d.begin(), d.end());
    for (auto& x : scaled) {
        x.values[0] = 3.5 * x.values[0] - 20;
        x.values[2] = 0.01 * x.values[2] + 1e4;
    }
    auto d2 = d.with_instances(scaled);
    auto a = kmeans_fit(d, 3, 4), b = kmeans_fit(d2, 3, 4);
    EXPECT_EQ(assign_all(d, a), assign_all(d2, b));
}

TEST(AssignCluster, TieGoesToLowestIndex) {
    auto d = testutil::make(testutil::numeric_schema(1), {testutil::inst({0}, true), testutil::inst({10}, false)});
    ClusterModel m;
    m.k = 2;
    m.scaler = FeatureScaler::fit(d);
    m.centroids = {Centroid{{1.0}}, Centroid{{0.0}}};
    EXPECT_EQ(assign_cluster(testutil::inst({5}, true), m), 0u);
    EXPECT_EQ(assign_cluster(testutil::inst({10}, true), m), 0u);
    EXPECT_EQ(assign_cluster(testutil::inst({0}, true), m), 1u);
}

TEST(AssignCluster, CentroidPointMapsToItself) {
    auto d = two_blobs(2, 50);
    auto m = kmeans_fit(d, 2, 1);
    for (std::size_t c = 0; c < m.centroids.size(); ++c) {
        Instance x;
        x.values = {m.scaler.min(0) + m.centroids[c].values[0] * (m.scaler.max(0) - m.scaler.min(0)),
                    m.scaler.min(1) + m.centroids[c].values[1] * (m.scaler.max(1) - m.scaler.min(1))};
        EXPECT_EQ(assign_cluster(x, m), c);
    }
}

TEST(ClusterModel, SerializationRoundTrip) {
    auto d = testutil::random_mixed(6, 100, 2, 2, 3);
    auto m = kmeans_fit(d, 3, 8);
    auto path = std::filesystem::temp_directory_path() / "crus_test_cluster.json";
    save_cluster_model(m, path);
    auto back = load_cluster_model(path);
    EXPECT_EQ(back.k, m.k);
    EXPECT_EQ(assign_all(d, back), assign_all(d, m));
    std::filesystem::remove(path);
}
