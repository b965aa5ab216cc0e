#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "crus/error.hpp"
#include "crus/tree.hpp"
#include "test_util.hpp"

using namespace crus;

namespace {

TreeConfig unpruned() {
    TreeConfig c;
    c.use_pruning = false;
    c.min_leaf_weight = 1;
    return c;
}

Dataset xor_data() {
    auto s = testutil::mixed_schema(0, 2, 2);
    return testutil::make(s, {testutil::inst({0, 0}, false), testutil::inst({0, 1}, true),
                              testutil::inst({1, 0}, true), testutil::inst({1, 1}, false)});
}

// random data with distinct feature vectors (consistent labels)
Dataset consistent(std::uint64_t seed, std::size_t n) {
    auto d = testutil::random_mixed(seed, n, 3, 2, 3, 0.4);
    std::set<std::vector<double>> seen;
    std::vector<Instance> rows;
    for (const auto& x : d)
        if (seen.insert(x.values).second) rows.push_back(x);
    return testutil::make(d.schema_ptr(), rows);
}

double training_accuracy(const DecisionTree& t, const Dataset& d) {
    std::size_t ok = 0;
    for (const auto& x : d) ok += t.predict(x).label == x.label;
    return static_cast<double>(ok) / static_cast<double>(d.size());
}

}  // namespace

TEST(GainRatio, PerfectBinarySplitIsOne) {
    auto s = testutil::mixed_schema(0, 1, 2);
    auto d = testutil::make(s, {testutil::inst({0}, true), testutil::inst({0}, true), testutil::inst({1}, false),
                                testutil::inst({1}, false)});
    std::vector<double> w(4, 1.0);
    EXPECT_NEAR(*gain_ratio(d, w, 0), 1.0, 1e-12);
}

TEST(GainRatio, ConstantAttributeIsUnusable) {
    auto s = testutil::mixed_schema(0, 1, 2);
    auto d = testutil::make(s, {testutil::inst({1}, true), testutil::inst({1}, false)});
    std::vector<double> w(2, 1.0);
    EXPECT_FALSE(gain_ratio(d, w, 0).has_value());
}

TEST(GainRatio, IndependentAttributeIsZero) {
    auto s = testutil::mixed_schema(0, 1, 2);
    auto d = testutil::make(s, {testutil::inst({0}, true), testutil::inst({0}, false), testutil::inst({1}, true),
                                testutil::inst({1}, false)});
    std::vector<double> w(4, 1.0);
    EXPECT_NEAR(*gain_ratio(d, w, 0), 0.0, 1e-12);
}

TEST(GainRatio, NumericThresholdAndWeights) {
    auto d = testutil::make(testutil::numeric_schema(1), {testutil::inst({1}, true), testutil::inst({2}, true),
                                                          testutil::inst({3}, false), testutil::inst({4}, false)});
    std::vector<double> w(4, 1.0);
    EXPECT_NEAR(*gain_ratio(d, w, 0, 2.5), 1.0, 1e-12);
    // zero-weight rows are ignored
    std::vector<double> w2{1, 0, 1, 0};
    EXPECT_NEAR(*gain_ratio(d, w2, 0, 2.5), 1.0, 1e-12);
    EXPECT_THROW(gain_ratio(d, w, 0), Error);
}

TEST(FitTree, SeparableOneDimensional) {
    std::vector<Instance> rows;
    for (int i = 0; i <= 10; ++i) rows.push_back(testutil::inst({double(i)}, i > 5));
    auto d = testutil::make(testutil::numeric_schema(1), rows);
    auto t = fit_tree(d, TreeConfig{});
    EXPECT_EQ(t.depth(), 1);
    EXPECT_GT(t.node(0).threshold, 5.0);
    EXPECT_LT(t.node(0).threshold, 6.0);
    EXPECT_DOUBLE_EQ(training_accuracy(t, d), 1.0);
    EXPECT_EQ(export_rules(t).size(), 2u);
}

TEST(FitTree, PureSetIsSingleLeaf) {
    auto d = testutil::make(testutil::numeric_schema(2), {testutil::inst({1, 2}, true), testutil::inst({3, 4}, true)});
    auto t = fit_tree(d, TreeConfig{});
    EXPECT_EQ(t.node_count(), 1u);
    EXPECT_EQ(t.predict(testutil::inst({0, 0}, false)).label, ClassLabel::positive);
    auto rules = export_rules(t);
    ASSERT_EQ(rules.size(), 1u);
    EXPECT_EQ(rules[0], "IF TRUE THEN class = pos");
}

TEST(FitTree, LearnsXor) {
    auto d = xor_data();
    auto t = fit_tree(d, unpruned());
    EXPECT_EQ(t.depth(), 2);
    EXPECT_DOUBLE_EQ(training_accuracy(t, d), 1.0);
    EXPECT_EQ(t.predict(testutil::inst({0, 1}, false)).label, ClassLabel::positive);
    EXPECT_EQ(t.predict(testutil::inst({1, 1}, true)).label, ClassLabel::negative);
}

TEST(FitTree, EmptyTrainingSetThrows) {
    auto d = testutil::make(testutil::numeric_schema(1), {});
    EXPECT_THROW(fit_tree(d, TreeConfig{}), Error);
    auto one = testutil::make(testutil::numeric_schema(1), {testutil::inst({1}, true)});
    std::vector<double> zero{0.0};
    EXPECT_THROW(fit_tree(one, zero, TreeConfig{}), Error);
}

TEST(FitTree, ConsistentDataFitPerfectly) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto d = consistent(seed, 150);
        EXPECT_DOUBLE_EQ(training_accuracy(fit_tree(d, unpruned()), d), 1.0) << "seed " << seed;
    }
}

TEST(FitTree, PruningNeverGrowsTheTree) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto d = testutil::random_mixed(seed, 300, 3, 2, 3, 0.3);
        TreeConfig pruned;
        pruned.min_leaf_weight = 1;
        const auto a = fit_tree(d, unpruned()), b = fit_tree(d, pruned);
        EXPECT_LE(b.node_count(), a.node_count());
        // pruned subtrees only replace nodes whose estimate did not get worse
        EXPECT_LE(pessimistic_error(b, 0.25), pessimistic_error(a, 0.25) + 1e-9);
    }
}

TEST(FitTree, WeightsActAsMultiplicities) {
    auto d = testutil::random_mixed(7, 80, 2, 1, 3);
    std::vector<double> w(d.size());
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < d.size(); ++i) {
        w[i] = static_cast<double>(i % 3);
        for (std::size_t r = 0; r < i % 3; ++r) idx.push_back(i);
    }
    auto a = fit_tree(d, w, unpruned());
    auto b = fit_tree(d.subset(idx), unpruned());
    for (const auto& x : d) EXPECT_EQ(a.predict(x).p_positive, b.predict(x).p_positive);
}

TEST(FitTree, LeafProbabilitiesAreDistributions) {
    auto d = testutil::random_mixed(3, 200, 3, 2, 3);
    auto t = fit_tree(d, TreeConfig{});
    for (const auto& x : d) {
        auto p = t.predict(x);
        EXPECT_GE(p.p_positive, 0.0);
        EXPECT_LE(p.p_positive, 1.0);
        EXPECT_EQ(p.label, p.p_positive > 0.5 ? ClassLabel::positive : ClassLabel::negative);
    }
}

TEST(Predict, LeafNormalizationAndTie) {
    auto s = testutil::numeric_schema(1);
    TreeNode leaf;
    leaf.class_weights = {1, 3};
    DecisionTree t(s, {leaf});
    auto p = t.predict(testutil::inst({0}, false));
    EXPECT_EQ(p.label, ClassLabel::positive);
    EXPECT_DOUBLE_EQ(p.p_positive, 0.75);
    leaf.class_weights = {1, 1};
    DecisionTree tie(s, {leaf});
    EXPECT_EQ(tie.predict(testutil::inst({0}, false)).label, ClassLabel::negative);
}

TEST(Predict, UnseenNominalBranchFollowsHeaviestChild) {
    auto s = testutil::mixed_schema(0, 1, 3);
    TreeNode root;
    root.attribute = 0;
    root.children = {1, 2, -1};
    root.class_weights = {5, 2};
    TreeNode a, b;
    a.class_weights = {1, 2};
    b.class_weights = {4, 0};
    DecisionTree t(s, {root, a, b});
    EXPECT_EQ(t.leaf_for(testutil::inst({2}, true)), 2);
    EXPECT_EQ(t.predict(testutil::inst({2}, true)).label, ClassLabel::negative);
    EXPECT_EQ(t.predict(testutil::inst({0}, true)).label, ClassLabel::positive);
}

TEST(RandomTree, DeterministicAndDiverse) {
    auto d = testutil::random_mixed(5, 200, 5, 3, 3);
    std::set<std::string> distinct;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto cfg = TreeConfig::random_tree(2, seed);
        nlohmann::json a, b;
        to_json(a, fit_tree(d, cfg));
        to_json(b, fit_tree(d, cfg));
        EXPECT_EQ(a.dump(), b.dump());
        distinct.insert(a.dump());
    }
    EXPECT_GE(distinct.size(), 2u);
}

TEST(RandomTree, FullyGrownOnConsistentData) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto d = consistent(seed + 100, 120);
        auto t = fit_tree(d, TreeConfig::random_tree(1, seed));
        EXPECT_DOUBLE_EQ(training_accuracy(t, d), 1.0);
    }
}

TEST(SubspaceSize, Examples) {
    EXPECT_EQ(default_subspace_size(1), 1);
    EXPECT_EQ(default_subspace_size(14), 4);
    EXPECT_EQ(default_subspace_size(16), 5);
    EXPECT_EQ(default_subspace_size(14, SubspaceRule::ceil_log2_plus_1), 5);
    EXPECT_EQ(default_subspace_size(2, SubspaceRule::ceil_log2_plus_1), 2);
    EXPECT_THROW(default_subspace_size(0), Error);
}

TEST(Rules, CountEqualsLeafCount) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto d = testutil::random_mixed(seed, 150, 2, 2, 3);
        auto t = fit_tree(d, unpruned());
        EXPECT_EQ(export_rules(t).size(), t.leaf_count());
    }
}

TEST(Rules, NominalConditionsInRootToLeafOrder) {
    auto t = fit_tree(xor_data(), unpruned());
    auto rules = export_rules(t);
    ASSERT_EQ(rules.size(), 4u);
    for (const auto& r : rules) {
        EXPECT_EQ(r.rfind("IF ", 0), 0u);
        EXPECT_NE(r.find(" AND "), std::string::npos);
        EXPECT_NE(r.find(" THEN class = "), std::string::npos);
    }
}

TEST(TreeJson, RoundTrip) {
    auto d = testutil::random_mixed(2, 200, 3, 2, 3);
    auto t = fit_tree(d, TreeConfig{});
    nlohmann::json j;
    to_json(j, t);
    auto back = DecisionTree::from_json(j, d.schema_ptr());
    for (const auto& x : d) EXPECT_EQ(back.predict(x).p_positive, t.predict(x).p_positive);
}

TEST(TreeConfig, Validation) {
    TreeConfig c;
    c.confidence_factor = 1.0;
    EXPECT_THROW(c.validate(), Error);
    c = TreeConfig{};
    c.min_leaf_weight = 0;
    EXPECT_THROW(c.validate(), Error);
}

TEST(Pessimistic, ExtraErrorsGrowWithConfidence) {
    EXPECT_GT(pessimistic_extra_errors(10, 1, 0.1), pessimistic_extra_errors(10, 1, 0.25));
    EXPECT_GT(pessimistic_extra_errors(10, 0, 0.25), 0.0);
}
