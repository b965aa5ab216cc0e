#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "crus/dataset.hpp"

namespace crus {

struct Prediction {
    ClassLabel label = ClassLabel::negative;
    double p_positive = 0.0;
};

/// Argmax of a (negative, positive) weight pair; a tie goes to negative.
ClassLabel majority_label(const std::array<double, 2>& class_weights) noexcept;

enum class SubspaceRule {
    floor_log2_plus_1,  // floor(log2 N) + 1
    ceil_log2_plus_1,   // ceil(log2 N) + 1
};

/// Attributes drawn per node by a random tree, clamped to [1, n_features].
int default_subspace_size(int n_features, SubspaceRule rule = SubspaceRule::floor_log2_plus_1);

struct TreeConfig {
    double min_leaf_weight = 2.0;
    bool use_pruning = true;
    double confidence_factor = 0.25;
    /// Unset: every attribute is evaluated at each node. Set: a fresh random
    /// subset of this size is drawn at each node and the tree is never pruned.
    std::optional<int> random_subspace_size;
    std::uint64_t seed = 0;

    bool is_random() const noexcept { return random_subspace_size.has_value(); }
    void validate() const;

    /// Unpruned random tree with min leaf weight 1.
    static TreeConfig random_tree(int subspace_size, std::uint64_t seed);
};

struct TreeNode {
    int attribute = -1;  // -1 for a leaf
    double threshold = 0.0;  // numeric: child 0 is `<= threshold`, child 1 is `>`
    /// Node indices; -1 marks a nominal branch that saw no training weight.
    std::vector<int> children;
    /// Training weight (negative, positive) that reached this node.
    std::array<double, 2> class_weights{};

    bool is_leaf() const noexcept { return attribute < 0; }
    double weight() const noexcept { return class_weights[0] + class_weights[1]; }
};

class DecisionTree {
public:
    DecisionTree() = default;
    DecisionTree(SchemaPtr schema, std::vector<TreeNode> nodes);

    const Schema& schema() const { return *schema_; }
    const SchemaPtr& schema_ptr() const noexcept { return schema_; }
    std::span<const TreeNode> nodes() const noexcept { return nodes_; }
    const TreeNode& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t leaf_count() const noexcept;
    int depth() const;

    /// Leaf reached by x. At a nominal split whose branch saw no training
    /// weight, follows the heaviest branch.
    int leaf_for(const Instance& x) const;
    Prediction predict(const Instance& x) const;

    friend void to_json(nlohmann::json& j, const DecisionTree& t);
    /// The schema is not part of the node JSON; pass it separately.
    static DecisionTree from_json(const nlohmann::json& j, SchemaPtr schema);

private:
    SchemaPtr schema_;
    std::vector<TreeNode> nodes_;
};

/// Gain ratio of splitting the weighted rows on `attribute` (at `threshold`
/// for numeric attributes): (H(class) - H(class | split)) / H(split), base-2.
/// Returns nullopt when H(split) is zero. Rows with zero weight are ignored.
std::optional<double> gain_ratio(const Dataset& d, std::span<const double> weights, std::size_t attribute,
                                 std::optional<double> threshold = std::nullopt);

DecisionTree fit_tree(const Dataset& train, const TreeConfig& cfg);
/// Instance weights must be non-negative; a bootstrap sample is a vector of
/// integer multiplicities.
DecisionTree fit_tree(const Dataset& train, std::span<const double> weights, const TreeConfig& cfg);

/// C4.5 upper-confidence estimate of extra errors for `errors` out of `n`
/// at the given confidence factor.
double pessimistic_extra_errors(double n, double errors, double confidence_factor);
/// Sum of pessimistic error estimates over the leaves of the tree.
double pessimistic_error(const DecisionTree& t, double confidence_factor);

/// One rule per leaf, root-to-leaf conditions joined with AND:
///   IF dialysis = N AND apache <= 17 THEN infection = NO
std::vector<std::string> export_rules(const DecisionTree& t);

}  // namespace crus
