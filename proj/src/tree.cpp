#include "crus/tree.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <numeric>

#include "crus/error.hpp"
#include "crus/random.hpp"
#include "crus/special_functions.hpp"

namespace crus {

namespace {

constexpr double kTieEps = 1e-12;

double entropy(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0) return 0.0;
    double h = 0.0;
    for (double w : weights) {
        if (w <= 0) continue;
        const double p = w / total;
        h -= p * std::log2(p);
    }
    return h;
}

double entropy2(const std::array<double, 2>& w) { return entropy(w); }

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

struct Candidate {
    int attribute = -1;
    double threshold = 0.0;
    double ratio = 0.0;
};

struct Row {
    double value;
    double weight;
    ClassLabel label;
};

// Best numeric threshold by information gain (ties: lowest threshold), then
// its gain ratio. Both sides must carry at least min_leaf weight.
std::optional<Candidate> best_numeric(const Dataset& d, std::span<const double> w, std::span<const std::size_t> rows,
                                      std::size_t attr, double min_leaf) {
    std::vector<Row> sorted;
    sorted.reserve(rows.size());
    std::array<double, 2> total{};
    for (auto i : rows) {
        sorted.push_back({d[i].values[attr], w[i], d[i].label});
        total[class_index(d[i].label)] += w[i];
    }
    std::stable_sort(sorted.begin(), sorted.end(), [](const Row& a, const Row& b) { return a.value < b.value; });
    const double W = total[0] + total[1];
    const double h_class = entropy2(total);

    std::array<double, 2> left{};
    double best_gain = -1.0;
    std::size_t best_pos = 0;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        left[class_index(sorted[i].label)] += sorted[i].weight;
        if (!(sorted[i].value < sorted[i + 1].value)) continue;
        const double lw = left[0] + left[1];
        const double rw = W - lw;
        if (lw < min_leaf || rw < min_leaf || lw <= 0 || rw <= 0) continue;
        const std::array<double, 2> right{total[0] - left[0], total[1] - left[1]};
        const double gain = h_class - (lw / W) * entropy2(left) - (rw / W) * entropy2(right);
        if (gain > best_gain + kTieEps) {
            best_gain = gain;
            best_pos = i;
        }
    }
    if (best_gain < -0.5) return std::nullopt;
    // Recompute left weight at the chosen boundary for the split information.
    double lw = 0.0;
    for (std::size_t i = 0; i <= best_pos; ++i) lw += sorted[i].weight;
    const std::array<double, 2> sizes{lw, W - lw};
    const double split_info = entropy2(sizes);
    if (split_info <= 0) return std::nullopt;
    Candidate c;
    c.attribute = static_cast<int>(attr);
    c.threshold = (sorted[best_pos].value + sorted[best_pos + 1].value) / 2.0;
    c.ratio = std::max(0.0, best_gain) / split_info;
    return c;
}

std::optional<Candidate> best_nominal(const Dataset& d, std::span<const double> w, std::span<const std::size_t> rows,
                                      std::size_t attr, double min_leaf) {
    const auto cats = d.schema()[attr].category_count();
    std::vector<std::array<double, 2>> branch(cats, std::array<double, 2>{});
    std::array<double, 2> total{};
    for (auto i : rows) {
        branch[d[i].category(attr)][class_index(d[i].label)] += w[i];
        total[class_index(d[i].label)] += w[i];
    }
    const double W = total[0] + total[1];
    std::vector<double> sizes(cats);
    int big_enough = 0;
    double cond = 0.0;
    for (std::size_t c = 0; c < cats; ++c) {
        sizes[c] = branch[c][0] + branch[c][1];
        if (sizes[c] >= min_leaf && sizes[c] > 0) ++big_enough;
        if (sizes[c] > 0) cond += (sizes[c] / W) * entropy2(branch[c]);
    }
    if (big_enough < 2) return std::nullopt;
    const double split_info = entropy(sizes);
    if (split_info <= 0) return std::nullopt;
    Candidate c;
    c.attribute = static_cast<int>(attr);
    c.ratio = std::max(0.0, entropy2(total) - cond) / split_info;
    return c;
}

class Builder {
public:
    Builder(const Dataset& d, std::span<const double> w, const TreeConfig& cfg)
        : d_(d), w_(w), cfg_(cfg), rng_(derive_seed(cfg.seed, {0x7eee})) {}

    std::vector<TreeNode> build() {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < d_.size(); ++i)
            if (w_[i] > 0) rows.push_back(i);
        if (rows.empty()) throw Error("fit_tree: training set has no instance with positive weight");
        grow(rows);
        return std::move(nodes_);
    }

private:
    std::optional<Candidate> evaluate(std::span<const std::size_t> rows, std::size_t attr) const {
        return d_.schema()[attr].is_nominal() ? best_nominal(d_, w_, rows, attr, cfg_.min_leaf_weight)
                                              : best_numeric(d_, w_, rows, attr, cfg_.min_leaf_weight);
    }

    static void consider(std::optional<Candidate>& best, const std::optional<Candidate>& c) {
        if (c && (!best || c->ratio > best->ratio + kTieEps)) best = c;
    }

    std::optional<Candidate> choose(std::span<const std::size_t> rows) {
        const std::size_t n_attr = d_.attribute_count();
        std::optional<Candidate> best;
        if (!cfg_.is_random()) {
            for (std::size_t a = 0; a < n_attr; ++a) consider(best, evaluate(rows, a));
            return best;
        }
        std::vector<std::size_t> order(n_attr);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng_);
        const auto m = std::min<std::size_t>(static_cast<std::size_t>(*cfg_.random_subspace_size), n_attr);
        std::vector<std::size_t> subset(order.begin(), order.begin() + static_cast<long>(m));
        std::sort(subset.begin(), subset.end());
        for (auto a : subset) consider(best, evaluate(rows, a));
        // Nothing usable in the subset: keep drawing until a usable attribute appears.
        for (std::size_t j = m; !best && j < n_attr; ++j) consider(best, evaluate(rows, order[j]));
        return best;
    }

    int grow(const std::vector<std::size_t>& rows) {
        const int index = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        std::array<double, 2> cw{};
        for (auto i : rows) cw[class_index(d_[i].label)] += w_[i];
        nodes_[index].class_weights = cw;

        const double W = cw[0] + cw[1];
        if (cw[0] <= 0 || cw[1] <= 0 || W < 2 * cfg_.min_leaf_weight) return index;
        auto split = choose(rows);
        if (!split) return index;

        const auto attr = static_cast<std::size_t>(split->attribute);
        std::vector<std::vector<std::size_t>> parts;
        if (d_.schema()[attr].is_nominal()) {
            parts.resize(d_.schema()[attr].category_count());
            for (auto i : rows) parts[d_[i].category(attr)].push_back(i);
        } else {
            parts.resize(2);
            for (auto i : rows) parts[d_[i].values[attr] <= split->threshold ? 0 : 1].push_back(i);
        }
        nodes_[index].attribute = split->attribute;
        nodes_[index].threshold = split->threshold;
        std::vector<int> children;
        for (const auto& part : parts) children.push_back(part.empty() ? -1 : grow(part));
        nodes_[index].children = std::move(children);
        return index;
    }

    const Dataset& d_;
    std::span<const double> w_;
    const TreeConfig& cfg_;
    Rng rng_;
    std::vector<TreeNode> nodes_;
};

double leaf_errors(const TreeNode& n) { return n.weight() - n.class_weights[class_index(majority_label(n.class_weights))]; }

double leaf_estimate(const TreeNode& n, double cf) {
    const double e = leaf_errors(n);
    return e + pessimistic_extra_errors(n.weight(), e, cf);
}

// Subtree replacement, bottom-up. Returns the pessimistic error of the
// (possibly collapsed) subtree rooted at `i`.
double prune_node(std::vector<TreeNode>& nodes, int i, double cf) {
    auto& n = nodes[static_cast<std::size_t>(i)];
    if (n.is_leaf()) return leaf_estimate(n, cf);
    double subtree = 0.0;
    for (int c : std::vector<int>(n.children))
        if (c >= 0) subtree += prune_node(nodes, c, cf);
    auto& node = nodes[static_cast<std::size_t>(i)];
    const double as_leaf = leaf_estimate(node, cf);
    if (as_leaf <= subtree + 0.1) {
        node.attribute = -1;
        node.threshold = 0.0;
        node.children.clear();
        return as_leaf;
    }
    return subtree;
}

// Renumbers reachable nodes in preorder.
std::vector<TreeNode> compact(const std::vector<TreeNode>& nodes) {
    std::vector<TreeNode> out;
    auto visit = [&](auto&& self, int i) -> int {
        const int index = static_cast<int>(out.size());
        out.push_back(nodes[static_cast<std::size_t>(i)]);
        std::vector<int> children;
        for (int c : nodes[static_cast<std::size_t>(i)].children) children.push_back(c < 0 ? -1 : self(self, c));
        out[static_cast<std::size_t>(index)].children = std::move(children);
        return index;
    };
    visit(visit, 0);
    return out;
}

}  // namespace

ClassLabel majority_label(const std::array<double, 2>& w) noexcept {
    return w[1] > w[0] ? ClassLabel::positive : ClassLabel::negative;
}

int default_subspace_size(int n_features, SubspaceRule rule) {
    if (n_features < 1) throw Error("subspace size: need at least one feature");
    const auto n = static_cast<unsigned>(n_features);
    const int floor_log2 = static_cast<int>(std::bit_width(n)) - 1;
    const int ceil_log2 = static_cast<int>(std::bit_width(n - 1));
    const int m = (rule == SubspaceRule::floor_log2_plus_1 ? floor_log2 : ceil_log2) + 1;
    return std::clamp(m, 1, n_features);
}

void TreeConfig::validate() const {
    if (!(min_leaf_weight > 0)) throw Error("tree: min_leaf_weight must be positive");
    if (!(confidence_factor > 0 && confidence_factor < 1)) throw Error("tree: confidence_factor must lie in (0, 1)");
    if (random_subspace_size && *random_subspace_size < 1) throw Error("tree: random subspace size must be >= 1");
}

TreeConfig TreeConfig::random_tree(int subspace_size, std::uint64_t seed) {
    TreeConfig c;
    c.min_leaf_weight = 1.0;
    c.use_pruning = false;
    c.random_subspace_size = subspace_size;
    c.seed = seed;
    return c;
}

DecisionTree::DecisionTree(SchemaPtr schema, std::vector<TreeNode> nodes)
    : schema_(std::move(schema)), nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw Error("decision tree needs at least one node");
}

std::size_t DecisionTree::leaf_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

int DecisionTree::depth() const {
    auto visit = [&](auto&& self, int i) -> int {
        const auto& n = node(i);
        int best = 0;
        for (int c : n.children)
            if (c >= 0) best = std::max(best, 1 + self(self, c));
        return best;
    };
    return visit(visit, 0);
}

int DecisionTree::leaf_for(const Instance& x) const {
    int i = 0;
    while (!nodes_[static_cast<std::size_t>(i)].is_leaf()) {
        const auto& n = nodes_[static_cast<std::size_t>(i)];
        const auto attr = static_cast<std::size_t>(n.attribute);
        int next = -1;
        if ((*schema_)[attr].is_nominal()) {
            const auto cat = x.category(attr);
            if (cat < n.children.size()) next = n.children[cat];
            if (next < 0) {
                double heaviest = -1.0;
                for (int c : n.children)
                    if (c >= 0 && node(c).weight() > heaviest) {
                        heaviest = node(c).weight();
                        next = c;
                    }
            }
        } else {
            next = n.children[x.values[attr] <= n.threshold ? 0 : 1];
        }
        i = next;
    }
    return i;
}

Prediction DecisionTree::predict(const Instance& x) const {
    if (x.values.size() != schema_->size()) throw Error("predict: schema mismatch");
    const auto& leaf = node(leaf_for(x));
    Prediction p;
    p.p_positive = leaf.class_weights[1] / leaf.weight();
    p.label = majority_label(leaf.class_weights);
    return p;
}

void to_json(nlohmann::json& j, const DecisionTree& t) {
    auto nodes = nlohmann::json::array();
    for (const auto& n : t.nodes_) {
        nlohmann::json jn{{"weights", n.class_weights}};
        if (!n.is_leaf()) {
            jn["attribute"] = n.attribute;
            if (!(*t.schema_)[static_cast<std::size_t>(n.attribute)].is_nominal()) jn["threshold"] = n.threshold;
            jn["children"] = n.children;
        }
        nodes.push_back(std::move(jn));
    }
    j = nlohmann::json{{"type", "tree"}, {"nodes", std::move(nodes)}};
}

DecisionTree DecisionTree::from_json(const nlohmann::json& j, SchemaPtr schema) {
    std::vector<TreeNode> nodes;
    for (const auto& jn : j.at("nodes")) {
        TreeNode n;
        n.class_weights = jn.at("weights").get<std::array<double, 2>>();
        if (jn.contains("attribute")) {
            n.attribute = jn.at("attribute").get<int>();
            n.threshold = jn.value("threshold", 0.0);
            n.children = jn.at("children").get<std::vector<int>>();
        }
        nodes.push_back(std::move(n));
    }
    const auto count = static_cast<int>(nodes.size());
    for (int i = 0; i < count; ++i) {
        const auto& n = nodes[static_cast<std::size_t>(i)];
        if (n.is_leaf()) {
            if (!(n.weight() > 0)) throw Error("tree model: leaf " + std::to_string(i) + " has no weight");
            continue;
        }
        if (static_cast<std::size_t>(n.attribute) >= schema->size())
            throw Error("tree model: attribute index out of range at node " + std::to_string(i));
        const auto& spec = (*schema)[static_cast<std::size_t>(n.attribute)];
        const auto expected = spec.is_nominal() ? spec.category_count() : 2;
        if (n.children.size() != expected) throw Error("tree model: wrong child count at node " + std::to_string(i));
        for (int c : n.children)
            if (c != -1 && (c <= i || c >= count)) throw Error("tree model: bad child index at node " + std::to_string(i));
    }
    return DecisionTree(std::move(schema), std::move(nodes));
}

std::optional<double> gain_ratio(const Dataset& d, std::span<const double> weights, std::size_t attribute,
                                 std::optional<double> threshold) {
    if (weights.size() != d.size()) throw Error("gain_ratio: weight count differs from instance count");
    if (attribute >= d.attribute_count()) throw Error("gain_ratio: attribute index out of range");
    std::vector<std::array<double, 2>> branch;
    if (d.schema()[attribute].is_nominal()) {
        branch.assign(d.schema()[attribute].category_count(), std::array<double, 2>{});
    } else {
        if (!threshold) throw Error("gain_ratio: numeric attribute needs a threshold");
        branch.assign(2, std::array<double, 2>{});
    }
    std::array<double, 2> total{};
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!(weights[i] > 0)) continue;
        const auto b = d.schema()[attribute].is_nominal() ? d[i].category(attribute)
                                                         : (d[i].values[attribute] <= *threshold ? 0u : 1u);
        branch[b][class_index(d[i].label)] += weights[i];
        total[class_index(d[i].label)] += weights[i];
    }
    const double W = total[0] + total[1];
    if (!(W > 0)) return std::nullopt;
    std::vector<double> sizes;
    double cond = 0.0;
    for (const auto& b : branch) {
        sizes.push_back(b[0] + b[1]);
        if (sizes.back() > 0) cond += (sizes.back() / W) * entropy2(b);
    }
    const double split_info = entropy(sizes);
    if (split_info <= 0) return std::nullopt;
    double gain = entropy2(total) - cond;
    if (std::abs(gain) < 1e-12) gain = 0.0;
    return gain / split_info;
}

DecisionTree fit_tree(const Dataset& train, const TreeConfig& cfg) {
    std::vector<double> ones(train.size(), 1.0);
    return fit_tree(train, ones, cfg);
}

DecisionTree fit_tree(const Dataset& train, std::span<const double> weights, const TreeConfig& cfg) {
    cfg.validate();
    if (train.empty()) throw Error("fit_tree: empty training set");
    if (weights.size() != train.size()) throw Error("fit_tree: weight count differs from instance count");
    for (double w : weights)
        if (!(w >= 0) || !std::isfinite(w)) throw Error("fit_tree: weights must be finite and non-negative");
    auto nodes = Builder(train, weights, cfg).build();
    if (cfg.use_pruning && !cfg.is_random()) {
        prune_node(nodes, 0, cfg.confidence_factor);
        nodes = compact(nodes);
    }
    return DecisionTree(train.schema_ptr(), std::move(nodes));
}

double pessimistic_extra_errors(double n, double e, double cf) {
    if (!(n > 0)) return 0.0;
    if (e < 1) {
        const double base = n * (1 - std::pow(cf, 1 / n));
        if (e == 0) return base;
        return base + e * (pessimistic_extra_errors(n, 1, cf) - base);
    }
    if (e + 0.5 >= n) return std::max(n - e, 0.0);
    const double z = special::normal_quantile(1 - cf);
    const double f = (e + 0.5) / n;
    const double r = (f + (z * z) / (2 * n) + z * std::sqrt((f / n) - (f * f / n) + (z * z / (4 * n * n)))) /
                     (1 + (z * z) / n);
    return r * n - e;
}

double pessimistic_error(const DecisionTree& t, double cf) {
    double total = 0.0;
    for (const auto& n : t.nodes())
        if (n.is_leaf()) total += leaf_estimate(n, cf);
    return total;
}

std::vector<std::string> export_rules(const DecisionTree& t) {
    const auto& schema = t.schema();
    std::vector<std::string> rules;
    std::vector<std::string> conditions;
    auto visit = [&](auto&& self, int i) -> void {
        const auto& n = t.node(i);
        if (n.is_leaf()) {
            std::string rule = "IF ";
            if (conditions.empty()) rule += "TRUE";
            for (std::size_t c = 0; c < conditions.size(); ++c) rule += (c ? " AND " : "") + conditions[c];
            rule += " THEN " + schema.class_column + " = " + schema.label_name(majority_label(n.class_weights));
            rules.push_back(std::move(rule));
            return;
        }
        const auto& spec = schema[static_cast<std::size_t>(n.attribute)];
        for (std::size_t b = 0; b < n.children.size(); ++b) {
            if (n.children[b] < 0) continue;
            if (spec.is_nominal())
                conditions.push_back(spec.name + " = " + spec.categories[b]);
            else
                conditions.push_back(spec.name + (b == 0 ? " <= " : " > ") + format_number(n.threshold));
            self(self, n.children[b]);
            conditions.pop_back();
        }
    };
    visit(visit, 0);
    return rules;
}

}  // namespace crus
