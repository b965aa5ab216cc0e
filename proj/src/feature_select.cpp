#include "crus/feature_select.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <numeric>
#include <set>

#include "crus/error.hpp"

namespace crus {

namespace {

double entropy_of_counts(const std::map<int, std::size_t>& counts, double n) {
    double h = 0.0;
    for (const auto& [code, c] : counts) {
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

double binary_entropy(double pos, double total) {
    if (total <= 0) return 0.0;
    double h = 0.0;
    for (double c : {pos, total - pos})
        if (c > 0) h -= c / total * std::log2(c / total);
    return h;
}

// Symmetrical uncertainty lookups for one dataset.
class CorrelationTable {
public:
    explicit CorrelationTable(const Dataset& d) {
        const auto cls = class_codes(d);
        const std::size_t m = d.attribute_count();
        codes_.reserve(m);
        for (std::size_t a = 0; a < m; ++a) codes_.push_back(discretize_attribute(d, a));
        cf_.resize(m);
        for (std::size_t a = 0; a < m; ++a) cf_[a] = symmetrical_uncertainty(codes_[a], cls);
        ff_.assign(m, std::vector<double>(m, -1.0));
    }

    double cf(std::size_t a) const { return cf_[a]; }
    double ff(std::size_t a, std::size_t b) {
        if (a > b) std::swap(a, b);
        if (ff_[a][b] < 0) ff_[a][b] = symmetrical_uncertainty(codes_[a], codes_[b]);
        return ff_[a][b];
    }
    void fill_all() {
        for (std::size_t a = 0; a < codes_.size(); ++a)
            for (std::size_t b = a + 1; b < codes_.size(); ++b) ff(a, b);
    }
    // Only valid after fill_all().
    double ff_filled(std::size_t a, std::size_t b) const { return a < b ? ff_[a][b] : ff_[b][a]; }

    double merit(std::span<const std::size_t> subset) const {
        if (subset.empty()) return 0.0;
        const double k = static_cast<double>(subset.size());
        double rcf = 0.0, rff = 0.0;
        for (auto a : subset) rcf += cf_[a];
        rcf /= k;
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < subset.size(); ++i)
            for (std::size_t j = i + 1; j < subset.size(); ++j, ++pairs) rff += ff_filled(subset[i], subset[j]);
        if (pairs > 0) rff /= static_cast<double>(pairs);
        const double den = std::sqrt(k + k * (k - 1) * rff);
        return den > 0 ? k * rcf / den : 0.0;
    }

private:
    std::vector<std::vector<int>> codes_;
    std::vector<double> cf_;
    std::vector<std::vector<double>> ff_;
};

void require_usable(const Dataset& d) {
    if (d.attribute_count() == 0) throw Error("feature selection: dataset has no attributes");
    if (d.size() < 2) throw Error("feature selection: at least two instances are required");
    const auto c = d.class_counts();
    if (c.positive == 0 || c.negative == 0) throw Error("feature selection: both classes must be present");
}

}  // namespace

std::vector<int> class_codes(const Dataset& d) {
    std::vector<int> out;
    out.reserve(d.size());
    for (const auto& x : d) out.push_back(static_cast<int>(class_index(x.label)));
    return out;
}

std::vector<int> discretize_attribute(const Dataset& d, std::size_t attr) {
    if (attr >= d.attribute_count()) throw Error("discretize: attribute index out of range");
    std::vector<int> out(d.size(), 0);
    if (d.schema()[attr].is_nominal()) {
        for (std::size_t i = 0; i < d.size(); ++i) out[i] = static_cast<int>(d[i].category(attr));
        return out;
    }
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return d[a].values[attr] < d[b].values[attr];
    });
    const double n = static_cast<double>(d.size());
    const double total_pos = static_cast<double>(d.class_counts().positive);
    double left_pos = 0.0, best_gain = -1.0;
    std::optional<double> best_threshold;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        left_pos += d[order[i]].is_positive() ? 1.0 : 0.0;
        const double v = d[order[i]].values[attr], next = d[order[i + 1]].values[attr];
        if (v == next) continue;
        const double nl = static_cast<double>(i + 1), nr = n - nl;
        const double cond = nl / n * binary_entropy(left_pos, nl) + nr / n * binary_entropy(total_pos - left_pos, nr);
        const double gain = binary_entropy(total_pos, n) - cond;
        if (gain > best_gain + 1e-12) {
            best_gain = gain;
            best_threshold = v + (next - v) / 2;
        }
    }
    if (!best_threshold) return out;
    for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i].values[attr] <= *best_threshold ? 0 : 1;
    return out;
}

double entropy(std::span<const int> x) {
    if (x.empty()) return 0.0;
    std::map<int, std::size_t> counts;
    for (int v : x) ++counts[v];
    return entropy_of_counts(counts, static_cast<double>(x.size()));
}

double mutual_information(std::span<const int> x, std::span<const int> y) {
    if (x.size() != y.size()) throw Error("mutual information: vectors differ in length");
    if (x.empty()) return 0.0;
    std::map<std::pair<int, int>, std::size_t> joint;
    for (std::size_t i = 0; i < x.size(); ++i) ++joint[{x[i], y[i]}];
    const double n = static_cast<double>(x.size());
    double hxy = 0.0;
    for (const auto& [key, c] : joint) {
        const double p = static_cast<double>(c) / n;
        hxy -= p * std::log2(p);
    }
    return std::max(0.0, entropy(x) + entropy(y) - hxy);
}

double symmetrical_uncertainty(std::span<const int> x, std::span<const int> y) {
    const double hx = entropy(x), hy = entropy(y);
    if (hx + hy <= 0) return 0.0;
    return std::clamp(2.0 * mutual_information(x, y) / (hx + hy), 0.0, 1.0);
}

std::vector<RankedAttribute> gain_ratio_rank(const Dataset& d) {
    require_usable(d);
    const auto cls = class_codes(d);
    std::vector<RankedAttribute> out;
    for (std::size_t a = 0; a < d.attribute_count(); ++a) {
        const auto codes = discretize_attribute(d, a);
        const double split_info = entropy(codes);
        const double value = split_info > 0 ? mutual_information(codes, cls) / split_info : 0.0;
        out.push_back({d.schema()[a].name, a, value < 1e-12 ? 0.0 : value});
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.value > b.value; });
    return out;
}

double cfs_merit(std::span<const std::size_t> subset, const Dataset& d) {
    if (subset.empty()) throw Error("cfs_merit: empty subset");
    for (auto a : subset)
        if (a >= d.attribute_count()) throw Error("cfs_merit: attribute index out of range");
    CorrelationTable t(d);
    for (std::size_t i = 0; i < subset.size(); ++i)
        for (std::size_t j = i + 1; j < subset.size(); ++j) t.ff(subset[i], subset[j]);
    // ff_filled reads only the pairs computed above.
    return t.merit(subset);
}

CfsResult cfs_best_first(const Dataset& d, int max_stale, Exec exec) {
    require_usable(d);
    if (max_stale < 1) throw Error("cfs_best_first: max_stale must be at least 1");
    CorrelationTable table(d);
    table.fill_all();
    const std::size_t m = d.attribute_count();

    struct Node {
        std::vector<std::size_t> subset;
        double merit;
        std::size_t seq;
    };
    std::vector<Node> open{{{}, 0.0, 0}};
    std::set<std::vector<std::size_t>> visited{{}};
    std::size_t seq = 1;
    Node best{{}, -1.0, 0};
    CfsResult result;
    int stale = 0;

    while (!open.empty() && stale < max_stale) {
        auto it = std::max_element(open.begin(), open.end(), [](const Node& a, const Node& b) {
            return a.merit < b.merit || (a.merit == b.merit && a.seq > b.seq);
        });
        Node node = std::move(*it);
        open.erase(it);

        std::vector<std::vector<std::size_t>> children;
        for (std::size_t a = 0; a < m; ++a) {
            if (std::binary_search(node.subset.begin(), node.subset.end(), a)) continue;
            auto child = node.subset;
            child.insert(std::upper_bound(child.begin(), child.end(), a), a);
            if (visited.insert(child).second) children.push_back(std::move(child));
        }
        std::vector<double> merits(children.size());
        parallel_for(children.size(), exec, [&](std::size_t i) { merits[i] = table.merit(children[i]); });
        result.evaluated += children.size();

        bool improved = false;
        for (std::size_t i = 0; i < children.size(); ++i) {
            if (merits[i] > best.merit + 1e-12) {
                best = Node{children[i], merits[i], seq};
                improved = true;
            }
            open.push_back({std::move(children[i]), merits[i], seq++});
        }
        stale = improved ? 0 : stale + 1;
    }

    result.subset = best.subset;
    result.merit = std::max(0.0, best.merit);
    for (auto a : result.subset) result.names.push_back(d.schema()[a].name);
    return result;
}

}  // namespace crus
