#include "crus/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crus/error.hpp"
#include "crus/log.hpp"
#include "crus/random.hpp"

namespace crus {

Dataset rus_undersample(const Dataset& d, const RusConfig& cfg) {
    if (!(cfg.distribution_spread > 0)) throw Error("RUS: distribution spread must be positive");
    std::vector<std::size_t> majority;
    std::size_t minority = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i].is_positive())
            ++minority;
        else
            majority.push_back(i);
    }
    if (minority == 0) throw Error("RUS: no minority instances");
    const double ratio = static_cast<double>(majority.size()) / static_cast<double>(minority);
    if (ratio <= cfg.distribution_spread) return d;

    const auto keep = static_cast<std::size_t>(std::floor(cfg.distribution_spread * static_cast<double>(minority)));
    Rng rng(derive_seed(cfg.seed, {0x2a5}));
    std::shuffle(majority.begin(), majority.end(), rng);
    std::vector<bool> kept(d.size(), false);
    for (std::size_t j = 0; j < keep; ++j) kept[majority[j]] = true;

    std::vector<Instance> out;
    out.reserve(minority + keep);
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i].is_positive() || kept[i]) out.push_back(d[i]);
    return d.with_instances(std::move(out));
}

Dataset smote_oversample(const Dataset& d, const SmoteConfig& cfg) {
    if (cfg.percentage < 0) throw Error("SMOTE: percentage must be non-negative");
    if (cfg.k_neighbors < 1) throw Error("SMOTE: k_neighbors must be at least 1");
    std::vector<std::size_t> minority;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i].is_positive()) minority.push_back(i);
    const std::size_t m = minority.size();
    const auto k = static_cast<std::size_t>(cfg.k_neighbors);
    if (m <= k)
        throw Error("SMOTE: " + std::to_string(m) + " minority instances is too few for k_neighbors=" +
                    std::to_string(k));

    const auto scaler = FeatureScaler::fit(d);
    const std::size_t dims = d.attribute_count();
    std::vector<double> points(m * dims);
    for (std::size_t i = 0; i < m; ++i)
        scaler.transform_into(d[minority[i]], std::span(points).subspan(i * dims, dims));

    // k nearest minority neighbours of every minority instance, ties by index.
    std::vector<std::vector<std::size_t>> neighbours(m);
    {
        std::vector<std::pair<double, std::size_t>> cand;
        for (std::size_t i = 0; i < m; ++i) {
            cand.clear();
            auto pi = std::span<const double>(points).subspan(i * dims, dims);
            for (std::size_t j = 0; j < m; ++j) {
                if (j == i) continue;
                cand.emplace_back(
                    normalized_distance_sq(pi, std::span<const double>(points).subspan(j * dims, dims), scaler.kinds()),
                    j);
            }
            std::partial_sort(cand.begin(), cand.begin() + static_cast<long>(k), cand.end());
            for (std::size_t t = 0; t < k; ++t) neighbours[i].push_back(cand[t].second);
        }
    }

    const auto count = static_cast<std::size_t>(std::floor(cfg.percentage / 100.0 * static_cast<double>(m)));
    std::vector<std::size_t> bases;
    bases.reserve(count);
    for (std::size_t r = 0; r < count / m; ++r)
        for (std::size_t i = 0; i < m; ++i) bases.push_back(i);
    Rng rng(derive_seed(cfg.seed, {0x5307e}));
    if (const auto rem = count % m; rem > 0) {
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        std::sort(order.begin(), order.begin() + static_cast<long>(rem));
        bases.insert(bases.end(), order.begin(), order.begin() + static_cast<long>(rem));
    }

    const auto& schema = d.schema();
    std::vector<Instance> out(d.begin(), d.end());
    out.reserve(d.size() + count);
    for (auto b : bases) {
        const Instance& base = d[minority[b]];
        const Instance& nb = d[minority[neighbours[b][uniform_index(rng, k)]]];
        const double delta = uniform_unit(rng);
        Instance s = base;
        for (std::size_t a = 0; a < dims; ++a)
            if (!schema[a].is_nominal()) s.values[a] = base.values[a] + delta * (nb.values[a] - base.values[a]);
        s.synthetic = true;
        out.push_back(std::move(s));
    }
    return d.with_instances(std::move(out));
}

namespace {

ClusterPartition build_partition(const Dataset& train, ClusterModel model, double threshold,
                                 UndersamplePolicy policy) {
    ClusterPartition part;
    part.threshold = threshold;
    part.policy = policy;
    part.clusters.resize(static_cast<std::size_t>(model.k));
    const auto labels = assign_all(train, model);
    for (std::size_t i = 0; i < train.size(); ++i) {
        auto& c = part.clusters[labels[i]];
        c.members.push_back(i);
        (train[i].is_positive() ? c.positives : c.negatives)++;
    }
    for (std::size_t ci = 0; ci < part.clusters.size(); ++ci) {
        auto& c = part.clusters[ci];
        if (c.positives == 0) {
            c.imbalance_ratio = std::numeric_limits<double>::infinity();
            part.warnings.push_back("cluster " + std::to_string(ci) + " has no minority instances (IR = inf)");
        } else {
            c.imbalance_ratio = static_cast<double>(c.negatives) / static_cast<double>(c.positives);
        }
        c.group = c.imbalance_ratio > threshold ? IrGroup::high : IrGroup::low;
        c.undersample = policy == UndersamplePolicy::exceed ? c.group == IrGroup::high : c.group == IrGroup::low;
    }
    part.cluster_model = std::move(model);
    return part;
}

bool has_low_cluster(const ClusterPartition& p) {
    return std::any_of(p.clusters.begin(), p.clusters.end(),
                       [](const ClusterInfo& c) { return c.group == IrGroup::low; });
}

}  // namespace

ClusterPartition plan_cluster_partition(const Dataset& train, int k, double threshold, std::uint64_t seed,
                                        UndersamplePolicy policy) {
    if (k < 2) throw Error("clustering-RUS: cluster count must be at least 2");
    if (!(threshold > 0)) throw Error("clustering-RUS: threshold must be positive");
    auto part = build_partition(train, kmeans_fit(train, k, seed), threshold, policy);
    if (!has_low_cluster(part))
        throw Error("clustering-RUS: every cluster's imbalance ratio exceeds the threshold " +
                    std::to_string(threshold) + " with k=" + std::to_string(k) + "; increase k");
    for (const auto& w : part.warnings) log::warn(w);
    return part;
}

ClusterPartition select_cluster_partition(const Dataset& train, double threshold, std::uint64_t seed, int k_max,
                                          UndersamplePolicy policy) {
    if (!(threshold > 0)) throw Error("clustering-RUS: threshold must be positive");
    for (int k = 2; k <= k_max && static_cast<std::size_t>(k) <= train.size(); ++k) {
        auto part = build_partition(train, kmeans_fit(train, k, seed), threshold, policy);
        if (has_low_cluster(part)) {
            for (const auto& w : part.warnings) log::warn(w);
            return part;
        }
    }
    throw Error("clustering-RUS: no k in [2, " + std::to_string(k_max) +
                "] yields a cluster with imbalance ratio at or below " + std::to_string(threshold));
}

double suggest_threshold(double global_ir, double reduction_fraction) {
    if (!(global_ir > 0)) throw Error("suggest_threshold: global IR must be positive");
    if (reduction_fraction < 0 || reduction_fraction > 1)
        throw Error("suggest_threshold: reduction fraction must lie in [0, 1]");
    return global_ir * (1.0 - reduction_fraction);
}

GroupedTraining apply_clustering_rus(const Dataset& train, const ClusterPartition& part, const RusConfig& cfg) {
    std::vector<int> cluster_of(train.size(), -1);
    for (std::size_t c = 0; c < part.clusters.size(); ++c)
        for (auto i : part.clusters[c].members) {
            if (i >= train.size() || cluster_of[i] != -1)
                throw Error("clustering-RUS: partition does not match the training set");
            cluster_of[i] = static_cast<int>(c);
        }
    if (std::find(cluster_of.begin(), cluster_of.end(), -1) != cluster_of.end())
        throw Error("clustering-RUS: partition does not cover the training set");

    std::vector<Instance> low, high;
    for (std::size_t i = 0; i < train.size(); ++i)
        (part.clusters[cluster_of[i]].group == IrGroup::high ? high : low).push_back(train[i]);

    GroupedTraining out{train.with_instances(std::move(low)), train.with_instances(std::move(high)), {}};
    auto undersample_group = [&](Dataset& group, IrGroup which, const char* name) {
        bool flagged = std::any_of(part.clusters.begin(), part.clusters.end(),
                                   [&](const ClusterInfo& c) { return c.group == which && c.undersample; });
        if (!flagged || group.empty()) return;
        if (group.class_counts().positive == 0) {
            out.warnings.push_back(std::string(name) + " group has no minority instances; left as is");
            return;
        }
        group = rus_undersample(group, cfg);
    };
    undersample_group(out.low, IrGroup::low, "low-IR");
    undersample_group(out.high, IrGroup::high, "high-IR");
    return out;
}

}  // namespace crus
