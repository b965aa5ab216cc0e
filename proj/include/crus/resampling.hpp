#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "crus/cluster.hpp"
#include "crus/dataset.hpp"

namespace crus {

struct RusConfig {
    /// Maximum majority:minority ratio kept after undersampling.
    double distribution_spread = 4.0;
    std::uint64_t seed = 0;
};

struct SmoteConfig {
    /// 100 adds one synthetic instance per minority instance.
    int percentage = 100;
    int k_neighbors = 5;
    std::uint64_t seed = 0;
};

/// Keeps every minority instance and, when the majority:minority ratio exceeds
/// the spread, a uniformly random floor(spread * |minority|) majority subset.
/// Surviving instances keep their original relative order.
Dataset rus_undersample(const Dataset& d, const RusConfig& cfg);

/// Appends floor(percentage/100 * |minority|) synthetic minority instances,
/// each interpolated between a base and one of its k nearest minority
/// neighbours (one delta per synthetic). Nominal values are copied from the base.
Dataset smote_oversample(const Dataset& d, const SmoteConfig& cfg);

enum class IrGroup { low, high };

/// Which side of the threshold gets undersampled. `exceed` undersamples the
/// clusters whose IR is above the threshold; `invert` undersamples the others.
enum class UndersamplePolicy { exceed, invert };

struct ClusterInfo {
    std::vector<std::size_t> members;  // indices into the training set
    std::size_t positives = 0;
    std::size_t negatives = 0;
    double imbalance_ratio = 0.0;  // +inf when the cluster has no minority instance
    IrGroup group = IrGroup::low;
    bool undersample = false;
};

struct ClusterPartition {
    ClusterModel cluster_model;
    std::vector<ClusterInfo> clusters;
    double threshold = 0.0;
    UndersamplePolicy policy = UndersamplePolicy::exceed;
    std::vector<std::string> warnings;

    IrGroup group_of_cluster(std::size_t c) const { return clusters.at(c).group; }
    IrGroup route(const Instance& x) const { return group_of_cluster(assign_cluster(x, cluster_model)); }
};

/// Fits k-means on the training set (class excluded), measures each cluster's
/// imbalance ratio and splits clusters into low/high IR groups at the
/// threshold. Throws when no cluster falls at or below the threshold, since
/// the cluster count should then be increased.
ClusterPartition plan_cluster_partition(const Dataset& train, int k, double threshold, std::uint64_t seed,
                                        UndersamplePolicy policy = UndersamplePolicy::exceed);

/// Starting at k = 2, increases k until at least one cluster's IR is at or
/// below the threshold. Throws once k_max is exceeded.
ClusterPartition select_cluster_partition(const Dataset& train, double threshold, std::uint64_t seed, int k_max = 10,
                                          UndersamplePolicy policy = UndersamplePolicy::exceed);

/// global_ir * (1 - reduction_fraction).
double suggest_threshold(double global_ir, double reduction_fraction);

struct GroupedTraining {
    Dataset low;
    Dataset high;
    std::vector<std::string> warnings;
};

/// Splits the training set by IR group, preserving training order within each
/// group, and applies RUS to the union of the clusters flagged for undersampling.
GroupedTraining apply_clustering_rus(const Dataset& train, const ClusterPartition& part, const RusConfig& cfg);

}  // namespace crus
