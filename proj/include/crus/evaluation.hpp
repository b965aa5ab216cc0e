#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crus/dataset.hpp"
#include "crus/ensemble.hpp"
#include "crus/metrics.hpp"
#include "crus/parallel.hpp"
#include "crus/resampling.hpp"

namespace crus {

enum class SamplerKind { none, rus, smote, clustering_rus };

std::string to_string(SamplerKind k);
SamplerKind parse_sampler_kind(const std::string& s);

struct SamplerSpec {
    SamplerKind kind = SamplerKind::none;
    /// Optional label used in reports; display_name() otherwise.
    std::string name;
    double distribution_spread = 4.0;  // rus, clustering_rus
    int smote_percentage = 100;
    int smote_k = 5;
    /// clustering_rus: cluster count, 0 = smallest k >= 2 with a cluster at or below the threshold.
    int cluster_k = 2;
    /// clustering_rus: fixed IR threshold, or global IR * (1 - reduction_fraction).
    std::optional<double> threshold;
    std::optional<double> reduction_fraction;
    UndersamplePolicy policy = UndersamplePolicy::exceed;

    std::string display_name() const;
    void validate() const;
};

void to_json(nlohmann::json& j, const SamplerSpec& s);
void from_json(const nlohmann::json& j, SamplerSpec& s);

struct ExperimentSpec {
    SamplerSpec sampler;
    ClassifierSpec classifier;
    int k_folds = 10;
    std::uint64_t seed = 0;
};

/// Seeds used by fold `fold` of an experiment with master seed `seed`.
struct FoldSeeds {
    std::uint64_t split;       // shared by all folds
    std::uint64_t sampler;
    std::uint64_t classifier;  // also the low-IR group classifier
    std::uint64_t cluster;
    std::uint64_t high_group;
};
FoldSeeds fold_seeds(std::uint64_t seed, int fold);

enum class PartitionTag { none = -1, low_ir = 0, high_ir = 1 };
std::string to_string(PartitionTag t);

struct InstanceRecord {
    std::size_t index = 0;  // position in the evaluated dataset
    ClassLabel truth = ClassLabel::negative;
    ClassLabel predicted = ClassLabel::negative;
    double score = 0.0;  // p(positive)
    bool synthetic = false;
    PartitionTag partition = PartitionTag::none;
};

struct GroupResult {
    PartitionTag partition = PartitionTag::low_ir;
    std::size_t train_count = 0;
    std::size_t test_count = 0;
    /// Unset when the group had no test instances.
    std::optional<MetricsReport> metrics;
};

struct FoldResult {
    int fold = 0;
    MetricsReport metrics;
    std::vector<InstanceRecord> records;
    std::size_t test_count = 0;
    /// Size of the (resampled) training material.
    std::size_t train_count = 0;
    std::size_t synthetic_train_count = 0;
    /// Sorted dataset rows that contributed to the training material.
    std::vector<std::size_t> train_origins;
    std::vector<GroupResult> groups;  // clustering_rus only
    std::vector<std::string> warnings;
};

struct CvResult {
    std::vector<FoldResult> folds;
    /// Metrics over the per-instance records of all folds.
    MetricsReport pooled;
    /// Mean of the per-fold metrics.
    MetricsReport fold_mean;
    /// clustering_rus: group metrics over pooled records, averaged with
    /// test-instance-count weights.
    std::optional<MetricsReport> group_weighted;
    std::vector<GroupResult> groups;

    /// group_weighted when present, pooled otherwise.
    const MetricsReport& primary() const { return group_weighted ? *group_weighted : pooled; }
};

/// Stratified k-fold CV. Only the training portion of each fold is resampled.
/// Dispatches to run_cv_clustered for the clustering_rus sampler.
CvResult run_cv(const Dataset& d, const ExperimentSpec& spec, Exec exec = Exec::parallel);

/// Per fold: clusters the training portion, undersamples the flagged clusters,
/// fits one classifier per IR group and routes each test instance to the
/// classifier of its nearest centroid's group.
CvResult run_cv_clustered(const Dataset& d, const ExperimentSpec& spec, Exec exec = Exec::parallel);

/// Training material for one fold under a non-clustering sampler.
Dataset resample_training(const Dataset& train, const SamplerSpec& sampler, std::uint64_t seed);

struct BlobSpec {
    std::size_t size = 0;
    double imbalance_ratio = 1.0;
};

struct SyntheticConfig {
    std::vector<BlobSpec> blobs;
    int numeric_dims = 2;
    int nominal_dims = 0;
    int nominal_categories = 3;
    /// Standard deviation of the Gaussian noise around each class mean.
    double noise = 1.0;
    /// Distance between consecutive blob centres along the first axis.
    double separation = 10.0;
    /// Distance between a blob's negative and positive class means.
    double class_shift = 2.0;
    /// Probability that a nominal value is the class's favoured category.
    double nominal_bias = 0.5;
    std::uint64_t seed = 0;

    void validate() const;
};

void to_json(nlohmann::json& j, const SyntheticConfig& c);
void from_json(const nlohmann::json& j, SyntheticConfig& c);

/// Gaussian blobs; blob b holds round(size / (1 + IR)) positives (at least
/// one). Instances carry their blob index in `tag`.
Dataset gen_synthetic(const SyntheticConfig& cfg);

}  // namespace crus
