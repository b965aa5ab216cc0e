#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crus/dataset.hpp"

namespace crus {

struct ConfusionMatrix {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }
    std::size_t positives() const noexcept { return tp + fn; }
    std::size_t negatives() const noexcept { return tn + fp; }

    ConfusionMatrix& operator+=(const ConfusionMatrix& o) noexcept {
        tp += o.tp, fp += o.fp, tn += o.tn, fn += o.fn;
        return *this;
    }
    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion_matrix(std::span<const ClassLabel> truth, std::span<const ClassLabel> predicted);

/// Bits set in BinaryRates::degenerate when a rate had a zero denominator
/// (the rate is then reported as 0).
enum Degeneracy : std::uint32_t {
    degenerate_precision = 1u << 0,
    degenerate_recall = 1u << 1,  // also TPR
    degenerate_f = 1u << 2,
    degenerate_fpr = 1u << 3,
    degenerate_tnr = 1u << 4,
    degenerate_neg_precision = 1u << 5,
    degenerate_neg_f = 1u << 6,
    degenerate_op = 1u << 7,
};

struct BinaryRates {
    double precision = 0, recall = 0, f_measure = 0, tpr = 0, fpr = 0, tnr = 0, accuracy = 0;
    std::uint32_t degenerate = 0;
};

/// Throws when the matrix is empty.
BinaryRates binary_rates(const ConfusionMatrix& cm, double beta = 1.0);

double g_mean(const ConfusionMatrix& cm);
/// accuracy - |TNR - TPR| / (TNR + TPR); accuracy - 1 when both rates are 0.
double optimized_precision(const ConfusionMatrix& cm);

struct RocCurve {
    double auc = 0.0;
    std::vector<std::pair<double, double>> points;  // (fpr, tpr), from (0,0) to (1,1)
};

/// Mann-Whitney AUC plus the threshold-sweep curve. Throws on single-class truth.
RocCurve auc_roc(std::span<const ClassLabel> truth, std::span<const double> scores);
/// Area under a piecewise-linear curve.
double trapezoid_area(std::span<const std::pair<double, double>> points);

double weighted_class_average(double value_pos, double value_neg, std::size_t n_pos, std::size_t n_neg);

struct MetricsReport {
    ConfusionMatrix cm;
    double accuracy = 0, precision_pos = 0, recall_pos = 0, f_measure_pos = 0;
    double tpr = 0, fpr = 0, tnr = 0, g_mean = 0, op = 0;
    /// NaN when the records hold a single class.
    double auc = 0;
    double weighted_precision = 0, weighted_recall = 0, weighted_f = 0;
    std::uint32_t degenerate = 0;
};

/// Every metric from raw per-instance records.
MetricsReport compute_metrics(std::span<const ClassLabel> truth, std::span<const ClassLabel> predicted,
                              std::span<const double> scores, double beta = 1.0);

/// Column order of a metrics CSV row (Table order first, then the extras).
const std::vector<std::string>& metrics_columns();
std::vector<double> metrics_values(const MetricsReport& r);
/// Mean of each column over the reports; the confusion counts are summed.
MetricsReport mean_report(std::span<const MetricsReport> reports);
/// Column-wise weighted mean; the confusion counts are summed.
MetricsReport weighted_mean_report(std::span<const MetricsReport> reports, std::span<const double> weights);

/// Shortest round-trip text for a double ("nan" for NaN).
std::string format_number(double v);

}  // namespace crus
