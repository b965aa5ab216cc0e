#include "crus/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "crus/error.hpp"

namespace crus {

namespace {

double ratio(std::size_t num, std::size_t den, std::uint32_t flag, std::uint32_t& degenerate) {
    if (den == 0) {
        degenerate |= flag;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

double f_beta(double p, double r, double beta, std::uint32_t flag, std::uint32_t& degenerate) {
    const double b2 = beta * beta;
    const double den = b2 * p + r;
    if (den == 0) {
        degenerate |= flag;
        return 0.0;
    }
    return (1 + b2) * p * r / den;
}

}  // namespace

ConfusionMatrix confusion_matrix(std::span<const ClassLabel> truth, std::span<const ClassLabel> predicted) {
    if (truth.size() != predicted.size()) throw Error("confusion_matrix: truth and predictions differ in length");
    if (truth.empty()) throw Error("confusion_matrix: no records");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool t = truth[i] == ClassLabel::positive, p = predicted[i] == ClassLabel::positive;
        if (t && p) ++cm.tp;
        else if (t) ++cm.fn;
        else if (p) ++cm.fp;
        else ++cm.tn;
    }
    return cm;
}

BinaryRates binary_rates(const ConfusionMatrix& cm, double beta) {
    if (cm.total() == 0) throw Error("binary_rates: empty confusion matrix");
    if (!(beta > 0)) throw Error("binary_rates: beta must be positive");
    BinaryRates r;
    r.precision = ratio(cm.tp, cm.tp + cm.fp, degenerate_precision, r.degenerate);
    r.recall = r.tpr = ratio(cm.tp, cm.tp + cm.fn, degenerate_recall, r.degenerate);
    r.f_measure = f_beta(r.precision, r.recall, beta, degenerate_f, r.degenerate);
    r.fpr = ratio(cm.fp, cm.fp + cm.tn, degenerate_fpr, r.degenerate);
    r.tnr = ratio(cm.tn, cm.tn + cm.fp, degenerate_tnr, r.degenerate);
    r.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    return r;
}

double g_mean(const ConfusionMatrix& cm) {
    const auto r = binary_rates(cm);
    return std::sqrt(r.tpr * r.tnr);
}

double optimized_precision(const ConfusionMatrix& cm) {
    const auto r = binary_rates(cm);
    const double sum = r.tnr + r.tpr;
    if (sum == 0) return r.accuracy - 1.0;
    return r.accuracy - std::abs(r.tnr - r.tpr) / sum;
}

RocCurve auc_roc(std::span<const ClassLabel> truth, std::span<const double> scores) {
    if (truth.size() != scores.size()) throw Error("auc_roc: truth and scores differ in length");
    std::vector<std::size_t> order(truth.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::size_t n_pos = 0;
    for (auto t : truth) n_pos += t == ClassLabel::positive;
    const std::size_t n_neg = truth.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw Error("auc_roc: truth must contain both classes");

    RocCurve out;
    out.points.emplace_back(0.0, 0.0);
    // Pairs (pos, neg) with pos scored higher count 1, ties 1/2.
    double wins = 0.0;
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i, pos = 0, neg = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            if (truth[order[j]] == ClassLabel::positive) ++pos;
            else ++neg;
            ++j;
        }
        wins += static_cast<double>(pos) * static_cast<double>(n_neg - fp - neg) +
                0.5 * static_cast<double>(pos) * static_cast<double>(neg);
        tp += pos;
        fp += neg;
        out.points.emplace_back(static_cast<double>(fp) / static_cast<double>(n_neg),
                                static_cast<double>(tp) / static_cast<double>(n_pos));
        i = j;
    }
    out.auc = wins / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
    return out;
}

double trapezoid_area(std::span<const std::pair<double, double>> points) {
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        area += (points[i].first - points[i - 1].first) * (points[i].second + points[i - 1].second) / 2.0;
    return area;
}

double weighted_class_average(double value_pos, double value_neg, std::size_t n_pos, std::size_t n_neg) {
    if (n_pos + n_neg == 0) throw Error("weighted_class_average: no instances");
    return (static_cast<double>(n_pos) * value_pos + static_cast<double>(n_neg) * value_neg) /
           static_cast<double>(n_pos + n_neg);
}

MetricsReport compute_metrics(std::span<const ClassLabel> truth, std::span<const ClassLabel> predicted,
                              std::span<const double> scores, double beta) {
    MetricsReport m;
    m.cm = confusion_matrix(truth, predicted);
    const auto& cm = m.cm;
    const auto r = binary_rates(cm, beta);
    m.degenerate = r.degenerate;
    m.accuracy = r.accuracy;
    m.precision_pos = r.precision;
    m.recall_pos = r.recall;
    m.f_measure_pos = r.f_measure;
    m.tpr = r.tpr;
    m.fpr = r.fpr;
    m.tnr = r.tnr;
    m.g_mean = std::sqrt(r.tpr * r.tnr);
    if (r.tnr + r.tpr == 0) {
        m.op = r.accuracy - 1.0;
        m.degenerate |= degenerate_op;
    } else {
        m.op = r.accuracy - std::abs(r.tnr - r.tpr) / (r.tnr + r.tpr);
    }

    const double neg_precision = ratio(cm.tn, cm.tn + cm.fn, degenerate_neg_precision, m.degenerate);
    const double neg_f = f_beta(neg_precision, r.tnr, beta, degenerate_neg_f, m.degenerate);
    const auto np = cm.positives(), nn = cm.negatives();
    m.weighted_precision = weighted_class_average(r.precision, neg_precision, np, nn);
    m.weighted_recall = weighted_class_average(r.recall, r.tnr, np, nn);
    m.weighted_f = weighted_class_average(r.f_measure, neg_f, np, nn);

    if (scores.size() != truth.size()) throw Error("compute_metrics: scores and truth differ in length");
    m.auc = (np > 0 && nn > 0) ? auc_roc(truth, scores).auc : std::numeric_limits<double>::quiet_NaN();
    return m;
}

const std::vector<std::string>& metrics_columns() {
    static const std::vector<std::string> cols{
        "accuracy", "op",  "g_mean", "weighted_precision", "weighted_recall", "weighted_f", "auc",
        "precision_pos", "recall_pos", "f_measure_pos", "tpr", "fpr", "tnr", "tp", "fp", "tn", "fn"};
    return cols;
}

std::vector<double> metrics_values(const MetricsReport& r) {
    return {r.accuracy,      r.op,         r.g_mean,        r.weighted_precision, r.weighted_recall, r.weighted_f,
            r.auc,           r.precision_pos, r.recall_pos, r.f_measure_pos,      r.tpr,             r.fpr,
            r.tnr,           static_cast<double>(r.cm.tp), static_cast<double>(r.cm.fp),
            static_cast<double>(r.cm.tn), static_cast<double>(r.cm.fn)};
}

MetricsReport weighted_mean_report(std::span<const MetricsReport> reports, std::span<const double> weights) {
    if (reports.empty()) throw Error("mean of zero metric reports");
    if (weights.size() != reports.size()) throw Error("weighted mean: one weight per report required");
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0)) throw Error("weighted mean: weights sum to zero");
    if (reports.size() == 1) return reports[0];
    MetricsReport m;
    double* const fields[] = {&m.accuracy, &m.op,  &m.g_mean, &m.weighted_precision, &m.weighted_recall,
                              &m.weighted_f, &m.auc, &m.precision_pos, &m.recall_pos, &m.f_measure_pos,
                              &m.tpr,      &m.fpr, &m.tnr};
    // Reports without an AUC (single-class fold) are left out of the AUC mean.
    double auc_weight = 0.0;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto v = metrics_values(reports[i]);
        for (std::size_t c = 0; c < std::size(fields); ++c) {
            if (c == 6) {
                if (std::isnan(v[c])) continue;
                auc_weight += weights[i];
            }
            *fields[c] += weights[i] * v[c];
        }
        m.cm += reports[i].cm;
        m.degenerate |= reports[i].degenerate;
    }
    for (std::size_t c = 0; c < std::size(fields); ++c) {
        if (c == 6) {
            m.auc = auc_weight > 0 ? m.auc / auc_weight : std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        *fields[c] /= total;
    }
    return m;
}

MetricsReport mean_report(std::span<const MetricsReport> reports) {
    std::vector<double> ones(reports.size(), 1.0);
    return weighted_mean_report(reports, ones);
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

}  // namespace crus
