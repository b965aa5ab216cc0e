#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace crus {

/// Rows are blocks (folds or datasets), columns are treatments.
struct ScoreMatrix {
    std::string metric;
    bool higher_is_better = true;
    std::vector<std::string> treatments;
    std::vector<std::vector<double>> rows;

    std::size_t block_count() const noexcept { return rows.size(); }
    std::size_t treatment_count() const noexcept { return treatments.size(); }
    std::vector<double> column(std::size_t j) const;
    /// Throws unless rectangular with >= 2 treatments and >= 2 blocks.
    void validate() const;
};

/// Average ranks (1 = first in order); ties share the mean of their ranks.
std::vector<double> average_ranks(std::span<const double> values, bool descending);

struct FriedmanResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    std::vector<double> average_ranks;  // 1 = best
};

FriedmanResult friedman_test(const ScoreMatrix& m);

struct WilcoxonResult {
    std::size_t n = 0;  // non-zero differences
    double w_plus = 0.0;
    double w_minus = 0.0;
    double p_value = 1.0;
    bool exact = false;
};

/// Two-sided signed-rank test on paired samples. Zero differences are
/// dropped; exact null distribution for n <= 20, normal approximation with
/// tie and continuity correction above.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);
/// Exact two-sided p for the given non-zero differences (ties allowed).
double wilcoxon_exact_p(std::span<const double> differences);
double wilcoxon_normal_p(std::span<const double> differences);

/// Holm step-down adjustment, returned in input order.
std::vector<double> holm_adjust(std::span<const double> p_values);

struct ComparisonReport {
    std::string metric;
    std::vector<std::string> treatments;
    FriedmanResult friedman;
    double alpha = 0.05;
    /// Symmetric treatment x treatment matrices, 1 on the diagonal.
    std::vector<std::vector<double>> p_raw;
    std::vector<std::vector<double>> p_holm;
    /// Groups of treatments with no significant difference, each sorted by
    /// average rank. Treatments in no bar appear as singletons.
    std::vector<std::vector<std::size_t>> cliques;
};

/// Friedman test plus pairwise Wilcoxon tests with Holm correction.
ComparisonReport compare_treatments(const ScoreMatrix& m, double alpha = 0.05);

struct CdDiagram {
    struct Entry {
        std::string label;
        double rank = 0.0;
    };
    std::vector<Entry> entries;  // sorted by average rank
    /// Bars as inclusive (first, last) positions in `entries`.
    std::vector<std::pair<std::size_t, std::size_t>> bars;
    std::size_t treatment_count = 0;
};

/// Bars link maximal runs of rank-adjacent treatments with no pairwise
/// Holm-adjusted p below alpha; runs inside an earlier bar are dropped.
CdDiagram cd_diagram(const ComparisonReport& report, double alpha);
std::string cd_diagram_svg(const CdDiagram& d, const std::string& title);
std::string cd_diagram_text(const CdDiagram& d);

/// 100 * (best - v) / best for each value; for lower-is-better metrics the
/// loss is 100 * (v - best) / best.
std::vector<double> loss_vs_best(std::span<const double> values, bool higher_is_better = true);
double average_combined_loss(double loss_a, double loss_b);

}  // namespace crus
