#include "crus/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "crus/error.hpp"
#include "crus/special_functions.hpp"

namespace crus {

namespace {

std::vector<double> nonzero_differences(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error("wilcoxon: samples differ in length");
    if (a.empty()) throw Error("wilcoxon: empty samples");
    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] - b[i] != 0.0) d.push_back(a[i] - b[i]);
    return d;
}

struct SignedRanks {
    std::vector<double> ranks;  // of |d|, ascending
    double w_plus = 0.0;
    double tie_term = 0.0;  // sum of t^3 - t over tie groups
};

SignedRanks signed_ranks(std::span<const double> d) {
    std::vector<double> mag(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) mag[i] = std::abs(d[i]);
    SignedRanks s;
    s.ranks = average_ranks(mag, false);
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i] > 0) s.w_plus += s.ranks[i];
    std::vector<double> sorted = mag;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        s.tie_term += t * t * t - t;
        i = j;
    }
    return s;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::vector<double> ScoreMatrix::column(std::size_t j) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(j));
    return out;
}

void ScoreMatrix::validate() const {
    if (treatments.size() < 2) throw Error("score matrix: at least two treatments are required");
    if (rows.size() < 2) throw Error("score matrix: at least two blocks are required");
    for (const auto& r : rows) {
        if (r.size() != treatments.size()) throw Error("score matrix: rows must have one value per treatment");
        for (double v : r)
            if (!std::isfinite(v)) throw Error("score matrix: non-finite value for metric '" + metric + "'");
    }
}

std::vector<double> average_ranks(std::span<const double> values, bool descending) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return descending ? values[a] > values[b] : values[a] < values[b];
    });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t) ranks[order[t]] = r;
        i = j;
    }
    return ranks;
}

FriedmanResult friedman_test(const ScoreMatrix& m) {
    m.validate();
    const std::size_t k = m.treatment_count();
    const double n = static_cast<double>(m.block_count());
    FriedmanResult r;
    r.df = static_cast<int>(k) - 1;
    r.average_ranks.assign(k, 0.0);
    for (const auto& row : m.rows) {
        const auto ranks = average_ranks(row, m.higher_is_better);
        for (std::size_t j = 0; j < k; ++j) r.average_ranks[j] += ranks[j];
    }
    for (auto& v : r.average_ranks) v /= n;
    const double kd = static_cast<double>(k);
    double dev = 0.0;
    for (double rj : r.average_ranks) dev += (rj - (kd + 1) / 2) * (rj - (kd + 1) / 2);
    r.statistic = 12.0 * n / (kd * (kd + 1)) * dev;
    if (r.statistic < 1e-12) {
        r.statistic = 0.0;
        r.p_value = 1.0;
    } else {
        r.p_value = special::chi_square_sf(r.statistic, static_cast<double>(r.df));
    }
    return r;
}

double wilcoxon_exact_p(std::span<const double> differences) {
    if (differences.empty()) return 1.0;
    const auto s = signed_ranks(differences);
    // Doubled average ranks are integers, so the null distribution of 2*W+
    // is a subset-sum count over them.
    std::vector<int> doubled;
    int total = 0;
    for (double r : s.ranks) {
        doubled.push_back(static_cast<int>(std::lround(2 * r)));
        total += doubled.back();
    }
    std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
    count[0] = 1.0;
    int reach = 0;
    for (int r : doubled) {
        for (int v = reach; v >= 0; --v)
            if (count[static_cast<std::size_t>(v)] != 0) count[static_cast<std::size_t>(v + r)] += count[static_cast<std::size_t>(v)];
        reach += r;
    }
    const int w = static_cast<int>(std::lround(2 * s.w_plus));
    double lower = 0.0, upper = 0.0;
    for (int v = 0; v <= total; ++v) {
        if (v <= w) lower += count[static_cast<std::size_t>(v)];
        if (v >= w) upper += count[static_cast<std::size_t>(v)];
    }
    const double all = std::ldexp(1.0, static_cast<int>(doubled.size()));
    return std::min(1.0, 2.0 * std::min(lower, upper) / all);
}

double wilcoxon_normal_p(std::span<const double> differences) {
    if (differences.empty()) return 1.0;
    const auto s = signed_ranks(differences);
    const double n = static_cast<double>(differences.size());
    const double mean = n * (n + 1) / 4;
    const double var = n * (n + 1) * (2 * n + 1) / 24 - s.tie_term / 48;
    if (!(var > 0)) return 1.0;
    const double z = std::max(0.0, std::abs(s.w_plus - mean) - 0.5) / std::sqrt(var);
    return std::min(1.0, 2.0 * special::normal_sf(z));
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    const auto d = nonzero_differences(a, b);
    WilcoxonResult r;
    r.n = d.size();
    if (d.empty()) return r;
    const auto s = signed_ranks(d);
    r.w_plus = s.w_plus;
    r.w_minus = static_cast<double>(d.size() * (d.size() + 1)) / 2 - s.w_plus;
    r.exact = d.size() <= 20;
    r.p_value = r.exact ? wilcoxon_exact_p(d) : wilcoxon_normal_p(d);
    return r;
}

std::vector<double> holm_adjust(std::span<const double> p_values) {
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    std::vector<double> out(m);
    double running = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double p = p_values[order[i]];
        if (!(p >= 0 && p <= 1)) throw Error("holm_adjust: p-values must lie in [0, 1]");
        running = std::max(running, std::min(1.0, static_cast<double>(m - i) * p));
        out[order[i]] = running;
    }
    return out;
}

ComparisonReport compare_treatments(const ScoreMatrix& m, double alpha) {
    if (!(alpha > 0 && alpha < 1)) throw Error("alpha must lie in (0, 1)");
    ComparisonReport r;
    r.metric = m.metric;
    r.treatments = m.treatments;
    r.alpha = alpha;
    r.friedman = friedman_test(m);
    const std::size_t k = m.treatment_count();
    r.p_raw.assign(k, std::vector<double>(k, 1.0));
    r.p_holm = r.p_raw;

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<double> raw;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            pairs.emplace_back(i, j);
            raw.push_back(wilcoxon_signed_rank(m.column(i), m.column(j)).p_value);
        }
    const auto adjusted = holm_adjust(raw);
    for (std::size_t t = 0; t < pairs.size(); ++t) {
        const auto [i, j] = pairs[t];
        r.p_raw[i][j] = r.p_raw[j][i] = raw[t];
        r.p_holm[i][j] = r.p_holm[j][i] = adjusted[t];
    }

    const auto d = cd_diagram(r, alpha);
    std::vector<std::size_t> by_rank(k);
    std::iota(by_rank.begin(), by_rank.end(), std::size_t{0});
    std::stable_sort(by_rank.begin(), by_rank.end(),
                     [&](std::size_t a, std::size_t b) { return r.friedman.average_ranks[a] < r.friedman.average_ranks[b]; });
    std::vector<bool> covered(k, false);
    for (const auto& [first, last] : d.bars) {
        std::vector<std::size_t> clique;
        for (std::size_t p = first; p <= last; ++p) {
            clique.push_back(by_rank[p]);
            covered[p] = true;
        }
        r.cliques.push_back(std::move(clique));
    }
    for (std::size_t p = 0; p < k; ++p)
        if (!covered[p]) r.cliques.push_back({by_rank[p]});
    return r;
}

CdDiagram cd_diagram(const ComparisonReport& report, double alpha) {
    const std::size_t k = report.treatments.size();
    const auto& ranks = report.friedman.average_ranks;
    if (ranks.size() != k || report.p_holm.size() != k) throw Error("cd_diagram: inconsistent comparison report");
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ranks[a] < ranks[b]; });

    CdDiagram d;
    d.treatment_count = k;
    for (auto i : order) d.entries.push_back({report.treatments[i], ranks[i]});
    auto differs = [&](std::size_t a, std::size_t b) { return report.p_holm[order[a]][order[b]] < alpha; };
    std::size_t reach = 0;  // last position covered by a bar so far
    bool any = false;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i;
        while (j + 1 < k) {
            bool ok = true;
            for (std::size_t t = i; t <= j && ok; ++t) ok = !differs(t, j + 1);
            if (!ok) break;
            ++j;
        }
        if (j == i) continue;
        if (any && j <= reach) continue;
        d.bars.emplace_back(i, j);
        reach = j;
        any = true;
    }
    return d;
}

std::string cd_diagram_svg(const CdDiagram& d, const std::string& title) {
    const std::size_t k = d.treatment_count;
    const double width = 640, left = 60, right = 580;
    const double axis_y = 60, row_h = 22;
    const std::size_t half = (d.entries.size() + 1) / 2;
    const double height = axis_y + 40 + row_h * static_cast<double>(half + d.bars.size()) + 20;
    auto x_of = [&](double rank) {
        return k < 2 ? left : left + (rank - 1) / static_cast<double>(k - 1) * (right - left);
    };
    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width, 0) + "\" height=\"" + fixed(height, 0) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + fixed(width / 2, 1) + "\" y=\"18\" text-anchor=\"middle\">" + xml_escape(title) + "</text>\n";
    s += "<line x1=\"" + fixed(left, 1) + "\" y1=\"" + fixed(axis_y, 1) + "\" x2=\"" + fixed(right, 1) + "\" y2=\"" +
         fixed(axis_y, 1) + "\" stroke=\"black\"/>\n";
    for (std::size_t r = 1; r <= k; ++r) {
        const double x = x_of(static_cast<double>(r));
        s += "<line x1=\"" + fixed(x, 1) + "\" y1=\"" + fixed(axis_y - 5, 1) + "\" x2=\"" + fixed(x, 1) + "\" y2=\"" +
             fixed(axis_y, 1) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fixed(x, 1) + "\" y=\"" + fixed(axis_y - 9, 1) + "\" text-anchor=\"middle\">" +
             std::to_string(r) + "</text>\n";
    }
    const double bars_top = axis_y + 12;
    for (std::size_t b = 0; b < d.bars.size(); ++b) {
        const double y = bars_top + 6 * static_cast<double>(b);
        s += "<line x1=\"" + fixed(x_of(d.entries[d.bars[b].first].rank) - 3, 1) + "\" y1=\"" + fixed(y, 1) +
             "\" x2=\"" + fixed(x_of(d.entries[d.bars[b].second].rank) + 3, 1) + "\" y2=\"" + fixed(y, 1) +
             "\" stroke=\"black\" stroke-width=\"3\"/>\n";
    }
    const double labels_top = bars_top + 6 * static_cast<double>(d.bars.size()) + 18;
    for (std::size_t p = 0; p < d.entries.size(); ++p) {
        const bool on_left = p < half;
        const std::size_t row = on_left ? p : d.entries.size() - 1 - p;
        const double x = x_of(d.entries[p].rank);
        const double y = labels_top + row_h * static_cast<double>(row);
        const double end_x = on_left ? left - 50 + 40 : right + 10;
        s += "<polyline fill=\"none\" stroke=\"gray\" points=\"" + fixed(x, 1) + "," + fixed(axis_y, 1) + " " +
             fixed(x, 1) + "," + fixed(y, 1) + " " + fixed(end_x, 1) + "," + fixed(y, 1) + "\"/>\n";
        s += "<text x=\"" + fixed(on_left ? end_x - 2 : end_x + 2, 1) + "\" y=\"" + fixed(y + 4, 1) +
             "\" text-anchor=\"" + (on_left ? "end" : "start") + "\">" + xml_escape(d.entries[p].label) + " (" +
             fixed(d.entries[p].rank, 2) + ")</text>\n";
    }
    s += "</svg>\n";
    return s;
}

std::string cd_diagram_text(const CdDiagram& d) {
    std::string s = "rank\ttreatment\n";
    for (const auto& e : d.entries) s += fixed(e.rank, 3) + "\t" + e.label + "\n";
    if (d.bars.empty()) {
        s += "no groups without significant differences\n";
        return s;
    }
    s += "groups without significant differences:\n";
    for (const auto& [first, last] : d.bars) {
        s += " -";
        for (std::size_t p = first; p <= last; ++p) s += (p == first ? " " : ", ") + d.entries[p].label;
        s += "\n";
    }
    return s;
}

std::vector<double> loss_vs_best(std::span<const double> values, bool higher_is_better) {
    if (values.empty()) return {};
    const double best = higher_is_better ? *std::max_element(values.begin(), values.end())
                                         : *std::min_element(values.begin(), values.end());
    if (best == 0.0) throw Error("loss_vs_best: best value is zero");
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(100.0 * (higher_is_better ? best - v : v - best) / best);
    return out;
}

double average_combined_loss(double loss_a, double loss_b) { return (loss_a + loss_b) / 2.0; }

}  // namespace crus
