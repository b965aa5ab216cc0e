// Acceptance checks. Each criterion prints one PASS/FAIL line; the exit code
// is non-zero when any selected criterion fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "crus/commands.hpp"
#include "crus/ensemble.hpp"
#include "crus/evaluation.hpp"
#include "crus/log.hpp"
#include "crus/metrics.hpp"
#include "crus/parallel.hpp"
#include "crus/random.hpp"
#include "crus/stats.hpp"
#include "crus/tree.hpp"

using namespace crus;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
        }
    }
    void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

SchemaPtr numeric_schema(int dims) {
    auto s = std::make_shared<Schema>();
    for (int i = 0; i < dims; ++i) s->attributes.push_back({"x" + std::to_string(i), AttributeKind::numeric, {}});
    s->class_column = "class";
    s->positive_label = "pos";
    s->negative_label = "neg";
    return s;
}

Instance inst(std::vector<double> v, bool positive) {
    Instance x;
    x.values = std::move(v);
    x.label = positive ? ClassLabel::positive : ClassLabel::negative;
    return x;
}

SyntheticConfig two_regions(std::uint64_t seed, std::size_t size) {
    SyntheticConfig c;
    c.blobs = {{size, 2}, {size, 20}};
    c.seed = seed;
    return c;
}

// 1. OP and G-mean at the rates behind accuracy 0.941, G-mean 0.532, prior 311/4616.
Outcome criterion_1() {
    Outcome o;
    const double pi = 311.0 / 4616.0, acc = 0.941, g = 0.532;
    // pi*tpr^2 - acc*tpr + (1 - pi) g^2 = 0, smaller root
    const double tpr = (acc - std::sqrt(acc * acc - 4 * pi * (1 - pi) * g * g)) / (2 * pi);
    const double tnr = (acc - pi * tpr) / (1 - pi);
    ConfusionMatrix cm;
    cm.tp = static_cast<std::size_t>(std::llround(tpr * 311));
    cm.fn = 311 - cm.tp;
    cm.tn = static_cast<std::size_t>(std::llround(tnr * 4305));
    cm.fp = 4305 - cm.tn;
    const double op = optimized_precision(cm), gm = g_mean(cm);
    o.note("tpr " + fmt("%.5f", tpr) + ", tnr " + fmt("%.5f", tnr) + ", OP " + fmt("%.4f", op) + ", G-mean " +
           fmt("%.4f", gm));
    o.check(std::abs(op - 0.390) <= 0.005, "OP within 0.005 of 0.390");
    o.check(std::abs(gm - 0.532) <= 0.002, "G-mean within 0.002 of 0.532");
    return o;
}

// 2. Loss table arithmetic.
Outcome criterion_2() {
    Outcome o;
    const double a = average_combined_loss(2.65, 1.75), b = average_combined_loss(0.65, 24.05);
    o.check(fmt("%.2f", a) == "2.20" && std::abs(a - 2.20) < 1e-12, "combined(2.65, 1.75) = 2.20");
    o.check(fmt("%.2f", b) == "12.35" && std::abs(b - 12.35) < 1e-12, "combined(0.65, 24.05) = 12.35");
    const std::vector<double> cells{0.92, 0.87, 0.91};
    const auto loss = loss_vs_best(cells);
    o.check(loss[0] == 0.0, "best cell loss 0.00");
    o.check(std::abs(loss[1] - 5.65) <= 0.25, "random tree RUS loss within 0.25 of 5.65");
    o.note("recomputed " + fmt("%.2f", loss[1]) + " vs printed 5.65");
    return o;
}

// 3. Every metric against a brute-force recomputation.
Outcome criterion_3() {
    Outcome o;
    Rng rng(2024);
    std::uniform_real_distribution<double> u(0, 1);
    double worst = 0;
    auto close = [&](double a, double b) {
        worst = std::max(worst, std::abs(a - b));
        return std::abs(a - b) <= 1e-9;
    };
    bool ok = true;
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t n = 2 + rng() % 300;
        const double prior = 0.05 + 0.9 * u(rng);
        const int grid = 1 + static_cast<int>(rng() % 40);  // coarse grids create score ties
        std::vector<ClassLabel> t(n), p(n);
        std::vector<double> s(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = u(rng) < prior ? ClassLabel::positive : ClassLabel::negative;
            s[i] = std::round(u(rng) * grid) / grid;
            p[i] = u(rng) < 0.5 ? ClassLabel::positive : ClassLabel::negative;
        }
        t[0] = ClassLabel::positive;
        t[1] = ClassLabel::negative;
        const auto m = compute_metrics(t, p, s);

        double tp = 0, fp = 0, tn = 0, fn = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool tt = t[i] == ClassLabel::positive, pp = p[i] == ClassLabel::positive;
            tp += tt && pp, fn += tt && !pp, fp += !tt && pp, tn += !tt && !pp;
        }
        auto div = [](double a, double b) { return b == 0 ? 0.0 : a / b; };
        const double prec = div(tp, tp + fp), rec = div(tp, tp + fn), tnr = div(tn, tn + fp), fpr = div(fp, fp + tn);
        const double f = div(2 * prec * rec, prec + rec);
        const double acc = (tp + tn) / static_cast<double>(n);
        const double gm = std::sqrt(rec * tnr);
        const double op = (rec + tnr) == 0 ? acc - 1 : acc - std::abs(tnr - rec) / (tnr + rec);
        double pairs = 0, wins = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (t[i] == ClassLabel::positive && t[j] == ClassLabel::negative) {
                    pairs += 1;
                    wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
                }
        const double auc = wins / pairs;
        const auto curve = auc_roc(t, s);
        ok = ok && close(m.precision_pos, prec) && close(m.recall_pos, rec) && close(m.f_measure_pos, f) &&
             close(m.tpr, rec) && close(m.fpr, fpr) && close(m.tnr, tnr) && close(m.accuracy, acc) &&
             close(m.g_mean, gm) && close(m.op, op) && close(m.auc, auc) && close(curve.auc, auc) &&
             close(trapezoid_area(curve.points), auc);
    }
    o.check(ok, "all metrics within 1e-9");
    o.note("1000 cases, max abs deviation " + fmt("%.2e", worst));
    return o;
}

// 4. Binomial ensemble accuracy against outcome enumeration.
Outcome criterion_4() {
    Outcome o;
    double worst = 0;
    bool monotone = true;
    for (int pi = 1; pi <= 9; ++pi) {
        const double p = pi / 10.0;
        double prev = 0;
        for (int L = 1; L <= 15; L += 2) {
            double brute = 0;
            for (unsigned mask = 0; mask < (1u << L); ++mask) {
                const int c = std::popcount(mask);
                if (c > L / 2) brute += std::pow(p, c) * std::pow(1 - p, L - c);
            }
            const double v = theoretical_ensemble_accuracy(L, p);
            worst = std::max(worst, std::abs(v - brute));
            if (L > 1 && ((p > 0.5 && !(v > prev)) || (p < 0.5 && !(v < prev)))) monotone = false;
            prev = v;
        }
    }
    o.check(worst <= 1e-12, "matches 2^L enumeration within 1e-12");
    o.check(monotone, "strictly monotone in L away from p = 0.5");
    o.note("max abs deviation " + fmt("%.2e", worst));
    return o;
}

// 5. SMOTE never leaks synthetic or training rows into test folds.
Outcome criterion_5() {
    Outcome o;
    std::size_t leaked_synthetic = 0, overlap = 0, synthetic_trained = 0, folds = 0;
    for (std::uint64_t run = 0; run < 100; ++run) {
        SyntheticConfig c;
        c.blobs = {{150, 3}, {150, 12}};
        c.nominal_dims = 1;
        c.seed = run;
        const auto d = gen_synthetic(c);
        ExperimentSpec spec;
        spec.sampler.kind = SamplerKind::smote;
        spec.sampler.smote_percentage = run % 2 ? 500 : 100;
        spec.classifier = ClassifierSpec::j48();
        spec.seed = run;
        const auto r = run_cv(d, spec);
        for (const auto& f : r.folds) {
            ++folds;
            synthetic_trained += f.synthetic_train_count;
            for (const auto& rec : f.records) {
                leaked_synthetic += rec.synthetic || d[rec.index].synthetic;
                overlap += std::binary_search(f.train_origins.begin(), f.train_origins.end(), rec.index);
            }
        }
    }
    o.check(leaked_synthetic == 0, "no synthetic instance in any test fold");
    o.check(overlap == 0, "train/test index intersection empty");
    o.check(synthetic_trained > 0, "synthetic instances were generated");
    o.note("100 runs, " + std::to_string(folds) + " folds, " + std::to_string(synthetic_trained) +
           " synthetic training instances");
    return o;
}

struct Rates {
    double accuracy, op, g_mean;
};

Rates rates_of(const MetricsReport& m) { return {m.accuracy, m.op, m.g_mean}; }

// 6. Clustering-RUS equivalence and effect.
Outcome criterion_6() {
    Outcome o;
    const auto rf = ClassifierSpec::random_forest(50);

    {  // (a)
        const auto d = gen_synthetic(two_regions(11, 1000));
        ExperimentSpec plain;
        plain.classifier = rf;
        plain.seed = 11;
        ExperimentSpec clustered = plain;
        clustered.sampler.kind = SamplerKind::clustering_rus;
        clustered.sampler.threshold = 1e9;
        const auto a = run_cv(d, plain), b = run_cv(d, clustered);
        bool same = a.folds.size() == b.folds.size();
        for (std::size_t f = 0; same && f < a.folds.size(); ++f) {
            const auto &ra = a.folds[f].records, &rb = b.folds[f].records;
            same = ra.size() == rb.size();
            for (std::size_t i = 0; same && i < ra.size(); ++i)
                same = ra[i].index == rb[i].index && ra[i].predicted == rb[i].predicted && ra[i].score == rb[i].score;
        }
        same = same && metrics_values(a.pooled) == metrics_values(*b.group_weighted);
        o.check(same, "(a) threshold above every cluster IR reproduces the single-model run");
    }

    // (b)
    int better_pooled = 0, better_grouped = 0, acc_ok = 0;
    std::string rows;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto d = gen_synthetic(two_regions(seed, 1000));
        ExperimentSpec none;
        none.classifier = rf;
        none.seed = seed;
        ExperimentSpec rus = none;
        rus.sampler.kind = SamplerKind::rus;
        rus.sampler.distribution_spread = 4;
        ExperimentSpec crus = none;
        crus.sampler.kind = SamplerKind::clustering_rus;
        crus.sampler.distribution_spread = 4;
        crus.sampler.cluster_k = 2;
        crus.sampler.threshold = 10;
        const auto base = rates_of(run_cv(d, none).pooled);
        const auto r = rates_of(run_cv(d, rus).pooled);
        const auto cr = run_cv(d, crus);
        const auto c = rates_of(cr.pooled);
        const auto cg = rates_of(*cr.group_weighted);
        if (c.g_mean > base.g_mean && c.op > base.op) ++better_pooled;
        if (cg.g_mean > base.g_mean && cg.op > base.op) ++better_grouped;
        const double drop_c = base.accuracy - c.accuracy, drop_r = base.accuracy - r.accuracy;
        if (drop_c <= drop_r) ++acc_ok;
        rows += "\n    seed " + std::to_string(seed) + ": none acc/OP/G " + fmt("%.4f", base.accuracy) + "/" +
                fmt("%.4f", base.op) + "/" + fmt("%.4f", base.g_mean) + ", RUS " + fmt("%.4f", r.accuracy) + "/" +
                fmt("%.4f", r.op) + "/" + fmt("%.4f", r.g_mean) + ", C-RUS pooled " + fmt("%.4f", c.accuracy) + "/" +
                fmt("%.4f", c.op) + "/" + fmt("%.4f", c.g_mean) + ", C-RUS group-weighted OP/G " +
                fmt("%.4f", cg.op) + "/" + fmt("%.4f", cg.g_mean) + ", acc drop C-RUS " + fmt("%+.4f", drop_c) +
                " vs RUS " + fmt("%+.4f", drop_r);
    }
    o.check(better_pooled >= 4, "(b) C-RUS improves G-mean and OP over none in >= 4/5 seeds");
    o.check(acc_ok >= 4, "(b) C-RUS accuracy drop <= RUS accuracy drop in >= 4/5 seeds");
    o.note("(b) G-mean and OP improved in " + std::to_string(better_pooled) + "/5 seeds (group-weighted view " +
           std::to_string(better_grouped) + "/5), accuracy drop no worse than RUS in " + std::to_string(acc_ok) +
           "/5" + rows);
    return o;
}

// 7. Bootstrap distinct fraction and random forest OOB coverage.
Outcome criterion_7() {
    Outcome o;
    double distinct = 0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto c = bootstrap_counts(1000, derive_seed(7, {i, 1}));
        distinct += static_cast<double>(std::count_if(c.begin(), c.end(), [](double x) { return x > 0; })) / 1000.0;
    }
    distinct /= 100;
    o.check(std::abs(distinct - 0.632) <= 0.02, "distinct fraction 0.632 +- 0.02");
    const auto d = gen_synthetic(two_regions(7, 500));
    std::vector<double> ones(d.size(), 1.0);
    const auto rf = fit_random_forest(d, ones, ClassifierSpec::random_forest(50), 7);
    const double coverage = rf.oob_coverage.value_or(0.0);
    o.check(coverage >= 0.99, "OOB coverage >= 99% at 50 trees");
    o.note("distinct fraction " + fmt("%.4f", distinct) + ", OOB coverage " + fmt("%.4f", coverage) + ", OOB error " +
           fmt("%.4f", rf.oob_error.value_or(NAN)));
    return o;
}

// 8. AdaBoost.M1 first round on four instances with one error.
Outcome criterion_8() {
    Outcome o;
    const Dataset d(numeric_schema(1), {inst({4}, true), inst({1}, false), inst({2}, false), inst({3}, false)});
    std::vector<double> ones(4, 1.0);
    const auto m = fit_adaboost(d, ones, ClassifierSpec::j48(), 10, 1, Exec::serial);
    if (m.boost_trace.empty()) {
        o.check(false, "no boosting round recorded");
        return o;
    }
    const auto& r = m.boost_trace[0];
    const double tol = 1e-15;
    o.check(std::abs(r.error - 0.25) <= tol, "epsilon = 1/4");
    o.check(std::abs(r.beta - 1.0 / 3.0) <= tol, "beta = 1/3");
    o.check(std::abs(r.member_weight - std::log(3.0)) <= tol, "member weight ln 3");
    const bool weights = r.weights_after.size() == 4 && std::abs(r.weights_after[0] - 0.5) <= tol &&
                         std::abs(r.weights_after[1] - 1.0 / 6) <= tol && std::abs(r.weights_after[2] - 1.0 / 6) <= tol &&
                         std::abs(r.weights_after[3] - 1.0 / 6) <= tol;
    o.check(weights, "round-2 weights (0.5, 1/6, 1/6, 1/6)");
    o.note("beta " + fmt("%.17g", r.beta) + ", weight " + fmt("%.17g", r.member_weight));
    return o;
}

// 9. Wilcoxon, Friedman and Holm oracles.
Outcome criterion_9() {
    Outcome o;
    Rng rng(9);
    std::uniform_real_distribution<double> u(-1, 1);
    double worst = 0;
    for (std::size_t n = 1; n <= 12; ++n)
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> diffs;
            for (std::size_t i = 0; i < n; ++i) {
                double v = rep % 2 ? u(rng) : std::round(u(rng) * 4) / 4;  // even reps carry ties
                if (v == 0) v = 0.25;
                diffs.push_back(v);
            }
            std::vector<double> abs_d;
            for (double v : diffs) abs_d.push_back(std::abs(v));
            const auto ranks = average_ranks(abs_d, false);
            double total = 0, w_plus = 0;
            for (std::size_t i = 0; i < n; ++i) total += ranks[i], w_plus += diffs[i] > 0 ? ranks[i] : 0;
            const double obs = std::abs(w_plus - total / 2);
            std::size_t extreme = 0;
            for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
                double w = 0;
                for (std::size_t i = 0; i < n; ++i)
                    if (mask >> i & 1) w += ranks[i];
                extreme += std::abs(w - total / 2) >= obs - 1e-9;
            }
            const double brute = std::min(1.0, static_cast<double>(extreme) / static_cast<double>(std::size_t{1} << n));
            worst = std::max(worst, std::abs(wilcoxon_exact_p(diffs) - brute));
        }
    o.check(worst <= 1e-12, "Wilcoxon exact branch equals 2^n enumeration for n <= 12");

    ScoreMatrix m;
    m.metric = "accuracy";
    m.treatments = {"a", "b", "c"};
    m.rows.assign(4, {0.9, 0.8, 0.7});
    const auto f = friedman_test(m);
    o.check(std::abs(f.statistic - 8.0) < 1e-12, "Friedman statistic 8");
    o.check(std::abs(f.p_value - 0.0183) <= 0.0005, "Friedman p 0.0183 +- 0.0005");

    const std::vector<double> p{0.01, 0.02, 0.04};
    const auto h = holm_adjust(p);
    o.check(std::abs(h[0] - 0.03) < 1e-15 && std::abs(h[1] - 0.04) < 1e-15 && std::abs(h[2] - 0.04) < 1e-15,
            "Holm (0.03, 0.04, 0.04)");
    o.note("Wilcoxon max deviation " + fmt("%.1e", worst) + ", Friedman chi2 " + fmt("%.4f", f.statistic) + " p " +
           fmt("%.5f", f.p_value));
    return o;
}

// 10. Tree correctness.
Outcome criterion_10() {
    Outcome o;
    TreeConfig unpruned;
    unpruned.use_pruning = false;
    unpruned.min_leaf_weight = 1;
    TreeConfig pruned;
    pruned.min_leaf_weight = 1;

    int perfect = 0, shrink_ok = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        // consistent family: distinct feature vectors, noisy labels, mixed attributes
        Rng rng(seed);
        auto s = std::make_shared<Schema>(*numeric_schema(3));
        s->attributes.push_back({"n0", AttributeKind::nominal, {"a", "b", "c"}});
        std::set<std::vector<double>> seen;
        std::vector<Instance> rows;
        const std::size_t n = 50 + seed * 10;
        while (rows.size() < n) {
            std::vector<double> v{static_cast<double>(rng() % 20), static_cast<double>(rng() % 7) / 2,
                                  static_cast<double>(rng() % 100) / 10, static_cast<double>(rng() % 3)};
            if (!seen.insert(v).second) continue;
            const bool pos = (v[0] + v[3] * 3 > 15) != (rng() % 5 == 0);
            rows.push_back(inst(v, pos));
        }
        const Dataset d(s, rows);
        const auto t = fit_tree(d, unpruned);
        std::size_t ok = 0;
        for (const auto& x : d) ok += t.predict(x).label == x.label;
        perfect += ok == d.size();
        shrink_ok += fit_tree(d, pruned).node_count() <= t.node_count();
    }
    o.check(perfect == 20, "100% training accuracy on all 20 consistent datasets");
    o.check(shrink_ok == 20, "pruning never increases node count");

    auto xs = std::make_shared<Schema>();
    xs->attributes = {{"a", AttributeKind::nominal, {"0", "1"}}, {"b", AttributeKind::nominal, {"0", "1"}}};
    xs->class_column = "class";
    xs->positive_label = "pos";
    xs->negative_label = "neg";
    const Dataset x(xs, {inst({0, 0}, false), inst({0, 1}, true), inst({1, 0}, true), inst({1, 1}, false)});
    const auto xt = fit_tree(x, unpruned);
    bool xor_ok = xt.depth() == 2;
    for (const auto& r : x) xor_ok = xor_ok && xt.predict(r).label == r.label;
    o.check(xor_ok, "XOR learned exactly");
    o.note(std::to_string(perfect) + "/20 perfect fits, XOR depth " + std::to_string(xt.depth()));
    return o;
}

std::map<std::string, std::string> tree_contents(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) {
            std::ifstream in(e.path(), std::ios::binary);
            std::stringstream ss;
            ss << in.rdbuf();
            out[fs::relative(e.path(), root).string()] = ss.str();
        }
    return out;
}

// 11. Byte-identical outputs across repeated runs and thread counts.
Outcome criterion_11() {
    Outcome o;
    const auto dir = fs::temp_directory_path() / "crus_acceptance_11";
    fs::remove_all(dir);
    fs::create_directories(dir);
    SyntheticConfig s = two_regions(3, 300);
    s.nominal_dims = 1;
    cmd_gen_synth(s, dir / "data");
    std::ofstream(dir / "config.json") << R"({
        "dataset": "data/data.csv", "schema": "data/schema.json",
        "samplers": [{"type": "none"}, {"type": "rus", "spread": 4}, {"type": "smote", "percentage": 200},
                     {"type": "clustering_rus", "clusters": 0, "reduction_fraction": 0.275}],
        "classifiers": [{"type": "j48"}, {"type": "random_forest", "n_members": 20},
                        {"type": "adaboost", "n_members": 5},
                        {"type": "random_committee", "n_members": 5},
                        {"type": "bagging", "n_members": 5, "base": {"type": "random_tree"}}],
        "k_folds": 5, "seed": 42, "save_models": true })";
    auto cfg = load_run_config(dir / "config.json");

    const int initial = max_threads();
    const int threads = std::max(initial, 8);  // oversubscribe on small machines
    std::vector<std::map<std::string, std::string>> outputs;
    auto run_into = [&](const std::string& name, Exec exec, int nthreads) {
        set_max_threads(nthreads);
        auto c = cfg;
        c.output = dir / name;
        cmd_run(c, exec);
        outputs.push_back(tree_contents(c.output));
    };
    run_into("parallel_a", Exec::parallel, threads);
    run_into("parallel_b", Exec::parallel, threads);
    run_into("one_thread", Exec::parallel, 1);
    run_into("serial", Exec::serial, threads);
    set_max_threads(initial);

    std::size_t differing = 0;
    for (std::size_t i = 1; i < outputs.size(); ++i)
        if (outputs[i] != outputs[0]) ++differing;
    o.check(!outputs[0].empty() && differing == 0, "all runs byte-identical");

    // featsel and gen-synth repeat identically too
    FeatselConfig fc;
    fc.dataset = dir / "data" / "data.csv";
    fc.schema = dir / "data" / "schema.json";
    fc.output = dir / "fs_a";
    cmd_featsel(fc, Exec::parallel);
    fc.output = dir / "fs_b";
    cmd_featsel(fc, Exec::serial);
    o.check(tree_contents(dir / "fs_a") == tree_contents(dir / "fs_b"), "featsel outputs identical");
    cmd_gen_synth(s, dir / "data2");
    o.check(tree_contents(dir / "data") == tree_contents(dir / "data2"), "generated data identical");

    o.note(std::to_string(outputs[0].size()) + " files compared across 4 runs (" + std::to_string(threads) +
           " threads twice, 1 thread, serial kernels)");
    fs::remove_all(dir);
    return o;
}

struct Criterion {
    int id;
    const char* title;
    double limit_seconds;  // 0 = no runtime bound
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    log::set_quiet(true);
    const std::vector<Criterion> all{
        {1, "OP / G-mean consistency fixture", 1, criterion_1},
        {2, "loss table arithmetic", 1, criterion_2},
        {3, "metric oracle suite", 10, criterion_3},
        {4, "ensemble accuracy formula and Condorcet property", 5, criterion_4},
        {5, "SMOTE leakage protocol", 60, criterion_5},
        {6, "clustering-RUS equivalence and effect", 300, criterion_6},
        {7, "bootstrap fraction and OOB coverage", 0, criterion_7},
        {8, "AdaBoost.M1 hand trace", 0, criterion_8},
        {9, "statistics oracles", 10, criterion_9},
        {10, "tree correctness", 0, criterion_10},
        {11, "determinism across runs and threads", 0, criterion_11},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc) {
            selected.insert(std::stoi(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
            return 2;
        }
    }

    int failed = 0;
    for (const auto& c : all) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0) o.check(secs < c.limit_seconds, "runtime under " + fmt("%.0f s", c.limit_seconds));
        failed += !o.pass;
        std::printf("[%s] criterion %d: %s (%.2f s) -- %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
