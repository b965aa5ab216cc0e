#include "crus/commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "crus/cluster.hpp"
#include "crus/error.hpp"
#include "crus/feature_select.hpp"
#include "crus/log.hpp"
#include "crus/random.hpp"

namespace crus {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

fs::path resolve(const fs::path& p, const fs::path& base) { return p.is_absolute() ? p : base / p; }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::json read_json(const fs::path& path) {
    try {
        return nlohmann::json::parse(read_bytes(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("'" + path.string() + "': " + e.what());
    }
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string fixed(double v, int digits) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string slugify(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else if (!out.empty() && out.back() != '_') out += '_';
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out.empty() ? "cell" : out;
}

std::string metrics_header() {
    std::string h;
    for (const auto& c : metrics_columns()) h += "," + c;
    return h;
}

std::string metrics_row(const MetricsReport& r) {
    std::string s;
    for (double v : metrics_values(r)) s += "," + format_number(v);
    return s;
}

const char* metric_title(const std::string& m) {
    static const std::map<std::string, const char*> titles{
        {"accuracy", "Accuracy"}, {"op", "OP"}, {"g_mean", "G-Mean"}, {"weighted_precision", "Precision"},
        {"weighted_recall", "Recall"}, {"weighted_f", "F-Measure"}, {"auc", "AUC"}};
    auto it = titles.find(m);
    return it == titles.end() ? m.c_str() : it->second;
}

std::string primary_view_name(const CvResult& r) { return r.group_weighted ? "group_weighted" : "pooled"; }

void write_cell_csv(const GridCell& cell, const SamplerSpec& sampler, const ClassifierSpec& classifier,
                    const fs::path& path) {
    std::string s = "algorithm,sampler,fold,view,test_count" + metrics_header() + "\n";
    const std::string prefix = csv_cell(classifier.display_name()) + "," + csv_cell(sampler.display_name()) + ",";
    for (const auto& f : cell.result.folds) {
        s += prefix + std::to_string(f.fold) + ",fold," + std::to_string(f.test_count) + metrics_row(f.metrics) + "\n";
        for (const auto& g : f.groups)
            if (g.metrics)
                s += prefix + std::to_string(f.fold) + "," + to_string(g.partition) + "," +
                     std::to_string(g.test_count) + metrics_row(*g.metrics) + "\n";
    }
    std::size_t total = 0;
    for (const auto& f : cell.result.folds) total += f.test_count;
    const auto n = std::to_string(total);
    s += prefix + "all,pooled," + n + metrics_row(cell.result.pooled) + "\n";
    s += prefix + "all,fold_mean," + n + metrics_row(cell.result.fold_mean) + "\n";
    for (const auto& g : cell.result.groups)
        if (g.metrics)
            s += prefix + "all," + to_string(g.partition) + "," + std::to_string(g.test_count) + metrics_row(*g.metrics) + "\n";
    if (cell.result.group_weighted) s += prefix + "all,group_weighted," + n + metrics_row(*cell.result.group_weighted) + "\n";
    write_text(path, s);
}

std::string markdown_matrix(const std::vector<std::string>& names, const std::vector<std::vector<double>>& m) {
    std::string s = "|  |";
    for (std::size_t j = 0; j < names.size(); ++j) s += " " + std::to_string(j + 1) + " |";
    s += "\n|---|";
    for (std::size_t j = 0; j < names.size(); ++j) s += "---|";
    s += "\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
        s += "| " + std::to_string(i + 1) + ". " + names[i] + " |";
        for (std::size_t j = 0; j < names.size(); ++j) s += i == j ? " - |" : " " + fixed(m[i][j], 4) + " |";
        s += "\n";
    }
    return s;
}

std::string csv_matrix(const std::vector<std::string>& names, const std::vector<std::vector<double>>& m) {
    std::string s = "treatment";
    for (const auto& n : names) s += "," + csv_cell(n);
    s += "\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
        s += csv_cell(names[i]);
        for (double v : m[i]) s += "," + format_number(v);
        s += "\n";
    }
    return s;
}

Dataset load_dataset(const fs::path& csv, const fs::path& schema) {
    if (!fs::exists(schema)) throw ConfigError("schema file not found: '" + schema.string() + "'");
    if (!fs::exists(csv)) throw ConfigError("dataset file not found: '" + csv.string() + "'");
    return load_csv(csv, schema);
}

}  // namespace

void RunConfig::validate() const {
    if (samplers.empty()) throw ConfigError("config: at least one sampler is required");
    if (classifiers.empty()) throw ConfigError("config: at least one classifier is required");
    for (const auto& s : samplers) s.validate();
    for (const auto& c : classifiers) c.validate();
    if (k_folds < 2) throw ConfigError("config: k_folds must be at least 2");
    if (!(alpha > 0 && alpha < 1)) throw ConfigError("config: alpha must lie in (0, 1)");
    if (blocks != "folds") throw ConfigError("config: comparison blocks must be 'folds'");
    const auto& cols = metrics_columns();
    for (const auto* list : {&metrics, &loss_metrics})
        for (const auto& m : *list)
            if (std::find(cols.begin(), cols.begin() + 13, m) == cols.begin() + 13)
                throw ConfigError("config: unknown metric '" + m + "'");
    if (schema.empty() || !fs::exists(schema)) throw ConfigError("schema file not found: '" + schema.string() + "'");
    if (dataset.empty() || !fs::exists(dataset)) throw ConfigError("dataset file not found: '" + dataset.string() + "'");
}

RunConfig run_config_from_json(const nlohmann::json& j, const fs::path& base_dir) {
    RunConfig c;
    try {
        c.dataset = resolve(j.at("dataset").get<std::string>(), base_dir);
        c.schema = resolve(j.at("schema").get<std::string>(), base_dir);
        for (const auto& s : j.at("samplers")) c.samplers.push_back(s.get<SamplerSpec>());
        for (const auto& s : j.at("classifiers")) c.classifiers.push_back(s.get<ClassifierSpec>());
        c.k_folds = j.value("k_folds", c.k_folds);
        c.seed = j.value("seed", c.seed);
        if (j.contains("metrics")) c.metrics = j.at("metrics").get<std::vector<std::string>>();
        if (j.contains("loss_metrics")) c.loss_metrics = j.at("loss_metrics").get<std::vector<std::string>>();
        if (j.contains("comparison")) {
            const auto& cmp = j.at("comparison");
            c.alpha = cmp.value("alpha", c.alpha);
            c.blocks = cmp.value("blocks", c.blocks);
        }
        c.output = resolve(j.value("output", std::string("results")), base_dir);
        c.save_models = j.value("save_models", false);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

nlohmann::ordered_json run_config_to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["dataset"] = c.dataset.filename().string();
    j["schema"] = c.schema.filename().string();
    j["samplers"] = nlohmann::json(c.samplers);
    j["classifiers"] = nlohmann::json(c.classifiers);
    j["k_folds"] = c.k_folds;
    j["seed"] = c.seed;
    j["metrics"] = c.metrics;
    j["loss_metrics"] = c.loss_metrics;
    j["comparison"] = {{"alpha", c.alpha}, {"blocks", c.blocks}};
    j["save_models"] = c.save_models;
    return j;
}

RunConfig load_run_config(const fs::path& path) {
    if (!fs::exists(path)) throw ConfigError("config file not found: '" + path.string() + "'");
    return run_config_from_json(read_json(path), path.parent_path());
}

double metric_value(const MetricsReport& r, const std::string& metric) {
    const auto& cols = metrics_columns();
    const auto it = std::find(cols.begin(), cols.end(), metric);
    if (it == cols.end()) throw ConfigError("unknown metric '" + metric + "'");
    return metrics_values(r)[static_cast<std::size_t>(it - cols.begin())];
}

GridResult run_grid(const RunConfig& cfg, const Dataset& d, Exec exec) {
    GridResult g;
    std::set<std::string> labels, slugs;
    for (std::size_t s = 0; s < cfg.samplers.size(); ++s)
        for (std::size_t c = 0; c < cfg.classifiers.size(); ++c) {
            GridCell cell;
            cell.sampler_index = s;
            cell.classifier_index = c;
            const std::string base = cfg.classifiers[c].display_name() + " + " + cfg.samplers[s].display_name();
            cell.label = base;
            for (int n = 2; !labels.insert(cell.label).second; ++n) cell.label = base + " #" + std::to_string(n);
            char prefix[16];
            std::snprintf(prefix, sizeof prefix, "c%02zu_", g.cells.size() + 1);
            cell.slug = prefix + slugify(cfg.classifiers[c].display_name()) + "__" + slugify(cfg.samplers[s].display_name());
            g.cells.push_back(std::move(cell));
        }

    parallel_for(g.cells.size(), exec, [&](std::size_t i) {
        auto& cell = g.cells[i];
        ExperimentSpec spec;
        spec.sampler = cfg.samplers[cell.sampler_index];
        spec.classifier = cfg.classifiers[cell.classifier_index];
        spec.k_folds = cfg.k_folds;
        spec.seed = cfg.seed;
        try {
            cell.result = run_cv(d, spec, exec);
        } catch (const std::exception& e) {
            throw Error("cell '" + cell.label + "': " + e.what());
        }
    });
    return g;
}

ScoreMatrix fold_score_matrix(const GridResult& g, const std::string& metric) {
    ScoreMatrix m;
    m.metric = metric;
    m.higher_is_better = metric != "fpr";
    if (g.cells.empty()) return m;
    const std::size_t folds = g.cells.front().result.folds.size();
    m.rows.assign(folds, {});
    for (const auto& cell : g.cells) {
        m.treatments.push_back(cell.label);
        for (std::size_t f = 0; f < folds; ++f) m.rows[f].push_back(metric_value(cell.result.folds.at(f).metrics, metric));
    }
    return m;
}

void write_run_reports(const RunConfig& cfg, const Dataset& d, const GridResult& g, const fs::path& dir) {
    fs::create_directories(dir / "cells");
    fs::create_directories(dir / "comparison");

    // Per-cell fold tables.
    for (const auto& cell : g.cells)
        write_cell_csv(cell, cfg.samplers[cell.sampler_index], cfg.classifiers[cell.classifier_index],
                       dir / "cells" / (cell.slug + ".csv"));

    // One summary row per cell, plus Markdown tables per sampler.
    {
        std::string csv = "algorithm,sampler,view" + metrics_header() + "\n";
        std::string md = "# Cross-validation results\n";
        for (std::size_t s = 0; s < cfg.samplers.size(); ++s) {
            md += "\n## " + cfg.samplers[s].display_name() + "\n\n";
            md += "| Algorithm | Accuracy | OP | G-Mean | Precision | Recall | F-Measure | AUC |\n";
            md += "|---|---|---|---|---|---|---|---|\n";
            for (const auto& cell : g.cells) {
                if (cell.sampler_index != s) continue;
                const auto& r = cell.result.primary();
                const auto& alg = cfg.classifiers[cell.classifier_index].display_name();
                csv += csv_cell(alg) + "," + csv_cell(cfg.samplers[s].display_name()) + "," +
                       primary_view_name(cell.result) + metrics_row(r) + "\n";
                md += "| " + alg + " | " + fixed(r.accuracy, 3) + " | " + fixed(r.op, 3) + " | " + fixed(r.g_mean, 3) +
                      " | " + fixed(r.weighted_precision, 3) + " | " + fixed(r.weighted_recall, 3) + " | " +
                      fixed(r.weighted_f, 3) + " | " + fixed(r.auc, 3) + " |\n";
            }
        }
        write_text(dir / "summary.csv", csv);
        write_text(dir / "summary.md", md);
    }

    // TPR / TNR per cell.
    {
        std::string csv = "algorithm,sampler,tpr,tnr\n";
        for (const auto& cell : g.cells) {
            const auto& r = cell.result.primary();
            csv += csv_cell(cfg.classifiers[cell.classifier_index].display_name()) + "," +
                   csv_cell(cfg.samplers[cell.sampler_index].display_name()) + "," + format_number(r.tpr) + "," +
                   format_number(r.tnr) + "\n";
        }
        write_text(dir / "tpr_tnr.csv", csv);
    }

    // Friedman + Wilcoxon-Holm per metric.
    std::string report = "# Statistical comparison\n\nBlocks: " + std::to_string(cfg.k_folds) +
                         " cross-validation folds. Significance level: " + fixed(cfg.alpha, 3) + ".\n";
    if (g.cells.size() < 2) {
        report += "\nOnly one algorithm-sampler pair was run; nothing to compare.\n";
    } else {
        for (const auto& metric : cfg.metrics) {
            const auto m = fold_score_matrix(g, metric);
            report += "\n## " + std::string(metric_title(metric)) + "\n\n";
            try {
                const auto cmp = compare_treatments(m, cfg.alpha);
                const auto cd = cd_diagram(cmp, cfg.alpha);
                report += "Friedman chi-square = " + fixed(cmp.friedman.statistic, 4) +
                          ", df = " + std::to_string(cmp.friedman.df) + ", p = " + fixed(cmp.friedman.p_value, 6) + "\n\n";
                report += "| Treatment | Average rank |\n|---|---|\n";
                for (const auto& e : cd.entries) report += "| " + e.label + " | " + fixed(e.rank, 3) + " |\n";
                report += "\nWilcoxon signed-rank p-values, Holm-adjusted:\n\n" + markdown_matrix(cmp.treatments, cmp.p_holm);
                report += "\n" + cd_diagram_text(cd);
                write_text(dir / "comparison" / ("pvalues_" + metric + "_raw.csv"), csv_matrix(cmp.treatments, cmp.p_raw));
                write_text(dir / "comparison" / ("pvalues_" + metric + "_holm.csv"), csv_matrix(cmp.treatments, cmp.p_holm));
                write_text(dir / "comparison" / ("cd_" + metric + ".svg"),
                           cd_diagram_svg(cd, std::string(metric_title(metric)) + " (alpha = " + fixed(cfg.alpha, 3) + ")"));
                write_text(dir / "comparison" / ("cd_" + metric + ".txt"), cd_diagram_text(cd));
            } catch (const Error& e) {
                report += std::string("Comparison skipped: ") + e.what() + "\n";
            }
        }
    }
    write_text(dir / "comparison.md", report);

    // Loss with respect to the best value, alone and averaged with the accuracy loss.
    {
        std::vector<double> acc;
        for (const auto& cell : g.cells) acc.push_back(cell.result.primary().accuracy);
        std::string md = "# Loss with respect to the best value\n";
        for (const auto& metric : cfg.loss_metrics) {
            std::vector<double> vals;
            for (const auto& cell : g.cells) vals.push_back(metric_value(cell.result.primary(), metric));
            std::string csv = "algorithm,sampler,accuracy," + metric + ",accuracy_loss_pct," + metric +
                              "_loss_pct,average_loss_pct\n";
            const std::string title = metric_title(metric);
            md += "\n## " + title + "\n\n| Algorithm | Sampler | Accuracy | " + title + " | % Accuracy loss | % " + title +
                  " loss | % Average loss |\n|---|---|---|---|---|---|---|\n";
            std::vector<double> acc_loss, loss;
            try {
                acc_loss = loss_vs_best(acc);
                loss = loss_vs_best(vals);
            } catch (const Error& e) {
                md += std::string("Skipped: ") + e.what() + "\n";
                continue;
            }
            for (std::size_t i = 0; i < g.cells.size(); ++i) {
                const auto& cell = g.cells[i];
                const auto& alg = cfg.classifiers[cell.classifier_index].display_name();
                const auto& smp = cfg.samplers[cell.sampler_index].display_name();
                const double avg = average_combined_loss(acc_loss[i], loss[i]);
                csv += csv_cell(alg) + "," + csv_cell(smp) + "," + format_number(acc[i]) + "," + format_number(vals[i]) +
                       "," + format_number(acc_loss[i]) + "," + format_number(loss[i]) + "," + format_number(avg) + "\n";
                md += "| " + alg + " | " + smp + " | " + fixed(acc[i], 3) + " | " + fixed(vals[i], 3) + " | " +
                      fixed(acc_loss[i], 2) + " | " + fixed(loss[i], 2) + " | " + fixed(avg, 2) + " |\n";
            }
            write_text(dir / ("loss_" + metric + ".csv"), csv);
        }
        write_text(dir / "losses.md", md);
    }

    // Models fitted on the full dataset.
    nlohmann::ordered_json model_files = nlohmann::ordered_json::array();
    if (cfg.save_models) {
        fs::create_directories(dir / "models");
        for (std::size_t i = 0; i < g.cells.size(); ++i) {
            const auto& cell = g.cells[i];
            const auto& sampler = cfg.samplers[cell.sampler_index];
            const auto& classifier = cfg.classifiers[cell.classifier_index];
            const auto seed = derive_seed(cfg.seed, {3, i});
            if (sampler.kind == SamplerKind::clustering_rus) {
                const double threshold = sampler.threshold ? *sampler.threshold
                                                           : suggest_threshold(imbalance_ratio(d), sampler.reduction_fraction.value_or(0.0));
                const auto part = sampler.cluster_k == 0
                                      ? select_cluster_partition(d, threshold, derive_seed(seed, {0}), 10, sampler.policy)
                                      : plan_cluster_partition(d, sampler.cluster_k, threshold, derive_seed(seed, {0}), sampler.policy);
                const auto grouped = apply_clustering_rus(d, part, RusConfig{sampler.distribution_spread, derive_seed(seed, {1})});
                save_cluster_model(part.cluster_model, dir / "models" / (cell.slug + "_clusters.json"));
                model_files.push_back(cell.slug + "_clusters.json");
                const Dataset* groups[2] = {&grouped.low, &grouped.high};
                const char* suffix[2] = {"_low.json", "_high.json"};
                for (int k = 0; k < 2; ++k) {
                    if (groups[k]->empty()) continue;
                    const auto model = fit_model(*groups[k], classifier, derive_seed(seed, {2, static_cast<std::uint64_t>(k)}));
                    save_model(model, d.schema(), dir / "models" / (cell.slug + suffix[k]));
                    model_files.push_back(cell.slug + suffix[k]);
                }
            } else {
                const auto train = resample_training(d, sampler, derive_seed(seed, {1}));
                const auto model = fit_model(train, classifier, derive_seed(seed, {2}));
                save_model(model, d.schema(), dir / "models" / (cell.slug + ".json"));
                model_files.push_back(cell.slug + ".json");
            }
        }
    }

    // Manifest.
    nlohmann::ordered_json man;
    man["tool"] = "crus";
    man["version"] = kVersion;
    man["config"] = run_config_to_json(cfg);
    const auto counts = d.class_counts();
    man["dataset"] = {{"file", cfg.dataset.filename().string()},
                      {"fnv1a64", fnv1a_hex(read_bytes(cfg.dataset))},
                      {"instances", d.size()},
                      {"positives", counts.positive},
                      {"negatives", counts.negative}};
    auto seeds = nlohmann::ordered_json::array();
    for (int f = 0; f < cfg.k_folds; ++f) {
        const auto s = fold_seeds(cfg.seed, f);
        seeds.push_back({{"fold", f}, {"split", s.split}, {"sampler", s.sampler}, {"classifier", s.classifier},
                         {"cluster", s.cluster}, {"high_group", s.high_group}});
    }
    man["fold_seeds"] = seeds;
    auto cells = nlohmann::ordered_json::array();
    for (const auto& cell : g.cells) {
        nlohmann::ordered_json c{{"label", cell.label},
                                 {"file", "cells/" + cell.slug + ".csv"},
                                 {"primary_view", primary_view_name(cell.result)}};
        auto warnings = nlohmann::ordered_json::array();
        for (const auto& f : cell.result.folds)
            for (const auto& w : f.warnings) warnings.push_back("fold " + std::to_string(f.fold) + ": " + w);
        if (!warnings.empty()) c["warnings"] = warnings;
        cells.push_back(std::move(c));
    }
    man["cells"] = cells;
    if (cfg.save_models) man["models"] = model_files;
    write_text(dir / "manifest.json", man.dump(2) + "\n");
}

void replace_directory_atomically(const fs::path& target, const std::function<void(const fs::path&)>& fill) {
    const fs::path abs = fs::absolute(target).lexically_normal();
    const fs::path clean = abs.filename().empty() ? abs.parent_path() : abs;
    if (!clean.parent_path().empty()) fs::create_directories(clean.parent_path());
    fs::path staging = clean;
    staging += ".partial";
    fs::remove_all(staging);
    fs::create_directory(staging);
    try {
        fill(staging);
    } catch (...) {
        std::error_code ec;
        fs::remove_all(staging, ec);
        throw;
    }
    if (fs::exists(clean)) {
        fs::path old = clean;
        old += ".old";
        fs::remove_all(old);
        fs::rename(clean, old);
        fs::rename(staging, clean);
        fs::remove_all(old);
    } else {
        fs::rename(staging, clean);
    }
}

GridResult cmd_run(const RunConfig& cfg, Exec exec) {
    cfg.validate();
    const auto d = load_dataset(cfg.dataset, cfg.schema);
    auto g = run_grid(cfg, d, exec);
    replace_directory_atomically(cfg.output, [&](const fs::path& dir) { write_run_reports(cfg, d, g, dir); });
    return g;
}

SyntheticSummary cmd_gen_synth(const SyntheticConfig& cfg, const fs::path& out_dir) {
    const auto d = gen_synthetic(cfg);
    SyntheticSummary s;
    s.global_ir = imbalance_ratio(d);
    for (std::size_t b = 0; b < cfg.blobs.size(); ++b) {
        double pos = 0, neg = 0;
        for (const auto& x : d)
            if (x.tag == static_cast<int>(b)) (x.is_positive() ? pos : neg) += 1;
        s.blob_irs.push_back(neg / pos);
    }
    fs::create_directories(out_dir);
    s.csv = out_dir / "data.csv";
    s.schema = out_dir / "schema.json";
    write_csv(d, s.csv);
    save_schema(d.schema(), s.schema);
    return s;
}

FeatselConfig load_featsel_config(const fs::path& path) {
    if (!fs::exists(path)) throw ConfigError("config file not found: '" + path.string() + "'");
    const auto j = read_json(path);
    const auto base = path.parent_path();
    FeatselConfig c;
    try {
        c.dataset = resolve(j.at("dataset").get<std::string>(), base);
        c.schema = resolve(j.at("schema").get<std::string>(), base);
        c.max_stale = j.value("max_stale", c.max_stale);
        c.output = resolve(j.value("output", std::string("featsel")), base);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

void cmd_featsel(const FeatselConfig& cfg, Exec exec) {
    if (cfg.max_stale < 1) throw ConfigError("config: max_stale must be at least 1");
    const auto d = load_dataset(cfg.dataset, cfg.schema);
    if (d.attribute_count() == 0) throw Error("no attributes remain once the class column is removed");
    const auto ranking = gain_ratio_rank(d);
    const auto cfs = cfs_best_first(d, cfg.max_stale, exec);
    replace_directory_atomically(cfg.output, [&](const fs::path& dir) {
        std::string csv = "rank,attribute,gain_ratio\n";
        std::string md = "# Attributes ranked by information gain ratio\n\n";
        for (std::size_t i = 0; i < ranking.size(); ++i) {
            csv += std::to_string(i + 1) + "," + csv_cell(ranking[i].name) + "," + format_number(ranking[i].value) + "\n";
            md += std::to_string(i + 1) + ". " + ranking[i].name + " (" + fixed(ranking[i].value, 3) + ")\n";
        }
        write_text(dir / "ranking.csv", csv);
        write_text(dir / "ranking.md", md);

        std::string ccsv = "attribute\n";
        for (const auto& n : cfs.names) ccsv += csv_cell(n) + "\n";
        write_text(dir / "cfs.csv", ccsv);
        std::string cmd = "# Correlation-based feature subset\n\nSubsets evaluated: " + std::to_string(cfs.evaluated) +
                          "\n\nMerit of the best subset: " + fixed(cfs.merit, 4) + "\n\nSelected attributes:\n\n";
        for (const auto& n : cfs.names) cmd += "- " + n + "\n";
        write_text(dir / "cfs.md", cmd);
    });
}

std::vector<std::string> cmd_rules(const fs::path& model_file) {
    if (!fs::exists(model_file)) throw Error("model file not found: '" + model_file.string() + "'");
    return export_rules(load_model(model_file).model);
}

}  // namespace crus
