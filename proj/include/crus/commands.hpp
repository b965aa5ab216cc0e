#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crus/dataset.hpp"
#include "crus/ensemble.hpp"
#include "crus/evaluation.hpp"
#include "crus/stats.hpp"

namespace crus {

/// Experiment grid file (JSON). Relative paths are resolved against the
/// config file's directory.
///   { "dataset": "icu.csv", "schema": "icu.schema.json",
///     "samplers":    [ {"type": "none"}, {"type": "rus", "spread": 4},
///                      {"type": "smote", "percentage": 100},
///                      {"type": "clustering_rus", "clusters": 2, "threshold": 10} ],
///     "classifiers": [ {"type": "j48"}, {"type": "random_forest", "n_members": 100},
///                      {"type": "bagging", "base": {"type": "random_tree"}} ],
///     "k_folds": 10, "seed": 1,
///     "metrics": ["accuracy", "op", "g_mean", "auc"],
///     "loss_metrics": ["op", "g_mean"],
///     "comparison": {"alpha": 0.05, "blocks": "folds"},
///     "output": "results", "save_models": false }
struct RunConfig {
    std::filesystem::path dataset;
    std::filesystem::path schema;
    std::vector<SamplerSpec> samplers;
    std::vector<ClassifierSpec> classifiers;
    int k_folds = 10;
    std::uint64_t seed = 1;
    /// Metrics compared with Friedman / Wilcoxon-Holm.
    std::vector<std::string> metrics{"accuracy", "op", "g_mean", "auc"};
    /// Metrics paired with accuracy in the loss-versus-best tables.
    std::vector<std::string> loss_metrics{"op", "g_mean"};
    double alpha = 0.05;
    std::string blocks = "folds";
    std::filesystem::path output = "results";
    bool save_models = false;

    /// Throws ConfigError for an empty grid, unknown metrics, missing files.
    void validate() const;
};

RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
nlohmann::ordered_json run_config_to_json(const RunConfig& c);
RunConfig load_run_config(const std::filesystem::path& path);

/// Value of a metrics_columns() entry.
double metric_value(const MetricsReport& r, const std::string& metric);

struct GridCell {
    std::size_t sampler_index = 0;
    std::size_t classifier_index = 0;
    std::string label;  // "Classifier + Sampler", unique within the grid
    std::string slug;   // file-name stem
    CvResult result;
};

struct GridResult {
    std::vector<GridCell> cells;  // sampler-major order
};

/// Runs every (sampler, classifier) cell; cells run concurrently.
GridResult run_grid(const RunConfig& cfg, const Dataset& d, Exec exec = Exec::parallel);

/// Score matrix of fold-level values for one metric (blocks = folds).
ScoreMatrix fold_score_matrix(const GridResult& g, const std::string& metric);

/// Writes every report into `dir` (which must exist).
void write_run_reports(const RunConfig& cfg, const Dataset& d, const GridResult& g, const std::filesystem::path& dir);

/// Loads data, runs the grid and writes the reports into cfg.output, which
/// is replaced as a whole only once every file has been written.
GridResult cmd_run(const RunConfig& cfg, Exec exec = Exec::parallel);

struct SyntheticSummary {
    double global_ir = 0.0;
    std::vector<double> blob_irs;
    std::filesystem::path csv;
    std::filesystem::path schema;
};

/// Writes data.csv and schema.json into out_dir.
SyntheticSummary cmd_gen_synth(const SyntheticConfig& cfg, const std::filesystem::path& out_dir);

///   { "dataset": "...", "schema": "...", "max_stale": 5, "output": "featsel" }
struct FeatselConfig {
    std::filesystem::path dataset;
    std::filesystem::path schema;
    int max_stale = 5;
    std::filesystem::path output = "featsel";
};

FeatselConfig load_featsel_config(const std::filesystem::path& path);
/// Writes ranking.csv, ranking.md, cfs.csv and cfs.md into cfg.output.
void cmd_featsel(const FeatselConfig& cfg, Exec exec = Exec::parallel);

std::vector<std::string> cmd_rules(const std::filesystem::path& model_file);

/// Builds into a sibling directory, then swaps it into place.
void replace_directory_atomically(const std::filesystem::path& target,
                                  const std::function<void(const std::filesystem::path&)>& fill);

}  // namespace crus
