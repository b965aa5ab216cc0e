#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "crus/commands.hpp"
#include "crus/error.hpp"
#include "crus/log.hpp"
#include "crus/parallel.hpp"

namespace {

// "1000:2,1000:20" -> blobs of (size, IR)
std::vector<crus::BlobSpec> parse_blobs(const std::string& text) {
    std::vector<crus::BlobSpec> blobs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw crus::ConfigError("blob '" + item + "' is not SIZE:IR");
        try {
            const long size = std::stol(item.substr(0, colon));
            if (size < 1) throw crus::ConfigError("blob size must be positive in '" + item + "'");
            blobs.push_back({static_cast<std::size_t>(size), std::stod(item.substr(colon + 1))});
        } catch (const std::logic_error&) {
            throw crus::ConfigError("blob '" + item + "' is not SIZE:IR");
        }
    }
    return blobs;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Clustering-based random undersampling experiments for imbalanced tabular data"};
    app.require_subcommand(1);
    int jobs = 0;
    bool quiet = false;
    app.add_option("--jobs,-j", jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.add_flag("--quiet,-q", quiet, "Suppress warnings");

    auto* run = app.add_subcommand("run", "Run the sampler x classifier cross-validation grid");
    std::string run_config, run_out;
    std::uint64_t run_seed = 0;
    double alpha = 0;
    run->add_option("--config,-c", run_config, "Experiment config (JSON)")->required();
    auto* run_out_opt = run->add_option("--out,-o", run_out, "Output directory (overrides the config)");
    auto* run_seed_opt = run->add_option("--seed,-s", run_seed, "Master seed (overrides the config)");
    auto* alpha_opt = run->add_option("--alpha", alpha, "Significance level (overrides the config)");
    run->add_option("--jobs,-j", jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

    auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic imbalanced dataset");
    crus::SyntheticConfig synth;
    std::string blobs = "1000:2,1000:20", gen_config, gen_out = "synthetic";
    gen->add_option("--config,-c", gen_config, "Generator config (JSON); flags below are ignored when given");
    gen->add_option("--blobs", blobs, "Comma-separated SIZE:IR per blob")->capture_default_str();
    gen->add_option("--numeric-dims", synth.numeric_dims)->capture_default_str();
    gen->add_option("--nominal-dims", synth.nominal_dims)->capture_default_str();
    gen->add_option("--categories", synth.nominal_categories)->capture_default_str();
    gen->add_option("--noise", synth.noise)->capture_default_str();
    gen->add_option("--separation", synth.separation)->capture_default_str();
    gen->add_option("--class-shift", synth.class_shift)->capture_default_str();
    gen->add_option("--nominal-bias", synth.nominal_bias)->capture_default_str();
    gen->add_option("--seed,-s", synth.seed)->capture_default_str();
    gen->add_option("--out,-o", gen_out, "Output directory")->capture_default_str();

    auto* featsel = app.add_subcommand("featsel", "Rank attributes by gain ratio and select a CFS subset");
    std::string fs_config, fs_out;
    featsel->add_option("--config,-c", fs_config, "Feature selection config (JSON)")->required();
    auto* fs_out_opt = featsel->add_option("--out,-o", fs_out, "Output directory (overrides the config)");
    featsel->add_option("--jobs,-j", jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

    auto* rules = app.add_subcommand("rules", "Print the rules of a saved model");
    std::string model_file;
    rules->add_option("model", model_file, "Model file written by `run` with save_models")->required();

    CLI11_PARSE(app, argc, argv);
    crus::log::set_quiet(quiet);
    if (jobs > 0) crus::set_max_threads(jobs);

    try {
        if (*run) {
            auto cfg = crus::load_run_config(run_config);
            if (*run_out_opt) cfg.output = run_out;
            if (*run_seed_opt) cfg.seed = run_seed;
            if (*alpha_opt) cfg.alpha = alpha;
            const auto g = crus::cmd_run(cfg);
            std::cout << "ran " << g.cells.size() << " cells, reports in " << cfg.output.string() << "\n";
        } else if (*gen) {
            if (!gen_config.empty()) {
                std::ifstream in(gen_config);
                if (!in) throw crus::ConfigError("config file not found: '" + gen_config + "'");
                synth = nlohmann::json::parse(in).get<crus::SyntheticConfig>();
            } else {
                synth.blobs = parse_blobs(blobs);
            }
            const auto s = crus::cmd_gen_synth(synth, gen_out);
            std::printf("global IR %.4f\n", s.global_ir);
            for (std::size_t b = 0; b < s.blob_irs.size(); ++b) std::printf("blob %zu IR %.4f\n", b, s.blob_irs[b]);
            std::cout << "wrote " << s.csv.string() << " and " << s.schema.string() << "\n";
        } else if (*featsel) {
            auto cfg = crus::load_featsel_config(fs_config);
            if (*fs_out_opt) cfg.output = fs_out;
            crus::cmd_featsel(cfg);
            std::cout << "wrote ranking and CFS reports to " << cfg.output.string() << "\n";
        } else if (*rules) {
            for (const auto& line : crus::cmd_rules(model_file)) std::cout << line << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
