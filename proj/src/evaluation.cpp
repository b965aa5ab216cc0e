#include "crus/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "crus/error.hpp"
#include "crus/log.hpp"
#include "crus/random.hpp"

namespace crus {

namespace {

constexpr std::pair<SamplerKind, const char*> kSamplerKeys[] = {
    {SamplerKind::none, "none"},
    {SamplerKind::rus, "rus"},
    {SamplerKind::smote, "smote"},
    {SamplerKind::clustering_rus, "clustering_rus"},
};

std::vector<ClassLabel> labels_of(std::span<const InstanceRecord> records, bool truth) {
    std::vector<ClassLabel> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(truth ? r.truth : r.predicted);
    return out;
}

MetricsReport metrics_of(std::span<const InstanceRecord> records) {
    std::vector<double> scores;
    scores.reserve(records.size());
    for (const auto& r : records) scores.push_back(r.score);
    return compute_metrics(labels_of(records, true), labels_of(records, false), scores);
}

std::vector<std::size_t> origins_of(const Dataset& d) {
    std::vector<std::size_t> out;
    out.reserve(d.size());
    for (const auto& x : d) out.push_back(x.origin);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::size_t synthetic_count(const Dataset& d) {
    return static_cast<std::size_t>(std::count_if(d.begin(), d.end(), [](const Instance& x) { return x.synthetic; }));
}

void check_spec(const Dataset& d, const ExperimentSpec& spec) {
    spec.sampler.validate();
    spec.classifier.validate();
    if (spec.k_folds < 2) throw ConfigError("k_folds must be at least 2");
    if (d.empty()) throw Error("cross-validation: empty dataset");
}

void finish(CvResult& out) {
    std::vector<InstanceRecord> all;
    std::vector<MetricsReport> per_fold;
    for (const auto& f : out.folds) {
        all.insert(all.end(), f.records.begin(), f.records.end());
        per_fold.push_back(f.metrics);
    }
    out.pooled = metrics_of(all);
    out.fold_mean = mean_report(per_fold);
}

}  // namespace

std::string to_string(SamplerKind k) {
    for (const auto& [kind, key] : kSamplerKeys)
        if (kind == k) return key;
    return "?";
}

SamplerKind parse_sampler_kind(const std::string& s) {
    for (const auto& [kind, key] : kSamplerKeys)
        if (s == key) return kind;
    throw ConfigError("unknown sampler type '" + s + "'");
}

std::string SamplerSpec::display_name() const {
    if (!name.empty()) return name;
    switch (kind) {
        case SamplerKind::none: return "None";
        case SamplerKind::rus: return "RUS";
        case SamplerKind::smote: return "SMOTE " + std::to_string(smote_percentage) + "%";
        case SamplerKind::clustering_rus: return "Clustering-RUS";
    }
    return "?";
}

void SamplerSpec::validate() const {
    if (!(distribution_spread > 0)) throw ConfigError("sampler: distribution_spread must be positive");
    if (smote_percentage < 0) throw ConfigError("sampler: SMOTE percentage must be non-negative");
    if (smote_k < 1) throw ConfigError("sampler: SMOTE k must be at least 1");
    if (kind != SamplerKind::clustering_rus) return;
    if (cluster_k == 1 || cluster_k < 0) throw ConfigError("sampler: cluster_k must be 0 (automatic) or at least 2");
    if (threshold && reduction_fraction) throw ConfigError("sampler: give either threshold or reduction_fraction");
    if (threshold && !(*threshold > 0)) throw ConfigError("sampler: threshold must be positive");
    if (reduction_fraction && !(*reduction_fraction >= 0 && *reduction_fraction < 1))
        throw ConfigError("sampler: reduction_fraction must lie in [0, 1)");
}

void to_json(nlohmann::json& j, const SamplerSpec& s) {
    j = nlohmann::json{{"type", to_string(s.kind)}};
    if (!s.name.empty()) j["name"] = s.name;
    switch (s.kind) {
        case SamplerKind::none: break;
        case SamplerKind::rus: j["spread"] = s.distribution_spread; break;
        case SamplerKind::smote:
            j["percentage"] = s.smote_percentage;
            j["k"] = s.smote_k;
            break;
        case SamplerKind::clustering_rus:
            j["spread"] = s.distribution_spread;
            j["clusters"] = s.cluster_k;
            if (s.threshold) j["threshold"] = *s.threshold;
            if (s.reduction_fraction) j["reduction_fraction"] = *s.reduction_fraction;
            j["policy"] = s.policy == UndersamplePolicy::exceed ? "exceed" : "invert";
            break;
    }
}

void from_json(const nlohmann::json& j, SamplerSpec& s) {
    s = SamplerSpec{};
    s.kind = parse_sampler_kind(j.at("type").get<std::string>());
    s.name = j.value("name", std::string());
    s.distribution_spread = j.value("spread", s.distribution_spread);
    s.smote_percentage = j.value("percentage", s.smote_percentage);
    s.smote_k = j.value("k", s.smote_k);
    s.cluster_k = j.value("clusters", s.cluster_k);
    if (j.contains("threshold")) s.threshold = j.at("threshold").get<double>();
    if (j.contains("reduction_fraction")) s.reduction_fraction = j.at("reduction_fraction").get<double>();
    const auto policy = j.value("policy", std::string("exceed"));
    if (policy == "invert") s.policy = UndersamplePolicy::invert;
    else if (policy != "exceed") throw ConfigError("sampler: policy must be 'exceed' or 'invert'");
    s.validate();
}

FoldSeeds fold_seeds(std::uint64_t seed, int fold) {
    const auto f = static_cast<std::uint64_t>(fold);
    return {derive_seed(seed, {1}), derive_seed(seed, {2, f, 0}), derive_seed(seed, {2, f, 1}),
            derive_seed(seed, {2, f, 2}), derive_seed(seed, {2, f, 3})};
}

std::string to_string(PartitionTag t) {
    switch (t) {
        case PartitionTag::none: return "n/a";
        case PartitionTag::low_ir: return "low_ir";
        case PartitionTag::high_ir: return "high_ir";
    }
    return "?";
}

Dataset resample_training(const Dataset& train, const SamplerSpec& sampler, std::uint64_t seed) {
    Dataset out;
    switch (sampler.kind) {
        case SamplerKind::none: out = train; break;
        case SamplerKind::rus: out = rus_undersample(train, RusConfig{sampler.distribution_spread, seed}); break;
        case SamplerKind::smote:
            out = smote_oversample(train, SmoteConfig{sampler.smote_percentage, sampler.smote_k, seed});
            break;
        case SamplerKind::clustering_rus:
            throw Error("resample_training: clustering-RUS needs the clustered pipeline");
    }
    if (train.class_counts().positive > 0 && out.class_counts().positive == 0)
        throw Error("resampling removed every minority instance");
    return out;
}

CvResult run_cv(const Dataset& d, const ExperimentSpec& spec, Exec exec) {
    if (spec.sampler.kind == SamplerKind::clustering_rus) return run_cv_clustered(d, spec, exec);
    check_spec(d, spec);
    const auto split = stratified_kfold(d, spec.k_folds, fold_seeds(spec.seed, 0).split);

    CvResult out;
    out.folds.resize(static_cast<std::size_t>(spec.k_folds));
    parallel_for(out.folds.size(), exec, [&](std::size_t fi) {
        const int f = static_cast<int>(fi);
        const auto seeds = fold_seeds(spec.seed, f);
        const auto test_idx = split.test_indices(f);
        const auto train_idx = split.train_indices(f);
        const Dataset train = resample_training(d.subset(train_idx), spec.sampler, seeds.sampler);
        const Model model = fit_model(train, spec.classifier, seeds.classifier, exec);

        FoldResult& r = out.folds[fi];
        r.fold = f;
        r.test_count = test_idx.size();
        r.train_count = train.size();
        r.synthetic_train_count = synthetic_count(train);
        r.train_origins = origins_of(train);
        r.records.reserve(test_idx.size());
        for (auto i : test_idx) {
            const auto p = model.predict(d[i]);
            r.records.push_back({i, d[i].label, p.label, p.p_positive, d[i].synthetic, PartitionTag::none});
        }
        r.metrics = metrics_of(r.records);
    });
    finish(out);
    return out;
}

CvResult run_cv_clustered(const Dataset& d, const ExperimentSpec& spec, Exec exec) {
    check_spec(d, spec);
    if (spec.sampler.kind != SamplerKind::clustering_rus) throw Error("run_cv_clustered: sampler is not clustering_rus");
    const auto& sp = spec.sampler;
    const auto split = stratified_kfold(d, spec.k_folds, fold_seeds(spec.seed, 0).split);

    CvResult out;
    out.folds.resize(static_cast<std::size_t>(spec.k_folds));
    parallel_for(out.folds.size(), exec, [&](std::size_t fi) {
        const int f = static_cast<int>(fi);
        const auto seeds = fold_seeds(spec.seed, f);
        const auto test_idx = split.test_indices(f);
        const Dataset train = d.subset(split.train_indices(f));
        FoldResult& r = out.folds[fi];
        r.fold = f;

        const double threshold =
            sp.threshold ? *sp.threshold
                         : suggest_threshold(imbalance_ratio(train), sp.reduction_fraction.value_or(0.0));
        ClusterPartition part;
        try {
            part = sp.cluster_k == 0 ? select_cluster_partition(train, threshold, seeds.cluster, 10, sp.policy)
                                     : plan_cluster_partition(train, sp.cluster_k, threshold, seeds.cluster, sp.policy);
        } catch (const Error& e) {
            throw Error("fold " + std::to_string(f) + ": " + e.what());
        }
        auto grouped = apply_clustering_rus(train, part, RusConfig{sp.distribution_spread, seeds.sampler});
        r.warnings = part.warnings;
        r.warnings.insert(r.warnings.end(), grouped.warnings.begin(), grouped.warnings.end());

        const Dataset* material[2] = {&grouped.low, &grouped.high};
        const std::uint64_t group_seed[2] = {seeds.classifier, seeds.high_group};
        std::optional<Model> models[2];
        for (int g = 0; g < 2; ++g)
            if (!material[g]->empty()) models[g] = fit_model(*material[g], spec.classifier, group_seed[g], exec);
        for (int g = 0; g < 2; ++g) {
            if (models[g] || !models[1 - g]) continue;
            const std::string msg = std::string(g == 0 ? "low" : "high") +
                                    "-IR group has no training data; its test instances use the other group's model";
            r.warnings.push_back(msg);
            log::warn("fold " + std::to_string(f) + ": " + msg);
        }
        if (!models[0] && !models[1]) throw Error("fold " + std::to_string(f) + ": no training data in either group");

        r.test_count = test_idx.size();
        r.train_count = grouped.low.size() + grouped.high.size();
        r.synthetic_train_count = synthetic_count(grouped.low) + synthetic_count(grouped.high);
        r.train_origins = origins_of(grouped.low);
        {
            const auto high = origins_of(grouped.high);
            std::vector<std::size_t> merged;
            std::set_union(r.train_origins.begin(), r.train_origins.end(), high.begin(), high.end(),
                           std::back_inserter(merged));
            r.train_origins = std::move(merged);
        }

        std::vector<InstanceRecord> by_group[2];
        r.records.reserve(test_idx.size());
        for (auto i : test_idx) {
            const auto g = static_cast<int>(part.route(d[i]));
            const Model& m = models[g] ? *models[g] : *models[1 - g];
            const auto p = m.predict(d[i]);
            r.records.push_back({i, d[i].label, p.label, p.p_positive, d[i].synthetic, static_cast<PartitionTag>(g)});
            by_group[g].push_back(r.records.back());
        }

        std::vector<MetricsReport> reports;
        std::vector<double> weights;
        for (int g = 0; g < 2; ++g) {
            GroupResult gr;
            gr.partition = static_cast<PartitionTag>(g);
            gr.train_count = material[g]->size();
            gr.test_count = by_group[g].size();
            if (!by_group[g].empty()) {
                gr.metrics = metrics_of(by_group[g]);
                reports.push_back(*gr.metrics);
                weights.push_back(static_cast<double>(gr.test_count));
            }
            r.groups.push_back(std::move(gr));
        }
        r.metrics = weighted_mean_report(reports, weights);
        // AUC of the fold comes from its pooled scores, not from the group mix.
        r.metrics.auc = metrics_of(r.records).auc;
    });
    finish(out);

    std::vector<MetricsReport> reports;
    std::vector<double> weights;
    for (int g = 0; g < 2; ++g) {
        std::vector<InstanceRecord> recs;
        GroupResult gr;
        gr.partition = static_cast<PartitionTag>(g);
        for (const auto& f : out.folds) {
            gr.train_count += f.groups[static_cast<std::size_t>(g)].train_count;
            for (const auto& rec : f.records)
                if (rec.partition == gr.partition) recs.push_back(rec);
        }
        gr.test_count = recs.size();
        if (!recs.empty()) {
            gr.metrics = metrics_of(recs);
            reports.push_back(*gr.metrics);
            weights.push_back(static_cast<double>(gr.test_count));
        }
        out.groups.push_back(std::move(gr));
    }
    out.group_weighted = weighted_mean_report(reports, weights);
    out.group_weighted->auc = out.pooled.auc;
    return out;
}

void SyntheticConfig::validate() const {
    if (blobs.empty()) throw ConfigError("synthetic: at least one blob is required");
    for (const auto& b : blobs) {
        if (b.size < 2) throw ConfigError("synthetic: blob size must be at least 2");
        if (!(b.imbalance_ratio > 0) || !std::isfinite(b.imbalance_ratio))
            throw ConfigError("synthetic: blob imbalance ratio must be positive and finite");
    }
    if (numeric_dims < 1) throw ConfigError("synthetic: numeric_dims must be at least 1");
    if (nominal_dims < 0) throw ConfigError("synthetic: nominal_dims must be non-negative");
    if (nominal_dims > 0 && nominal_categories < 2) throw ConfigError("synthetic: nominal_categories must be >= 2");
    if (!(noise >= 0) || !(separation >= 0) || !(class_shift >= 0))
        throw ConfigError("synthetic: noise, separation and class_shift must be non-negative");
    if (!(nominal_bias >= 0 && nominal_bias <= 1)) throw ConfigError("synthetic: nominal_bias must lie in [0, 1]");
}

void to_json(nlohmann::json& j, const SyntheticConfig& c) {
    auto blobs = nlohmann::json::array();
    for (const auto& b : c.blobs) blobs.push_back({{"size", b.size}, {"ir", b.imbalance_ratio}});
    j = nlohmann::json{{"blobs", blobs},          {"numeric_dims", c.numeric_dims},
                       {"nominal_dims", c.nominal_dims}, {"nominal_categories", c.nominal_categories},
                       {"noise", c.noise},        {"separation", c.separation},
                       {"class_shift", c.class_shift},   {"nominal_bias", c.nominal_bias},
                       {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, SyntheticConfig& c) {
    c = SyntheticConfig{};
    for (const auto& b : j.at("blobs")) c.blobs.push_back({b.at("size").get<std::size_t>(), b.at("ir").get<double>()});
    c.numeric_dims = j.value("numeric_dims", c.numeric_dims);
    c.nominal_dims = j.value("nominal_dims", c.nominal_dims);
    c.nominal_categories = j.value("nominal_categories", c.nominal_categories);
    c.noise = j.value("noise", c.noise);
    c.separation = j.value("separation", c.separation);
    c.class_shift = j.value("class_shift", c.class_shift);
    c.nominal_bias = j.value("nominal_bias", c.nominal_bias);
    c.seed = j.value("seed", c.seed);
    c.validate();
}

Dataset gen_synthetic(const SyntheticConfig& cfg) {
    cfg.validate();
    auto schema = std::make_shared<Schema>();
    for (int a = 0; a < cfg.numeric_dims; ++a) schema->attributes.push_back({"x" + std::to_string(a), AttributeKind::numeric, {}});
    std::vector<std::string> cats;
    for (int c = 0; c < cfg.nominal_categories; ++c) cats.push_back(std::string(1, static_cast<char>('a' + c % 26)) + (c >= 26 ? std::to_string(c) : ""));
    for (int a = 0; a < cfg.nominal_dims; ++a) schema->attributes.push_back({"c" + std::to_string(a), AttributeKind::nominal, cats});
    schema->class_column = "class";
    schema->positive_label = "pos";
    schema->negative_label = "neg";
    schema->validate();

    Rng rng(derive_seed(cfg.seed, {0x5e17}));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto dims = static_cast<std::size_t>(cfg.numeric_dims);
    const auto n_cat = static_cast<std::size_t>(cfg.nominal_categories);

    std::vector<Instance> rows;
    for (std::size_t b = 0; b < cfg.blobs.size(); ++b) {
        const auto& blob = cfg.blobs[b];
        // Random unit direction separating the blob's classes.
        std::vector<double> dir(dims);
        double norm = 0.0;
        do {
            norm = 0.0;
            for (auto& v : dir) {
                v = gauss(rng);
                norm += v * v;
            }
        } while (norm < 1e-12);
        norm = std::sqrt(norm);
        for (auto& v : dir) v /= norm;

        auto positives = static_cast<std::size_t>(std::llround(static_cast<double>(blob.size) / (1 + blob.imbalance_ratio)));
        positives = std::clamp<std::size_t>(positives, 1, blob.size - 1);
        for (std::size_t i = 0; i < blob.size; ++i) {
            Instance x;
            x.label = i < positives ? ClassLabel::positive : ClassLabel::negative;
            x.tag = static_cast<int>(b);
            const double shift = x.is_positive() ? cfg.class_shift / 2 : -cfg.class_shift / 2;
            for (std::size_t a = 0; a < dims; ++a) {
                const double centre = a == 0 ? cfg.separation * static_cast<double>(b) : 0.0;
                x.values.push_back(centre + shift * dir[a] + cfg.noise * gauss(rng));
            }
            const std::size_t favoured = x.is_positive() ? 0 : 1 % n_cat;
            for (int a = 0; a < cfg.nominal_dims; ++a) {
                const std::size_t v = uniform_unit(rng) < cfg.nominal_bias ? favoured : uniform_index(rng, n_cat);
                x.values.push_back(static_cast<double>(v));
            }
            rows.push_back(std::move(x));
        }
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].origin = i;
    return Dataset(schema, std::move(rows));
}

}  // namespace crus
