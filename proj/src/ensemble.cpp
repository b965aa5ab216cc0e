#include "crus/ensemble.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>

#include "crus/error.hpp"
#include "crus/random.hpp"

namespace crus {

namespace {

constexpr double kPerfectMemberWeight = 23.025850929940457;  // log(1e10)

struct KindName {
    LearnerKind kind;
    const char* key;
    const char* display;
};

constexpr KindName kKinds[] = {
    {LearnerKind::j48, "j48", "J48"},
    {LearnerKind::random_tree, "random_tree", "Random Tree"},
    {LearnerKind::random_forest, "random_forest", "Random Forest"},
    {LearnerKind::bagging, "bagging", "Bagging"},
    {LearnerKind::adaboost, "adaboost", "AdaBoost"},
    {LearnerKind::random_committee, "random_committee", "Random Committee"},
};

const KindName& kind_name(LearnerKind k) {
    for (const auto& kn : kKinds)
        if (kn.kind == k) return kn;
    throw Error("unknown learner kind");
}

bool is_meta(LearnerKind k) {
    return k == LearnerKind::bagging || k == LearnerKind::adaboost || k == LearnerKind::random_committee;
}

const char* method_key(EnsembleMethod m) {
    switch (m) {
        case EnsembleMethod::bagging: return "bagging";
        case EnsembleMethod::adaboost: return "adaboost";
        case EnsembleMethod::random_forest: return "random_forest";
        case EnsembleMethod::random_committee: return "random_committee";
    }
    return "?";
}

EnsembleMethod parse_method(const std::string& s) {
    for (auto m : {EnsembleMethod::bagging, EnsembleMethod::adaboost, EnsembleMethod::random_forest,
                   EnsembleMethod::random_committee})
        if (s == method_key(m)) return m;
    throw Error("unknown ensemble method '" + s + "'");
}

int subspace_for(const ClassifierSpec& spec, std::size_t n_features) {
    if (spec.subspace_size) return std::clamp(*spec.subspace_size, 1, static_cast<int>(n_features));
    return default_subspace_size(static_cast<int>(n_features), spec.subspace_rule);
}

void check_weights(const Dataset& train, std::span<const double> weights) {
    if (train.empty()) throw Error("fit: empty training set");
    if (weights.size() != train.size()) throw Error("fit: weight count differs from instance count");
}

// Fits one bagged member per bootstrap; shared by bagging and random forest.
EnsembleModel fit_bootstrap_ensemble(const Dataset& train, std::span<const double> weights, int n_members,
                                     std::uint64_t seed, Exec exec,
                                     const std::function<Model(std::span<const double>, std::uint64_t)>& fit_member) {
    check_weights(train, weights);
    if (n_members < 1) throw Error("ensemble: n_members must be at least 1");
    const std::size_t n = train.size();
    const auto members = static_cast<std::size_t>(n_members);
    std::vector<std::vector<double>> counts(members);
    std::vector<Model> fitted(members);
    // -1: in bag, otherwise the member's predicted class for an out-of-bag instance.
    std::vector<std::vector<std::int8_t>> oob(members);

    parallel_for(members, exec, [&](std::size_t i) {
        counts[i] = bootstrap_counts(n, derive_seed(seed, {i, 1}));
        std::vector<double> w(n);
        for (std::size_t j = 0; j < n; ++j) w[j] = counts[i][j] * weights[j];
        fitted[i] = fit_member(w, derive_seed(seed, {i, 2}));
        oob[i].assign(n, -1);
        for (std::size_t j = 0; j < n; ++j)
            if (counts[i][j] == 0 && weights[j] > 0)
                oob[i][j] = static_cast<std::int8_t>(fitted[i].predict(train[j]).label);
    });

    EnsembleModel m;
    m.members = std::move(fitted);
    m.member_weights.assign(members, 1.0);

    std::size_t active = 0, covered = 0, wrong = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (!(weights[j] > 0)) continue;
        ++active;
        std::array<int, 2> votes{};
        for (std::size_t i = 0; i < members; ++i)
            if (oob[i][j] >= 0) ++votes[static_cast<std::size_t>(oob[i][j])];
        if (votes[0] + votes[1] == 0) continue;
        ++covered;
        const auto predicted = votes[1] > votes[0] ? ClassLabel::positive : ClassLabel::negative;
        if (predicted != train[j].label) ++wrong;
    }
    m.oob_coverage = active ? static_cast<double>(covered) / static_cast<double>(active) : 0.0;
    if (covered > 0) m.oob_error = static_cast<double>(wrong) / static_cast<double>(covered);
    return m;
}

}  // namespace

std::string to_string(LearnerKind k) { return kind_name(k).key; }

LearnerKind parse_learner_kind(const std::string& s) {
    for (const auto& kn : kKinds)
        if (s == kn.key) return kn.kind;
    throw ConfigError("unknown classifier type '" + s + "'");
}

int ClassifierSpec::members_or_default() const noexcept {
    if (n_members > 0) return n_members;
    return kind == LearnerKind::random_forest ? 100 : 10;
}

const ClassifierSpec& ClassifierSpec::base_spec() const {
    static const ClassifierSpec default_base = ClassifierSpec::j48();
    return base.empty() ? default_base : base.front();
}

std::string ClassifierSpec::display_name() const {
    std::string name = kind_name(kind).display;
    if (is_meta(kind)) name += "-" + base_spec().display_name();
    return name;
}

void ClassifierSpec::validate() const {
    tree.validate();
    if (n_members < 0) throw ConfigError("classifier: n_members must be non-negative");
    if (subspace_size && *subspace_size < 1) throw ConfigError("classifier: subspace_size must be >= 1");
    if (base.size() > 1) throw ConfigError("classifier: a meta learner takes exactly one base");
    if (!base.empty() && !is_meta(kind))
        throw ConfigError("classifier: '" + to_string(kind) + "' does not take a base learner");
    for (const auto& b : base) b.validate();
}

ClassifierSpec ClassifierSpec::j48() { return ClassifierSpec{}; }

ClassifierSpec ClassifierSpec::random_tree() {
    ClassifierSpec s;
    s.kind = LearnerKind::random_tree;
    return s;
}

ClassifierSpec ClassifierSpec::random_forest(int n_members) {
    ClassifierSpec s;
    s.kind = LearnerKind::random_forest;
    s.n_members = n_members;
    return s;
}

ClassifierSpec ClassifierSpec::meta(LearnerKind kind, ClassifierSpec base, int n_members) {
    ClassifierSpec s;
    s.kind = kind;
    s.n_members = n_members;
    s.base.push_back(std::move(base));
    return s;
}

void to_json(nlohmann::json& j, const ClassifierSpec& s) {
    j = nlohmann::json{{"type", to_string(s.kind)}};
    if (s.n_members > 0) j["n_members"] = s.n_members;
    if (s.kind == LearnerKind::j48) {
        j["min_leaf"] = s.tree.min_leaf_weight;
        j["pruning"] = s.tree.use_pruning;
        j["confidence"] = s.tree.confidence_factor;
    }
    if (s.kind == LearnerKind::random_tree || s.kind == LearnerKind::random_forest) {
        if (s.subspace_size) j["subspace_size"] = *s.subspace_size;
        j["subspace_rule"] = s.subspace_rule == SubspaceRule::floor_log2_plus_1 ? "floor" : "ceil";
    }
    if (!s.base.empty()) j["base"] = s.base.front();
}

void from_json(const nlohmann::json& j, ClassifierSpec& s) {
    s = ClassifierSpec{};
    s.kind = parse_learner_kind(j.at("type").get<std::string>());
    s.n_members = j.value("n_members", 0);
    s.tree.min_leaf_weight = j.value("min_leaf", s.tree.min_leaf_weight);
    s.tree.use_pruning = j.value("pruning", s.tree.use_pruning);
    s.tree.confidence_factor = j.value("confidence", s.tree.confidence_factor);
    if (j.contains("subspace_size")) s.subspace_size = j.at("subspace_size").get<int>();
    if (auto rule = j.value("subspace_rule", std::string("floor")); rule == "ceil")
        s.subspace_rule = SubspaceRule::ceil_log2_plus_1;
    else if (rule != "floor")
        throw ConfigError("subspace_rule must be 'floor' or 'ceil'");
    if (j.contains("base")) s.base.push_back(j.at("base").get<ClassifierSpec>());
    s.validate();
}

EnsembleModel::EnsembleModel() = default;
EnsembleModel::EnsembleModel(const EnsembleModel&) = default;
EnsembleModel::EnsembleModel(EnsembleModel&&) noexcept = default;
EnsembleModel& EnsembleModel::operator=(const EnsembleModel&) = default;
EnsembleModel& EnsembleModel::operator=(EnsembleModel&&) noexcept = default;
EnsembleModel::~EnsembleModel() = default;

Prediction EnsembleModel::predict(const Instance& x) const {
    Prediction p;
    if (members.empty()) throw Error("ensemble has no members");
    if (method == EnsembleMethod::random_committee) {
        double sum = 0.0;
        for (const auto& m : members) sum += m.predict(x).p_positive;
        p.p_positive = sum / static_cast<double>(members.size());
        p.label = p.p_positive > 0.5 ? ClassLabel::positive : ClassLabel::negative;
        return p;
    }
    std::array<double, 2> totals{};
    for (std::size_t i = 0; i < members.size(); ++i)
        totals[class_index(members[i].predict(x).label)] += member_weights[i];
    const double total = totals[0] + totals[1];
    p.p_positive = total > 0 ? totals[1] / total : 0.0;
    p.label = majority_label(totals);
    return p;
}

Prediction Model::predict(const Instance& x) const {
    return std::visit([&](const auto& m) { return m.predict(x); }, impl_);
}

ClassLabel majority_vote(std::span<const ClassLabel> votes, std::span<const double> weights) {
    if (votes.empty()) throw Error("majority_vote: no votes");
    if (votes.size() != weights.size()) throw Error("majority_vote: votes and weights differ in length");
    std::array<double, 2> totals{};
    for (std::size_t i = 0; i < votes.size(); ++i) totals[class_index(votes[i])] += weights[i];
    return majority_label(totals);
}

double theoretical_ensemble_accuracy(int L, double p) {
    if (L < 1 || L % 2 == 0) throw Error("ensemble accuracy: L must be a positive odd integer");
    if (p < 0 || p > 1) throw Error("ensemble accuracy: p must lie in [0, 1]");
    double total = 0.0;
    double binom = 1.0;  // C(L, m), built up from m = 0
    for (int m = 0; m <= L; ++m) {
        if (m > 0) binom = binom * (L - m + 1) / m;
        if (m >= L / 2 + 1) total += binom * std::pow(p, m) * std::pow(1 - p, L - m);
    }
    return total;
}

std::vector<double> bootstrap_counts(std::size_t n, std::uint64_t seed) {
    std::vector<double> counts(n, 0.0);
    if (n == 0) return counts;
    Rng rng(derive_seed(seed, {0xb007}));
    for (std::size_t i = 0; i < n; ++i) counts[uniform_index(rng, n)] += 1.0;
    return counts;
}

EnsembleModel fit_bagging(const Dataset& train, std::span<const double> weights, const ClassifierSpec& base,
                          int n_members, std::uint64_t seed, Exec exec) {
    auto m = fit_bootstrap_ensemble(train, weights, n_members, seed, exec,
                                    [&](std::span<const double> w, std::uint64_t s) {
                                        return fit_model(train, w, base, s, Exec::serial);
                                    });
    m.method = EnsembleMethod::bagging;
    return m;
}

EnsembleModel fit_random_forest(const Dataset& train, std::span<const double> weights, const ClassifierSpec& spec,
                                std::uint64_t seed, Exec exec) {
    const int m_features = subspace_for(spec, train.attribute_count());
    auto m = fit_bootstrap_ensemble(train, weights, spec.members_or_default(), seed, exec,
                                    [&](std::span<const double> w, std::uint64_t s) {
                                        return Model(fit_tree(train, w, TreeConfig::random_tree(m_features, s)));
                                    });
    m.method = EnsembleMethod::random_forest;
    return m;
}

EnsembleModel fit_adaboost(const Dataset& train, std::span<const double> weights, const ClassifierSpec& base,
                           int n_members, std::uint64_t seed, Exec exec) {
    check_weights(train, weights);
    if (n_members < 1) throw Error("adaboost: n_members must be at least 1");
    const std::size_t n = train.size();
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0)) throw Error("adaboost: total instance weight is zero");
    const auto active = static_cast<double>(std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0; }));

    std::vector<double> initial(n), dist(n);
    for (std::size_t j = 0; j < n; ++j) initial[j] = dist[j] = weights[j] / total;

    EnsembleModel ens;
    ens.method = EnsembleMethod::adaboost;
    std::vector<std::array<double, 2>> vote_totals(n, std::array<double, 2>{});
    for (int t = 0; t < n_members; ++t) {
        std::vector<double> scaled(n);
        for (std::size_t j = 0; j < n; ++j) scaled[j] = dist[j] * active;
        Model member = fit_model(train, scaled, base, derive_seed(seed, {static_cast<std::uint64_t>(t)}), exec);
        std::vector<bool> wrong(n, false);
        double eps = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (!(dist[j] > 0)) continue;
            wrong[j] = member.predict(train[j]).label != train[j].label;
            if (wrong[j]) eps += dist[j];
        }

        BoostRound round;
        round.error = eps;
        if (eps >= 0.5) {
            if (t > 0) break;
            round.member_weight = 1.0;  // nothing better available: keep the lone member
        } else if (eps == 0.0) {
            round.member_weight = kPerfectMemberWeight;
        } else {
            round.beta = eps / (1 - eps);
            round.member_weight = std::log(1 / round.beta);
            double norm = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (!wrong[j]) dist[j] *= round.beta;
                norm += dist[j];
            }
            for (auto& d : dist) d /= norm;
        }
        round.weights_after = dist;

        double ens_error = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const auto vote = wrong[j] ? (train[j].is_positive() ? ClassLabel::negative : ClassLabel::positive)
                                       : train[j].label;
            vote_totals[j][class_index(vote)] += round.member_weight;
            if (majority_label(vote_totals[j]) != train[j].label) ens_error += initial[j];
        }
        round.ensemble_error = ens_error;

        ens.members.push_back(std::move(member));
        ens.member_weights.push_back(round.member_weight);
        const bool stop = eps >= 0.5 || eps == 0.0;
        ens.boost_trace.push_back(std::move(round));
        if (stop) break;
    }
    return ens;
}

EnsembleModel fit_random_committee(const Dataset& train, std::span<const double> weights, const ClassifierSpec& base,
                                   int n_members, std::uint64_t seed, Exec exec) {
    check_weights(train, weights);
    if (n_members < 1) throw Error("random committee: n_members must be at least 1");
    EnsembleModel m;
    m.method = EnsembleMethod::random_committee;
    m.members.resize(static_cast<std::size_t>(n_members));
    m.member_weights.assign(static_cast<std::size_t>(n_members), 1.0);
    parallel_for(m.members.size(), exec, [&](std::size_t i) {
        m.members[i] = fit_model(train, weights, base, seed + i, Exec::serial);
    });
    return m;
}

Model fit_model(const Dataset& train, const ClassifierSpec& spec, std::uint64_t seed, Exec exec) {
    std::vector<double> ones(train.size(), 1.0);
    return fit_model(train, ones, spec, seed, exec);
}

Model fit_model(const Dataset& train, std::span<const double> weights, const ClassifierSpec& spec, std::uint64_t seed,
                Exec exec) {
    check_weights(train, weights);
    switch (spec.kind) {
        case LearnerKind::j48: {
            auto cfg = spec.tree;
            cfg.random_subspace_size.reset();
            cfg.seed = seed;
            return fit_tree(train, weights, cfg);
        }
        case LearnerKind::random_tree:
            return fit_tree(train, weights, TreeConfig::random_tree(subspace_for(spec, train.attribute_count()), seed));
        case LearnerKind::random_forest:
            return fit_random_forest(train, weights, spec, seed, exec);
        case LearnerKind::bagging:
            return fit_bagging(train, weights, spec.base_spec(), spec.members_or_default(), seed, exec);
        case LearnerKind::adaboost:
            return fit_adaboost(train, weights, spec.base_spec(), spec.members_or_default(), seed, exec);
        case LearnerKind::random_committee: {
            const auto& base = spec.base.empty() ? ClassifierSpec::random_tree() : spec.base.front();
            return fit_random_committee(train, weights, base, spec.members_or_default(), seed, exec);
        }
    }
    throw Error("fit_model: unknown learner kind");
}

std::vector<Prediction> predict_all(const Model& m, const Dataset& d, Exec exec) {
    std::vector<Prediction> out(d.size());
    parallel_for(d.size(), exec, [&](std::size_t i) { out[i] = m.predict(d[i]); });
    return out;
}

std::size_t total_tree_count(const Model& m) {
    if (m.is_tree()) return 1;
    std::size_t n = 0;
    for (const auto& member : m.ensemble().members) n += total_tree_count(member);
    return n;
}

std::vector<std::string> export_rules(const Model& m) {
    if (m.is_tree()) return export_rules(m.tree());
    std::vector<std::string> out;
    const auto& e = m.ensemble();
    for (std::size_t i = 0; i < e.members.size(); ++i) {
        char weight[32];
        std::snprintf(weight, sizeof weight, "%.6g", e.member_weights[i]);
        out.push_back("# member " + std::to_string(i + 1) + "/" + std::to_string(e.members.size()) + " (" +
                      method_key(e.method) + ", weight " + weight + ")");
        auto rules = export_rules(e.members[i]);
        out.insert(out.end(), rules.begin(), rules.end());
    }
    return out;
}

nlohmann::json model_to_json(const Model& m) {
    if (m.is_tree()) return nlohmann::json(m.tree());
    const auto& e = m.ensemble();
    auto members = nlohmann::json::array();
    for (std::size_t i = 0; i < e.members.size(); ++i)
        members.push_back({{"weight", e.member_weights[i]}, {"model", model_to_json(e.members[i])}});
    nlohmann::json j{{"type", "ensemble"}, {"method", method_key(e.method)}, {"members", std::move(members)}};
    if (e.oob_error) j["oob_error"] = *e.oob_error;
    if (e.oob_coverage) j["oob_coverage"] = *e.oob_coverage;
    return j;
}

Model model_from_json(const nlohmann::json& j, const SchemaPtr& schema) {
    const auto type = j.at("type").get<std::string>();
    if (type == "tree") return DecisionTree::from_json(j, schema);
    if (type != "ensemble") throw Error("model: unknown type '" + type + "'");
    EnsembleModel e;
    e.method = parse_method(j.at("method").get<std::string>());
    for (const auto& jm : j.at("members")) {
        e.member_weights.push_back(jm.at("weight").get<double>());
        e.members.push_back(model_from_json(jm.at("model"), schema));
    }
    if (e.members.empty()) throw Error("model: ensemble without members");
    if (j.contains("oob_error")) e.oob_error = j.at("oob_error").get<double>();
    if (j.contains("oob_coverage")) e.oob_coverage = j.at("oob_coverage").get<double>();
    return e;
}

void save_model(const Model& m, const Schema& schema, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["format"] = "crus-model";
    j["schema"] = schema_to_json(schema);
    j["model"] = model_to_json(m);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << j.dump(1) << '\n';
}

LoadedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file '" + path.string() + "'");
    try {
        const auto j = nlohmann::json::parse(in);
        if (j.value("format", std::string()) != "crus-model")
            throw Error("not a crus model file");
        auto schema = std::make_shared<Schema>(schema_from_json(j.at("schema")));
        schema->validate();
        auto model = model_from_json(j.at("model"), schema);
        return {std::move(schema), std::move(model)};
    } catch (const nlohmann::json::exception& e) {
        throw Error("'" + path.string() + "': " + e.what());
    } catch (const Error& e) {
        throw Error("'" + path.string() + "': " + e.what());
    }
}

}  // namespace crus
