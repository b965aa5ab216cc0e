#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "crus/dataset.hpp"
#include "crus/parallel.hpp"
#include "crus/tree.hpp"

namespace crus {

enum class LearnerKind { j48, random_tree, random_forest, bagging, adaboost, random_committee };

std::string to_string(LearnerKind k);
LearnerKind parse_learner_kind(const std::string& s);

/// Declarative description of a classifier. Meta learners (bagging, adaboost,
/// random_committee) wrap exactly one base spec; random_forest is bagging
/// over unpruned random trees.
struct ClassifierSpec {
    LearnerKind kind = LearnerKind::j48;
    /// J48 parameters (min leaf weight, pruning, confidence factor).
    TreeConfig tree;
    /// Random tree/forest attribute subset size; unset means default_subspace_size(N).
    std::optional<int> subspace_size;
    SubspaceRule subspace_rule = SubspaceRule::floor_log2_plus_1;
    /// Member count; 0 picks the default (random forest 100, others 10).
    int n_members = 0;
    /// Base learner of a meta learner, empty otherwise (defaults to J48).
    std::vector<ClassifierSpec> base;

    int members_or_default() const noexcept;
    const ClassifierSpec& base_spec() const;
    /// "Bagging-Random Forest" style display name.
    std::string display_name() const;
    void validate() const;

    static ClassifierSpec j48();
    static ClassifierSpec random_tree();
    static ClassifierSpec random_forest(int n_members = 0);
    static ClassifierSpec meta(LearnerKind kind, ClassifierSpec base, int n_members = 0);
};

void to_json(nlohmann::json& j, const ClassifierSpec& s);
void from_json(const nlohmann::json& j, ClassifierSpec& s);

enum class EnsembleMethod { bagging, adaboost, random_forest, random_committee };

struct BoostRound {
    double error = 0.0;  // weighted training error
    double beta = 0.0;
    double member_weight = 0.0;
    /// Instance weights (summing to 1) after this round's update.
    std::vector<double> weights_after;
    /// Weighted-vote training error of the ensemble after this round.
    double ensemble_error = 0.0;
};

class Model;

class EnsembleModel {
public:
    EnsembleMethod method = EnsembleMethod::bagging;
    std::vector<Model> members;
    std::vector<double> member_weights;
    std::optional<double> oob_error;     // bagging / random forest
    std::optional<double> oob_coverage;  // fraction of instances with >= 1 OOB vote
    std::vector<BoostRound> boost_trace;  // adaboost only, not serialized

    EnsembleModel();
    EnsembleModel(const EnsembleModel&);
    EnsembleModel(EnsembleModel&&) noexcept;
    EnsembleModel& operator=(const EnsembleModel&);
    EnsembleModel& operator=(EnsembleModel&&) noexcept;
    ~EnsembleModel();

    Prediction predict(const Instance& x) const;
};

/// A fitted classifier: a single tree or an ensemble of models.
class Model {
public:
    Model() = default;
    Model(DecisionTree tree) : impl_(std::move(tree)) {}
    Model(EnsembleModel ensemble) : impl_(std::move(ensemble)) {}

    bool is_tree() const noexcept { return std::holds_alternative<DecisionTree>(impl_); }
    const DecisionTree& tree() const { return std::get<DecisionTree>(impl_); }
    const EnsembleModel& ensemble() const { return std::get<EnsembleModel>(impl_); }

    Prediction predict(const Instance& x) const;

private:
    std::variant<DecisionTree, EnsembleModel> impl_;
};

/// Class with the largest total weight; a tie goes to negative.
ClassLabel majority_vote(std::span<const ClassLabel> votes, std::span<const double> weights);

/// Accuracy of a majority vote of L independent members each correct with
/// probability p. L must be odd.
double theoretical_ensemble_accuracy(int L, double p);

/// Bootstrap multiplicities: n draws with replacement from n instances.
std::vector<double> bootstrap_counts(std::size_t n, std::uint64_t seed);

Model fit_model(const Dataset& train, const ClassifierSpec& spec, std::uint64_t seed, Exec exec = Exec::parallel);
Model fit_model(const Dataset& train, std::span<const double> weights, const ClassifierSpec& spec, std::uint64_t seed,
                Exec exec = Exec::parallel);

EnsembleModel fit_bagging(const Dataset& train, std::span<const double> weights, const ClassifierSpec& base,
                          int n_members, std::uint64_t seed, Exec exec = Exec::parallel);
EnsembleModel fit_random_forest(const Dataset& train, std::span<const double> weights, const ClassifierSpec& spec,
                                std::uint64_t seed, Exec exec = Exec::parallel);
EnsembleModel fit_adaboost(const Dataset& train, std::span<const double> weights, const ClassifierSpec& base,
                           int n_members, std::uint64_t seed, Exec exec = Exec::parallel);
EnsembleModel fit_random_committee(const Dataset& train, std::span<const double> weights, const ClassifierSpec& base,
                                   int n_members, std::uint64_t seed, Exec exec = Exec::parallel);

/// Scores every instance; the parallel kernel and serial reference agree exactly.
std::vector<Prediction> predict_all(const Model& m, const Dataset& d, Exec exec = Exec::parallel);

std::size_t total_tree_count(const Model& m);
/// Rule listing; ensembles print a header line per member.
std::vector<std::string> export_rules(const Model& m);

nlohmann::json model_to_json(const Model& m);
Model model_from_json(const nlohmann::json& j, const SchemaPtr& schema);

/// Model file: {"format": "crus-model", "schema": {...}, "model": {...}}.
void save_model(const Model& m, const Schema& schema, const std::filesystem::path& path);

struct LoadedModel {
    SchemaPtr schema;
    Model model;
};
LoadedModel load_model(const std::filesystem::path& path);

}  // namespace crus
