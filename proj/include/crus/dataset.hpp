#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace crus {

enum class AttributeKind { numeric, nominal };

struct AttributeSpec {
    std::string name;
    AttributeKind kind = AttributeKind::numeric;
    std::vector<std::string> categories;  // nominal only

    bool is_nominal() const noexcept { return kind == AttributeKind::nominal; }
    std::size_t category_count() const noexcept { return categories.size(); }
};

/// Binary class. The positive class is the declared minority label.
enum class ClassLabel : std::uint8_t { negative = 0, positive = 1 };

inline constexpr std::size_t class_index(ClassLabel c) noexcept { return static_cast<std::size_t>(c); }

/// Feature schema plus the class column definition. Shared, never mutated
/// once a dataset has been loaded.
struct Schema {
    std::vector<AttributeSpec> attributes;
    std::string class_column;
    std::string positive_label;
    std::string negative_label;

    std::size_t size() const noexcept { return attributes.size(); }
    const AttributeSpec& operator[](std::size_t i) const { return attributes[i]; }
    const std::string& label_name(ClassLabel c) const {
        return c == ClassLabel::positive ? positive_label : negative_label;
    }

    /// Throws Error when categories are duplicated/empty, names collide, or
    /// the class labels are missing.
    void validate() const;
};

using SchemaPtr = std::shared_ptr<const Schema>;

struct Instance {
    /// Numeric value, or category index stored as a double for nominal attributes.
    std::vector<double> values;
    ClassLabel label = ClassLabel::negative;
    /// Row of the originating dataset; synthetic instances carry their base row.
    std::size_t origin = 0;
    bool synthetic = false;
    /// Hidden ground-truth group (generator blob), -1 when unknown. Not a feature.
    int tag = -1;

    bool is_positive() const noexcept { return label == ClassLabel::positive; }
    std::size_t category(std::size_t attr) const { return static_cast<std::size_t>(values[attr]); }
};

struct ClassCounts {
    std::size_t positive = 0;
    std::size_t negative = 0;

    std::size_t total() const noexcept { return positive + negative; }
};

class Dataset {
public:
    Dataset() = default;
    explicit Dataset(SchemaPtr schema, std::vector<Instance> instances = {});

    const Schema& schema() const noexcept { return *schema_; }
    const SchemaPtr& schema_ptr() const noexcept { return schema_; }

    std::size_t size() const noexcept { return instances_.size(); }
    bool empty() const noexcept { return instances_.empty(); }
    std::size_t attribute_count() const noexcept { return schema_->size(); }

    const Instance& operator[](std::size_t i) const { return instances_[i]; }
    std::span<const Instance> instances() const noexcept { return instances_; }
    auto begin() const noexcept { return instances_.begin(); }
    auto end() const noexcept { return instances_.end(); }

    ClassCounts class_counts() const noexcept;

    /// Same schema, instances picked by index (order preserved, repeats allowed).
    Dataset subset(std::span<const std::size_t> indices) const;
    /// Same schema, given instances.
    Dataset with_instances(std::vector<Instance> instances) const;

    /// Throws DataError if an instance does not conform to the schema.
    void check_instance(const Instance& x, long row = -1) const;

private:
    SchemaPtr schema_;
    std::vector<Instance> instances_;
};

/// Schema sidecar file (JSON):
///   { "class": "infection", "positive": "YES", "negative": "NO",
///     "attributes": [ {"name": "apache", "type": "numeric"},
///                     {"name": "gender", "type": "nominal", "values": ["MALE", "FEMALE"]} ] }
/// Class values other than the two declared labels are rejected at load.
nlohmann::ordered_json schema_to_json(const Schema& schema);
Schema schema_from_json(const nlohmann::json& j);
Schema load_schema(const std::filesystem::path& path);
void save_schema(const Schema& schema, const std::filesystem::path& path);

Dataset load_csv(const std::filesystem::path& csv_path, const std::filesystem::path& schema_path);
Dataset load_csv(const std::filesystem::path& csv_path, SchemaPtr schema);
/// Parses CSV text (header row first).
Dataset parse_csv(std::string_view text, SchemaPtr schema);
void write_csv(const Dataset& d, const std::filesystem::path& path);
std::string to_csv(const Dataset& d);

/// |negative| / |positive|. Throws when there are no positive instances.
double imbalance_ratio(const Dataset& d);
/// True when the declared minority (positive) class outnumbers the negative one.
bool minority_misdeclared(const Dataset& d);

struct FoldSplit {
    int fold_count = 0;
    std::vector<int> assignments;  // per instance, in [0, fold_count)

    std::vector<std::size_t> test_indices(int fold) const;
    std::vector<std::size_t> train_indices(int fold) const;
};

/// Shuffles each class by seed and deals its members round-robin over the
/// folds, continuing from where the previous class stopped.
FoldSplit stratified_kfold(const Dataset& d, int k, std::uint64_t seed);

}  // namespace crus
