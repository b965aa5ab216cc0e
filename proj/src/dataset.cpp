#include "crus/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "crus/error.hpp"
#include "crus/log.hpp"
#include "crus/random.hpp"

namespace crus {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return cells;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

void Schema::validate() const {
    if (class_column.empty()) throw Error("schema: class column name is empty");
    if (positive_label.empty() || negative_label.empty())
        throw Error("schema: both positive and negative class labels are required");
    if (positive_label == negative_label) throw Error("schema: positive and negative labels must differ");
    std::set<std::string> names{class_column};
    for (const auto& a : attributes) {
        if (a.name.empty()) throw Error("schema: attribute with empty name");
        if (!names.insert(a.name).second) throw Error("schema: duplicate column name '" + a.name + "'");
        if (a.is_nominal()) {
            if (a.categories.empty()) throw Error("schema: nominal attribute '" + a.name + "' has no categories");
            std::set<std::string> seen;
            for (const auto& c : a.categories) {
                if (c.empty()) throw Error("schema: empty category in '" + a.name + "'");
                if (!seen.insert(c).second)
                    throw Error("schema: duplicate category '" + c + "' in '" + a.name + "'");
            }
        } else if (!a.categories.empty()) {
            throw Error("schema: numeric attribute '" + a.name + "' must not list categories");
        }
    }
}

Dataset::Dataset(SchemaPtr schema, std::vector<Instance> instances)
    : schema_(std::move(schema)), instances_(std::move(instances)) {
    if (!schema_) throw Error("dataset requires a schema");
}

ClassCounts Dataset::class_counts() const noexcept {
    ClassCounts c;
    for (const auto& x : instances_) (x.is_positive() ? c.positive : c.negative)++;
    return c;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    std::vector<Instance> picked;
    picked.reserve(indices.size());
    for (auto i : indices) picked.push_back(instances_.at(i));
    return Dataset(schema_, std::move(picked));
}

Dataset Dataset::with_instances(std::vector<Instance> instances) const {
    return Dataset(schema_, std::move(instances));
}

void Dataset::check_instance(const Instance& x, long row) const {
    if (x.values.size() != schema_->size())
        throw DataError("expected " + std::to_string(schema_->size()) + " attribute values, got " +
                            std::to_string(x.values.size()),
                        row);
    for (std::size_t a = 0; a < schema_->size(); ++a) {
        const auto& spec = (*schema_)[a];
        double v = x.values[a];
        if (!std::isfinite(v)) throw DataError("non-finite value", row, spec.name);
        if (spec.is_nominal() && (v < 0 || v >= static_cast<double>(spec.category_count()) || v != std::floor(v)))
            throw DataError("category index out of range", row, spec.name);
    }
}

Schema schema_from_json(const nlohmann::json& j) {
    Schema s;
    try {
        s.class_column = j.at("class").get<std::string>();
        s.positive_label = j.at("positive").get<std::string>();
        s.negative_label = j.at("negative").get<std::string>();
        for (const auto& ja : j.at("attributes")) {
            AttributeSpec a;
            a.name = ja.at("name").get<std::string>();
            auto type = ja.at("type").get<std::string>();
            if (type == "numeric") {
                a.kind = AttributeKind::numeric;
                if (ja.contains("values")) throw Error("numeric attribute '" + a.name + "' must not list values");
            } else if (type == "nominal") {
                a.kind = AttributeKind::nominal;
                a.categories = ja.at("values").get<std::vector<std::string>>();
            } else {
                throw Error("attribute '" + a.name + "': unknown type '" + type + "'");
            }
            s.attributes.push_back(std::move(a));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("schema: ") + e.what());
    }
    s.validate();
    return s;
}

nlohmann::ordered_json schema_to_json(const Schema& schema) {
    nlohmann::ordered_json j;
    j["class"] = schema.class_column;
    j["positive"] = schema.positive_label;
    j["negative"] = schema.negative_label;
    auto attrs = nlohmann::ordered_json::array();
    for (const auto& a : schema.attributes) {
        nlohmann::ordered_json ja;
        ja["name"] = a.name;
        ja["type"] = a.is_nominal() ? "nominal" : "numeric";
        if (a.is_nominal()) ja["values"] = a.categories;
        attrs.push_back(std::move(ja));
    }
    j["attributes"] = std::move(attrs);
    return j;
}

Schema load_schema(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error("schema '" + path.string() + "': " + e.what());
    }
    try {
        return schema_from_json(j);
    } catch (const Error& e) {
        throw Error("'" + path.string() + "': " + e.what());
    }
}

void save_schema(const Schema& schema, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << schema_to_json(schema).dump(2) << '\n';
}

Dataset parse_csv(std::string_view text, SchemaPtr schema) {
    const Schema& s = *schema;
    std::vector<std::string_view> lines;
    {
        std::size_t start = 0;
        while (start < text.size()) {
            auto end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            auto line = text.substr(start, end - start);
            if (!trim(line).empty()) lines.push_back(line);
            start = end + 1;
        }
    }
    if (lines.empty()) throw DataError("missing header row");
    if (text.substr(0, 3) == "\xEF\xBB\xBF") lines.front().remove_prefix(3);

    auto header = split_commas(lines.front());
    std::unordered_map<std::string, std::size_t> column_of;
    for (std::size_t c = 0; c < header.size(); ++c) {
        std::string name(header[c]);
        if (!column_of.emplace(name, c).second) throw DataError("duplicate header column", 0, name);
    }
    std::vector<std::size_t> attr_column(s.size());
    for (std::size_t a = 0; a < s.size(); ++a) {
        auto it = column_of.find(s[a].name);
        if (it == column_of.end()) throw DataError("missing column", 0, s[a].name);
        attr_column[a] = it->second;
    }
    auto class_it = column_of.find(s.class_column);
    if (class_it == column_of.end()) throw DataError("class column absent", 0, s.class_column);
    const std::size_t class_col = class_it->second;
    if (header.size() != s.size() + 1) {
        for (const auto& h : header) {
            std::string name(h);
            bool known = name == s.class_column ||
                         std::any_of(s.attributes.begin(), s.attributes.end(),
                                     [&](const AttributeSpec& a) { return a.name == name; });
            if (!known) throw DataError("column not declared in schema", 0, name);
        }
    }

    std::vector<Instance> instances;
    instances.reserve(lines.size() - 1);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const long row = static_cast<long>(r);
        auto cells = split_commas(lines[r]);
        if (cells.size() != header.size())
            throw DataError("expected " + std::to_string(header.size()) + " cells, got " +
                                std::to_string(cells.size()) + " (cells must not contain commas)",
                            row);
        Instance x;
        x.origin = r - 1;
        x.values.resize(s.size());
        for (std::size_t a = 0; a < s.size(); ++a) {
            auto cell = cells[attr_column[a]];
            const auto& spec = s[a];
            if (cell.empty() || cell == "?") throw DataError("missing value", row, spec.name);
            if (spec.is_nominal()) {
                auto it = std::find(spec.categories.begin(), spec.categories.end(), cell);
                if (it == spec.categories.end())
                    throw DataError("unknown category '" + std::string(cell) + "'", row, spec.name);
                x.values[a] = static_cast<double>(it - spec.categories.begin());
            } else {
                double v = 0;
                auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
                if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
                    throw DataError("non-numeric value '" + std::string(cell) + "'", row, spec.name);
                x.values[a] = v;
            }
        }
        auto cls = cells[class_col];
        if (cls == s.positive_label)
            x.label = ClassLabel::positive;
        else if (cls == s.negative_label)
            x.label = ClassLabel::negative;
        else if (cls.empty() || cls == "?")
            throw DataError("missing class value", row, s.class_column);
        else
            throw DataError("class value '" + std::string(cls) + "' is neither '" + s.positive_label + "' nor '" +
                                s.negative_label + "' (only binary targets are supported)",
                            row, s.class_column);
        instances.push_back(std::move(x));
    }
    return Dataset(std::move(schema), std::move(instances));
}

Dataset load_csv(const std::filesystem::path& csv_path, SchemaPtr schema) {
    try {
        return parse_csv(read_file(csv_path), std::move(schema));
    } catch (const DataError& e) {
        throw DataError(csv_path.string() + ": " + e.what());
    }
}

Dataset load_csv(const std::filesystem::path& csv_path, const std::filesystem::path& schema_path) {
    return load_csv(csv_path, std::make_shared<const Schema>(load_schema(schema_path)));
}

std::string to_csv(const Dataset& d) {
    const Schema& s = d.schema();
    std::string out;
    for (const auto& a : s.attributes) out += a.name + ",";
    out += s.class_column + "\n";
    for (const auto& x : d) {
        for (std::size_t a = 0; a < s.size(); ++a) {
            out += s[a].is_nominal() ? s[a].categories[x.category(a)] : format_number(x.values[a]);
            out += ',';
        }
        out += s.label_name(x.label);
        out += '\n';
    }
    return out;
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << to_csv(d);
}

double imbalance_ratio(const Dataset& d) {
    auto c = d.class_counts();
    if (c.positive == 0) throw Error("imbalance ratio: no minority instances");
    if (c.positive > c.negative)
        log::warn("positive class outnumbers negative class; the minority label may be misdeclared");
    return static_cast<double>(c.negative) / static_cast<double>(c.positive);
}

bool minority_misdeclared(const Dataset& d) {
    auto c = d.class_counts();
    return c.positive > c.negative;
}

std::vector<std::size_t> FoldSplit::test_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldSplit::train_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold) out.push_back(i);
    return out;
}

FoldSplit stratified_kfold(const Dataset& d, int k, std::uint64_t seed) {
    if (k < 2) throw Error("stratified k-fold: k must be at least 2");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < d.size(); ++i) (d[i].is_positive() ? pos : neg).push_back(i);
    const auto smallest = std::min(pos.size(), neg.size());
    if (static_cast<std::size_t>(k) > smallest)
        throw Error("stratified k-fold: k=" + std::to_string(k) + " exceeds the smallest class count (" +
                    std::to_string(smallest) + ")");
    Rng rng(derive_seed(seed, {0x5f01d}));
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);

    FoldSplit split;
    split.fold_count = k;
    split.assignments.assign(d.size(), -1);
    int next = 0;
    for (const auto* members : {&pos, &neg}) {
        for (auto i : *members) {
            split.assignments[i] = next;
            next = (next + 1) % k;
        }
    }
    return split;
}

}  // namespace crus
