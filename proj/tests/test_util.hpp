#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "crus/dataset.hpp"
#include "crus/random.hpp"

namespace testutil {

inline crus::SchemaPtr numeric_schema(int dims) {
    auto s = std::make_shared<crus::Schema>();
    for (int i = 0; i < dims; ++i) s->attributes.push_back({"x" + std::to_string(i), crus::AttributeKind::numeric, {}});
    s->class_column = "class";
    s->positive_label = "pos";
    s->negative_label = "neg";
    return s;
}

inline crus::SchemaPtr mixed_schema(int numeric, int nominal, int categories) {
    auto s = std::make_shared<crus::Schema>();
    for (int i = 0; i < numeric; ++i) s->attributes.push_back({"x" + std::to_string(i), crus::AttributeKind::numeric, {}});
    std::vector<std::string> cats;
    for (int c = 0; c < categories; ++c) cats.push_back("v" + std::to_string(c));
    for (int i = 0; i < nominal; ++i) s->attributes.push_back({"n" + std::to_string(i), crus::AttributeKind::nominal, cats});
    s->class_column = "class";
    s->positive_label = "pos";
    s->negative_label = "neg";
    return s;
}

inline crus::Instance inst(std::vector<double> values, bool positive) {
    crus::Instance x;
    x.values = std::move(values);
    x.label = positive ? crus::ClassLabel::positive : crus::ClassLabel::negative;
    return x;
}

inline crus::Dataset make(crus::SchemaPtr schema, std::vector<crus::Instance> rows) {
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].origin = i;
    return crus::Dataset(std::move(schema), std::move(rows));
}

/// Random mixed dataset; `pos_rate` is the positive probability.
inline crus::Dataset random_mixed(std::uint64_t seed, std::size_t n, int numeric, int nominal, int categories,
                                  double pos_rate = 0.3) {
    crus::Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<crus::Instance> rows;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v;
        for (int a = 0; a < numeric; ++a) v.push_back(std::round(u(rng) * 1000) / 100);
        for (int a = 0; a < nominal; ++a) v.push_back(static_cast<double>(rng() % static_cast<unsigned>(categories)));
        rows.push_back(inst(std::move(v), u(rng) < pos_rate));
    }
    rows[0].label = crus::ClassLabel::positive;
    rows[1].label = crus::ClassLabel::negative;
    return make(mixed_schema(numeric, nominal, categories), std::move(rows));
}

}  // namespace testutil
