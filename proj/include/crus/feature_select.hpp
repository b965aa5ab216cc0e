#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "crus/dataset.hpp"
#include "crus/parallel.hpp"

namespace crus {

struct RankedAttribute {
    std::string name;
    std::size_t index = 0;
    double value = 0.0;
};

/// Category codes of an attribute. Numeric attributes become two codes split
/// at the threshold with the highest information gain about the class.
std::vector<int> discretize_attribute(const Dataset& d, std::size_t attr);
std::vector<int> class_codes(const Dataset& d);

/// Base-2 entropy of a code vector.
double entropy(std::span<const int> x);
double mutual_information(std::span<const int> x, std::span<const int> y);
/// 2 I(X;Y) / (H(X) + H(Y)); 0 when both are constant.
double symmetrical_uncertainty(std::span<const int> x, std::span<const int> y);

/// Gain ratio of every attribute against the class, descending (ties by index).
std::vector<RankedAttribute> gain_ratio_rank(const Dataset& d);

/// k * mean SU(attr, class) / sqrt(k + k (k - 1) * mean SU(attr, attr)).
double cfs_merit(std::span<const std::size_t> subset, const Dataset& d);

struct CfsResult {
    std::vector<std::size_t> subset;  // ascending attribute indices
    std::vector<std::string> names;
    double merit = 0.0;
    std::size_t evaluated = 0;
};

/// Forward best-first search over attribute subsets scored by CFS merit;
/// stops after max_stale consecutive expansions without improvement.
CfsResult cfs_best_first(const Dataset& d, int max_stale = 5, Exec exec = Exec::parallel);

}  // namespace crus
