#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "crus/dataset.hpp"
#include "crus/parallel.hpp"

namespace crus {

/// Min/max normalization constants for the numeric attributes of a training set.
/// Values outside the training range are clamped to [0, 1].
class FeatureScaler {
public:
    FeatureScaler() = default;
    static FeatureScaler fit(const Dataset& train);

    std::size_t size() const noexcept { return kinds_.size(); }
    AttributeKind kind(std::size_t attr) const { return kinds_[attr]; }
    std::span<const AttributeKind> kinds() const noexcept { return kinds_; }
    double min(std::size_t attr) const { return mins_[attr]; }
    double max(std::size_t attr) const { return maxs_[attr]; }

    double normalize(std::size_t attr, double v) const;
    /// Normalized numeric values; nominal category indices are passed through.
    std::vector<double> transform(const Instance& x) const;
    void transform_into(const Instance& x, std::span<double> out) const;

    friend void to_json(nlohmann::json& j, const FeatureScaler& s);
    friend void from_json(const nlohmann::json& j, FeatureScaler& s);

private:
    std::vector<AttributeKind> kinds_;
    std::vector<double> mins_;
    std::vector<double> maxs_;
};

/// Numeric components are means of normalized values, nominal ones the modal
/// category index.
struct Centroid {
    std::vector<double> values;
};

/// Squared distance between two points already in normalized space.
double normalized_distance_sq(std::span<const double> a, std::span<const double> b,
                              std::span<const AttributeKind> kinds);

/// sqrt(sum d_i^2): numeric d_i = |norm(a_i) - norm(b_i)|, nominal d_i = [a_i != b_i].
double mixed_distance(const Instance& a, const Instance& b, const FeatureScaler& scaler);
double mixed_distance(const Instance& a, const Centroid& c, const FeatureScaler& scaler);

struct ClusterModel {
    int k = 0;
    std::vector<Centroid> centroids;
    FeatureScaler scaler;
    std::uint64_t seed = 0;
    int iterations = 0;
    bool converged = false;
    /// Sum of squared distances after each assignment step.
    std::vector<double> objective_trace;
};

/// Lloyd's k-means under mixed_distance. Initial centroids are k distinct
/// instances drawn by seed; an emptied cluster is reseeded with the point
/// farthest from its own centroid.
ClusterModel kmeans_fit(const Dataset& d, int k, std::uint64_t seed, int max_iter = 100,
                        Exec exec = Exec::parallel);

/// Nearest centroid, ties to the lowest index.
std::size_t assign_cluster(const Instance& x, const ClusterModel& m);
std::vector<std::size_t> assign_all(const Dataset& d, const ClusterModel& m, Exec exec = Exec::parallel);

/// Assignment kernel over a row-major normalized point matrix. Writes the
/// nearest centroid and its squared distance per point; returns how many
/// labels changed relative to the incoming `labels`.
std::size_t assign_points(std::span<const double> points, std::size_t dims,
                          std::span<const Centroid> centroids, std::span<const AttributeKind> kinds,
                          std::span<std::size_t> labels, std::span<double> dist_sq, Exec exec);

void to_json(nlohmann::json& j, const ClusterModel& m);
void from_json(const nlohmann::json& j, ClusterModel& m);
void save_cluster_model(const ClusterModel& m, const std::filesystem::path& path);
ClusterModel load_cluster_model(const std::filesystem::path& path);

}  // namespace crus
