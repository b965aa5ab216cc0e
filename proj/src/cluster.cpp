#include "crus/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "crus/error.hpp"
#include "crus/random.hpp"

namespace crus {

FeatureScaler FeatureScaler::fit(const Dataset& train) {
    const auto& schema = train.schema();
    FeatureScaler s;
    s.kinds_.resize(schema.size());
    s.mins_.assign(schema.size(), 0.0);
    s.maxs_.assign(schema.size(), 0.0);
    for (std::size_t a = 0; a < schema.size(); ++a) {
        s.kinds_[a] = schema[a].kind;
        if (schema[a].is_nominal() || train.empty()) continue;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& x : train) {
            lo = std::min(lo, x.values[a]);
            hi = std::max(hi, x.values[a]);
        }
        s.mins_[a] = lo;
        s.maxs_[a] = hi;
    }
    return s;
}

double FeatureScaler::normalize(std::size_t attr, double v) const {
    const double range = maxs_[attr] - mins_[attr];
    if (!(range > 0)) return 0.0;
    return std::clamp((v - mins_[attr]) / range, 0.0, 1.0);
}

void FeatureScaler::transform_into(const Instance& x, std::span<double> out) const {
    if (x.values.size() != kinds_.size() || out.size() != kinds_.size())
        throw Error("schema mismatch: instance has " + std::to_string(x.values.size()) + " values, scaler expects " +
                    std::to_string(kinds_.size()));
    for (std::size_t a = 0; a < kinds_.size(); ++a)
        out[a] = kinds_[a] == AttributeKind::nominal ? x.values[a] : normalize(a, x.values[a]);
}

std::vector<double> FeatureScaler::transform(const Instance& x) const {
    std::vector<double> out(kinds_.size());
    transform_into(x, out);
    return out;
}

void to_json(nlohmann::json& j, const FeatureScaler& s) {
    auto kinds = nlohmann::json::array();
    for (auto k : s.kinds_) kinds.push_back(k == AttributeKind::nominal ? "nominal" : "numeric");
    j = nlohmann::json{{"kinds", kinds}, {"min", s.mins_}, {"max", s.maxs_}};
}

void from_json(const nlohmann::json& j, FeatureScaler& s) {
    s.kinds_.clear();
    for (const auto& k : j.at("kinds")) s.kinds_.push_back(k.get<std::string>() == "nominal" ? AttributeKind::nominal
                                                                                            : AttributeKind::numeric);
    s.mins_ = j.at("min").get<std::vector<double>>();
    s.maxs_ = j.at("max").get<std::vector<double>>();
    if (s.mins_.size() != s.kinds_.size() || s.maxs_.size() != s.kinds_.size())
        throw Error("scaler: inconsistent field lengths");
}

double normalized_distance_sq(std::span<const double> a, std::span<const double> b,
                              std::span<const AttributeKind> kinds) {
    double sum = 0.0;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (kinds[i] == AttributeKind::nominal) {
            sum += a[i] != b[i] ? 1.0 : 0.0;
        } else {
            const double d = a[i] - b[i];
            sum += d * d;
        }
    }
    return sum;
}

double mixed_distance(const Instance& a, const Instance& b, const FeatureScaler& scaler) {
    auto na = scaler.transform(a);
    auto nb = scaler.transform(b);
    return std::sqrt(normalized_distance_sq(na, nb, scaler.kinds()));
}

double mixed_distance(const Instance& a, const Centroid& c, const FeatureScaler& scaler) {
    if (c.values.size() != scaler.size()) throw Error("schema mismatch: centroid dimension differs from scaler");
    auto na = scaler.transform(a);
    return std::sqrt(normalized_distance_sq(na, c.values, scaler.kinds()));
}

namespace {

std::size_t nearest(std::span<const double> p, std::span<const Centroid> centroids,
                    std::span<const AttributeKind> kinds, double& best_sq) {
    std::size_t best = 0;
    best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = normalized_distance_sq(p, centroids[c].values, kinds);
        if (d < best_sq) {
            best_sq = d;
            best = c;
        }
    }
    return best;
}

}  // namespace

std::size_t assign_points(std::span<const double> points, std::size_t dims,
                          std::span<const Centroid> centroids, std::span<const AttributeKind> kinds,
                          std::span<std::size_t> labels, std::span<double> dist_sq, Exec exec) {
    const auto n = static_cast<long>(labels.size());
    std::size_t changes = 0;
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) reduction(+ : changes)
        for (long i = 0; i < n; ++i) {
            double d = 0;
            auto c = nearest(points.subspan(static_cast<std::size_t>(i) * dims, dims), centroids, kinds, d);
            if (c != labels[i]) ++changes;
            labels[i] = c;
            dist_sq[i] = d;
        }
    } else {
        for (long i = 0; i < n; ++i) {
            double d = 0;
            auto c = nearest(points.subspan(static_cast<std::size_t>(i) * dims, dims), centroids, kinds, d);
            if (c != labels[i]) ++changes;
            labels[i] = c;
            dist_sq[i] = d;
        }
    }
    return changes;
}

namespace {

void update_centroids(std::span<const double> points, std::size_t dims, std::span<const std::size_t> labels,
                      const FeatureScaler& scaler, std::vector<Centroid>& centroids) {
    const std::size_t k = centroids.size();
    std::vector<std::size_t> counts(k, 0);
    std::vector<double> sums(k * dims, 0.0);
    // Nominal votes per (cluster, attribute, category).
    std::vector<std::vector<std::vector<std::size_t>>> votes(k, std::vector<std::vector<std::size_t>>(dims));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto c = labels[i];
        ++counts[c];
        for (std::size_t a = 0; a < dims; ++a) {
            const double v = points[i * dims + a];
            if (scaler.kind(a) == AttributeKind::nominal) {
                auto& v_ca = votes[c][a];
                const auto cat = static_cast<std::size_t>(v);
                if (v_ca.size() <= cat) v_ca.resize(cat + 1, 0);
                ++v_ca[cat];
            } else {
                sums[c * dims + a] += v;
            }
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) continue;
        for (std::size_t a = 0; a < dims; ++a) {
            if (scaler.kind(a) == AttributeKind::nominal) {
                const auto& v_ca = votes[c][a];
                centroids[c].values[a] =
                    static_cast<double>(std::max_element(v_ca.begin(), v_ca.end()) - v_ca.begin());
            } else {
                centroids[c].values[a] = sums[c * dims + a] / static_cast<double>(counts[c]);
            }
        }
    }
}

}  // namespace

ClusterModel kmeans_fit(const Dataset& d, int k, std::uint64_t seed, int max_iter, Exec exec) {
    if (k < 1) throw Error("k-means: k must be at least 1");
    if (static_cast<std::size_t>(k) > d.size())
        throw Error("k-means: k=" + std::to_string(k) + " exceeds the instance count " + std::to_string(d.size()));
    if (max_iter < 1) throw Error("k-means: max_iter must be positive");

    ClusterModel m;
    m.k = k;
    m.seed = seed;
    m.scaler = FeatureScaler::fit(d);
    const std::size_t n = d.size();
    const std::size_t dims = d.attribute_count();
    std::vector<double> points(n * dims);
    for (std::size_t i = 0; i < n; ++i) m.scaler.transform_into(d[i], std::span(points).subspan(i * dims, dims));

    // k distinct instances chosen uniformly (partial Fisher-Yates).
    Rng rng(derive_seed(seed, {0x4b4d}));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i)
        std::swap(order[i], order[i + uniform_index(rng, n - i)]);
    m.centroids.resize(k);
    for (int c = 0; c < k; ++c) {
        auto row = std::span<const double>(points).subspan(order[c] * dims, dims);
        m.centroids[c].values.assign(row.begin(), row.end());
    }

    std::vector<std::size_t> labels(n, std::numeric_limits<std::size_t>::max());
    std::vector<double> dist_sq(n, 0.0);
    for (int iter = 0; iter < max_iter; ++iter) {
        const auto changes = assign_points(points, dims, m.centroids, m.scaler.kinds(), labels, dist_sq, exec);
        m.iterations = iter + 1;

        // Empty-cluster repair: move the point farthest from its centroid
        // (taken from a cluster with more than one member).
        std::vector<std::size_t> counts(k, 0);
        for (auto c : labels) ++counts[c];
        bool repaired = false;
        for (int c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::size_t far = n;
            double far_d = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[labels[i]] > 1 && dist_sq[i] > far_d) {
                    far_d = dist_sq[i];
                    far = i;
                }
            }
            if (far == n) break;  // every point coincides with its centroid
            --counts[labels[far]];
            labels[far] = static_cast<std::size_t>(c);
            ++counts[c];
            dist_sq[far] = 0.0;
            auto row = std::span<const double>(points).subspan(far * dims, dims);
            m.centroids[c].values.assign(row.begin(), row.end());
            repaired = true;
        }

        m.objective_trace.push_back(std::accumulate(dist_sq.begin(), dist_sq.end(), 0.0));
        if (iter > 0 && changes == 0 && !repaired) {
            m.converged = true;
            break;
        }
        update_centroids(points, dims, labels, m.scaler, m.centroids);
    }
    return m;
}

std::size_t assign_cluster(const Instance& x, const ClusterModel& m) {
    auto p = m.scaler.transform(x);
    double d = 0;
    return nearest(p, m.centroids, m.scaler.kinds(), d);
}

std::vector<std::size_t> assign_all(const Dataset& d, const ClusterModel& m, Exec exec) {
    const std::size_t dims = m.scaler.size();
    std::vector<double> points(d.size() * dims);
    for (std::size_t i = 0; i < d.size(); ++i) m.scaler.transform_into(d[i], std::span(points).subspan(i * dims, dims));
    std::vector<std::size_t> labels(d.size(), 0);
    std::vector<double> dist(d.size(), 0.0);
    assign_points(points, dims, m.centroids, m.scaler.kinds(), labels, dist, exec);
    return labels;
}

void to_json(nlohmann::json& j, const ClusterModel& m) {
    auto cents = nlohmann::json::array();
    for (const auto& c : m.centroids) cents.push_back(c.values);
    j = nlohmann::json{{"type", "cluster_model"},
                       {"k", m.k},
                       {"seed", m.seed},
                       {"iterations", m.iterations},
                       {"converged", m.converged},
                       {"scaler", m.scaler},
                       {"centroids", cents}};
}

void from_json(const nlohmann::json& j, ClusterModel& m) {
    m.k = j.at("k").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.iterations = j.value("iterations", 0);
    m.converged = j.value("converged", false);
    m.scaler = j.at("scaler").get<FeatureScaler>();
    m.centroids.clear();
    for (const auto& c : j.at("centroids")) m.centroids.push_back(Centroid{c.get<std::vector<double>>()});
    if (m.k < 1 || m.centroids.size() != static_cast<std::size_t>(m.k)) throw Error("cluster model: centroid count != k");
    for (const auto& c : m.centroids)
        if (c.values.size() != m.scaler.size()) throw Error("cluster model: centroid dimension mismatch");
}

void save_cluster_model(const ClusterModel& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << nlohmann::json(m).dump(2) << '\n';
}

ClusterModel load_cluster_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    try {
        return nlohmann::json::parse(in).get<ClusterModel>();
    } catch (const nlohmann::json::exception& e) {
        throw Error("cluster model '" + path.string() + "': " + e.what());
    }
}

}  // namespace crus
