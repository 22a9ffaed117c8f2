#include "gdm/gdm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "gdm/error.hpp"
#include "gdm/line_search.hpp"
#include "gdm/parallel.hpp"

namespace gdm {

void GdmConfig::validate() const {
    if (K.has_value() == lambda.has_value()) throw ArgumentError("exactly one of K and lambda must be given");
    if (K && *K < 1) throw ArgumentError("K must be at least 1");
    if (lambda && !(*lambda > 0.0 && std::isfinite(*lambda))) throw ArgumentError("lambda must be positive");
    if (restarts < 1) throw ArgumentError("restarts must be at least 1");
    if (max_iters < 1) throw ArgumentError("max_iters must be at least 1");
}

Vector data_center(const NormalizedCorpus& data, bool weighted) {
    const std::size_t M = data.num_docs();
    if (M == 0) throw ArgumentError("cannot take the center of an empty corpus");
    const auto V = static_cast<Eigen::Index>(data.vocab_size());
    std::vector<Vector> partial(num_blocks(M), Vector::Zero(V));
    std::vector<double> mass(partial.size(), 0.0);
    parallel_blocks(M, [&](std::size_t b, std::size_t begin, std::size_t end) {
        for (std::size_t m = begin; m < end; ++m) {
            const double w = weighted ? data.weight(m) : 1.0;
            auto words = data.words(m);
            auto values = data.values(m);
            for (std::size_t j = 0; j < words.size(); ++j) partial[b][words[j]] += w * values[j];
            mass[b] += w;
        }
    });
    Vector center = Vector::Zero(V);
    double total = 0.0;
    for (std::size_t b = 0; b < partial.size(); ++b) center += partial[b], total += mass[b];
    return center / total;
}

std::vector<double> cluster_radii(const NormalizedCorpus& data, const Vector& center,
                                  std::span<const std::uint32_t> assignments, std::size_t num_clusters) {
    if (assignments.size() != data.num_docs()) throw ArgumentError("one assignment per document required");
    const double center_sq = center.squaredNorm();
    std::vector<double> radii(num_clusters, 0.0);
    for (std::size_t m = 0; m < data.num_docs(); ++m) {
        const auto k = assignments[m];
        if (k >= num_clusters) throw ArgumentError("assignment out of range");
        radii[k] = std::max(radii[k], data.sq_distance(m, center.data(), center_sq));
    }
    for (double& r : radii) r = std::sqrt(r);
    return radii;
}

std::vector<double> default_extensions(const Vector& center, const Matrix& centroids,
                                       std::span<const double> radii) {
    if (static_cast<std::size_t>(centroids.rows()) != radii.size())
        throw ArgumentError("one radius per centroid required");
    std::vector<double> out(radii.size());
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const double dist = (centroids.row(static_cast<Eigen::Index>(k)).transpose() - center).norm();
        if (!(dist > 1e-13)) throw DegenerateClusterError(k);
        // R_k >= dist up to rounding
        out[k] = std::max(1.0, radii[k] / dist);
    }
    return out;
}

Vector extend_and_threshold(const Vector& center, const Vector& centroid, double m) {
    if (center.size() != centroid.size()) throw ArgumentError("center and centroid dimensions differ");
    if (!(m >= 1.0)) throw ArgumentError("extension scalar must be at least 1");
    if (m == 1.0) return centroid;
    Vector raw = center + m * (centroid - center);
    bool clipped = false;
    for (Eigen::Index i = 0; i < raw.size(); ++i)
        if (raw[i] < 0.0) raw[i] = 0.0, clipped = true;
    if (!clipped) return raw;
    const double sum = raw.sum();
    if (!(sum > 0.0)) throw std::logic_error("extended vertex has no positive entries");
    return raw / sum;
}

std::vector<std::size_t> canonical_order(const NormalizedCorpus& data) {
    std::vector<std::size_t> order(data.num_docs());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto less = [&](std::size_t a, std::size_t b) {
        if (data.weight(a) != data.weight(b)) return data.weight(a) < data.weight(b);
        auto wa = data.words(a), wb = data.words(b);
        auto va = data.values(a), vb = data.values(b);
        const std::size_t n = std::min(wa.size(), wb.size());
        for (std::size_t j = 0; j < n; ++j) {
            if (wa[j] != wb[j]) return wa[j] < wb[j];
            if (va[j] != vb[j]) return va[j] < vb[j];
        }
        return wa.size() < wb.size();
    };
    std::stable_sort(order.begin(), order.end(), less);
    return order;
}

namespace {

Matrix vertices_from(const Vector& center, const Matrix& centroids, std::span<const double> extensions) {
    Matrix beta(centroids.rows(), centroids.cols());
    for (Eigen::Index k = 0; k < centroids.rows(); ++k)
        beta.row(k) = extend_and_threshold(center, centroids.row(k).transpose(),
                                           extensions[static_cast<std::size_t>(k)]).transpose();
    return beta;
}

// Shared tail of GDM and nGDM: clustering result (on canonically ordered data) to model.
GdmModel correct(const NormalizedCorpus& data, const std::vector<std::size_t>& order,
                 const ClusteringResult& clusters, const GdmConfig& config, double penalty) {
    const Vector center = data_center(data, config.weighted_center);
    std::vector<std::uint32_t> assignments(data.num_docs());
    for (std::size_t i = 0; i < order.size(); ++i) assignments[order[i]] = clusters.assignments[i];

    const std::size_t K = static_cast<std::size_t>(clusters.centroids.rows());
    auto radii = cluster_radii(data, center, assignments, K);
    std::vector<double> extensions;
    Matrix beta;
    Matrix centroids = clusters.centroids;
    if (K == 1) {
        // a single topic is the center itself
        extensions = {1.0};
        centroids = center.transpose();
        beta = centroids;
    } else {
        extensions = default_extensions(center, centroids, radii);
        beta = vertices_from(center, centroids, extensions);
    }
    TopicPolytope polytope(std::move(beta));
    const double G = geometric_objective(data, polytope);
    return GdmModel{std::move(polytope), center, std::move(centroids), std::move(extensions),
                    std::move(radii), G + penalty, penalty, std::move(assignments), config};
}

}  // namespace

GdmModel fit_gdm(const NormalizedCorpus& data, const GdmConfig& config) {
    config.validate();
    if (!config.K) throw ArgumentError("fit_gdm needs K");
    const std::size_t K = *config.K;
    if (K > data.num_docs()) throw ArgumentError("K exceeds the number of documents");

    const auto order = canonical_order(data);
    const NormalizedCorpus canonical = data.permuted(order);
    Rng rng(config.seed);
    ClusteringResult clusters;
    if (K == 1) {
        clusters.centroids = data_center(canonical, true).transpose();
        clusters.assignments.assign(data.num_docs(), 0);
    } else {
        clusters = fit_kmeans(canonical, K, KMeansOptions{config.restarts, config.max_iters, 1e-10}, rng);
    }
    GdmModel model = correct(data, order, clusters, config, 0.0);
    spdlog::debug("gdm: K={} objective={:.6g}", K, model.objective);
    if (config.tune) model = tune_extensions(model, data, model.assignments);
    return model;
}

GdmModel tune_extensions(const GdmModel& model, const NormalizedCorpus& data,
                         std::span<const std::uint32_t> assignments) {
    const std::size_t K = model.num_topics();
    if (assignments.size() != data.num_docs()) throw ArgumentError("one assignment per document required");
    GdmModel out = model;
    out.config.tune = true;
    if (K == 1) return out;

    const auto defaults = default_extensions(model.center, model.centroids, model.radii);
    Matrix beta = model.polytope.vertices();
    double total = geometric_objective(data, model.polytope);

    for (std::size_t k = 0; k < K; ++k) {
        const double hi = defaults[k];
        if (hi <= 1.0) continue;
        const Vector mu = model.centroids.row(static_cast<Eigen::Index>(k)).transpose();
        auto with_extension = [&](double m) {
            Matrix trial = beta;
            trial.row(static_cast<Eigen::Index>(k)) = extend_and_threshold(model.center, mu, m).transpose();
            return TopicPolytope(std::move(trial));
        };
        auto G_k = [&](double m) { return cluster_objective(data, with_extension(m), assignments, k); };

        LineSearchResult best = brent_minimize(G_k, 1.0, hi, 1e-4);
        const double current = out.extensions[k];
        for (double m : {1.0, hi, current}) {
            const double f = G_k(m);
            if (f < best.fx) best.x = m, best.fx = f;
        }
        if (best.x == current) continue;
        TopicPolytope candidate = with_extension(best.x);
        const double candidate_total = geometric_objective(data, candidate);
        if (candidate_total <= total) {
            spdlog::debug("tgdm: topic {} m {:.6g} -> {:.6g}, G {:.6g} -> {:.6g}", k, current, best.x, total,
                          candidate_total);
            beta = candidate.vertices();
            out.extensions[k] = best.x;
            total = candidate_total;
        }
    }
    out.polytope = TopicPolytope(std::move(beta));
    out.objective = total + out.penalty;
    return out;
}

GdmModel fit_ngdm(const NormalizedCorpus& data, const GdmConfig& config) {
    config.validate();
    if (!config.lambda) throw ArgumentError("fit_ngdm needs lambda");
    const auto order = canonical_order(data);
    const NormalizedCorpus canonical = data.permuted(order);
    Rng rng(config.seed);
    ClusteringResult clusters = fit_dpmeans(canonical, *config.lambda, config.max_iters, rng, config.dp_rule);
    const double penalty = *config.lambda * static_cast<double>(clusters.num_clusters);
    GdmModel model = correct(data, order, clusters, config, penalty);
    spdlog::debug("ngdm: lambda={} K'={} objective={:.6g}", *config.lambda, clusters.num_clusters, model.objective);
    if (config.tune) model = tune_extensions(model, data, model.assignments);
    return model;
}

GdmModel fit(const NormalizedCorpus& data, const GdmConfig& config) {
    config.validate();
    return config.lambda ? fit_ngdm(data, config) : fit_gdm(data, config);
}

}  // namespace gdm
