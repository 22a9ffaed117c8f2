#include "gdm/clustering.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "gdm/error.hpp"
#include "gdm/parallel.hpp"

namespace gdm {

namespace {

constexpr std::uint32_t kUnassigned = std::numeric_limits<std::uint32_t>::max();

struct Nearest {
    std::uint32_t cluster;
    double sq_distance;
};

// Lowest index wins ties.
Nearest nearest_centroid(const NormalizedCorpus& data, std::size_t m, const Matrix& centroids,
                         const std::vector<double>& centroid_sq_norms) {
    Nearest best{0, std::numeric_limits<double>::infinity()};
    for (Eigen::Index k = 0; k < centroids.rows(); ++k) {
        double d = data.sq_distance(m, centroids.row(k).data(), centroid_sq_norms[k]);
        if (d < best.sq_distance) best = {static_cast<std::uint32_t>(k), d};
    }
    return best;
}

std::vector<double> row_sq_norms(const Matrix& m) {
    std::vector<double> out(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index k = 0; k < m.rows(); ++k) out[k] = m.row(k).squaredNorm();
    return out;
}

// sum_m N_m ||w_m - mu_{a_m}||^2 via the expanded form; used for iteration traces.
double fast_objective(const NormalizedCorpus& data, const Matrix& centroids,
                      std::span<const std::uint32_t> assignments) {
    const auto sq = row_sq_norms(centroids);
    std::vector<double> partial(num_blocks(data.num_docs()), 0.0);
    parallel_blocks(data.num_docs(), [&](std::size_t b, std::size_t begin, std::size_t end) {
        double acc = 0.0;
        for (std::size_t m = begin; m < end; ++m) {
            auto k = assignments[m];
            acc += data.weight(m) * data.sq_distance(m, centroids.row(k).data(), sq[k]);
        }
        partial[b] = acc;
    });
    return std::accumulate(partial.begin(), partial.end(), 0.0);
}

ClusteringResult run_lloyd(const NormalizedCorpus& data, Matrix centroids,
                           const KMeansOptions& options) {
    const std::size_t M = data.num_docs();
    const auto K = static_cast<std::size_t>(centroids.rows());
    ClusteringResult result;
    result.assignments.assign(M, kUnassigned);
    std::vector<double> cost(M, 0.0);
    std::vector<char> block_changed(num_blocks(M), 0);
    double previous = std::numeric_limits<double>::infinity();

    for (std::size_t iter = 1; iter <= options.max_iters; ++iter) {
        result.iterations = iter;
        const auto sq = row_sq_norms(centroids);
        std::fill(block_changed.begin(), block_changed.end(), 0);
        parallel_blocks(M, [&](std::size_t b, std::size_t begin, std::size_t end) {
            for (std::size_t m = begin; m < end; ++m) {
                Nearest n = nearest_centroid(data, m, centroids, sq);
                if (n.cluster != result.assignments[m]) block_changed[b] = 1;
                result.assignments[m] = n.cluster;
                cost[m] = data.weight(m) * n.sq_distance;
            }
        });
        bool changed = std::any_of(block_changed.begin(), block_changed.end(), [](char c) { return c; });

        // Empty clusters are reseeded at the row contributing most to the objective.
        std::vector<std::size_t> sizes(K, 0);
        for (auto a : result.assignments) ++sizes[a];
        for (std::size_t k = 0; k < K; ++k) {
            if (sizes[k] > 0) continue;
            std::size_t donor = M;
            for (std::size_t m = 0; m < M; ++m) {
                if (sizes[result.assignments[m]] < 2) continue;
                if (donor == M || cost[m] > cost[donor]) donor = m;
            }
            if (donor == M) throw ArgumentError("k-means: more clusters than separable documents");
            --sizes[result.assignments[donor]];
            result.assignments[donor] = static_cast<std::uint32_t>(k);
            sizes[k] = 1;
            cost[donor] = 0.0;
            changed = true;
        }

        if (!changed) {
            result.converged = true;
            break;
        }
        centroids = weighted_centroids(data, result.assignments, K);
        const double objective = fast_objective(data, centroids, result.assignments);
        assert(objective <= previous * (1.0 + 1e-9) + 1e-12);
        result.objective_trace.push_back(objective);
        if (std::isfinite(previous) && previous - objective <= options.rel_tol * previous) {
            result.converged = true;
            break;
        }
        previous = objective;
    }
    result.centroids = std::move(centroids);
    result.num_clusters = K;
    result.objective = within_cluster_objective(data, result.centroids, result.assignments);
    result.penalized_objective = result.objective;
    return result;
}

}  // namespace

Matrix weighted_centroids(const NormalizedCorpus& data, std::span<const std::uint32_t> assignments,
                          std::size_t num_clusters) {
    const auto K = static_cast<Eigen::Index>(num_clusters);
    const auto V = static_cast<Eigen::Index>(data.vocab_size());
    const std::size_t blocks = num_blocks(data.num_docs());
    std::vector<Matrix> sums(blocks);
    std::vector<std::vector<double>> mass(blocks);
    parallel_blocks(data.num_docs(), [&](std::size_t b, std::size_t begin, std::size_t end) {
        Matrix s = Matrix::Zero(K, V);
        std::vector<double> w(num_clusters, 0.0);
        for (std::size_t m = begin; m < end; ++m) {
            const auto k = assignments[m];
            const double n = data.weight(m);
            auto words = data.words(m);
            auto values = data.values(m);
            for (std::size_t j = 0; j < words.size(); ++j) s(k, words[j]) += n * values[j];
            w[k] += n;
        }
        sums[b] = std::move(s);
        mass[b] = std::move(w);
    });
    Matrix total = Matrix::Zero(K, V);
    std::vector<double> total_mass(num_clusters, 0.0);
    for (std::size_t b = 0; b < blocks; ++b) {
        total += sums[b];
        for (std::size_t k = 0; k < num_clusters; ++k) total_mass[k] += mass[b][k];
    }
    for (Eigen::Index k = 0; k < K; ++k) {
        if (!(total_mass[k] > 0.0)) throw ArgumentError("weighted_centroids: empty cluster");
        total.row(k) /= total_mass[k];
    }
    return total;
}

double within_cluster_objective(const NormalizedCorpus& data, const Matrix& centroids,
                                std::span<const std::uint32_t> assignments) {
    const std::size_t V = data.vocab_size();
    std::vector<double> partial(num_blocks(data.num_docs()), 0.0);
    parallel_blocks(data.num_docs(), [&](std::size_t b, std::size_t begin, std::size_t end) {
        double acc = 0.0;
        for (std::size_t m = begin; m < end; ++m) {
            const double* mu = centroids.row(assignments[m]).data();
            auto words = data.words(m);
            auto values = data.values(m);
            double d = 0.0;
            std::size_t j = 0;
            for (std::size_t i = 0; i < V; ++i) {
                double x = (j < words.size() && words[j] == i) ? values[j++] : 0.0;
                double diff = x - mu[i];
                d += diff * diff;
            }
            acc += data.weight(m) * d;
        }
        partial[b] = acc;
    });
    return std::accumulate(partial.begin(), partial.end(), 0.0);
}

Matrix kmeanspp_init(const NormalizedCorpus& data, std::size_t K, Rng& rng) {
    const std::size_t M = data.num_docs();
    if (K < 1) throw ArgumentError("kmeans++: K must be at least 1");
    const std::size_t distinct = data.count_distinct_rows();
    if (K > distinct)
        throw ArgumentError("kmeans++: K=" + std::to_string(K) + " exceeds the number of distinct rows (" +
                            std::to_string(distinct) + ")");
    std::vector<std::size_t> seeds;
    seeds.push_back(sample_proportional(data.weights(), rng));
    std::vector<double> min_sq(M), score(M);
    for (std::size_t m = 0; m < M; ++m) min_sq[m] = data.sq_distance(m, seeds[0]);
    while (seeds.size() < K) {
        for (std::size_t m = 0; m < M; ++m) score[m] = data.weight(m) * min_sq[m];
        std::size_t next = sample_proportional(score, rng);
        seeds.push_back(next);
        for (std::size_t m = 0; m < M; ++m) min_sq[m] = std::min(min_sq[m], data.sq_distance(m, next));
    }
    Matrix out(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(data.vocab_size()));
    for (std::size_t k = 0; k < K; ++k) out.row(static_cast<Eigen::Index>(k)) = data.dense_row(seeds[k]).transpose();
    return out;
}

ClusteringResult fit_kmeans(const NormalizedCorpus& data, std::size_t K, const KMeansOptions& options,
                            Rng& rng) {
    if (K < 1) throw ArgumentError("fit_kmeans: K must be at least 1");
    if (options.restarts < 1) throw ArgumentError("fit_kmeans: restarts must be at least 1");
    if (K > data.num_docs()) throw ArgumentError("fit_kmeans: K exceeds the number of documents");
    ClusteringResult best;
    bool have_best = false;
    for (std::size_t r = 0; r < options.restarts; ++r) {
        ClusteringResult run = run_lloyd(data, kmeanspp_init(data, K, rng), options);
        if (!have_best || run.objective < best.objective) {
            best = std::move(run);
            have_best = true;
        }
    }
    return best;
}

ClusteringResult fit_kmeans(const NormalizedCorpus& data, std::size_t K, std::size_t restarts,
                            std::size_t max_iters, Rng& rng) {
    KMeansOptions options;
    options.restarts = restarts;
    options.max_iters = max_iters;
    return fit_kmeans(data, K, options, rng);
}

ClusteringResult brute_force_kmeans(const NormalizedCorpus& data, std::size_t K) {
    const std::size_t M = data.num_docs();
    if (K < 1 || K > M) throw ArgumentError("brute_force_kmeans: need 1 <= K <= M");
    if (std::pow(static_cast<double>(K), static_cast<double>(M)) > 1e7)
        throw ArgumentError("brute_force_kmeans: K^M exceeds 1e7");

    const Matrix X = data.to_dense();
    const auto V = X.cols();
    std::vector<double> weighted_sq(M);
    double total_weighted_sq = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
        weighted_sq[m] = data.weight(m) * data.sq_norm(m);
        total_weighted_sq += weighted_sq[m];
    }

    // Cluster of document 0 is fixed to 0; labels are otherwise unconstrained.
    std::vector<std::uint32_t> labels(M, 0), best_labels;
    double best = std::numeric_limits<double>::infinity();
    Matrix sums(static_cast<Eigen::Index>(K), V);
    std::vector<double> mass(K);
    for (;;) {
        sums.setZero();
        std::fill(mass.begin(), mass.end(), 0.0);
        for (std::size_t m = 0; m < M; ++m) {
            sums.row(labels[m]) += data.weight(m) * X.row(static_cast<Eigen::Index>(m));
            mass[labels[m]] += data.weight(m);
        }
        if (std::all_of(mass.begin(), mass.end(), [](double w) { return w > 0.0; })) {
            double objective = total_weighted_sq;
            for (std::size_t k = 0; k < K; ++k)
                objective -= sums.row(static_cast<Eigen::Index>(k)).squaredNorm() / mass[k];
            if (objective < best) {
                best = objective;
                best_labels = labels;
            }
        }
        // Next assignment in odometer order over documents 1..M-1.
        std::size_t pos = 1;
        while (pos < M && ++labels[pos] == K) labels[pos++] = 0;
        if (pos >= M) break;
    }
    if (best_labels.empty()) throw ArgumentError("brute_force_kmeans: no assignment with nonempty clusters");

    ClusteringResult result;
    result.assignments = std::move(best_labels);
    result.centroids = weighted_centroids(data, result.assignments, K);
    result.num_clusters = K;
    result.objective = within_cluster_objective(data, result.centroids, result.assignments);
    result.penalized_objective = result.objective;
    result.converged = true;
    return result;
}

ClusteringResult fit_dpmeans(const NormalizedCorpus& data, double lambda, std::size_t max_iters,
                             Rng& rng, DpOpeningRule rule) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ArgumentError("fit_dpmeans: lambda must be positive");
    if (max_iters < 1) throw ArgumentError("fit_dpmeans: max_iters must be at least 1");
    const std::size_t M = data.num_docs();
    if (M == 0) throw ArgumentError("fit_dpmeans: empty data");

    const double mean_weight =
        std::accumulate(data.weights().begin(), data.weights().end(), 0.0) / static_cast<double>(M);
    auto opens = [&](std::size_t m, double sq_distance) {
        return rule == DpOpeningRule::kWeighted ? data.weight(m) * sq_distance > lambda
                                                : sq_distance > lambda / mean_weight;
    };

    std::vector<std::size_t> order(M);
    std::iota(order.begin(), order.end(), 0);
    shuffle(order, rng);

    ClusteringResult result;
    result.assignments.assign(M, 0);
    std::vector<Vector> centroids{weighted_centroids(data, result.assignments, 1).row(0).transpose()};
    std::vector<double> sq{centroids[0].squaredNorm()};

    for (std::size_t iter = 1; iter <= max_iters; ++iter) {
        result.iterations = iter;
        bool changed = false;
        for (std::size_t m : order) {
            std::uint32_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < centroids.size(); ++k) {
                double d = data.sq_distance(m, centroids[k].data(), sq[k]);
                if (d < best_d) best_d = d, best = static_cast<std::uint32_t>(k);
            }
            if (opens(m, best_d)) {
                centroids.push_back(data.dense_row(m));
                sq.push_back(data.sq_norm(m));
                best = static_cast<std::uint32_t>(centroids.size() - 1);
            }
            if (best != result.assignments[m]) changed = true;
            result.assignments[m] = best;
        }

        // Drop emptied clusters, keeping the remaining ones in index order.
        std::vector<std::uint32_t> remap(centroids.size(), kUnassigned);
        for (auto a : result.assignments) remap[a] = 0;
        std::uint32_t next = 0;
        for (auto& r : remap)
            if (r != kUnassigned) r = next++;
        for (auto& a : result.assignments) a = remap[a];
        const Matrix updated = weighted_centroids(data, result.assignments, next);
        centroids.assign(next, Vector());
        sq.assign(next, 0.0);
        for (std::uint32_t k = 0; k < next; ++k) {
            centroids[k] = updated.row(k).transpose();
            sq[k] = centroids[k].squaredNorm();
        }
        const double penalized = fast_objective(data, updated, result.assignments) + lambda * next;
        assert(result.objective_trace.empty() ||
               penalized <= result.objective_trace.back() * (1.0 + 1e-9) + 1e-12);
        result.objective_trace.push_back(penalized);
        if (!changed) {
            result.converged = true;
            break;
        }
    }

    result.num_clusters = centroids.size();
    result.centroids.resize(static_cast<Eigen::Index>(centroids.size()),
                            static_cast<Eigen::Index>(data.vocab_size()));
    for (std::size_t k = 0; k < centroids.size(); ++k)
        result.centroids.row(static_cast<Eigen::Index>(k)) = centroids[k].transpose();
    result.objective = within_cluster_objective(data, result.centroids, result.assignments);
    result.penalized_objective = result.objective + lambda * static_cast<double>(result.num_clusters);
    return result;
}

}  // namespace gdm
