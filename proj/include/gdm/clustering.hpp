#pragma once

#include <cstdint>
#include <vector>

#include "gdm/corpus.hpp"
#include "gdm/rng.hpp"
#include "gdm/types.hpp"

namespace gdm {

/// Output of a (weighted) clustering run.
///
/// `objective` is the weighted within-cluster sum of squares
/// sum_k sum_{m in C_k} N_m ||w_m - mu_k||^2, recomputed densely at the end.
/// For DP-means `penalized_objective` adds lambda * num_clusters.
struct ClusteringResult {
    Matrix centroids;
    std::vector<std::uint32_t> assignments;
    double objective = 0.0;
    double penalized_objective = 0.0;
    std::size_t num_clusters = 0;
    /// Objective after every iteration of the winning run (penalized for DP-means).
    std::vector<double> objective_trace;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Weighted k-means++ seeding: the first seed is drawn with probability
/// proportional to N_m, later seeds proportional to N_m * D(m)^2.
Matrix kmeanspp_init(const NormalizedCorpus& data, std::size_t K, Rng& rng);

struct KMeansOptions {
    std::size_t restarts = 10;
    std::size_t max_iters = 1500;
    /// Stop when the relative objective decrease falls below this.
    double rel_tol = 1e-10;
};

/// Best-of-restarts weighted Lloyd iterations from k-means++ seeds.
ClusteringResult fit_kmeans(const NormalizedCorpus& data, std::size_t K, const KMeansOptions& options,
                            Rng& rng);
ClusteringResult fit_kmeans(const NormalizedCorpus& data, std::size_t K, std::size_t restarts,
                            std::size_t max_iters, Rng& rng);

/// Exact weighted k-means by enumerating every assignment with all clusters
/// nonempty. Requires K^M <= 1e7.
ClusteringResult brute_force_kmeans(const NormalizedCorpus& data, std::size_t K);

enum class DpOpeningRule {
    /// Open a cluster when N_m ||w_m - mu_k||^2 > lambda for every k.
    kWeighted,
    /// Open a cluster when ||w_m - mu_k||^2 > lambda / mean(N) for every k.
    kUnweighted,
};

/// Weighted DP-means. Documents are visited in an order shuffled once by `rng`.
ClusteringResult fit_dpmeans(const NormalizedCorpus& data, double lambda, std::size_t max_iters,
                             Rng& rng, DpOpeningRule rule = DpOpeningRule::kWeighted);

/// Weighted means of the assigned rows; clusters must be nonempty.
Matrix weighted_centroids(const NormalizedCorpus& data, std::span<const std::uint32_t> assignments,
                          std::size_t num_clusters);

/// sum_m N_m ||w_m - centroid(assignment_m)||^2 computed densely (no cancellation).
double within_cluster_objective(const NormalizedCorpus& data, const Matrix& centroids,
                                std::span<const std::uint32_t> assignments);

}  // namespace gdm
