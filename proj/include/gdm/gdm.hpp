#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gdm/clustering.hpp"
#include "gdm/corpus.hpp"
#include "gdm/geometry.hpp"
#include "gdm/types.hpp"

namespace gdm {

struct GdmConfig {
    /// Number of topics (GDM / tGDM).
    std::optional<std::size_t> K;
    /// DP-means penalty (nGDM). Exactly one of K and lambda is set.
    std::optional<double> lambda;
    std::size_t restarts = 10;
    std::size_t max_iters = 1500;
    /// Center at sum N_m w_m / sum N_m instead of the plain mean.
    bool weighted_center = true;
    /// Line-search the extension scalars after the default correction.
    bool tune = false;
    std::uint64_t seed = 0;
    DpOpeningRule dp_rule = DpOpeningRule::kWeighted;

    void validate() const;
};

struct GdmModel {
    TopicPolytope polytope;
    Vector center;
    Matrix centroids;
    std::vector<double> extensions;
    std::vector<double> radii;
    /// Geometric objective of the polytope plus `penalty`.
    double objective = 0.0;
    /// lambda * K' for nGDM, 0 otherwise.
    double penalty = 0.0;
    /// Cluster of every document, in the caller's document order.
    std::vector<std::uint32_t> assignments;
    GdmConfig config;

    std::size_t num_topics() const { return polytope.num_topics(); }
    double geometric_objective() const { return objective - penalty; }
};

Vector data_center(const NormalizedCorpus& data, bool weighted);

/// R_k = max distance from `center` to a document of cluster k (0 for empty clusters).
std::vector<double> cluster_radii(const NormalizedCorpus& data, const Vector& center,
                                  std::span<const std::uint32_t> assignments, std::size_t num_clusters);

/// m_k = R_k / ||C - mu_k||. Throws DegenerateClusterError when a centroid sits on the center.
std::vector<double> default_extensions(const Vector& center, const Matrix& centroids,
                                       std::span<const double> radii);

/// C + m (mu - C), with negative entries zeroed and the result renormalized.
Vector extend_and_threshold(const Vector& center, const Vector& centroid, double m);

/// Algorithm GDM: weighted k-means, then extend each centroid away from the data center.
/// With config.tune the extensions are then line-searched (tGDM).
GdmModel fit_gdm(const NormalizedCorpus& data, const GdmConfig& config);

/// Per-topic bounded line search of m_k over [1, default m_k] on the cluster-restricted
/// objective, in ascending topic order. A step is kept only if the total objective does
/// not increase.
GdmModel tune_extensions(const GdmModel& model, const NormalizedCorpus& data,
                         std::span<const std::uint32_t> assignments);

/// DP-means clustering followed by the same geometric correction.
GdmModel fit_ngdm(const NormalizedCorpus& data, const GdmConfig& config);

/// Dispatches on which of K / lambda is set.
GdmModel fit(const NormalizedCorpus& data, const GdmConfig& config);

/// Order in which documents are processed internally: by weight, then by row contents.
/// Identical for any permutation of the same multiset of documents.
std::vector<std::size_t> canonical_order(const NormalizedCorpus& data);

}  // namespace gdm
