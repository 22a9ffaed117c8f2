#pragma once

#include <cstdint>
#include <vector>

#include "gdm/corpus.hpp"
#include "gdm/geometry.hpp"
#include "gdm/types.hpp"

namespace gdm {

/// Topic proportions of each document: barycentric coordinates of its projection.
Matrix infer_theta(const TopicPolytope& polytope, const Corpus& heldout);
Matrix infer_theta(const TopicPolytope& polytope, const NormalizedCorpus& heldout);

enum class PerplexityMode {
    /// exp(-sum of log-likelihoods / total tokens)
    kCorpus,
    /// exp(-mean over documents of log-likelihood / N_m)
    kPerDocumentMean,
};

struct PerplexityReport {
    double perplexity = 0.0;
    double total_log_likelihood = 0.0;
    std::uint64_t total_tokens = 0;
    /// Entries of theta * beta raised to the probability floor.
    std::size_t floored_entries = 0;
};

inline constexpr double kProbabilityFloor = 1e-12;

PerplexityReport perplexity(const TopicPolytope& polytope, const Matrix& theta, const Corpus& heldout,
                            PerplexityMode mode = PerplexityMode::kCorpus);

enum class MatchingMode {
    /// max over both sets of the distance to the nearest vertex of the other set
    kBottleneck,
    /// mean distance under the optimal one-to-one matching of the smaller set
    kHungarianMean,
};

double min_matching_distance(const TopicPolytope& estimated, const TopicPolytope& truth,
                             MatchingMode mode = MatchingMode::kBottleneck);
double min_matching_distance(const Matrix& estimated, const Matrix& truth,
                             MatchingMode mode = MatchingMode::kBottleneck);

/// Both sides of the likelihood sandwich for fixed (theta, beta):
///   L(W) - 1/2 sum_m N_m sum_{i in U_m} (w_mi - p_mi)^2  >=  L(theta, beta)
///   L(theta, beta)  >=  L(W) - sum_m N_m sum_{i in U_m} (w_mi - p_mi)^2 / p_mi
/// where U_m is the support of document m.
struct BoundReport {
    double log_likelihood = 0.0;           // L(theta, beta)
    double empirical_log_likelihood = 0.0;  // L(W)
    double quadratic_term = 0.0;            // 1/2 sum N_m sum_U (w - p)^2
    double chi_square_term = 0.0;           // sum N_m sum_U (w - p)^2 / p
    /// Same chi-square term summed over the whole vocabulary (entries with p > 0).
    double full_chi_square_term = 0.0;
    /// L(W) - quadratic_term - L(theta, beta)
    double upper_slack = 0.0;
    /// L(theta, beta) - (L(W) - chi_square_term)
    double lower_slack = 0.0;
    /// L(theta, beta) - (L(W) - full_chi_square_term)
    double full_lower_slack = 0.0;

    bool holds(double tol = 1e-9) const { return upper_slack >= -tol && lower_slack >= -tol; }
};

/// Throws PreconditionError listing (document, word) pairs where a present word has p = 0.
BoundReport check_likelihood_bounds(const Matrix& theta, const Matrix& beta, const Corpus& corpus);

/// Largest principal angle between the span of the optimal weighted k-means
/// centroids (found by enumeration) and the span of the top-K right singular
/// vectors of Q^{1/2} W, Q = diag(N_m).
double spectral_span_check(const NormalizedCorpus& data, std::size_t K);

}  // namespace gdm
