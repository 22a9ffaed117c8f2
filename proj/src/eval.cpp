#include "gdm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gdm/clustering.hpp"
#include "gdm/error.hpp"
#include "gdm/linalg.hpp"
#include "gdm/parallel.hpp"

namespace gdm {

Matrix infer_theta(const TopicPolytope& polytope, const NormalizedCorpus& heldout) {
    if (heldout.vocab_size() != polytope.vocab_size())
        throw ArgumentError("corpus vocabulary size does not match the polytope");
    Projector projector(polytope.vertices());
    Matrix theta(static_cast<Eigen::Index>(heldout.num_docs()), static_cast<Eigen::Index>(polytope.num_topics()));
    parallel_for(heldout.num_docs(), [&](std::size_t m) {
        theta.row(static_cast<Eigen::Index>(m)) = projector.project(heldout, m).theta.transpose();
    });
    return theta;
}

Matrix infer_theta(const TopicPolytope& polytope, const Corpus& heldout) {
    return infer_theta(polytope, normalize(heldout));
}

PerplexityReport perplexity(const TopicPolytope& polytope, const Matrix& theta, const Corpus& heldout,
                            PerplexityMode mode) {
    const std::size_t M = heldout.num_docs();
    if (static_cast<std::size_t>(theta.rows()) != M) throw ArgumentError("one theta row per document required");
    if (static_cast<std::size_t>(theta.cols()) != polytope.num_topics())
        throw ArgumentError("theta columns must match the number of topics");
    if (heldout.vocab_size() != polytope.vocab_size())
        throw ArgumentError("corpus vocabulary size does not match the polytope");
    if (M == 0) throw ArgumentError("perplexity of an empty corpus");

    std::vector<double> doc_ll(M, 0.0);
    std::vector<std::size_t> floored(M, 0);
    parallel_for(M, [&](std::size_t m) {
        Vector p = polytope.vertices().transpose() * theta.row(static_cast<Eigen::Index>(m)).transpose();
        std::size_t n = 0;
        for (Eigen::Index i = 0; i < p.size(); ++i)
            if (!(p[i] >= kProbabilityFloor)) p[i] = kProbabilityFloor, ++n;
        const double sum = p.sum();
        const DocumentView doc = heldout.doc(m);
        double ll = 0.0;
        for (std::size_t j = 0; j < doc.words.size(); ++j) ll += doc.counts[j] * std::log(p[doc.words[j]] / sum);
        doc_ll[m] = ll;
        floored[m] = n;
    });

    PerplexityReport out;
    double per_doc = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
        out.total_log_likelihood += doc_ll[m];
        out.floored_entries += floored[m];
        per_doc += doc_ll[m] / static_cast<double>(heldout.length(m));
    }
    out.total_tokens = heldout.total_tokens();
    out.perplexity = mode == PerplexityMode::kCorpus
                         ? std::exp(-out.total_log_likelihood / static_cast<double>(out.total_tokens))
                         : std::exp(-per_doc / static_cast<double>(M));
    return out;
}

double min_matching_distance(const Matrix& estimated, const Matrix& truth, MatchingMode mode) {
    if (estimated.cols() != truth.cols()) throw ArgumentError("topic sets live in different vocabularies");
    if (estimated.rows() == 0 || truth.rows() == 0) throw ArgumentError("empty topic set");
    Eigen::MatrixXd dist(estimated.rows(), truth.rows());
    for (Eigen::Index a = 0; a < estimated.rows(); ++a)
        for (Eigen::Index b = 0; b < truth.rows(); ++b) dist(a, b) = (estimated.row(a) - truth.row(b)).norm();

    if (mode == MatchingMode::kBottleneck)
        return std::max(dist.rowwise().minCoeff().maxCoeff(), dist.colwise().minCoeff().maxCoeff());

    const Eigen::MatrixXd cost = dist.rows() <= dist.cols() ? dist : Eigen::MatrixXd(dist.transpose());
    const auto match = hungarian_assignment(cost);
    double total = 0.0;
    for (std::size_t r = 0; r < match.size(); ++r)
        total += cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(match[r]));
    return total / static_cast<double>(match.size());
}

double min_matching_distance(const TopicPolytope& estimated, const TopicPolytope& truth, MatchingMode mode) {
    return min_matching_distance(estimated.vertices(), truth.vertices(), mode);
}

BoundReport check_likelihood_bounds(const Matrix& theta, const Matrix& beta, const Corpus& corpus) {
    const std::size_t M = corpus.num_docs();
    if (static_cast<std::size_t>(theta.rows()) != M || theta.cols() != beta.rows() ||
        static_cast<std::size_t>(beta.cols()) != corpus.vocab_size())
        throw ArgumentError("theta, beta and corpus dimensions disagree");

    BoundReport out;
    std::ostringstream offending;
    std::size_t violations = 0;
    for (std::size_t m = 0; m < M; ++m) {
        const Vector p = beta.transpose() * theta.row(static_cast<Eigen::Index>(m)).transpose();
        const DocumentView doc = corpus.doc(m);
        const double N = static_cast<double>(corpus.length(m));
        double quad = 0.0, chi = 0.0, full_chi = 0.0;
        std::size_t j = 0;
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            double w = 0.0;
            if (j < doc.words.size() && doc.words[j] == i) {
                const double count = doc.counts[j++];
                w = count / N;
                if (!(p[i] > 0.0)) {
                    if (violations++ < 20) offending << " (" << m << "," << i << ")";
                    continue;
                }
                out.log_likelihood += count * std::log(p[i]);
                out.empirical_log_likelihood += count * std::log(w);
                const double d2 = (w - p[i]) * (w - p[i]);
                quad += d2;
                chi += d2 / p[i];
            }
            if (p[i] > 0.0) full_chi += (w - p[i]) * (w - p[i]) / p[i];
        }
        out.quadratic_term += 0.5 * N * quad;
        out.chi_square_term += N * chi;
        out.full_chi_square_term += N * full_chi;
    }
    if (violations > 0)
        throw PreconditionError("support condition violated: " + std::to_string(violations) +
                                " present word(s) with zero probability, e.g." + offending.str());
    out.upper_slack = out.empirical_log_likelihood - out.quadratic_term - out.log_likelihood;
    out.lower_slack = out.log_likelihood - (out.empirical_log_likelihood - out.chi_square_term);
    out.full_lower_slack = out.log_likelihood - (out.empirical_log_likelihood - out.full_chi_square_term);
    return out;
}

double spectral_span_check(const NormalizedCorpus& data, std::size_t K) {
    const ClusteringResult best = brute_force_kmeans(data, K);
    const Eigen::MatrixXd centroid_span = orthonormal_basis(Eigen::MatrixXd(best.centroids.transpose()));

    Eigen::MatrixXd X = data.to_dense();
    for (Eigen::Index m = 0; m < X.rows(); ++m) X.row(m) *= std::sqrt(data.weight(static_cast<std::size_t>(m)));
    const SvdResult svd = jacobi_svd(X);
    const double top = svd.singular_values.size() ? svd.singular_values[0] : 0.0;
    Eigen::Index r = 0;
    while (r < static_cast<Eigen::Index>(K) && r < svd.singular_values.size() && svd.singular_values[r] > 1e-10 * top)
        ++r;
    return max_principal_angle(centroid_span, svd.V.leftCols(r));
}

}  // namespace gdm
