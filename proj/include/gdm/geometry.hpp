#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gdm/corpus.hpp"
#include "gdm/types.hpp"

namespace gdm {

/// K topic vertices, each a distribution over the V-word vocabulary.
class TopicPolytope {
  public:
    /// Throws ValidationError unless every row is on the simplex within 1e-10.
    explicit TopicPolytope(Matrix vertices);

    std::size_t num_topics() const { return static_cast<std::size_t>(vertices_.rows()); }
    std::size_t vocab_size() const { return static_cast<std::size_t>(vertices_.cols()); }
    const Matrix& vertices() const { return vertices_; }
    auto vertex(std::size_t k) const { return vertices_.row(static_cast<Eigen::Index>(k)); }

  private:
    Matrix vertices_;
};

/// Nearest point of conv(vertices) to a query.
struct ProjectionResult {
    Vector point;
    /// Convex-combination weights over the vertices.
    Vector theta;
    double sq_distance = 0.0;
    /// max_k (query - point).(vertex_k - point); <= tol * scale certifies optimality.
    double optimality_gap = 0.0;
    /// Scale used for the certificate: max_k ||vertex_k - query||^2.
    double scale = 0.0;
    /// False when the vertices that can represent `point` are affinely dependent.
    bool theta_unique = true;
    bool converged = true;
    std::size_t iterations = 0;
};

/// Compact projection output used in bulk evaluation (no V-dimensional point).
struct CompactProjection {
    Vector theta;
    double sq_distance = 0.0;
    double optimality_gap = 0.0;
    double scale = 0.0;
    bool theta_unique = true;
    bool converged = true;
    std::size_t iterations = 0;
};

inline constexpr double kDefaultProjectionTol = 1e-10;

/// Projects points onto the convex hull of a fixed vertex set.
///
/// Runs Wolfe's minimum-norm-point method on the translated vertices
/// (vertex_k - query). Everything is expressed through inner products, so after
/// the K x K vertex Gram matrix is formed each projection costs O(K nnz + K^3).
/// Thread-safe for concurrent projections.
class Projector {
  public:
    explicit Projector(const Matrix& vertices, double tol = kDefaultProjectionTol);

    std::size_t num_vertices() const { return static_cast<std::size_t>(vertices_.rows()); }
    const Matrix& vertices() const { return vertices_; }
    const Matrix& gram() const { return gram_; }

    CompactProjection project(const Vector& query) const;
    /// Row m of a normalized corpus.
    CompactProjection project(const NormalizedCorpus& data, std::size_t m) const;
    /// Projection from precomputed inner products: cross[k] = <vertex_k, q>, q_sq = ||q||^2.
    CompactProjection project_from_products(const Vector& cross, double q_sq) const;

  private:
    Matrix vertices_;
    Matrix gram_;
    double tol_;
    std::size_t max_iterations_;
};

/// Euclidean projection of `query` onto conv(rows of `vertices`).
/// Throws ArgumentError on non-finite input or a dimension mismatch.
ProjectionResult project_point(const Vector& query, const Matrix& vertices,
                               double tol = kDefaultProjectionTol);
ProjectionResult project_point(const Vector& query, const TopicPolytope& polytope,
                               double tol = kDefaultProjectionTol);

struct BarycentricCoordinates {
    Vector theta;
    /// False when other convex combinations of the vertices give the same point.
    bool unique = true;
};

BarycentricCoordinates barycentric_coordinates(const ProjectionResult& result);

/// Squared distance from every document to the polytope.
std::vector<double> document_sq_distances(const NormalizedCorpus& data, const TopicPolytope& polytope);

/// G(B) = sum_m N_m min_{x in B} ||x - w_m||^2.
double geometric_objective(const NormalizedCorpus& data, const TopicPolytope& polytope);

/// G(B) restricted to documents assigned to cluster k; k indexes topics of the polytope.
double cluster_objective(const NormalizedCorpus& data, const TopicPolytope& polytope,
                         std::span<const std::uint32_t> assignments, std::size_t k);

}  // namespace gdm
