#include "gdm/geometry.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include <spdlog/spdlog.h>

#include "gdm/error.hpp"
#include "gdm/parallel.hpp"

namespace gdm {

TopicPolytope::TopicPolytope(Matrix vertices) : vertices_(std::move(vertices)) {
    if (vertices_.rows() < 1) throw ValidationError("topic polytope needs at least one vertex");
    for (Eigen::Index k = 0; k < vertices_.rows(); ++k) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < vertices_.cols(); ++i) {
            double v = vertices_(k, i);
            if (!(v >= 0.0 && v <= 1.0))
                throw ValidationError("topic " + std::to_string(k) + " has an entry outside [0,1]");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-10)
            throw ValidationError("topic " + std::to_string(k) + " does not sum to 1");
    }
}

namespace {

// Wolfe's minimum-norm-point iteration on the points x_k = vertex_k - q, written
// in terms of the vertex Gram matrix G, cross products c_k = <vertex_k, q> and
// ||q||^2. The affine subproblems only use differences of vertices, so q cancels
// out of them.
class WolfeSolver {
  public:
    WolfeSolver(const Matrix& gram, const Vector& cross, double q_sq, double tol, std::size_t max_iter)
        : G_(gram), c_(cross), q_sq_(q_sq), tol_(tol), max_iter_(max_iter), K_(gram.rows()) {}

    CompactProjection solve() {
        CompactProjection out;
        Vector norms(K_);
        for (Eigen::Index k = 0; k < K_; ++k) norms[k] = G_(k, k) - 2.0 * c_[k] + q_sq_;
        out.scale = std::max(0.0, norms.maxCoeff());
        const double threshold = tol_ * std::max(out.scale, std::numeric_limits<double>::min());

        Eigen::Index first;
        norms.minCoeff(&first);
        weights_ = Vector::Zero(K_);
        weights_[first] = 1.0;
        active_ = {first};

        out.converged = false;
        std::size_t iter = 0;
        while (iter < max_iter_) {
            ++iter;
            Eigen::Index entering = 0;
            const double gap = max_gap(&entering);
            if (gap <= threshold) {
                out.converged = true;
                break;
            }
            if (std::find(active_.begin(), active_.end(), entering) != active_.end()) break;
            active_.push_back(entering);
            // Minor cycles: move toward the affine minimizer until it is interior.
            while (iter < max_iter_) {
                ++iter;
                Vector alpha = affine_minimizer();
                const auto n = static_cast<Eigen::Index>(active_.size());
                bool interior = true;
                for (Eigen::Index s = 0; s < n; ++s) interior = interior && alpha[s] > 0.0;
                if (interior) {
                    for (Eigen::Index s = 0; s < n; ++s) weights_[active_[s]] = alpha[s];
                    break;
                }
                double step = 1.0;
                Eigen::Index leaving = -1;
                for (Eigen::Index s = 0; s < n; ++s) {
                    const double w = weights_[active_[s]];
                    if (alpha[s] <= 0.0 && w - alpha[s] > 0.0) {
                        double t = w / (w - alpha[s]);
                        if (t < step) step = t, leaving = s;
                    }
                }
                for (Eigen::Index s = 0; s < n; ++s) {
                    auto k = active_[s];
                    weights_[k] = step * alpha[s] + (1.0 - step) * weights_[k];
                }
                if (leaving >= 0) weights_[active_[leaving]] = 0.0;
                std::vector<Eigen::Index> kept;
                for (auto k : active_) {
                    if (weights_[k] > 0.0) kept.push_back(k);
                    else weights_[k] = 0.0;
                }
                if (kept.empty()) kept.push_back(first);
                active_ = std::move(kept);
                weights_ /= weights_.sum();
            }
        }
        out.iterations = iter;

        weights_ = weights_.cwiseMax(0.0);
        weights_ /= weights_.sum();
        out.theta = weights_;
        const Vector Gw = G_ * weights_;
        const double wGw = weights_.dot(Gw);
        const double wc = weights_.dot(c_);
        out.sq_distance = std::max(0.0, wGw - 2.0 * wc + q_sq_);
        Eigen::Index ignored;
        out.optimality_gap = max_gap(&ignored);
        if (!out.converged && out.optimality_gap <= threshold) out.converged = true;
        out.theta_unique = supporting_vertices_independent(Gw, wGw, wc, out.scale);
        return out;
    }

  private:
    // max_j (q - p).(vertex_j - p) at the current weights.
    double max_gap(Eigen::Index* argmax) const {
        const Vector Gw = G_ * weights_;
        const double base = weights_.dot(Gw) - weights_.dot(c_);
        double best = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < K_; ++j) {
            double gap = base - Gw[j] + c_[j];
            if (gap > best) best = gap, *argmax = j;
        }
        return best;
    }

    // Affine combination of the active points with minimum norm, via coordinates
    // relative to the first active point.
    Vector affine_minimizer() const {
        const auto n = static_cast<Eigen::Index>(active_.size());
        Vector alpha(n);
        if (n == 1) {
            alpha[0] = 1.0;
            return alpha;
        }
        const Eigen::Index o = active_[0];
        Eigen::MatrixXd D(n - 1, n - 1);
        Vector rhs(n - 1);
        for (Eigen::Index i = 1; i < n; ++i) {
            const Eigen::Index a = active_[i];
            for (Eigen::Index j = 1; j < n; ++j) {
                const Eigen::Index b = active_[j];
                D(i - 1, j - 1) = G_(a, b) - G_(a, o) - G_(b, o) + G_(o, o);
            }
            // -(x_a - x_o).x_o
            rhs[i - 1] = -((G_(a, o) - c_[a]) - (G_(o, o) - c_[o]));
        }
        Vector t = D.completeOrthogonalDecomposition().solve(rhs);
        alpha[0] = 1.0 - t.sum();
        alpha.tail(n - 1) = t;
        return alpha;
    }

    bool supporting_vertices_independent(const Vector& Gw, double wGw, double wc, double scale) const {
        const double ztol = 1e-9 * std::max(scale, 1e-300);
        std::vector<Eigen::Index> support;
        for (Eigen::Index j = 0; j < K_; ++j)
            if (wGw - wc - Gw[j] + c_[j] >= -ztol) support.push_back(j);
        const auto n = static_cast<Eigen::Index>(support.size());
        if (n <= 1) return true;
        const Eigen::Index o = support[0];
        Eigen::MatrixXd D(n - 1, n - 1);
        for (Eigen::Index i = 1; i < n; ++i)
            for (Eigen::Index j = 1; j < n; ++j) {
                const auto a = support[i], b = support[j];
                D(i - 1, j - 1) = G_(a, b) - G_(a, o) - G_(b, o) + G_(o, o);
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(D, Eigen::EigenvaluesOnly);
        const Vector ev = eig.eigenvalues();
        return ev.minCoeff() > 1e-10 * std::max(ev.maxCoeff(), 1e-300);
    }

    const Matrix& G_;
    const Vector& c_;
    double q_sq_;
    double tol_;
    std::size_t max_iter_;
    Eigen::Index K_;
    Vector weights_;
    std::vector<Eigen::Index> active_;
};

void check_finite(const Vector& v, const char* what) {
    if (!v.allFinite()) throw ArgumentError(std::string(what) + " has non-finite entries");
}

}  // namespace

Projector::Projector(const Matrix& vertices, double tol)
    : vertices_(vertices), tol_(tol), max_iterations_(100 * static_cast<std::size_t>(vertices.rows())) {
    if (vertices_.rows() < 1) throw ArgumentError("projector needs at least one vertex");
    if (!(tol > 0.0)) throw ArgumentError("projection tolerance must be positive");
    if (!vertices_.allFinite()) throw ArgumentError("vertices have non-finite entries");
    gram_ = vertices_ * vertices_.transpose();
}

CompactProjection Projector::project_from_products(const Vector& cross, double q_sq) const {
    WolfeSolver solver(gram_, cross, q_sq, tol_, max_iterations_);
    CompactProjection out = solver.solve();
    assert(!out.converged || out.optimality_gap <= tol_ * std::max(out.scale, std::numeric_limits<double>::min()));
    return out;
}

CompactProjection Projector::project(const Vector& query) const {
    if (query.size() != vertices_.cols()) throw ArgumentError("query dimension does not match vertices");
    check_finite(query, "query");
    return project_from_products(vertices_ * query, query.squaredNorm());
}

CompactProjection Projector::project(const NormalizedCorpus& data, std::size_t m) const {
    Vector cross(vertices_.rows());
    for (Eigen::Index k = 0; k < vertices_.rows(); ++k) cross[k] = data.dot(m, vertices_.row(k).data());
    return project_from_products(cross, data.sq_norm(m));
}

ProjectionResult project_point(const Vector& query, const Matrix& vertices, double tol) {
    Projector projector(vertices, tol);
    CompactProjection c = projector.project(query);
    ProjectionResult out;
    out.theta = std::move(c.theta);
    out.point = vertices.transpose() * out.theta;
    out.sq_distance = (query - out.point).squaredNorm();
    out.optimality_gap = c.optimality_gap;
    out.scale = c.scale;
    out.theta_unique = c.theta_unique;
    out.converged = c.converged;
    out.iterations = c.iterations;
    if (!out.converged)
        spdlog::warn("projection did not reach the optimality certificate (gap {:.3e}, {} iterations)",
                     out.optimality_gap, out.iterations);
    return out;
}

ProjectionResult project_point(const Vector& query, const TopicPolytope& polytope, double tol) {
    return project_point(query, polytope.vertices(), tol);
}

BarycentricCoordinates barycentric_coordinates(const ProjectionResult& result) {
    return {result.theta, result.theta_unique};
}

std::vector<double> document_sq_distances(const NormalizedCorpus& data, const TopicPolytope& polytope) {
    if (data.vocab_size() != polytope.vocab_size())
        throw ArgumentError("corpus vocabulary size does not match the polytope");
    Projector projector(polytope.vertices());
    std::vector<double> out(data.num_docs());
    std::atomic<std::size_t> failures{0};
    parallel_for(data.num_docs(), [&](std::size_t m) {
        CompactProjection p = projector.project(data, m);
        if (!p.converged) failures.fetch_add(1);
        out[m] = p.sq_distance;
    });
    if (failures > 0) spdlog::warn("{} projection(s) stopped before the optimality certificate", failures.load());
    return out;
}

double geometric_objective(const NormalizedCorpus& data, const TopicPolytope& polytope) {
    const auto d = document_sq_distances(data, polytope);
    std::vector<double> partial(num_blocks(d.size()), 0.0);
    for (std::size_t b = 0; b < partial.size(); ++b)
        for (std::size_t m = b * kBlockSize; m < std::min(d.size(), (b + 1) * kBlockSize); ++m)
            partial[b] += data.weight(m) * d[m];
    return std::accumulate(partial.begin(), partial.end(), 0.0);
}

double cluster_objective(const NormalizedCorpus& data, const TopicPolytope& polytope,
                         std::span<const std::uint32_t> assignments, std::size_t k) {
    if (k >= polytope.num_topics())
        throw ArgumentError("cluster index " + std::to_string(k) + " out of range (K=" +
                            std::to_string(polytope.num_topics()) + ")");
    if (assignments.size() != data.num_docs()) throw ArgumentError("one assignment per document required");
    if (data.vocab_size() != polytope.vocab_size())
        throw ArgumentError("corpus vocabulary size does not match the polytope");
    Projector projector(polytope.vertices());
    double total = 0.0;
    for (std::size_t m = 0; m < data.num_docs(); ++m)
        if (assignments[m] == k) total += data.weight(m) * projector.project(data, m).sq_distance;
    return total;
}

}  // namespace gdm
