#include "gdm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gdm/error.hpp"

namespace gdm {

SvdResult jacobi_svd(const Eigen::MatrixXd& A, double tol, std::size_t max_sweeps) {
    const Eigen::Index n = A.cols();
    Eigen::MatrixXd U = A;
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);
    SvdResult out;
    bool rotated = true;
    while (rotated && out.sweeps < max_sweeps) {
        rotated = false;
        ++out.sweeps;
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double alpha = U.col(p).squaredNorm();
                const double beta = U.col(q).squaredNorm();
                const double gamma = U.col(p).dot(U.col(q));
                if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (Eigen::Index i = 0; i < U.rows(); ++i) {
                    const double up = U(i, p), uq = U(i, q);
                    U(i, p) = c * up - s * uq;
                    U(i, q) = s * up + c * uq;
                }
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double vp = V(i, p), vq = V(i, q);
                    V(i, p) = c * vp - s * vq;
                    V(i, q) = s * vp + c * vq;
                }
            }
        }
    }

    Eigen::VectorXd sigma(n);
    for (Eigen::Index j = 0; j < n; ++j) sigma[j] = U.col(j).norm();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return sigma[a] > sigma[b]; });
    out.singular_values.resize(n);
    out.V.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        out.singular_values[j] = sigma[order[j]];
        out.V.col(j) = V.col(order[j]);
    }
    return out;
}

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& X, double rel_tol) {
    if (X.cols() == 0) return Eigen::MatrixXd(X.rows(), 0);
    // right singular vectors of X^T span the column space of X
    SvdResult svd = jacobi_svd(X.transpose());
    const double top = svd.singular_values.size() ? svd.singular_values[0] : 0.0;
    Eigen::Index rank = 0;
    while (rank < svd.singular_values.size() && top > 0.0 && svd.singular_values[rank] > rel_tol * top) ++rank;
    return svd.V.leftCols(rank);
}

double max_principal_angle(const Eigen::MatrixXd& Qa, const Eigen::MatrixXd& Qb) {
    if (Qa.rows() != Qb.rows()) throw ArgumentError("subspaces live in different ambient dimensions");
    if (Qa.cols() != Qb.cols()) return std::acos(0.0);
    if (Qa.cols() == 0) return 0.0;
    // sin of the largest angle = ||(I - Qb Qb^T) Qa||_2; accurate for tiny angles
    const Eigen::MatrixXd residual = Qa - Qb * (Qb.transpose() * Qa);
    const double s = jacobi_svd(residual).singular_values[0];
    return std::asin(std::min(1.0, s));
}

std::vector<std::size_t> hungarian_assignment(const Eigen::MatrixXd& cost) {
    const auto n = static_cast<std::size_t>(cost.rows());
    const auto m = static_cast<std::size_t>(cost.cols());
    if (n > m) throw ArgumentError("hungarian_assignment needs rows <= cols");
    const double inf = std::numeric_limits<double>::infinity();
    // potentials, 1-based with a sentinel column 0
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> match(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<bool> used(m + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
                if (cur < minv[j]) minv[j] = cur, way[j] = j0;
                if (minv[j] < delta) delta = minv[j], j1 = j;
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> out(n);
    for (std::size_t j = 1; j <= m; ++j)
        if (match[j] != 0) out[match[j] - 1] = j - 1;
    return out;
}

}  // namespace gdm
