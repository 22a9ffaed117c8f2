#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace gdm {

struct SvdResult {
    /// Descending.
    Eigen::VectorXd singular_values;
    /// Columns are the right singular vectors, in the order of singular_values.
    Eigen::MatrixXd V;
    std::size_t sweeps = 0;
};

/// One-sided (Hestenes) Jacobi SVD. Meant for small dense matrices.
SvdResult jacobi_svd(const Eigen::MatrixXd& A, double tol = 1e-15, std::size_t max_sweeps = 100);

/// Orthonormal basis (as columns) of the column space of `X`, dropping
/// directions whose singular value is below rel_tol * largest.
Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& X, double rel_tol = 1e-10);

/// Largest principal angle between the column spaces of two orthonormal bases.
/// Subspaces of different dimension are reported as pi/2.
double max_principal_angle(const Eigen::MatrixXd& Qa, const Eigen::MatrixXd& Qb);

/// Minimum-cost assignment of rows to distinct columns (rows <= cols).
/// Returns the column chosen for each row.
std::vector<std::size_t> hungarian_assignment(const Eigen::MatrixXd& cost);

}  // namespace gdm
