#pragma once

#include <Eigen/Dense>

namespace fracstep {

/// Chebyshev-Gauss-Lobatto collocation grid on [-1,1]^2 with the dense
/// interior Laplacian (homogeneous Dirichlet rows/columns eliminated).
struct SpatialGrid {
    int n = 0;                    // points per dimension
    Eigen::VectorXd nodes;        // x_i = cos(pi i/(n-1)), descending
    Eigen::MatrixXd d2;           // full 1D second-derivative matrix, n x n
    Eigen::MatrixXd laplacian;    // Kronecker sum on the (n-2)^2 interior points
    Eigen::VectorXd quad_weights; // Clenshaw-Curtis weights on the nodes

    int interior_size() const { return (n - 2) * (n - 2); }

    /// Row-major interior index of grid point (i, j), 1 <= i,j <= n-2.
    int interior_index(int i, int j) const { return (i - 1) * (n - 2) + (j - 1); }

    /// Discrete L2 norm over [-1,1]^2 of a full-grid field (n x n, row-major
    /// in x) via the tensorized Clenshaw-Curtis rule.
    double l2_norm(const Eigen::MatrixXd& field) const;
};

/// Builds the CGL grid, differentiation matrices and interior Laplacian.
/// Requires n >= 3.
SpatialGrid build_grid(int n);

}  // namespace fracstep
