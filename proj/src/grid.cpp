#include "fracstep/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fracstep {

namespace {

// Chebyshev collocation differentiation matrix on x_i = cos(pi i/(n-1))
// (Trefethen, Spectral Methods in MATLAB, program cheb).
Eigen::MatrixXd cheb_diff(const Eigen::VectorXd& x) {
    const int n = static_cast<int>(x.size());
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i) {
        c(i) = (i == 0 || i == n - 1) ? 2.0 : 1.0;
        if (i % 2 == 1) c(i) = -c(i);
    }
    Eigen::MatrixXd d(n, n);
    for (int i = 0; i < n; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            d(i, j) = (c(i) / c(j)) / (x(i) - x(j));
            rowsum += d(i, j);
        }
        d(i, i) = -rowsum;  // negative-sum trick for the diagonal
    }
    return d;
}

// Clenshaw-Curtis weights on the CGL nodes (Trefethen clencurt).
Eigen::VectorXd clencurt(int n) {
    const int m = n - 1;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd theta(n);
    for (int i = 0; i < n; ++i) theta(i) = std::numbers::pi * i / m;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(m - 1);
    if (m % 2 == 0) {
        w(0) = 1.0 / (m * m - 1);
        w(m) = w(0);
        for (int k = 1; k < m / 2; ++k)
            for (int i = 1; i < m; ++i) v(i - 1) -= 2.0 * std::cos(2.0 * k * theta(i)) / (4.0 * k * k - 1);
        for (int i = 1; i < m; ++i) v(i - 1) -= std::cos(1.0 * m * theta(i)) / (m * m - 1);
    } else {
        w(0) = 1.0 / (m * m);
        w(m) = w(0);
        for (int k = 1; k <= (m - 1) / 2; ++k)
            for (int i = 1; i < m; ++i) v(i - 1) -= 2.0 * std::cos(2.0 * k * theta(i)) / (4.0 * k * k - 1);
    }
    for (int i = 1; i < m; ++i) w(i) = 2.0 * v(i - 1) / m;
    return w;
}

}  // namespace

double SpatialGrid::l2_norm(const Eigen::MatrixXd& field) const {
    const Eigen::MatrixXd sq = field.array().square();
    return std::sqrt(quad_weights.dot(sq * quad_weights));
}

SpatialGrid build_grid(int n) {
    if (n < 3) throw std::invalid_argument("build_grid: need n >= 3");
    SpatialGrid g;
    g.n = n;
    g.nodes.resize(n);
    for (int i = 0; i < n; ++i) g.nodes(i) = std::cos(std::numbers::pi * i / (n - 1));
    const Eigen::MatrixXd d = cheb_diff(g.nodes);
    g.d2 = d * d;
    const int m = n - 2;
    const Eigen::MatrixXd d2i = g.d2.block(1, 1, m, m);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m, m);
    g.laplacian = Eigen::MatrixXd::Zero(m * m, m * m);
    // Kronecker sum kron(D2i, I) + kron(I, D2i) on row-major interior indices.
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int l = 0; l < m; ++l) {
                g.laplacian(i * m + j, l * m + j) += d2i(i, l);
                g.laplacian(i * m + j, i * m + l) += d2i(j, l);
            }
    g.quad_weights = clencurt(n);
    return g;
}

}  // namespace fracstep
