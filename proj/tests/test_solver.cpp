#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracstep/grid.hpp"
#include "fracstep/solver.hpp"
#include "test_util.hpp"

using namespace fracstep;
using testutil::rel_err;

TEST_CASE("grid nodes and validation") {
    CHECK_THROWS_AS(build_grid(2), std::invalid_argument);
    const SpatialGrid g = build_grid(3);
    CHECK(g.nodes(0) == doctest::Approx(1.0));
    CHECK(g.nodes(1) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(g.nodes(2) == doctest::Approx(-1.0));
}

TEST_CASE("laplacian is spectrally exact on a low-degree polynomial") {
    for (int n : {4, 5, 8}) {
        const SpatialGrid g = build_grid(n);
        const int m = n - 2;
        Eigen::VectorXd u(m * m), expect(m * m);
        for (int i = 1; i <= m; ++i)
            for (int j = 1; j <= m; ++j) {
                const double x = g.nodes(i), y = g.nodes(j);
                u(g.interior_index(i, j)) = (x * x - 1.0) * (y * y - 1.0);
                expect(g.interior_index(i, j)) = 2.0 * (x * x + y * y - 2.0);
            }
        // (x^2-1)(y^2-1) vanishes on the boundary, so the interior operator
        // sees the full field
        const Eigen::VectorXd got = g.laplacian * u;
        for (int i = 0; i < m * m; ++i) CHECK(got(i) == doctest::Approx(expect(i)).epsilon(1e-12));
    }
}

TEST_CASE("laplacian resolves sin(pi x) sin(pi y) at n=20") {
    const SpatialGrid g = build_grid(20);
    constexpr double pi = std::numbers::pi;
    const int m = 18;
    Eigen::VectorXd u(m * m);
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j)
            u(g.interior_index(i, j)) = std::sin(pi * g.nodes(i)) * std::sin(pi * g.nodes(j));
    const Eigen::VectorXd got = g.laplacian * u;
    double worst = 0.0;
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j) {
            const double expect =
                -2.0 * pi * pi * std::sin(pi * g.nodes(i)) * std::sin(pi * g.nodes(j));
            worst = std::max(worst, std::abs(got(g.interior_index(i, j)) - expect));
        }
    CHECK(worst <= 1e-9);
}

TEST_CASE("clenshaw-curtis weights integrate polynomials") {
    const SpatialGrid g = build_grid(9);
    double s0 = 0.0, s2 = 0.0, s4 = 0.0;
    for (int i = 0; i < 9; ++i) {
        s0 += g.quad_weights(i);
        s2 += g.quad_weights(i) * g.nodes(i) * g.nodes(i);
        s4 += g.quad_weights(i) * std::pow(g.nodes(i), 4);
    }
    CHECK(s0 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(s2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(s4 == doctest::Approx(2.0 / 5.0).epsilon(1e-14));
}

TEST_CASE("zero data is preserved") {
    ProblemSpec p;
    p.alpha = 0.5;
    p.horizon = 1.0;
    p.n_steps = 16;
    p.grading = 2.0;
    p.space_n = 6;
    p.record_solutions = true;
    const SpatialGrid grid = build_grid(p.space_n);
    const SolveReport rep = solve(p, grid, Thresholds::defaults());
    for (const auto& u : rep.solutions) CHECK(u.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("example 2 reproduces the reference run at N=200") {
    // frozen from an independent implementation of the same scheme
    // (vectorized NumPy prototype, ex2, alpha=0.6, r=4, T=10, n=5, TCTE)
    ProblemSpec p = example2(0.6, 200, 4.0);
    const SpatialGrid grid = build_grid(p.space_n);
    const SolveReport rep = solve(p, grid, Thresholds::defaults());
    CHECK(rel_err(rep.err_max, 9.6817840450714413e-05) < 1e-9);
    CHECK(rel_err(rep.err_T, 8.2243260113695797e-07) < 1e-6);
    CHECK(rep.err_max >= rep.err_T);
    CHECK(rep.err_per_step.size() == 201);
}

TEST_CASE("standard and fast solutions agree at SOE tolerance") {
    ProblemSpec p = example2(0.6, 200, 4.0);
    p.record_solutions = true;
    const SpatialGrid grid = build_grid(p.space_n);
    const SolveReport std_rep = solve(p, grid, Thresholds::defaults());
    p.scheme = Scheme::Fast;
    p.soe.eps = 1e-12;
    const SolveReport fast_rep = solve(p, grid, Thresholds::defaults());
    REQUIRE(std_rep.solutions.size() == fast_rep.solutions.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < std_rep.solutions.size(); ++k) {
        Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(grid.n, grid.n);
        const int m = grid.n - 2;
        for (int i = 1; i <= m; ++i)
            for (int j = 1; j <= m; ++j)
                diff(i, j) = std_rep.solutions[k](grid.interior_index(i, j)) -
                             fast_rep.solutions[k](grid.interior_index(i, j));
        worst = std::max(worst, grid.l2_norm(diff));
    }
    CHECK(worst <= 1e-10);
    CHECK(fast_rep.soe_nodes > 0);
}

TEST_CASE("uniform-mesh rate follows min(r*alpha, 3-alpha)" * doctest::timeout(300)) {
    // alpha=0.4, r=1: expected err_max rate r*alpha = 0.4 +- 0.1
    ProblemSpec base = example2(0.4, 0, 1.0, 1.0);
    const SpatialGrid grid = build_grid(base.space_n);
    const auto rows = convergence_study(base, {500, 1000, 2000}, {}, grid,
                                        Thresholds::defaults());
    REQUIRE(rows.size() == 3);
    CHECK(std::abs(rows[1].rate_max - 0.4) <= 0.1);
    CHECK(std::abs(rows[2].rate_max - 0.4) <= 0.1);
}

TEST_CASE("convergence study layout and validation") {
    ProblemSpec base = example2(0.6, 0, 4.0, 1.0);
    const SpatialGrid grid = build_grid(base.space_n);
    CHECK_THROWS_AS(convergence_study(base, {100}, {}, grid, Thresholds::defaults()),
                    std::invalid_argument);
    const auto rows = convergence_study(base, {50, 100}, {2.0, 4.0}, grid,
                                        Thresholds::defaults());
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].grading == 2.0);
    CHECK(rows[0].rate_max == 0.0);
    CHECK(rows[1].n_steps == 100);
    CHECK(rows[1].rate_max != 0.0);
    CHECK(rows[2].grading == 4.0);
    CHECK(rows[2].rate_max == 0.0);
}
