#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracstep/grid.hpp"
#include "fracstep/l2core.hpp"
#include "fracstep/mesh.hpp"
#include "fracstep/soefast.hpp"

namespace fracstep {

enum class Scheme { Standard, Fast };

/// SOE controls for the fast scheme. Negative values mean "use the rule":
/// t_soe defaults to the horizon T, dt_cut to tau_2.
struct SoeSettings {
    double eps = 1e-12;
    double t_soe = -1.0;
    double dt_cut = -1.0;
};

using SpaceTimeFn = std::function<double(double t, double x, double y)>;
using SpaceFn = std::function<double(double x, double y)>;

/// Subdiffusion problem  d_t^alpha u = Lap u + f  on [-1,1]^2 with
/// homogeneous Dirichlet data, discretized on a graded time mesh.
struct ProblemSpec {
    double alpha = 0.5;
    double horizon = 1.0;
    std::size_t n_steps = 100;
    double grading = 1.0;
    Scheme scheme = Scheme::Standard;
    CoeffMode mode = CoeffMode::TCTE;
    SoeSettings soe;
    int space_n = 20;

    SpaceTimeFn forcing;           // f(t,x,y); empty means 0
    SpaceFn initial;               // u0(x,y); empty means 0
    SpaceTimeFn exact;             // optional exact solution for error reporting
    bool record_solutions = false; // keep per-step interior solutions in the report

    std::string label;             // config echo
};

/// The two manufactured benchmark problems (both have exact solution
/// t^alpha * (spatial profile); horizon and grading taken verbatim).
ProblemSpec example1(double alpha, std::size_t n_steps, double grading, double horizon = 1.0);
ProblemSpec example2(double alpha, std::size_t n_steps, double grading, double horizon = 10.0);

struct SolveReport {
    std::vector<double> err_per_step;  // err_{t_k}, k = 0..N (0 at k=0)
    double err_max = 0.0;
    double err_T = 0.0;
    double wall_seconds = 0.0;      // stepping loop only
    double soe_build_seconds = 0.0; // fast scheme; excluded from wall_seconds
    std::size_t soe_nodes = 0;
    std::string label;
    std::vector<Eigen::VectorXd> solutions;  // interior u^k when record_solutions
};

/// Implicit time stepping: at each t_k solve
///   [sigma_k I - Lap] u^k = f(t_k) + sigma_k u^{k-1} - (known history)/Gamma(1-a)
/// with a fresh dense LU per step (sigma_k depends on k). Throws
/// std::runtime_error if the factorization reports singularity, which the
/// positive shift rules out.
SolveReport solve(const ProblemSpec& problem, const SpatialGrid& grid,
                  const Thresholds& thresholds);

struct ConvergenceRow {
    std::size_t n_steps = 0;
    double grading = 0.0;
    double err_max = 0.0;
    double err_T = 0.0;
    double rate_max = 0.0;  // vs previous row, 0 for the first
    double rate_T = 0.0;
    double seconds = 0.0;
};

/// Runs the base problem over every (N, r) combination and reports observed
/// rates log2(err(N)/err(2N)) between consecutive N at fixed r. Members run
/// in parallel worker threads; FRACSTEP_THREADS caps the width.
std::vector<ConvergenceRow> convergence_study(const ProblemSpec& base,
                                              const std::vector<std::size_t>& n_list,
                                              const std::vector<double>& grading_list,
                                              const SpatialGrid& grid,
                                              const Thresholds& thresholds);

}  // namespace fracstep
