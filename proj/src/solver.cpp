#include "fracstep/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "fracstep/operators.hpp"

namespace fracstep {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Eigen::VectorXd eval_interior(const SpatialGrid& grid, const SpaceTimeFn& f, double t) {
    const int m = grid.n - 2;
    Eigen::VectorXd out(m * m);
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j)
            out(grid.interior_index(i, j)) = f(t, grid.nodes(i), grid.nodes(j));
    return out;
}

double step_error(const SpatialGrid& grid, const SpaceTimeFn& exact, double t,
                  const Eigen::VectorXd& interior) {
    Eigen::MatrixXd diff(grid.n, grid.n);
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j) diff(i, j) = exact(t, grid.nodes(i), grid.nodes(j));
    const int m = grid.n - 2;
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j) diff(i, j) -= interior(grid.interior_index(i, j));
    return grid.l2_norm(diff);
}

Eigen::VectorXd solve_shifted(const SpatialGrid& grid, double sigma, const Eigen::VectorXd& rhs) {
    Eigen::MatrixXd a = -grid.laplacian;
    a.diagonal().array() += sigma;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    Eigen::VectorXd u = lu.solve(rhs);
    if (!u.allFinite())
        throw std::runtime_error("solve: shifted operator factorization produced non-finite "
                                 "values (singular system?)");
    return u;
}

}  // namespace

ProblemSpec example1(double alpha, std::size_t n_steps, double grading, double horizon) {
    ProblemSpec p;
    p.alpha = alpha;
    p.horizon = horizon;
    p.n_steps = n_steps;
    p.grading = grading;
    p.space_n = 20;
    p.label = "ex1";
    const double g1a = gamma_fn(1.0 + alpha);
    constexpr double pi = std::numbers::pi;
    p.forcing = [alpha, g1a](double t, double x, double y) {
        return (g1a + 2.0 * pi * pi * std::pow(t, alpha)) * std::sin(pi * x) * std::sin(pi * y);
    };
    p.initial = [](double, double) { return 0.0; };
    p.exact = [alpha](double t, double x, double y) {
        return std::pow(t, alpha) * std::sin(pi * x) * std::sin(pi * y);
    };
    return p;
}

ProblemSpec example2(double alpha, std::size_t n_steps, double grading, double horizon) {
    ProblemSpec p;
    p.alpha = alpha;
    p.horizon = horizon;
    p.n_steps = n_steps;
    p.grading = grading;
    p.space_n = 5;
    p.label = "ex2";
    const double g1a = gamma_fn(1.0 + alpha);
    p.forcing = [alpha, g1a](double t, double x, double y) {
        return g1a * (x * x - 1.0) * (y * y - 1.0) -
               2.0 * std::pow(t, alpha) * (x * x + y * y - 2.0);
    };
    p.initial = [](double, double) { return 0.0; };
    p.exact = [alpha](double t, double x, double y) {
        return std::pow(t, alpha) * (x * x - 1.0) * (y * y - 1.0);
    };
    return p;
}

SolveReport solve(const ProblemSpec& problem, const SpatialGrid& grid,
                  const Thresholds& thresholds) {
    const TimeMesh mesh = build_graded_mesh(problem.n_steps, problem.grading, problem.horizon);
    const std::size_t n_steps = mesh.num_steps();
    const double alpha = problem.alpha;
    const double inv_g1a = 1.0 / gamma_fn(1.0 - alpha);
    const int m2 = grid.interior_size();

    SolveReport report;
    {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s alpha=%g T=%g N=%zu r=%g n=%d %s %s",
                      problem.label.empty() ? "custom" : problem.label.c_str(), alpha,
                      problem.horizon, n_steps, problem.grading, problem.space_n,
                      problem.scheme == Scheme::Fast ? "fast" : "standard",
                      problem.mode == CoeffMode::Direct
                          ? "direct"
                          : problem.mode == CoeffMode::TCTE ? "tcte" : "gk");
        report.label = buf;
    }
    report.err_per_step.assign(n_steps + 1, 0.0);

    // Fast scheme: SOE construction is timed separately from the stepping loop.
    SoeApproximation* soe = nullptr;
    std::unique_ptr<SoeApproximation> soe_holder;
    if (problem.scheme == Scheme::Fast) {
        const double dt_cut = problem.soe.dt_cut > 0.0 ? problem.soe.dt_cut : mesh.step(2);
        const double t_soe = problem.soe.t_soe > 0.0 ? problem.soe.t_soe : problem.horizon;
        const auto t0 = Clock::now();
        soe_holder = std::make_unique<SoeApproximation>(
            build_soe(alpha, problem.soe.eps, dt_cut, t_soe));
        report.soe_build_seconds = seconds_since(t0);
        report.soe_nodes = soe_holder->count();
        soe = soe_holder.get();
    }

    Eigen::VectorXd u_prev(m2);
    if (problem.initial) {
        const int m = grid.n - 2;
        for (int i = 1; i <= m; ++i)
            for (int j = 1; j <= m; ++j)
                u_prev(grid.interior_index(i, j)) = problem.initial(grid.nodes(i), grid.nodes(j));
    } else {
        u_prev.setZero();
    }
    if (problem.record_solutions) report.solutions.push_back(u_prev);

    // Standard scheme: per-step increments delta_j = u^j - u^{j-1}.
    std::vector<Eigen::VectorXd> deltas;
    if (problem.scheme == Scheme::Standard) deltas.reserve(n_steps + 1);

    // Fast scheme: per-node history columns, H(:, l) = H^l.
    Eigen::MatrixXd hist;
    Eigen::VectorXd delta_prev(m2);
    if (problem.scheme == Scheme::Fast) hist = Eigen::MatrixXd::Zero(m2, soe->count());

    const auto t_loop = Clock::now();
    Eigen::VectorXd fast_dk_weights;  // per-node weight of delta_k, staged per step
    for (std::size_t k = 1; k <= n_steps; ++k) {
        const double tk = mesh.t(k);
        Eigen::VectorXd rhs = problem.forcing ? eval_interior(grid, problem.forcing, tk)
                                              : Eigen::VectorXd::Zero(m2).eval();
        double sigma;
        if (k == 1) {
            sigma = 1.0 / (gamma_fn(2.0 - alpha) * std::pow(mesh.step(1), alpha));
            rhs += sigma * u_prev;
        } else if (problem.scheme == Scheme::Standard) {
            const CoeffRow row = compute_coeff_row(mesh, k, alpha, thresholds, problem.mode);
            // Known history: panels j <= k-2 in full, plus the delta_{k-1}
            // pieces of the j = k-1 panel and of the current panel.
            Eigen::VectorXd known = Eigen::VectorXd::Zero(m2);
            Eigen::VectorXd comp = Eigen::VectorXd::Zero(m2);
            auto kahan_add = [&](int i, double term) {
                const double y = term - comp(i);
                const double s = known(i) + y;
                comp(i) = (s - known(i)) - y;
                known(i) = s;
            };
            for (std::size_t j = 1; j + 1 <= k - 1; ++j) {
                const StencilPair& sp = row.history[j - 1];
                const double ratio = mesh.step(j) / mesh.step(j + 1);
                const Eigen::VectorXd& dj = deltas[j];
                const Eigen::VectorXd& djp1 = deltas[j + 1];
                for (int i = 0; i < m2; ++i)
                    kahan_add(i, sp.a * (ratio * djp1(i) - dj(i)) + sp.c_tilde * djp1(i));
            }
            const double a_tail = row.history[k - 2].a + row.last.a_last;
            for (int i = 0; i < m2; ++i) kahan_add(i, -a_tail * deltas[k - 1](i));
            sigma = row.implicit_weight * inv_g1a;
            rhs += sigma * u_prev - inv_g1a * known;
        } else {
            const LastPair last = coeff_last(mesh, k, alpha, problem.mode);
            const std::size_t nq = soe->count();
            Eigen::VectorXd decay_w(nq), a_vec(nq), c_vec(nq);
            const double ratio = mesh.step(k - 1) / mesh.step(k);
            double a_sum = 0.0, c_sum = 0.0;
            for (std::size_t l = 0; l < nq; ++l) {
                const double theta_l = soe->nodes()[l];
                const StencilPair fc =
                    fast_coeff_pair(mesh, k, theta_l, thresholds, problem.mode);
                const double w = soe->weights()[l];
                decay_w(l) = std::exp(-theta_l * mesh.step(k));
                a_vec(l) = fc.a;
                c_vec(l) = fc.c_tilde;
                a_sum += w * fc.a;
                c_sum += w * (fc.a * ratio + fc.c_tilde);
            }
            const Eigen::VectorXd wd =
                decay_w.cwiseProduct(Eigen::Map<const Eigen::VectorXd>(soe->weights().data(),
                                                                        nq));
            Eigen::VectorXd known = hist * wd;
            known.noalias() -= a_sum * delta_prev;
            known.noalias() -= last.a_last * delta_prev;
            sigma = (last.c_last + c_sum) * inv_g1a;
            rhs += sigma * u_prev - inv_g1a * known;
            // Defer the H update until delta_k is known; stash the pieces.
            for (std::size_t l = 0; l < nq; ++l) hist.col(l) *= decay_w(l);
            hist.noalias() -= delta_prev * a_vec.transpose();
            // remaining piece: + delta_k (ratio*a + c)^T, applied below
            fast_dk_weights = ratio * a_vec + c_vec;
        }

        Eigen::VectorXd u = solve_shifted(grid, sigma, rhs);

        if (problem.scheme == Scheme::Standard) {
            if (k == 1) deltas.push_back(Eigen::VectorXd::Zero(m2));  // placeholder index 0
            deltas.push_back(u - u_prev);
        } else if (k >= 2) {
            const Eigen::VectorXd delta_k = u - u_prev;
            hist.noalias() += delta_k * fast_dk_weights.transpose();
            delta_prev = delta_k;
        } else {
            delta_prev = u - u_prev;
        }

        u_prev = u;
        if (problem.record_solutions) report.solutions.push_back(u);
        if (problem.exact) report.err_per_step[k] = step_error(grid, problem.exact, tk, u);
    }
    report.wall_seconds = seconds_since(t_loop);

    if (problem.exact) {
        for (std::size_t k = 1; k <= n_steps; ++k)
            report.err_max = std::max(report.err_max, report.err_per_step[k]);
        report.err_T = report.err_per_step[n_steps];
    }
    return report;
}

std::vector<ConvergenceRow> convergence_study(const ProblemSpec& base,
                                              const std::vector<std::size_t>& n_list,
                                              const std::vector<double>& grading_list,
                                              const SpatialGrid& grid,
                                              const Thresholds& thresholds) {
    if (n_list.size() < 2)
        throw std::invalid_argument("convergence_study: need at least two values of N");
    std::vector<double> gradings = grading_list.empty() ? std::vector<double>{base.grading}
                                                        : grading_list;
    struct Job {
        std::size_t n;
        double r;
        SolveReport report;
    };
    std::vector<Job> jobs;
    for (double r : gradings)
        for (std::size_t n : n_list) jobs.push_back({n, r, {}});

    unsigned width = std::thread::hardware_concurrency();
    if (width == 0) width = 1;
    if (const char* env = std::getenv("FRACSTEP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) width = static_cast<unsigned>(v);
    }
    width = std::min<unsigned>(width, static_cast<unsigned>(jobs.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= jobs.size()) return;
            ProblemSpec p = base;
            p.n_steps = jobs[idx].n;
            p.grading = jobs[idx].r;
            jobs[idx].report = solve(p, grid, thresholds);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i + 1 < width; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::vector<ConvergenceRow> rows;
    std::size_t idx = 0;
    for (double r : gradings) {
        const ConvergenceRow* prev = nullptr;
        for (std::size_t i = 0; i < n_list.size(); ++i, ++idx) {
            ConvergenceRow row;
            row.n_steps = jobs[idx].n;
            row.grading = r;
            row.err_max = jobs[idx].report.err_max;
            row.err_T = jobs[idx].report.err_T;
            row.seconds = jobs[idx].report.wall_seconds;
            if (prev && prev->err_max > 0.0 && row.err_max > 0.0) {
                const double dn = std::log2(static_cast<double>(row.n_steps) / prev->n_steps);
                row.rate_max = std::log2(prev->err_max / row.err_max) / dn;
                row.rate_T = std::log2(prev->err_T / row.err_T) / dn;
            }
            rows.push_back(row);
            prev = &rows.back();
        }
    }
    return rows;
}

}  // namespace fracstep
