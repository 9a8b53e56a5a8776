// Acceptance suite: each criterion prints one PASS/FAIL line (plus detail)
// and the process exit code is the number of failed criteria.
//
// Usage: acceptance [criterion-number ...]   (default: run all)

#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fracstep/grid.hpp"
#include "fracstep/operators.hpp"
#include "fracstep/oracle.hpp"
#include "fracstep/solver.hpp"

using namespace fracstep;
using W = oracle::Wide50;

namespace {

double rel_err(double value, double reference) {
    return std::abs(value - reference) / std::abs(reference);
}

struct Criterion {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

double analytic_caputo(int which, double t, double alpha) {
    switch (which) {
        case 0: return 0.0;                                               // u = 1
        case 1: return std::pow(t, 1.0 - alpha) / gamma_fn(2.0 - alpha);  // u = t
        default: return 2.0 * std::pow(t, 2.0 - alpha) / gamma_fn(3.0 - alpha);  // u = t^2
    }
}

// --- criterion 1: quadratic exactness ---------------------------------------
bool criterion1() {
    Criterion c;
    std::mt19937_64 rng(20240901);
    const double alphas[] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    double worst = 0.0;
    for (int mesh_i = 0; mesh_i < 50; ++mesh_i) {
        std::uniform_int_distribution<std::size_t> nd(40, 500);
        std::uniform_real_distribution<double> rd(1.0, 4.0);
        const std::size_t n = nd(rng);
        const TimeMesh mesh = build_graded_mesh(n, rd(rng), 1.0);
        const double alpha = alphas[mesh_i % 9];
        for (int which = 0; which < 3; ++which) {
            std::vector<double> u(n + 1);
            for (std::size_t j = 0; j <= n; ++j) {
                const double t = mesh.t(j);
                u[j] = which == 0 ? 1.0 : which == 1 ? t : t * t;
            }
            const std::size_t ks[] = {1, 2, n / 2, n};
            for (std::size_t k : ks) {
                // k = 1 is the linear first step: exact for 1 and t, but its
                // error on t^2 is alpha/2 by construction
                if (k < 1 || (which == 2 && k == 1)) continue;
                for (CoeffMode mode : {CoeffMode::TCTE, CoeffMode::GaussKronrod}) {
                    const double v = l2_caputo({u, mesh}, alpha, k, Thresholds::defaults(), mode);
                    const double exact = analytic_caputo(which, mesh.t(k), alpha);
                    if (which == 0) {
                        c.require(std::abs(v) <= 1e-11, "constant not annihilated");
                    } else {
                        const double re = rel_err(v, exact);
                        worst = std::max(worst, re);
                        c.require(re <= 1e-11, "rel err " + std::to_string(re) + " at k=" +
                                                   std::to_string(k));
                    }
                }
            }
        }
    }
    std::printf("%s criterion 1: quadratic exactness over 50 random graded meshes "
                "(worst rel err %.2e, tol 1e-11)\n",
                c.ok ? "PASS" : "FAIL", worst);
    if (!c.ok) std::printf("       %s\n", c.detail.c_str());
    return c.ok;
}

// --- criterion 2: Taylor truncation accuracy bounds -------------------------
bool criterion2() {
    Criterion c;
    const double d0 = kMachineDelta0;
    const Thresholds th = Thresholds::defaults();
    double worst_taylor = 0.0, worst_i1 = 0.0, worst_i2 = 0.0, worst_j1 = 0.0, worst_j2 = 0.0;
    for (double lg = -12.0; lg <= -2.0 + 1e-9; lg += 0.25) {
        const double theta = std::pow(10.0, lg);
        // J kernels (alpha-independent)
        {
            const KernelPairJ taylor = eval_J_taylor(theta);
            const double r1 = rel_err(taylor.j1, static_cast<double>(oracle::j1(W(theta))));
            const double r2 = rel_err(taylor.j2, static_cast<double>(oracle::j2(W(theta))));
            worst_taylor = std::max({worst_taylor, r1, r2});
            c.require(r1 <= 4 * d0 && r2 <= 4 * d0, "J Taylor path off oracle");

            KernelPairJ tcte;
            if (theta <= th.theta_f1)
                tcte = eval_J_taylor(theta);
            else {
                tcte = eval_J_direct(theta);
                if (theta <= th.theta_f2) tcte.j2 = eval_J_taylor(theta).j2;
            }
            const double b1 = rel_err(tcte.j1, static_cast<double>(oracle::j1(W(theta))));
            const double b2 = rel_err(tcte.j2, static_cast<double>(oracle::j2(W(theta))));
            worst_j1 = std::max(worst_j1, b1);
            worst_j2 = std::max(worst_j2, b2);
            c.require(b1 < 8.88e-12, "J1 default-threshold bound");
            c.require(b2 < 2.664e-11, "J2 default-threshold bound");
        }
        for (double alpha : {0.2, 0.5, 0.8}) {
            const double ref1 = static_cast<double>(oracle::i1(W(theta), W(1.0), W(alpha)));
            const double ref2 = static_cast<double>(oracle::i2(W(theta), W(1.0), W(alpha)));
            const KernelPairI taylor = eval_I_taylor(theta, 1.0, alpha);
            const double r1 = rel_err(taylor.i1, ref1);
            const double r2 = rel_err(taylor.i2, ref2);
            worst_taylor = std::max({worst_taylor, r1, r2});
            c.require(r1 <= 4 * d0 && r2 <= 4 * d0, "I Taylor path off oracle");

            KernelPairI tcte;
            if (theta <= th.theta_s1)
                tcte = eval_I_taylor(theta, 1.0, alpha);
            else {
                tcte = eval_I_direct(theta, 1.0, alpha);
                if (theta <= th.theta_s2) tcte.i2 = eval_I_taylor(theta, 1.0, alpha).i2;
            }
            const double b1 = rel_err(tcte.i1, ref1) * (1 - alpha);
            const double b2 = rel_err(tcte.i2, ref2) * (1 - alpha);
            worst_i1 = std::max(worst_i1, b1);
            worst_i2 = std::max(worst_i2, b2);
            c.require(b1 < 4.44e-12, "I1 default-threshold bound");
            c.require(b2 < 1.332e-11, "I2 default-threshold bound");
        }
    }
    std::printf("%s criterion 2: Taylor-path oracle agreement %.2e (tol %.2e); "
                "TCTE bounds (1-a)|dI1| %.2e < 4.44e-12, (1-a)|dI2| %.2e < 1.332e-11, "
                "|dJ1| %.2e < 8.88e-12, |dJ2| %.2e < 2.664e-11\n",
                c.ok ? "PASS" : "FAIL", worst_taylor, 4 * d0, worst_i1, worst_i2, worst_j1,
                worst_j2);
    if (!c.ok) std::printf("       %s\n", c.detail.c_str());
    return c.ok;
}

// --- criterion 3: TCTE vs Gauss-Kronrod on the Example 1 mesh ---------------
bool criterion3() {
    Criterion c;
    const double alpha = 0.6;
    const double r = (3.0 - alpha) / 0.95;
    const std::size_t n = 3200;
    const TimeMesh mesh = build_graded_mesh(n, r, 1.0);
    const Thresholds th = Thresholds::defaults();

    double worst_pair = 0.0;
    for (std::size_t k = 2; k <= n; ++k) {
        for (std::size_t j = 1; j <= k - 1; ++j) {
            const StencilPair tcte = coeff_pair(mesh, j, k, alpha, th, CoeffMode::TCTE);
            const StencilPair gk = coeff_pair(mesh, j, k, alpha, th, CoeffMode::GaussKronrod);
            const double ra = rel_err(gk.a, tcte.a);
            const double rc = rel_err(gk.c_tilde, tcte.c_tilde);
            worst_pair = std::max({worst_pair, ra, rc});
        }
        const LastPair lt = coeff_last(mesh, k, alpha, CoeffMode::TCTE);
        const LastPair lg = coeff_last(mesh, k, alpha, CoeffMode::GaussKronrod);
        worst_pair = std::max({worst_pair, rel_err(lg.a_last, lt.a_last),
                               rel_err(lg.c_last, lt.c_last)});
    }
    c.require(worst_pair <= 1e-10, "coefficient pair rel diff " + std::to_string(worst_pair));

    ProblemSpec p = example1(alpha, n, r);
    p.mode = CoeffMode::TCTE;
    const SpatialGrid grid = build_grid(p.space_n);
    const SolveReport rep_tcte = solve(p, grid, th);
    p.mode = CoeffMode::GaussKronrod;
    const SolveReport rep_gk = solve(p, grid, th);
    double worst_step = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
        worst_step = std::max(worst_step,
                              std::abs(rep_gk.err_per_step[k] - rep_tcte.err_per_step[k]));
    c.require(worst_step <= 1e-13, "per-step error diff " + std::to_string(worst_step));

    std::printf("%s criterion 3: Example-1 mesh N=3200; coefficient rel diff %.2e (tol 1e-10), "
                "per-step L2-error diff %.2e (tol 1e-13)\n",
                c.ok ? "PASS" : "FAIL", worst_pair, worst_step);
    if (!c.ok) std::printf("       %s\n", c.detail.c_str());
    return c.ok;
}

// --- criterion 4: Table 2 at desk scale -------------------------------------
bool criterion4() {
    Criterion c;
    const double alpha = 0.6;
    const double r = (3.0 - alpha) / alpha;
    const SpatialGrid grid = build_grid(5);
    ProblemSpec p2000 = example2(alpha, 2000, r);
    const SolveReport rep2000 = solve(p2000, grid, Thresholds::defaults());
    ProblemSpec p4000 = example2(alpha, 4000, r);
    const SolveReport rep4000 = solve(p4000, grid, Thresholds::defaults());

    const double re_max = rel_err(rep2000.err_max, 3.8628e-7);
    const double re_T = rel_err(rep2000.err_T, 3.1934e-9);
    const double rate = std::log2(rep2000.err_max / rep4000.err_max);
    c.require(re_max <= 0.01, "err_max off Table 2 by " + std::to_string(re_max));
    c.require(re_T <= 0.02, "err_T off Table 2 by " + std::to_string(re_T));
    c.require(std::abs(rate - 2.40) <= 0.02, "rate " + std::to_string(rate));

    std::printf("%s criterion 4: Table 2 N=2000: err_max %.5e (ref 3.8628e-7, off %.2f%%), "
                "err_T %.5e (ref 3.1934e-9, off %.2f%%), rate %.4f (2.40 +- 0.02)\n",
                c.ok ? "PASS" : "FAIL", rep2000.err_max, 100 * re_max, rep2000.err_T, 100 * re_T,
                rate);
    if (!c.ok) std::printf("       %s\n", c.detail.c_str());
    return c.ok;
}

// --- criterion 5: direct-mode failure vs TCTE convergence -------------------
bool criterion5() {
    Criterion c;
    const double alpha = 0.4;
    const double r = 2.0 / alpha;
    const SpatialGrid grid = build_grid(20);
    const Thresholds zero = Thresholds::zeros();

    ProblemSpec p800 = example1(alpha, 800, r);
    const double direct800 = solve(p800, grid, zero).err_max;
    ProblemSpec p3200 = example1(alpha, 3200, r);
    const double direct3200 = solve(p3200, grid, zero).err_max;
    c.require(direct800 > 1e1, "direct err_max(800) = " + std::to_string(direct800));
    c.require(direct3200 > 1e3, "direct err_max(3200) = " + std::to_string(direct3200));

    ProblemSpec p1600 = example1(alpha, 1600, r);
    const Thresholds th = Thresholds::defaults();
    const double tcte1600 = solve(p1600, grid, th).err_max;
    const double tcte3200 = solve(p3200, grid, th).err_max;
    const double rate = std::log2(tcte1600 / tcte3200);
    const double expected = std::min(r * alpha, 3.0 - alpha);
    c.require(std::abs(rate - expected) <= 0.1,
              "TCTE rate " + std::to_string(rate) + " vs " + std::to_string(expected));

    std::printf("%s criterion 5: direct err_max N=800: %.3e (>1e1), N=3200: %.3e (>1e3); "
                "TCTE rate %.3f (expect %.1f +- 0.1)\n",
                c.ok ? "PASS" : "FAIL", direct800, direct3200, rate, expected);
    if (!c.ok) std::printf("       %s\n", c.detail.c_str());
    return c.ok;
}

// --- criterion 6: fast = standard up to the SOE tolerance -------------------
bool criterion6() {
    Criterion c;
    const double alpha = 0.6;
    const double r = (3.0 - alpha) / alpha;
    const SpatialGrid grid = build_grid(5);
    ProblemSpec p = example2(alpha, 4000, r);
    p.record_solutions = true;
    p.soe.eps = 1e-12;
    const SolveReport rep_std = solve(p, grid, Thresholds::defaults());
    p.scheme = Scheme::Fast;
    const SolveReport rep_fast = solve(p, grid, Thresholds::defaults());

    double worst = 0.0;
    Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(grid.n, grid.n);
    const int m = grid.n - 2;
    for (std::size_t k = 0; k < rep_std.solutions.size(); ++k) {
        for (int i = 1; i <= m; ++i)
            for (int j = 1; j <= m; ++j)
                diff(i, j) = rep_std.solutions[k](grid.interior_index(i, j)) -
                             rep_fast.solutions[k](grid.interior_index(i, j));
        worst = std::max(worst, grid.l2_norm(diff));
    }
    const double dT = std::abs(rep_std.err_T - rep_fast.err_T);
    c.require(worst <= 1e-10, "max_k ||u_std - u_fast|| = " + std::to_string(worst));
    c.require(dT <= 1e-11, "final-time error difference = " + std::to_string(dT));

    std::printf("%s criterion 6: N=4000 eps=1e-12: max_k ||u_std-u_fast|| %.2e (tol 1e-10), "
                "|err_T diff| %.2e (tol 1e-11), N_q=%zu\n",
                c.ok ? "PASS" : "FAIL", worst, dT, rep_fast.soe_nodes);
    if (!c.ok) std::printf("       %s\n", c.detail.c_str());
    return c.ok;
}

// --- criterion 7: complexity scaling and long-time runs ---------------------
bool criterion7() {
    Criterion c;
    const double alpha6 = 0.6;
    const double r6 = (3.0 - alpha6) / alpha6;
    const SpatialGrid grid = build_grid(5);

    ProblemSpec p8 = example2(alpha6, 8000, r6);
    ProblemSpec p16 = example2(alpha6, 16000, r6);
    const double std8 = solve(p8, grid, Thresholds::defaults()).wall_seconds;
    const double std16 = solve(p16, grid, Thresholds::defaults()).wall_seconds;
    const double std_ratio = std16 / std8;
    c.require(std_ratio >= 3.2, "standard ratio " + std::to_string(std_ratio));

    p8.scheme = Scheme::Fast;
    p16.scheme = Scheme::Fast;
    const double fast8 = solve(p8, grid, Thresholds::defaults()).wall_seconds;
    const double fast16 = solve(p16, grid, Thresholds::defaults()).wall_seconds;
    const double fast_ratio = fast16 / fast8;
    c.require(fast_ratio <= 2.6, "fast ratio " + std::to_string(fast_ratio));

    // long-time runs: T = 1000, eps = 1e-14, rates from Table 3
    const double expected_rate[3] = {2.6, 2.4, 2.2};
    const double alphas[3] = {0.4, 0.6, 0.8};
    double rates[3];
    double t128 = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double a = alphas[i];
        ProblemSpec p64 = example2(a, 64000, (3.0 - a) / a, 1000.0);
        p64.scheme = Scheme::Fast;
        p64.soe.eps = 1e-14;
        ProblemSpec p128 = p64;
        p128.n_steps = 128000;
        const SolveReport rep64 = solve(p64, grid, Thresholds::defaults());
        const SolveReport rep128 = solve(p128, grid, Thresholds::defaults());
        rates[i] = std::log2(rep64.err_max / rep128.err_max);
        t128 = std::max(t128, rep128.wall_seconds + rep128.soe_build_seconds);
        c.require(std::abs(rates[i] - expected_rate[i]) <= 0.05,
                  "alpha=" + std::to_string(a) + " rate " + std::to_string(rates[i]));
    }
    c.require(t128 < 600.0, "N=128000 took " + std::to_string(t128) + "s");

    std::printf("%s criterion 7: std ratio %.2f (>=3.2), fast ratio %.2f (<=2.6); "
                "long-time rates %.3f/%.3f/%.3f (2.6/2.4/2.2 +- 0.05); slowest N=128000 run "
                "%.1fs (<600s)\n",
                c.ok ? "PASS" : "FAIL", std_ratio, fast_ratio, rates[0], rates[1], rates[2],
                t128);
    if (!c.ok) std::printf("       %s\n", c.detail.c_str());
    return c.ok;
}

// --- criterion 8: SOE contract ----------------------------------------------
bool criterion8() {
    Criterion c;
    const SoeApproximation soe = build_soe(0.5, 1e-12, 1e-4, 1.0);
    const double err = soe.sampled_max_rel_error(1000);
    c.require(err <= 1e-12, "sampled error " + std::to_string(err));
    bool positive = true;
    for (std::size_t l = 0; l < soe.count(); ++l)
        positive = positive && soe.nodes()[l] > 0.0 && soe.weights()[l] > 0.0;
    c.require(positive, "node/weight positivity");
    std::printf("%s criterion 8: build_soe(0.5, 1e-12, 1e-4, 1): N_q=%zu, sampled rel err %.2e "
                "(tol 1e-12), all nodes/weights positive\n",
                c.ok ? "PASS" : "FAIL", soe.count(), err);
    if (!c.ok) std::printf("       %s\n", c.detail.c_str());
    return c.ok;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
    bool (*criteria[])() = {criterion1, criterion2, criterion3, criterion4,
                            criterion5, criterion6, criterion7, criterion8};
    int failures = 0;
    for (int i = 0; i < 8; ++i) {
        if (!wanted.empty() && !wanted.count(i + 1)) continue;
        if (!criteria[i]()) ++failures;
    }
    return failures;
}
