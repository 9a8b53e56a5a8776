#include "fracstep/l2core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fracstep/errors.hpp"
#include "fracstep/quadrature.hpp"

namespace fracstep {

namespace {

constexpr double kGkRtol = 1e-14;
constexpr double kGkAtol = 1e-300;
constexpr int kGkBudgetSmooth = 4000;
constexpr int kGkBudgetSingular = 8000;

template <class F>
QuadResult integrate_or_throw(const char* what, double a, double b, const F& f, int budget) {
    QuadResult q = adaptive_gk(f, a, b, kGkRtol, kGkAtol, budget);
    if (!q.converged)
        throw ToleranceError(std::string(what) + ": Gauss-Kronrod budget exhausted, err_est " +
                                 std::to_string(q.err_est),
                             q.err_est);
    return q;
}

}  // namespace

double gamma_fn(double x) {
    // glibc tgamma is a couple of ulp for the arguments used here, well
    // inside the 1e-14 contract.
    return std::tgamma(x);
}

double binom_general(double beta, unsigned m) {
    double c = 1.0;
    for (unsigned i = 1; i <= m; ++i) c *= (beta - static_cast<double>(i) + 1.0) / i;
    return c;
}

int taylor_truncation_count(double ratio, double delta0) {
    if (!(ratio > 0.0 && ratio < 1.0))
        throw std::domain_error("taylor_truncation_count: ratio must lie in (0,1)");
    const int m = static_cast<int>(std::ceil(std::log(delta0) / std::log(ratio)));
    if (m > 200)
        throw std::domain_error("taylor_truncation_count: more than 200 terms requested; "
                                "the Taylor path is only meant for small ratios");
    return m < 1 ? 1 : m;
}

KernelPairI eval_I_direct(double theta, double d, double alpha) {
    if (!(theta > 0.0 && theta < 1.0)) throw std::domain_error("eval_I_direct: theta not in (0,1)");
    if (!(d > 0.0)) throw std::domain_error("eval_I_direct: d must be positive");
    const double d1a = std::exp((1.0 - alpha) * std::log(d));
    const double d2a = d1a * d;
    const double om = 1.0 - theta;
    const double p1 = std::pow(om, 1.0 - alpha);
    const double p2 = p1 * om;
    KernelPairI out;
    out.i1 = d1a * (1.0 - p1);
    out.i2 = d2a * (((2.0 - alpha) * theta + p2) - 1.0);
    return out;
}

KernelPairI eval_I_taylor(double theta, double d, double alpha, double delta0) {
    if (!(theta > 0.0 && theta < 1.0)) throw std::domain_error("eval_I_taylor: theta not in (0,1)");
    if (!(d > 0.0)) throw std::domain_error("eval_I_taylor: d must be positive");
    const int m1 = taylor_truncation_count(theta, delta0);
    const int m2 = m1;  // same ratio, same count
    const double d1a = std::exp((1.0 - alpha) * std::log(d));
    const double d2a = d1a * d;

    // sum_{m=1}^{M1} binom(1-a, m)(-theta)^m: every term is negative, so the
    // accumulation never cancels.
    double c = 1.0;   // binom(beta, m)
    double p = 1.0;   // (-theta)^m
    double s1 = 0.0;
    {
        const double beta = 1.0 - alpha;
        for (int m = 1; m <= m1; ++m) {
            c *= (beta - m + 1.0) / m;
            p *= -theta;
            s1 += c * p;
        }
    }
    // sum_{m=2}^{M2+1} binom(2-a, m)(-theta)^m: every term is positive.
    c = 1.0;
    p = 1.0;
    double s2 = 0.0;
    {
        const double beta = 2.0 - alpha;
        for (int m = 1; m <= m2 + 1; ++m) {
            c *= (beta - m + 1.0) / m;
            p *= -theta;
            if (m >= 2) s2 += c * p;
        }
    }
    KernelPairI out;
    out.i1 = -d1a * s1;
    out.i2 = d2a * s2;
    return out;
}

StencilPair coeff_pair(const TimeMesh& mesh, std::size_t j, std::size_t k, double alpha,
                       const Thresholds& thresholds, CoeffMode mode) {
    if (j < 1 || k < 2 || j + 1 > k || k > mesh.num_steps())
        throw std::out_of_range("coeff_pair: need 1 <= j <= k-1, 2 <= k <= N");
    const double tau_j = mesh.step(j);
    const double tau_jp1 = mesh.step(j + 1);
    const double denom = (2.0 - alpha) * (1.0 - alpha) * tau_j * (tau_j + tau_jp1);

    if (mode == CoeffMode::GaussKronrod) {
        // Local panel coordinate v = t_j - s keeps every factor built from
        // steps, so the kernel argument never loses digits to the global
        // positions: t_k - s = (t_k - t_j) + v, 2s - t_j - t_{j+1} =
        // -(tau_{j+1} + 2v).
        const double dist = mesh.t(k) - mesh.t(j);
        const double wa = 1.0 / (tau_j * (tau_j + tau_jp1));
        auto fa = [&](double v) {
            return -(tau_jp1 + 2.0 * v) * wa * std::pow(dist + v, -alpha);
        };
        auto fc = [&](double v) { return std::pow(dist + v, -alpha) / tau_jp1; };
        StencilPair out;
        out.a = integrate_or_throw("coeff_pair[a]", 0.0, tau_j, fa, kGkBudgetSmooth).value;
        out.c_tilde = integrate_or_throw("coeff_pair[c]", 0.0, tau_j, fc, kGkBudgetSmooth).value;
        return out;
    }

    // Algorithm form of the ratio: theta = tau_j / (t_k - t_j + tau_j).
    const double d = (mesh.t(k) - mesh.t(j)) + tau_j;
    const double theta = tau_j / d;
    KernelPairI kp;
    if (mode == CoeffMode::Direct) {
        kp = eval_I_direct(theta, d, alpha);
    } else {
        const bool taylor1 = theta <= thresholds.theta_s1;
        const bool taylor2 = theta <= thresholds.theta_s2;
        if (!taylor1 && !taylor2) {
            kp = eval_I_direct(theta, d, alpha);
        } else if (taylor1 && taylor2) {
            kp = eval_I_taylor(theta, d, alpha);
        } else {
            const KernelPairI direct = eval_I_direct(theta, d, alpha);
            const KernelPairI taylor = eval_I_taylor(theta, d, alpha);
            kp.i1 = taylor1 ? taylor.i1 : direct.i1;
            kp.i2 = taylor2 ? taylor.i2 : direct.i2;
        }
    }
    StencilPair out;
    out.a = -((2.0 - alpha) * tau_jp1 * kp.i1 + 2.0 * kp.i2) / denom;
    out.c_tilde = kp.i1 / ((1.0 - alpha) * tau_jp1);
    return out;
}

LastPair coeff_last(const TimeMesh& mesh, std::size_t k, double alpha, CoeffMode mode) {
    if (k < 2 || k > mesh.num_steps())
        throw std::out_of_range("coeff_last: need 2 <= k <= N");
    const double tau_km1 = mesh.step(k - 1);
    const double tau_k = mesh.step(k);

    if (mode == CoeffMode::GaussKronrod) {
        const double wa = 1.0 / (tau_km1 * (tau_km1 + tau_k));
        const double wc = 1.0 / (tau_k * (tau_km1 + tau_k));
        // These integrands carry the integrable singularity at s = t_k.
        // Absorb it exactly with v = (t_k - s)^(1-alpha):
        //   int g(s) (t_k-s)^(-a) ds = 1/(1-a) * int_0^{tau_k^(1-a)} g(t_k - v^(1/(1-a))) dv,
        // which plain bisection could never resolve (panel nodes collide with
        // t_k at double precision long before the tail error reaches rtol).
        // In terms of the local offset w = t_k - s = v^(1/(1-a)):
        //   2s - t_{k-1} - t_k = tau_k - 2w,  2s - t_{k-2} - t_{k-1} = 2 tau_k + tau_{k-1} - 2w.
        const double p = 1.0 / (1.0 - alpha);
        const double v_end = std::exp((1.0 - alpha) * std::log(tau_k));
        auto ga = [&](double v) {
            const double w = std::exp(p * std::log(v));
            return (tau_k - 2.0 * w) * wa;
        };
        auto gc = [&](double v) {
            const double w = std::exp(p * std::log(v));
            return (2.0 * tau_k + tau_km1 - 2.0 * w) * wc;
        };
        LastPair out;
        out.a_last =
            p * integrate_or_throw("coeff_last[a]", 0.0, v_end, ga, kGkBudgetSingular).value;
        out.c_last =
            p * integrate_or_throw("coeff_last[c]", 0.0, v_end, gc, kGkBudgetSingular).value;
        return out;
    }

    // All terms positive: no cancellation, no Taylor branch needed.
    const double tka = std::exp(alpha * std::log(tau_k));
    LastPair out;
    out.a_last = alpha * tau_k * tau_k /
                 ((2.0 - alpha) * (1.0 - alpha) * tau_km1 * (tau_km1 + tau_k) * tka);
    out.c_last = 1.0 / ((1.0 - alpha) * tka) +
                 alpha * tau_k / ((2.0 - alpha) * (1.0 - alpha) * (tau_km1 + tau_k) * tka);
    return out;
}

}  // namespace fracstep
