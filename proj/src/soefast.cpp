#include "fracstep/soefast.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "fracstep/quadrature.hpp"

namespace fracstep {

namespace {

struct Rule {
    std::vector<double> nodes;    // on [-1,1]
    std::vector<double> weights;
};

// Golub-Welsch in long double: eigenvalues of the symmetric tridiagonal
// recurrence matrix give the nodes, squared first eigenvector components
// (times mu0) the weights. Long double keeps the rounded-to-double rule
// accurate to a few ulp, which matters at eps = 1e-14.
Rule golub_welsch(const std::vector<long double>& diag, const std::vector<long double>& offdiag,
                  long double mu0) {
    using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const int p = static_cast<int>(diag.size());
    LMat jac = LMat::Zero(p, p);
    for (int i = 0; i < p; ++i) jac(i, i) = diag[i];
    for (int i = 0; i + 1 < p; ++i) {
        jac(i, i + 1) = offdiag[i];
        jac(i + 1, i) = offdiag[i];
    }
    Eigen::SelfAdjointEigenSolver<LMat> es(jac);
    Rule rule;
    rule.nodes.resize(p);
    rule.weights.resize(p);
    for (int i = 0; i < p; ++i) {
        rule.nodes[i] = static_cast<double>(es.eigenvalues()(i));
        const long double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = static_cast<double>(mu0 * v0 * v0);
    }
    return rule;
}

// Gauss-Legendre on [-1,1].
Rule gauss_legendre(int p) {
    std::vector<long double> diag(p, 0.0L), off(p - 1);
    for (int k = 1; k < p; ++k) {
        const long double kk = k;
        off[k - 1] = std::sqrt(kk * kk / (4.0L * kk * kk - 1.0L));
    }
    return golub_welsch(diag, off, 2.0L);
}

// Gauss-Jacobi on [-1,1] for the weight (1+x)^b, b = alpha-1 in (-1,0).
Rule gauss_jacobi_left(int p, long double b) {
    std::vector<long double> diag(p), off(p - 1);
    diag[0] = b / (b + 2.0L);
    for (int k = 1; k < p; ++k)
        diag[k] = b * b / ((2.0L * k + b) * (2.0L * k + b + 2.0L));
    for (int k = 1; k < p; ++k) {
        const long double kk = k;
        const long double beta = 4.0L * kk * kk * (kk + b) * (kk + b) /
                                 ((2.0L * kk + b) * (2.0L * kk + b) * (2.0L * kk + b + 1.0L) *
                                  (2.0L * kk + b - 1.0L));
        off[k - 1] = std::sqrt(beta);
    }
    const long double mu0 = std::pow(2.0L, b + 1.0L) / (b + 1.0L);  // int (1+x)^b dx
    return golub_welsch(diag, off, mu0);
}

struct RawSoe {
    std::vector<double> nodes, weights;
};

RawSoe discretize_laplace(double alpha, double eps, double dt_cut, double t_soe, int p_leg) {
    const int p_jac = p_leg + 4;
    // Head cutoff s0 = 2^j0 with s0 * t_soe <= 1, so exp(-t s) stays analytic
    // and tame on [0, s0] for every t in the window.
    const int j0 = static_cast<int>(std::floor(std::log2(1.0 / t_soe)));
    const double s0 = std::ldexp(1.0, j0);
    // Tail cutoff: y = dt*s_max with y^(alpha-1) e^-y ~ eps*Gamma(alpha)/10.
    double y = std::log(10.0 / (eps * gamma_fn(alpha)));
    for (int it = 0; it < 4; ++it)
        y = std::log(10.0 / (eps * gamma_fn(alpha))) + (1.0 - alpha) * std::log(std::max(y, 1.0));
    const int j1 = static_cast<int>(std::ceil(std::log2(y / dt_cut)));

    RawSoe raw;
    raw.nodes.reserve(static_cast<std::size_t>(p_jac + (j1 - j0) * p_leg));
    raw.weights.reserve(raw.nodes.capacity());

    const double inv_gamma = 1.0 / gamma_fn(alpha);

    // Head: int_0^s0 e^(-ts) s^(a-1) ds = s0^a 2^-a sum w_i e^(-t s0 (1+x_i)/2).
    const Rule jac = gauss_jacobi_left(p_jac, static_cast<long double>(alpha) - 1.0L);
    const double head_scale = std::pow(s0, alpha) * std::pow(2.0, -alpha) * inv_gamma;
    for (int i = 0; i < p_jac; ++i) {
        raw.nodes.push_back(s0 * 0.5 * (1.0 + jac.nodes[i]));
        raw.weights.push_back(jac.weights[i] * head_scale);
    }
    // Dyadic Gauss-Legendre panels [2^j, 2^(j+1)].
    const Rule leg = gauss_legendre(p_leg);
    for (int j = j0; j < j1; ++j) {
        const double a = std::ldexp(1.0, j);
        const double half = 0.5 * a;  // (b-a)/2 with b = 2a
        const double mid = 1.5 * a;
        for (int i = 0; i < p_leg; ++i) {
            const double s = mid + half * leg.nodes[i];
            raw.nodes.push_back(s);
            raw.weights.push_back(leg.weights[i] * half *
                                  std::exp((alpha - 1.0) * std::log(s)) * inv_gamma);
        }
    }
    return raw;
}

void prune(RawSoe& raw, double alpha, double eps, double dt_cut, double t_soe) {
    const std::size_t n = raw.nodes.size();
    // Worst-case relative contribution of node l over the window: the term
    // w e^(-th t) measured against t^-alpha peaks at t = alpha/th (clamped).
    std::vector<double> bound(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ts = std::clamp(alpha / raw.nodes[i], dt_cut, t_soe);
        bound[i] = raw.weights[i] * std::exp(-raw.nodes[i] * ts) * std::pow(ts, alpha);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return bound[a] < bound[b]; });
    std::vector<bool> drop(n, false);
    double cum = 0.0;
    for (std::size_t idx : order) {
        cum += bound[idx];
        if (cum > eps * 1e-3) break;
        drop[idx] = true;
    }
    RawSoe kept;
    kept.nodes.reserve(n);
    kept.weights.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!drop[i]) {
            kept.nodes.push_back(raw.nodes[i]);
            kept.weights.push_back(raw.weights[i]);
        }
    }
    raw = std::move(kept);
}

}  // namespace

SoeApproximation::SoeApproximation(std::vector<double> nodes, std::vector<double> weights,
                                   double alpha, double tol, double t_min, double t_max)
    : nodes_(std::move(nodes)),
      weights_(std::move(weights)),
      alpha_(alpha),
      tol_(tol),
      t_min_(t_min),
      t_max_(t_max) {
    if (nodes_.size() != weights_.size())
        throw std::invalid_argument("SoeApproximation: node/weight size mismatch");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!(nodes_[i] > 0.0) || !(weights_[i] > 0.0))
            throw std::invalid_argument("SoeApproximation: nodes and weights must be positive");
        if (i > 0 && !(nodes_[i] > nodes_[i - 1]))
            throw std::invalid_argument("SoeApproximation: nodes must be strictly increasing");
    }
}

double SoeApproximation::eval(double t) const {
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double term = weights_[i] * std::exp(-nodes_[i] * t);
        const double y = term - comp;
        const double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    return sum;
}

double SoeApproximation::sampled_max_rel_error(int n_samples) const {
    const double la = std::log(t_min_);
    const double lb = std::log(t_max_);
    double worst = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double t = std::exp(la + (lb - la) * i / (n_samples - 1.0));
        const double exact = std::exp(-alpha_ * std::log(t));
        worst = std::max(worst, std::abs(eval(t) - exact) / exact);
    }
    return worst;
}

SoeApproximation build_soe(double alpha, double eps, double dt_cut, double t_soe) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("build_soe: alpha must lie in (0,1)");
    if (!(dt_cut > 0.0 && dt_cut < t_soe))
        throw std::invalid_argument("build_soe: need 0 < dt_cut < t_soe");
    if (!(eps >= 1e-14 && eps <= 1e-6))
        throw std::invalid_argument("build_soe: eps must lie in [1e-14, 1e-6]");

    int p_leg = std::max(8, static_cast<int>(std::ceil(std::log10(1.0 / eps))) + 6);
    double achieved = 0.0;
    for (int attempt = 0; attempt < 3; ++attempt, p_leg += 6) {
        RawSoe raw = discretize_laplace(alpha, eps, dt_cut, t_soe, p_leg);
        prune(raw, alpha, eps, dt_cut, t_soe);
        SoeApproximation soe(std::move(raw.nodes), std::move(raw.weights), alpha, eps, dt_cut,
                             t_soe);
        achieved = soe.sampled_max_rel_error();
        if (achieved <= eps) return soe;
    }
    throw ToleranceError("build_soe: sampled error " + std::to_string(achieved) +
                             " exceeds eps after raising the panel order twice",
                         achieved);
}

KernelPairJ eval_J_direct(double x) {
    if (!(x > 0.0)) throw std::domain_error("eval_J_direct: x must be positive");
    const double e = std::exp(-x);
    KernelPairJ out;
    out.j1 = 1.0 - e;
    out.j2 = 1.0 - (x * e + e);
    return out;
}

KernelPairJ eval_J_taylor(double x, double delta0) {
    if (!(x > 0.0 && x < 1.0)) throw std::domain_error("eval_J_taylor: x must lie in (0,1)");
    const int n1 = taylor_truncation_count(x, delta0);
    const double e = std::exp(-x);
    double term = 1.0;  // x^m / m!
    double s1 = 0.0, s2 = 0.0;
    for (int m = 1; m <= n1 + 1; ++m) {
        term *= x / m;
        if (m <= n1) s1 += term;
        if (m >= 2) s2 += term;
    }
    KernelPairJ out;
    out.j1 = e * s1;
    out.j2 = e * s2;
    return out;
}

StencilPair fast_coeff_pair(const TimeMesh& mesh, std::size_t k, double node_theta,
                            const Thresholds& thresholds, CoeffMode mode) {
    if (k < 2 || k > mesh.num_steps())
        throw std::out_of_range("fast_coeff_pair: need 2 <= k <= N");
    if (!(node_theta > 0.0))
        throw std::domain_error("fast_coeff_pair: node_theta must be positive");
    const double tau_km1 = mesh.step(k - 1);
    const double tau_k = mesh.step(k);

    if (mode == CoeffMode::GaussKronrod) {
        // Two exact rearrangements keep the integrand evaluable at full
        // relative precision for arbitrarily large nodes: e^(-theta tau_k) is
        // factored out (the raw integrand can sit entirely in denormal range
        // and starve the error estimator), and the local offset v = t_{k-1}-s
        // feeds the exponential directly instead of a difference of global
        // positions (theta * ulp(t) can exceed 1 for the largest nodes).
        // With v: 2s - t_{k-1} - t_k = -(tau_k + 2v).
        const double wa = 1.0 / (tau_km1 * (tau_km1 + tau_k));
        auto fa = [&](double v) {
            return -(tau_k + 2.0 * v) * wa * std::exp(-node_theta * v);
        };
        auto fc = [&](double v) { return std::exp(-node_theta * v) / tau_k; };
        QuadResult qa = adaptive_gk(fa, 0.0, tau_km1, 1e-14, 1e-300, 4000);
        QuadResult qc = adaptive_gk(fc, 0.0, tau_km1, 1e-14, 1e-300, 4000);
        if (!qa.converged || !qc.converged)
            throw ToleranceError("fast_coeff_pair: Gauss-Kronrod budget exhausted",
                                 std::max(qa.err_est, qc.err_est));
        const double pref = std::exp(-node_theta * tau_k);
        return {pref * qa.value, pref * qc.value};
    }

    const double x = node_theta * tau_km1;
    KernelPairJ jp;
    if (mode == CoeffMode::Direct) {
        jp = eval_J_direct(x);
    } else {
        const bool taylor1 = x <= thresholds.theta_f1;
        const bool taylor2 = x <= thresholds.theta_f2;
        if (!taylor1 && !taylor2) {
            jp = eval_J_direct(x);
        } else if (taylor1 && taylor2) {
            jp = eval_J_taylor(x);
        } else {
            const KernelPairJ direct = eval_J_direct(x);
            const KernelPairJ taylor = eval_J_taylor(x);
            jp.j1 = taylor1 ? taylor.j1 : direct.j1;
            jp.j2 = taylor2 ? taylor.j2 : direct.j2;
        }
    }
    const double etk = std::exp(-node_theta * tau_k);
    StencilPair out;
    out.a = -etk * (node_theta * tau_k * jp.j1 + 2.0 * jp.j2) /
            (tau_km1 * (tau_km1 + tau_k) * node_theta * node_theta);
    out.c_tilde = etk * jp.j1 / (node_theta * tau_k);
    return out;
}

void update_history(FastHistoryState& state, const TimeMesh& mesh, std::size_t k,
                    const SoeApproximation& soe, double delta_prev, double delta_curr,
                    const Thresholds& thresholds, CoeffMode mode) {
    if (k < 2 || k > mesh.num_steps())
        throw std::out_of_range("update_history: need 2 <= k <= N");
    if (state.k_current_ != k - 1)
        throw std::logic_error("update_history: state is not at step k-1");
    if (state.h_.size() != soe.count())
        throw std::invalid_argument("update_history: state/SOE node count mismatch");
    const double tau_km1 = mesh.step(k - 1);
    const double tau_k = mesh.step(k);
    const double ratio = tau_km1 / tau_k;
    const auto nodes = soe.nodes();
    for (std::size_t l = 0; l < nodes.size(); ++l) {
        const StencilPair fc = fast_coeff_pair(mesh, k, nodes[l], thresholds, mode);
        const double decay = std::exp(-nodes[l] * tau_k);
        state.h_[l] = decay * state.h_[l] + fc.a * (ratio * delta_curr - delta_prev) +
                      fc.c_tilde * delta_curr;
    }
    state.k_current_ = k;
}

}  // namespace fracstep
