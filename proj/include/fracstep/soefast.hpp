#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fracstep/cancellation.hpp"
#include "fracstep/errors.hpp"
#include "fracstep/l2core.hpp"
#include "fracstep/mesh.hpp"

namespace fracstep {

/// Sum-of-exponentials approximation of the power kernel:
///   t^(-alpha) ~= sum_l weights[l] * exp(-nodes[l] * t),  t in [t_min, t_max],
/// with sampled relative error at most tol on that window.
class SoeApproximation {
public:
    SoeApproximation(std::vector<double> nodes, std::vector<double> weights, double alpha,
                     double tol, double t_min, double t_max);

    std::size_t count() const noexcept { return nodes_.size(); }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }
    double alpha() const noexcept { return alpha_; }
    double tol() const noexcept { return tol_; }
    double t_min() const noexcept { return t_min_; }
    double t_max() const noexcept { return t_max_; }

    /// Compensated evaluation of the exponential sum at t.
    double eval(double t) const;

    /// Max of |eval(t) - t^(-alpha)| / t^(-alpha) over a log grid of n_samples
    /// points spanning the validity window.
    double sampled_max_rel_error(int n_samples = 1000) const;

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
    double alpha_, tol_, t_min_, t_max_;
};

/// Builds the SOE approximation on [dt_cut, t_soe] by discretizing
///   t^(-alpha) = 1/Gamma(alpha) * int_0^inf exp(-t s) s^(alpha-1) ds
/// with a Gauss-Jacobi head on [0, s0] (weight s^(alpha-1)) and composite
/// Gauss-Legendre on dyadic panels up to the tail cutoff, then pruning nodes
/// whose worst-case relative contribution is negligible. The sampled error is
/// verified; if it misses eps the order is raised once before giving up with
/// a ToleranceError.
///
/// Requires 0 < alpha < 1, 0 < dt_cut < t_soe, and eps in [1e-14, 1e-6].
SoeApproximation build_soe(double alpha, double eps, double dt_cut, double t_soe);

/// Kernel pair of the fast scheme at x = theta^l * tau_{k-1}:
///   J1 = 1 - e^(-x),   J2 = 1 - x e^(-x) - e^(-x).
struct KernelPairJ {
    double j1 = 0.0;
    double j2 = 0.0;
};

/// Direct evaluation; cancellation-prone for tiny x.
KernelPairJ eval_J_direct(double x);

/// Truncated Taylor evaluation, N_i = ceil(log_x delta0) terms of the
/// all-positive series e^(-x) sum x^m/m!. Requires 0 < x < 1.
KernelPairJ eval_J_taylor(double x, double delta0 = kMachineDelta0);

/// Fast-scheme coefficient pair (a^{k,l}_{k-1}, c~^{k,l}_{k-1}) for one SOE
/// node. TCTE evaluates J1 by Taylor iff theta^l*tau_{k-1} <= theta_f1 and J2
/// iff <= theta_f2; GaussKronrod integrates the exponential integrals.
StencilPair fast_coeff_pair(const TimeMesh& mesh, std::size_t k, double node_theta,
                            const Thresholds& thresholds, CoeffMode mode);

/// Per-node history accumulators H^l(t_k) of the fast scheme.
/// H^l(t_1) = 0; advancing to step k requires the state to sit at k-1.
class FastHistoryState {
public:
    explicit FastHistoryState(std::size_t n_nodes) : h_(n_nodes, 0.0), k_current_(1) {}

    std::span<const double> values() const noexcept { return h_; }
    std::size_t current_index() const noexcept { return k_current_; }
    std::size_t node_count() const noexcept { return h_.size(); }

    friend void update_history(FastHistoryState& state, const TimeMesh& mesh, std::size_t k,
                               const SoeApproximation& soe, double delta_prev, double delta_curr,
                               const Thresholds& thresholds, CoeffMode mode);

private:
    std::vector<double> h_;
    std::size_t k_current_;
};

/// Advances the history recurrence from t_{k-1} to t_k:
///   H^l(t_k) = e^(-theta^l tau_k) H^l(t_{k-1})
///            + a^{k,l}_{k-1} (tau_{k-1}/tau_k * delta_curr - delta_prev)
///            + c~^{k,l}_{k-1} delta_curr
/// where delta_prev = u^{k-1} - u^{k-2} and delta_curr = u^k - u^{k-1}.
/// Throws std::logic_error on an out-of-order update.
void update_history(FastHistoryState& state, const TimeMesh& mesh, std::size_t k,
                    const SoeApproximation& soe, double delta_prev, double delta_curr,
                    const Thresholds& thresholds, CoeffMode mode);

}  // namespace fracstep
