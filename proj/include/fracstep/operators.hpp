#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fracstep/l2core.hpp"
#include "fracstep/mesh.hpp"
#include "fracstep/soefast.hpp"

namespace fracstep {

/// Scalar time series u^0..u^k tied to its mesh.
struct SeriesView {
    std::span<const double> values;
    const TimeMesh& mesh;
};

/// One row of L2 coefficients at step k >= 2: the history pairs for
/// j = 1..k-1 plus the current-panel pair. Shared between the scalar
/// operators and the PDE solver so both apply the identical row.
struct CoeffRow {
    std::vector<StencilPair> history;  // index j-1
    LastPair last;

    /// Weight of delta_k u once the j = k-1 panel's contribution is folded in:
    /// a_{k-1} tau_{k-1}/tau_k + c~_{k-1} + c_k. This (divided by Gamma(1-a))
    /// is the implicit shift of the time step.
    double implicit_weight = 0.0;
};

CoeffRow compute_coeff_row(const TimeMesh& mesh, std::size_t k, double alpha,
                           const Thresholds& thresholds, CoeffMode mode);

/// Standard L2 discrete Caputo derivative at t_k.
///   k = 1:  (u^1 - u^0) / (Gamma(2-a) tau_1^a)
///   k >= 2: 1/Gamma(1-a) [ sum_j (a_j (tau_j/tau_{j+1} d_{j+1}u - d_j u)
///           + c~_j d_{j+1}u) - a_k d_{k-1}u + c_k d_k u ]
/// The history sum runs over ascending j with compensated accumulation.
double l2_caputo(const SeriesView& series, double alpha, std::size_t k,
                 const Thresholds& thresholds, CoeffMode mode);

/// Fast (SOE) L2 discrete Caputo derivative at t_k, k >= 2. Advances `state`
/// from k-1 to k and returns
///   1/Gamma(1-a) [ sum_l w^l H^l(t_k) - a_k d_{k-1}u + c_k d_k u ].
/// u_km2, u_km1, u_k are the series tail u^{k-2}, u^{k-1}, u^k.
/// The k = 1 value coincides with l2_caputo at k = 1.
double fast_l2_caputo(FastHistoryState& state, double u_km2, double u_km1, double u_k,
                      const TimeMesh& mesh, double alpha, std::size_t k,
                      const SoeApproximation& soe, const Thresholds& thresholds, CoeffMode mode);

}  // namespace fracstep
