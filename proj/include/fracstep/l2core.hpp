#pragma once

#include <cstddef>

#include "fracstep/cancellation.hpp"
#include "fracstep/mesh.hpp"

namespace fracstep {

/// Strategy for evaluating the kernel subtractions inside the L2 coefficients.
enum class CoeffMode { Direct, TCTE, GaussKronrod };

/// Kernel pair of the standard scheme:
///   I1 = d^(1-a) [1 - (1-theta)^(1-a)]
///   I2 = d^(2-a) [(2-a)theta + (1-theta)^(2-a) - 1]
struct KernelPairI {
    double i1 = 0.0;
    double i2 = 0.0;
};

/// History-panel coefficient pair (a_j^{(k)}, c~_j^{(k)}), 1 <= j <= k-1.
/// a < 0 < c_tilde whenever the kernels are evaluated accurately.
struct StencilPair {
    double a = 0.0;
    double c_tilde = 0.0;
};

/// Current-panel pair (a_k^{(k)}, c_k^{(k)}); both strictly positive.
struct LastPair {
    double a_last = 0.0;
    double c_last = 0.0;
};

/// Gamma(x) with relative error below 1e-14 for the arguments used here
/// (x in (0,3), never a pole).
double gamma_fn(double x);

/// Generalized binomial coefficient binom(beta, m) by the multiplicative
/// recurrence; exact in the leading digits for m up to ~60.
double binom_general(double beta, unsigned m);

/// Truncation number ceil(log_ratio delta0), i.e. the smallest M with
/// ratio^M <= delta0. Requires 0 < ratio < 1; throws std::domain_error if the
/// result would exceed 200 (cannot happen for ratio <= 0.1).
int taylor_truncation_count(double ratio, double delta0 = kMachineDelta0);

/// Direct evaluation of the kernel pair; cancellation-prone for tiny theta.
KernelPairI eval_I_direct(double theta, double d, double alpha);

/// Truncated Taylor evaluation with M_i = ceil(log_theta delta0) terms; every
/// summand has one sign, so the relative deviation from the exact kernels is
/// below theta^(M_i) <= delta0.
KernelPairI eval_I_taylor(double theta, double d, double alpha, double delta0 = kMachineDelta0);

/// (a_j^{(k)}, c~_j^{(k)}) for 1 <= j <= k-1 <= N-1.
///
/// Direct always uses eval_I_direct. TCTE switches I1 to the Taylor path when
/// theta <= theta_s1 and I2 when theta <= theta_s2, with
/// theta = tau_j/(t_k - t_j + tau_j). GaussKronrod integrates the defining
/// integrals adaptively (rtol 1e-14) and throws QuadratureError when the
/// panel budget is exhausted.
StencilPair coeff_pair(const TimeMesh& mesh, std::size_t j, std::size_t k, double alpha,
                       const Thresholds& thresholds, CoeffMode mode);

/// (a_k^{(k)}, c_k^{(k)}) for 2 <= k <= N. All terms positive, so the closed
/// form needs no threshold/Taylor branch; GaussKronrod mode integrates the
/// (endpoint-singular) defining integrals instead.
LastPair coeff_last(const TimeMesh& mesh, std::size_t k, double alpha,
                    CoeffMode mode = CoeffMode::TCTE);

}  // namespace fracstep
