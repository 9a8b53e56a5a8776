#pragma once

#include <cmath>

namespace fracstep {

/// Machine relative error of IEEE binary64.
inline constexpr double kMachineDelta0 = 2.220446049250313080847263336181640625e-16;  // 2^-52

/// Machine error delta0 together with the cancellation tolerance delta.
struct MachineParams {
    double delta0 = kMachineDelta0;
    double delta = 0.0;  // must satisfy delta > 12*delta0
};

/// Ratio thresholds below which the direct kernel subtractions may lose more
/// than delta in relative accuracy. s* guard the standard-scheme kernels
/// I1/I2 (against tau_j/(t_k - t_{j-1})), f* the fast-scheme kernels J1/J2
/// (against theta^l * tau_{k-1}).
struct Thresholds {
    double theta_s1 = 0.0;
    double theta_s2 = 0.0;
    double theta_f1 = 0.0;
    double theta_f2 = 0.0;

    /// Experimental defaults: 1e-4 for the first-order kernels, 1e-2 for the
    /// second-order ones.
    static Thresholds defaults() noexcept { return {1e-4, 1e-2, 1e-4, 1e-2}; }

    /// All-zero thresholds: every kernel is evaluated directly.
    static Thresholds zeros() noexcept { return {0.0, 0.0, 0.0, 0.0}; }
};

/// Thresholds derived from a cancellation tolerance delta:
///   theta_s1 = 2*d0/((1-alpha)*delta)        theta_s2 = sqrt(6*d0/((1-alpha)*delta))
///   theta_f1 = 4*d0/delta                    theta_f2 = sqrt(12*d0/delta)
/// Throws std::invalid_argument unless 0 < alpha < 1 and delta > 12*delta0.
Thresholds thresholds_from_delta(double alpha, const MachineParams& machine);

/// True iff |((x_approx - y_approx) - (x - y)) / (x - y)| >= delta, evaluated
/// in extended precision. Throws std::domain_error when x == y.
bool is_delta_cancellation(double x, double y, double x_approx, double y_approx, double delta);

}  // namespace fracstep
