#include "fracstep/cancellation.hpp"

#include <cmath>
#include <stdexcept>

#include "fracstep/oracle.hpp"

namespace fracstep {

Thresholds thresholds_from_delta(double alpha, const MachineParams& machine) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("thresholds_from_delta: alpha must lie in (0,1)");
    if (!(machine.delta > 12.0 * machine.delta0))
        throw std::invalid_argument("thresholds_from_delta: delta must exceed 12*delta0");
    const double d0 = machine.delta0;
    const double d = machine.delta;
    Thresholds t;
    t.theta_s1 = 2.0 * d0 / ((1.0 - alpha) * d);
    t.theta_s2 = std::sqrt(6.0 * d0 / ((1.0 - alpha) * d));
    t.theta_f1 = 4.0 * d0 / d;
    t.theta_f2 = std::sqrt(12.0 * d0 / d);
    return t;
}

bool is_delta_cancellation(double x, double y, double x_approx, double y_approx, double delta) {
    if (x == y)
        throw std::domain_error("is_delta_cancellation: relative error undefined for x == y");
    using oracle::Wide80;
    const Wide80 rel = oracle::subtraction_rel_error<Wide80>(x, y, x_approx, y_approx);
    return rel >= Wide80(delta);
}

}  // namespace fracstep
