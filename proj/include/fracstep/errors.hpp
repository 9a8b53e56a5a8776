#pragma once

#include <stdexcept>
#include <string>

namespace fracstep {

/// An approximation target could not be met within its budget; `achieved`
/// carries the error estimate actually reached.
struct ToleranceError : std::runtime_error {
    ToleranceError(const std::string& what, double achieved_)
        : std::runtime_error(what), achieved(achieved_) {}
    double achieved;
};

}  // namespace fracstep
