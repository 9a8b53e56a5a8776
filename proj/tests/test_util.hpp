#pragma once

#include <cmath>
#include <random>

#include "fracstep/mesh.hpp"

namespace testutil {

inline double rel_err(double value, double reference) {
    return std::abs(value - reference) / std::abs(reference);
}

/// Random graded mesh: N in [n_min, n_max], r in [1, r_max], T in [t_min, t_max].
inline fracstep::TimeMesh random_graded_mesh(std::mt19937_64& rng, std::size_t n_min = 20,
                                             std::size_t n_max = 400, double r_max = 4.0,
                                             double t_min = 0.5, double t_max = 10.0) {
    std::uniform_int_distribution<std::size_t> nd(n_min, n_max);
    std::uniform_real_distribution<double> rd(1.0, r_max);
    std::uniform_real_distribution<double> td(t_min, t_max);
    return fracstep::build_graded_mesh(nd(rng), rd(rng), td(rng));
}

}  // namespace testutil
