#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace fracstep {

/// Nonuniform time mesh 0 = t_0 < t_1 < ... < t_N = T.
///
/// Steps tau_j = t_j - t_{j-1} are computed once at construction and stored,
/// so every coefficient formula sees the identical floating value of tau_j.
class TimeMesh {
public:
    /// Validates and takes ownership of the node sequence.
    /// Requires nodes[0] == 0 and strictly increasing nodes.
    static TimeMesh from_nodes(std::vector<double> nodes);

    /// Number of steps N (mesh has N+1 nodes).
    std::size_t num_steps() const noexcept { return steps_.size(); }

    /// Node t_j, 0 <= j <= N.
    double t(std::size_t j) const { return nodes_.at(j); }

    /// Step tau_j = t_j - t_{j-1}, 1 <= j <= N.
    double step(std::size_t j) const { return steps_.at(j - 1); }

    double horizon() const noexcept { return nodes_.back(); }

    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> steps() const noexcept { return steps_; }

    /// One-column CSV with header `t`.
    void save_csv(std::ostream& out) const;
    static TimeMesh load_csv(std::istream& in);

private:
    explicit TimeMesh(std::vector<double> nodes);

    std::vector<double> nodes_;
    std::vector<double> steps_;
};

/// Graded mesh t_j = (j/N)^r * T. Powers go through exp(r*log(j/N)) so t_1
/// keeps full relative accuracy even when it underflows toward 1e-18; r == 1
/// falls back to the plain uniform formula.
TimeMesh build_graded_mesh(std::size_t n_steps, double grading, double horizon);

/// theta = tau_j / (t_k - t_{j-1}), the step-to-distance ratio driving the
/// cancellation analysis. Requires 1 <= j <= k-1 <= N-1; result is in (0,1).
double ratio_theta(const TimeMesh& mesh, std::size_t j, std::size_t k);

}  // namespace fracstep
