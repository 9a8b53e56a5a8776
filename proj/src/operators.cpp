#include "fracstep/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace fracstep {

namespace {

// Kahan accumulator; the history sums run to N ~ 1e5 terms and are compared
// at the 1e-12 level, where naive summation error already shows.
struct Kahan {
    double sum = 0.0;
    double comp = 0.0;
    void add(double term) {
        const double y = term - comp;
        const double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
};

}  // namespace

CoeffRow compute_coeff_row(const TimeMesh& mesh, std::size_t k, double alpha,
                           const Thresholds& thresholds, CoeffMode mode) {
    if (k < 2 || k > mesh.num_steps())
        throw std::out_of_range("compute_coeff_row: need 2 <= k <= N");
    CoeffRow row;
    row.history.resize(k - 1);
    for (std::size_t j = 1; j <= k - 1; ++j)
        row.history[j - 1] = coeff_pair(mesh, j, k, alpha, thresholds, mode);
    row.last = coeff_last(mesh, k, alpha, mode);
    const StencilPair& prev = row.history[k - 2];
    row.implicit_weight =
        prev.a * (mesh.step(k - 1) / mesh.step(k)) + prev.c_tilde + row.last.c_last;
    return row;
}

double l2_caputo(const SeriesView& series, double alpha, std::size_t k,
                 const Thresholds& thresholds, CoeffMode mode) {
    if (k < 1 || k > series.mesh.num_steps())
        throw std::out_of_range("l2_caputo: need 1 <= k <= N");
    if (series.values.size() < k + 1)
        throw std::out_of_range("l2_caputo: series must hold u^0..u^k");
    const auto u = series.values;
    if (k == 1) {
        const double tau1 = series.mesh.step(1);
        return (u[1] - u[0]) / (gamma_fn(2.0 - alpha) * std::pow(tau1, alpha));
    }
    const CoeffRow row = compute_coeff_row(series.mesh, k, alpha, thresholds, mode);
    Kahan acc;
    for (std::size_t j = 1; j <= k - 1; ++j) {
        const double dj = u[j] - u[j - 1];
        const double djp1 = u[j + 1] - u[j];
        const double ratio = series.mesh.step(j) / series.mesh.step(j + 1);
        const StencilPair& sp = row.history[j - 1];
        acc.add(sp.a * (ratio * djp1 - dj) + sp.c_tilde * djp1);
    }
    acc.add(-row.last.a_last * (u[k - 1] - u[k - 2]));
    acc.add(row.last.c_last * (u[k] - u[k - 1]));
    return acc.sum / gamma_fn(1.0 - alpha);
}

double fast_l2_caputo(FastHistoryState& state, double u_km2, double u_km1, double u_k,
                      const TimeMesh& mesh, double alpha, std::size_t k,
                      const SoeApproximation& soe, const Thresholds& thresholds, CoeffMode mode) {
    if (k < 2) throw std::out_of_range("fast_l2_caputo: k must be >= 2 (use l2_caputo at k=1)");
    const double delta_prev = u_km1 - u_km2;
    const double delta_curr = u_k - u_km1;
    update_history(state, mesh, k, soe, delta_prev, delta_curr, thresholds, mode);
    const auto w = soe.weights();
    const auto h = state.values();
    Kahan acc;
    for (std::size_t l = 0; l < w.size(); ++l) acc.add(w[l] * h[l]);
    const LastPair last = coeff_last(mesh, k, alpha, mode);
    acc.add(-last.a_last * delta_prev);
    acc.add(last.c_last * delta_curr);
    return acc.sum / gamma_fn(1.0 - alpha);
}

}  // namespace fracstep
