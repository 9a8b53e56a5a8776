#pragma once

#include <limits>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace fracstep::oracle {

/// Software wide floats for reference evaluations; results are rounded to
/// double exactly once, at the very end.
using Wide50 = boost::multiprecision::cpp_bin_float_50;
using Wide80 = boost::multiprecision::number<
    boost::multiprecision::backends::cpp_bin_float<80>>;

// Closed forms from the kernel reformulation, evaluated in wide arithmetic.
// theta = tau_j/(t_k - t_{j-1}), d = t_k - t_{j-1}, x = theta^l*tau_{k-1}.
//
// The closed forms themselves cancel for small arguments (losing |log10 arg|
// or twice that many digits even in wide floats), so below 0.05 the kernels
// switch to their series summed to full working precision. The series are
// convergent expansions of the exact values, not the double-precision
// truncated-Taylor production path.

namespace detail {

template <class W>
W i1_series(const W& theta, const W& d, const W& alpha) {
    using std::pow;
    const W eps = std::numeric_limits<W>::epsilon();
    W sum(0), coeff(1), power(1);
    for (int m = 1; m < 100000; ++m) {
        coeff *= (W(1) - alpha - (m - 1)) / m;
        power *= -theta;
        const W term = coeff * power;  // every term negative
        sum += term;
        if (abs(term) < eps * abs(sum)) break;
    }
    return -pow(d, 1 - alpha) * sum;
}

template <class W>
W i2_series(const W& theta, const W& d, const W& alpha) {
    using std::pow;
    const W eps = std::numeric_limits<W>::epsilon();
    W sum(0), coeff(1), power(1);
    for (int m = 1; m < 100000; ++m) {
        coeff *= (W(2) - alpha - (m - 1)) / m;
        power *= -theta;
        if (m < 2) continue;
        const W term = coeff * power;  // every term positive
        sum += term;
        if (abs(term) < eps * abs(sum)) break;
    }
    return pow(d, 2 - alpha) * sum;
}

template <class W>
W j1_series(const W& x) {
    using std::exp;
    const W eps = std::numeric_limits<W>::epsilon();
    W sum(0), term(1);
    for (int m = 1; m < 100000; ++m) {
        term *= x / m;
        sum += term;
        if (term < eps * sum) break;
    }
    return exp(-x) * sum;
}

template <class W>
W j2_series(const W& x) {
    using std::exp;
    const W eps = std::numeric_limits<W>::epsilon();
    W sum(0), term(1);
    for (int m = 1; m < 100000; ++m) {
        term *= x / m;
        if (m < 2) continue;
        sum += term;
        if (term < eps * sum) break;
    }
    return exp(-x) * sum;
}

}  // namespace detail

template <class W>
W i1(const W& theta, const W& d, const W& alpha) {
    using std::pow;
    if (theta < W(0.05)) return detail::i1_series(theta, d, alpha);
    return pow(d, 1 - alpha) * (1 - pow(1 - theta, 1 - alpha));
}

template <class W>
W i2(const W& theta, const W& d, const W& alpha) {
    using std::pow;
    if (theta < W(0.05)) return detail::i2_series(theta, d, alpha);
    return pow(d, 2 - alpha) * ((2 - alpha) * theta + pow(1 - theta, 2 - alpha) - 1);
}

template <class W>
W j1(const W& x) {
    using std::exp;
    if (x < W(0.05)) return detail::j1_series(x);
    return 1 - exp(-x);
}

template <class W>
W j2(const W& x) {
    using std::exp;
    if (x < W(0.05)) return detail::j2_series(x);
    return 1 - x * exp(-x) - exp(-x);
}

template <class W>
W stencil_a(const W& tau_j, const W& tau_jp1, const W& d, const W& alpha) {
    const W theta = tau_j / d;
    return -((2 - alpha) * tau_jp1 * i1(theta, d, alpha) + 2 * i2(theta, d, alpha)) /
           ((2 - alpha) * (1 - alpha) * tau_j * (tau_j + tau_jp1));
}

template <class W>
W stencil_c_tilde(const W& tau_j, const W& tau_jp1, const W& d, const W& alpha) {
    const W theta = tau_j / d;
    return i1(theta, d, alpha) / ((1 - alpha) * tau_jp1);
}

template <class W>
W last_a(const W& tau_km1, const W& tau_k, const W& alpha) {
    using std::pow;
    return alpha * tau_k * tau_k /
           ((2 - alpha) * (1 - alpha) * tau_km1 * (tau_km1 + tau_k) * pow(tau_k, alpha));
}

template <class W>
W last_c(const W& tau_km1, const W& tau_k, const W& alpha) {
    using std::pow;
    return 1 / ((1 - alpha) * pow(tau_k, alpha)) +
           alpha * tau_k / ((2 - alpha) * (1 - alpha) * (tau_km1 + tau_k) * pow(tau_k, alpha));
}

template <class W>
W fast_a(const W& node, const W& tau_km1, const W& tau_k) {
    using std::exp;
    const W x = node * tau_km1;
    return -exp(-node * tau_k) * (node * tau_k * j1(x) + 2 * j2(x)) /
           (tau_km1 * (tau_km1 + tau_k) * node * node);
}

template <class W>
W fast_c_tilde(const W& node, const W& tau_km1, const W& tau_k) {
    using std::exp;
    return exp(-node * tau_k) * j1(node * tau_km1) / (node * tau_k);
}

/// Relative error |((xa - ya) - (x - y)) / (x - y)| of an approximate
/// subtraction, in wide arithmetic.
template <class W>
W subtraction_rel_error(const W& x, const W& y, const W& xa, const W& ya) {
    using std::abs;
    return abs(((xa - ya) - (x - y)) / (x - y));
}

// 50-digit evaluations rounded once to double.

enum class Expr { I1, I2, J1, J2, StencilA, StencilCTilde, LastA, LastC, FastA, FastCTilde };

struct Params {
    double alpha = 0.0;
    double theta = 0.0;   // I1/I2
    double d = 0.0;       // I1/I2, StencilA/CTilde (d = t_k - t_{j-1})
    double x = 0.0;       // J1/J2
    double tau_j = 0.0;   // stencil pair
    double tau_jp1 = 0.0;
    double tau_km1 = 0.0;  // last pair, fast pair
    double tau_k = 0.0;
    double node = 0.0;     // fast pair theta^l
};

/// Evaluates the requested closed form with 50 significant decimal digits.
/// Throws std::domain_error outside the mathematical domain.
double oracle_eval(Expr expr, const Params& p);

}  // namespace fracstep::oracle
