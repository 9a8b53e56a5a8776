#include "fracstep/oracle.hpp"

#include <stdexcept>

namespace fracstep::oracle {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::domain_error(msg);
}

}  // namespace

double oracle_eval(Expr expr, const Params& p) {
    using W = Wide50;
    switch (expr) {
        case Expr::I1:
            require(p.theta > 0 && p.theta < 1 && p.d > 0 && p.alpha > 0 && p.alpha < 1,
                    "oracle_eval(I1): need 0<theta<1, d>0, 0<alpha<1");
            return static_cast<double>(i1<W>(W(p.theta), W(p.d), W(p.alpha)));
        case Expr::I2:
            require(p.theta > 0 && p.theta < 1 && p.d > 0 && p.alpha > 0 && p.alpha < 1,
                    "oracle_eval(I2): need 0<theta<1, d>0, 0<alpha<1");
            return static_cast<double>(i2<W>(W(p.theta), W(p.d), W(p.alpha)));
        case Expr::J1:
            require(p.x > 0, "oracle_eval(J1): need x>0");
            return static_cast<double>(j1<W>(W(p.x)));
        case Expr::J2:
            require(p.x > 0, "oracle_eval(J2): need x>0");
            return static_cast<double>(j2<W>(W(p.x)));
        case Expr::StencilA:
            require(p.tau_j > 0 && p.tau_jp1 > 0 && p.d > p.tau_j && p.alpha > 0 && p.alpha < 1,
                    "oracle_eval(StencilA): need 0<tau_j<d, tau_jp1>0, 0<alpha<1");
            return static_cast<double>(
                stencil_a<W>(W(p.tau_j), W(p.tau_jp1), W(p.d), W(p.alpha)));
        case Expr::StencilCTilde:
            require(p.tau_j > 0 && p.tau_jp1 > 0 && p.d > p.tau_j && p.alpha > 0 && p.alpha < 1,
                    "oracle_eval(StencilCTilde): need 0<tau_j<d, tau_jp1>0, 0<alpha<1");
            return static_cast<double>(
                stencil_c_tilde<W>(W(p.tau_j), W(p.tau_jp1), W(p.d), W(p.alpha)));
        case Expr::LastA:
            require(p.tau_km1 > 0 && p.tau_k > 0 && p.alpha > 0 && p.alpha < 1,
                    "oracle_eval(LastA): need positive steps, 0<alpha<1");
            return static_cast<double>(last_a<W>(W(p.tau_km1), W(p.tau_k), W(p.alpha)));
        case Expr::LastC:
            require(p.tau_km1 > 0 && p.tau_k > 0 && p.alpha > 0 && p.alpha < 1,
                    "oracle_eval(LastC): need positive steps, 0<alpha<1");
            return static_cast<double>(last_c<W>(W(p.tau_km1), W(p.tau_k), W(p.alpha)));
        case Expr::FastA:
            require(p.node > 0 && p.tau_km1 > 0 && p.tau_k > 0,
                    "oracle_eval(FastA): need positive node and steps");
            return static_cast<double>(fast_a<W>(W(p.node), W(p.tau_km1), W(p.tau_k)));
        case Expr::FastCTilde:
            require(p.node > 0 && p.tau_km1 > 0 && p.tau_k > 0,
                    "oracle_eval(FastCTilde): need positive node and steps");
            return static_cast<double>(fast_c_tilde<W>(W(p.node), W(p.tau_km1), W(p.tau_k)));
    }
    throw std::domain_error("oracle_eval: unknown expression");
}

}  // namespace fracstep::oracle
