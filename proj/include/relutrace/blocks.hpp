#pragma once

// Constructive elementary builders: squaring, multiplication, polynomials,
// trigonometric functions, decaying exponentials, sinc (Stenger) quadrature
// and reciprocal powers. Every builder is verified-adaptive: internal
// parameters start at the values implied by the governing error bounds and
// escalate until a probe grid certifies the requested accuracy.

#include "relutrace/net.hpp"

#include <functional>

namespace rtr {

struct SincRule {
    int k = 0;
    std::vector<double> nodes;    // t_j, j = -k..k, strictly increasing, > 0
    std::vector<double> weights;  // omega_j in (0, k^-1/2]
};

// Stenger rule for 1/x = int_0^inf exp(-x t) dt:
//   t_j = log(exp(j/sqrt(k)) + sqrt(1 + exp(2j/sqrt(k)))),
//   omega_j = (k + k exp(-2j/sqrt(k)))^{-1/2}.
SincRule sinc_rule(int k);

// Piecewise-linear interpolant of x^2 on [0,1] (dyadic grid 2^-m), width 3,
// all weights bounded by 1, Lipschitz constant <= 2.
ReluNetwork build_square(double eps);

// mu_{D,eps}: |Phi(x,y) - xy| <= eps on (-D,D)^2; width 5, B <= 1.
ReluNetwork build_multiply(double D, double eps);

// Real polynomial sum a_i x^i on (-D,D); width 9, B <= 1 (Horner chain).
ReluNetwork build_polynomial(const std::vector<double>& coeffs, double D, double eps);
// Complex-coefficient variant with two outputs; width 11.
ComplexNet build_polynomial_complex(const std::vector<Complex>& coeffs, double D, double eps);

enum class TrigKind { Cos, Sin };
// cos(a x) or sin(a x) on (-D,D); width 9, B <= 1. Lattice folding onto
// [0,pi] followed by a polynomial core.
ReluNetwork build_trig(TrigKind kind, double a, double D, double eps);

// exp(-a x) on (0,D); width 9, B <= 1. Taylor core + squaring chain.
ReluNetwork build_exp_decay(double a, double D, double eps);

// phi_{D,eps}: 1/x on (1,D); width 13 (sinc combination of decaying
// exponentials, chained with the running sum and input carried as pairs).
ReluNetwork build_reciprocal(double D, double eps);

// psi_{n,D,eps}: x^-n on (1,D); width 13 (one reciprocal, then a power chain
// of multiplications).
ReluNetwork build_reciprocal_power(int n, double D, double eps);

// --- certification helpers (shared by builders, tests and the harness) ----

struct GridError {
    double sup = 0.0;
    double l2 = 0.0;       // discrete L2 with uniform weights
    double at_x = 0.0;     // argmax location
};

GridError measure_error_1d(const std::function<double(double)>& approx,
                           const std::function<double(double)>& exact,
                           double lo, double hi, int npts);

GridError measure_error_1d(const ReluNetwork& net,
                           const std::function<double(double)>& exact,
                           double lo, double hi, int npts);

GridError measure_error_complex(const ComplexNet& net,
                                const std::function<Complex(double)>& exact,
                                double lo, double hi, int npts);

// Batched 1->1 evaluation over a uniform grid (used everywhere in probes).
std::vector<double> eval_on_grid(const ReluNetwork& net, double lo, double hi, int npts);

}  // namespace rtr
