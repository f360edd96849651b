#pragma once

// Chebyshev machinery: coefficients of smooth functions, truncation-index
// selection, Chebyshev-sum networks via the three-term recurrence, and the
// smooth-class emulator on [-D, D].

#include "relutrace/blocks.hpp"
#include "relutrace/net.hpp"

#include <functional>
#include <stdexcept>

namespace rtr {

// Thrown when a verified-adaptive build exhausts its escalation cap.
struct BuildError : std::runtime_error {
    double achieved;
    explicit BuildError(const std::string& what, double err)
        : std::runtime_error(what), achieved(err) {}
};

// Coefficients in the halved-first-term convention: the represented function
// is sum' a_k T_k(x / D).
struct ChebSeries {
    std::vector<Complex> coeffs;
    double domain_halfwidth = 1.0;
};

struct SmoothClass {
    std::vector<double> lambda;  // derivative-bound prefix lambda_0..lambda_K
    double D = 1.0;
    bool complex_valued = true;
};

// Clenshaw evaluation of the series (reference path for certification).
Complex clenshaw(const ChebSeries& s, double x);

// a_k(f) by Gauss-Chebyshev summation at >= 4(n+1) first-kind points.
ChebSeries cheb_coeffs(const std::function<Complex(double)>& f, int n, double D);

// n_k = max{k+2, ceil((2 C~_k lambda_{k+1} / eps)^{1/(k-1)})} with
// C~_k = 4^{k+1} * 6 (3e)^k / (1+k). Requires lambda up to order k+1.
long long truncation_index(const SmoothClass& cls, int k, double eps);

// Approximate Chebyshev polynomial T_n on [-1,1] built through the three-term
// recurrence with multiplication networks of accuracy zeta
// (|Phi - T_n| <= zeta 4^n).
ReluNetwork build_chebyshev_T(int n, double zeta);

// Networks for sum' a_k T_k(x/D); real width 13, complex width 15,
// weights bounded by max{2, max|a_k|}.
ReluNetwork build_cheb_sum(const ChebSeries& s, double eps);      // requires real coefficients
ComplexNet build_cheb_sum_complex(const ChebSeries& s, double eps);

struct SmoothEmulatorReport {
    int terms_used = 0;          // adaptive truncation order
    long long formula_terms = 0; // Jackson-bound index n_k when lambda allows it
    double coeff_tail = 0.0;
    double achieved = 0.0;       // certified sup error on the probe grid
};

// Smooth-class emulator on (-D, D): Chebyshev truncation chosen adaptively
// (tail + probe certification), then a Chebyshev-sum network; throws
// BuildError with the achieved error if certification fails at the cap.
ComplexNet build_smooth_emulator(const std::function<Complex(double)>& f,
                                 const SmoothClass& cls, int k, double eps,
                                 SmoothEmulatorReport* report = nullptr);
ReluNetwork build_smooth_emulator_real(const std::function<double(double)>& f,
                                       const SmoothClass& cls, int k, double eps,
                                       SmoothEmulatorReport* report = nullptr);

}  // namespace rtr
